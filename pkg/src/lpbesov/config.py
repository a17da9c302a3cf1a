"""Experiment configuration: TOML file -> validated ExperimentConfig.

Grammar (all keys optional except ``suites`` and a group)::

    seed = 0                        # unsigned 64-bit; default 0
    output_dir = "reports"
    suites = ["growth", "lp-check"]

    [[groups]]                      # or a single [group] table
    family = "torus"                # torus | heisenberg
    N = 64
    dim = 1                         # torus only

    [method]
    name = "auto"                   # auto | exact | chebyshev
    tolerance = 1e-8
    max_degree = 2000

    [ensemble]
    size = 100
    structured = true

    [[besov]]                       # one table per parameter set
    s = 1.0
    p = 2                           # numbers, or "inf"
    q = 2
    m = 2

    [sweeps]
    t = [0.0625, 0.25, 1.0]         # kernel-estimate scales
    alpha = [0, 1, 2]
    I = [[], [1]]                   # 1-based generator multi-indices
    p = [1, 2, "inf"]
    lp_p = [1.5, 2, 4]
    gaussian_t = [0.25, 1, 4, 16]
    wave_s = [1, 2, 4]
    multipliers = ["psi", "heat"]
    n = [2, 4]                      # extra multiplier orders (the automatic one always runs)
    bernstein = [{I = [1], sigma = 0, p = 1, q = 2}]
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

from .besov import BesovParams
from .group_lattice import FAMILIES, GroupSpec

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SUITES = ("growth", "lp-check", "besov-compare", "bernstein", "kernel-estimates", "heat-bounds")

SUITE_HELP = {
    "growth": "word metric, ball volumes, growth exponents and doubling constant",
    "lp-check": "telescoping identity, decomposition reconstruction, square-function ratios",
    "besov-compare": "dyadic vs heat-kernel Besov norm ratios",
    "bernstein": "Bernstein ratios across dyadic scales",
    "kernel-estimates": "weighted kernel norms, uniform block l1 bound, Chebyshev check, wave decay",
    "heat-bounds": "heat kernel mass, positivity, semigroup law and Gaussian fits",
}

DEFAULT_SWEEPS = {
    "t": [1 / 16, 1 / 4, 1.0, 4.0],
    "alpha": [0, 1, 2],
    "I": [[], [1]],
    "p": [1, 2, "inf"],
    "lp_p": [1.5, 2, 4],
    "gaussian_t": [0.25, 1, 4, 16],
    "wave_s": [1, 2, 4],
    "multipliers": ["psi", "heat"],
    "n": [],
    "bernstein": [
        {"I": [1], "sigma": 0, "p": 1, "q": 2},
        {"I": [], "sigma": 1, "p": 2, "q": 2},
        {"I": [], "sigma": -1, "p": 2, "q": 2},
        {"I": [1], "sigma": 0, "p": 2, "q": "inf"},
    ],
}


class ConfigError(ValueError):
    def __init__(self, diagnostics):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class Diagnostic:
    path: str
    message: str
    level: str = "error"  # error | info

    def __str__(self):
        return f"{self.level}: {self.path}: {self.message}"


@dataclass
class ExperimentConfig:
    groups: list[GroupSpec]
    suites: list[str]
    seed: int = 0
    output_dir: str = "reports"
    method: str = "auto"
    tolerance: float = 1e-8
    max_degree: int = 2000
    ensemble_size: int = 100
    structured: bool = True
    besov: list[BesovParams] = field(default_factory=list)
    sweeps: dict = field(default_factory=lambda: dict(DEFAULT_SWEEPS))
    notes: list[str] = field(default_factory=list)


def parse_exponent(v):
    if isinstance(v, str) and v.strip().lower() in ("inf", "infinity"):
        return math.inf
    return float(v)


def load_raw(path) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def validate(raw: dict) -> list[Diagnostic]:
    """All invariant violations with field paths; no errors means runnable."""
    diags = []
    err = lambda path, msg: diags.append(Diagnostic(path, msg))

    if "seed" not in raw:
        diags.append(Diagnostic("seed", "missing seed; defaulting to 0", "info"))
    else:
        s = raw["seed"]
        if not _is_int(s) or not (0 <= s < 2**64):
            err("seed", f"seed must be an unsigned 64-bit integer, got {s!r}")

    suites = raw.get("suites")
    if not isinstance(suites, list) or not suites:
        err("suites", "suites must be a non-empty list")
        suites = []
    for i, name in enumerate(suites):
        if name not in SUITES:
            err(f"suites[{i}]", f"unknown suite {name!r}; known: {', '.join(SUITES)}")

    groups = raw.get("groups", [raw["group"]] if "group" in raw else None)
    if not groups:
        err("groups", "at least one group is required")
        groups = []
    for i, g in enumerate(groups):
        path = f"groups[{i}]"
        if not isinstance(g, dict):
            err(path, "group must be a table")
            continue
        fam = g.get("family")
        if fam not in FAMILIES:
            err(f"{path}.family", f"family must be one of {FAMILIES}, got {fam!r}")
        N = g.get("N")
        if not _is_int(N) or N < 2:
            err(f"{path}.N", f"modulus N must be an integer >= 2, got {N!r}")
        if fam == "torus":
            d = g.get("dim", 1)
            if not _is_int(d) or d < 1:
                err(f"{path}.dim", f"torus dimension must be a positive integer, got {d!r}")

    method = raw.get("method", {})
    if method.get("name", "auto") not in ("auto", "exact", "chebyshev"):
        err("method.name", f"unknown method {method.get('name')!r}")
    tol = method.get("tolerance", 1e-8)
    if not isinstance(tol, (int, float)) or not tol > 0:
        err("method.tolerance", "tolerance must be positive")
    md = method.get("max_degree", 2000)
    if not _is_int(md) or md < 1:
        err("method.max_degree", "max_degree must be a positive integer")

    ens = raw.get("ensemble", {})
    size = ens.get("size", 100)
    if not _is_int(size) or size < 1:
        err("ensemble.size", "ensemble size must be a positive integer")

    besov = raw.get("besov", [])
    if "besov-compare" in suites and not besov:
        err("besov", "besov-compare needs at least one [[besov]] parameter set")
    for i, b in enumerate(besov):
        path = f"besov[{i}]"
        try:
            prm = BesovParams(float(b["s"]), parse_exponent(b["p"]), parse_exponent(b["q"]),
                              float(b["m"]))
        except (KeyError, TypeError, ValueError) as exc:
            err(path, f"needs numeric s, p, q, m ({exc})")
            continue
        for msg in prm.problems():
            err(path, msg)

    sweeps = raw.get("sweeps", {})
    for key, val in sweeps.items():
        if key not in DEFAULT_SWEEPS:
            err(f"sweeps.{key}", "unknown sweep")
        elif not isinstance(val, list) or (not val and key not in ("I", "n")):
            err(f"sweeps.{key}", "sweep must be a non-empty list")
    for i, row in enumerate(sweeps.get("bernstein", [])):
        path = f"sweeps.bernstein[{i}]"
        try:
            p, q = parse_exponent(row["p"]), parse_exponent(row["q"])
            sigma = float(row.get("sigma", 0))
        except (KeyError, TypeError, ValueError):
            err(path, "needs p, q and optional I, sigma")
            continue
        if p > q:
            err(path, "Bernstein ratios need p <= q")
    return diags


def from_raw(raw: dict) -> ExperimentConfig:
    diags = validate(raw)
    errors = [d for d in diags if d.level == "error"]
    if errors:
        raise ConfigError(errors)
    groups = raw.get("groups", [raw.get("group")])
    method = raw.get("method", {})
    ens = raw.get("ensemble", {})
    sweeps = dict(DEFAULT_SWEEPS)
    sweeps.update(raw.get("sweeps", {}))
    return ExperimentConfig(
        groups=[GroupSpec(g["family"], int(g["N"]), int(g.get("dim", 1))) for g in groups],
        suites=list(raw["suites"]),
        seed=int(raw.get("seed", 0)),
        output_dir=str(raw.get("output_dir", "reports")),
        method=method.get("name", "auto"),
        tolerance=float(method.get("tolerance", 1e-8)),
        max_degree=int(method.get("max_degree", 2000)),
        ensemble_size=int(ens.get("size", 100)),
        structured=bool(ens.get("structured", True)),
        besov=[BesovParams(float(b["s"]), parse_exponent(b["p"]), parse_exponent(b["q"]),
                           float(b["m"])) for b in raw.get("besov", [])],
        sweeps=sweeps,
        notes=[str(d) for d in diags if d.level == "info"],
    )


def load_config(path) -> ExperimentConfig:
    return from_raw(load_raw(path))
