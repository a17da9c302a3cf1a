"""Dyadic filter bank S_j = phi(4^-j L), Delta_j = psi(4^-j L) and diagnostics."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .functional_calculus import DEFAULT_MAX_DEGREE, DEFAULT_TOL, SpectralFilter, delta
from .multipliers import cutoff_phi, psi_from_phi, tilde_phi, tilde_psi
from .sublaplacian import DENSE_CAP, DenseCapError, SubLaplacian


def saturation_index(lambda_max: float) -> int:
    """Smallest J >= 0 with 4^(J+1) >= 4 lambda_max, i.e. phi(4^-(J+1) lam) = 1 on [0, lambda_max]."""
    J = 0
    while 4.0 ** (J + 1) < 4.0 * lambda_max:
        J += 1
    return J


class FilterBank:
    def __init__(self, L: SubLaplacian, method: str = "auto", tol: float = DEFAULT_TOL,
                 max_degree: int = DEFAULT_MAX_DEGREE, J: int | None = None):
        self.L = L
        self.phi = cutoff_phi()
        self.psi = psi_from_phi(self.phi)
        self.J = saturation_index(L.lambda_max) if J is None else int(J)
        self.method = method
        self.tol = tol
        self.max_degree = max_degree
        self._filters = {}

    def __repr__(self):
        return f"FilterBank({self.L.group.spec.label}, J={self.J}, method={self.method!r})"

    def filter(self, kind: str, j: int) -> SpectralFilter:
        key = (kind, j)
        if key not in self._filters:
            m = {"S": self.phi, "D": self.psi, "tS": tilde_phi(), "tD": tilde_psi()}[kind]
            self._filters[key] = SpectralFilter(m, 4.0 ** -j, self.L, self.method,
                                                self.tol, self.max_degree)
        return self._filters[key]

    def S(self, j: int, u):
        return self.filter("S", j)(u)

    def Delta(self, j: int, u):
        return self.filter("D", j)(u)

    def kernel(self, kind: str, j: int) -> np.ndarray:
        return self.filter(kind, j)(delta(self.L, self.L.group.identity))

    @property
    def scales(self) -> range:
        return range(self.J + 1)


def make_filter_bank(L: SubLaplacian, method: str = "auto", tolerance: float = DEFAULT_TOL,
                     max_degree: int = DEFAULT_MAX_DEGREE) -> FilterBank:
    return FilterBank(L, method, tolerance, max_degree)


@dataclass
class Decomposition:
    s0: np.ndarray
    blocks: np.ndarray  # shape (J+1, n) or (J+1, n, m)
    reconstruction_error: float

    @property
    def J(self) -> int:
        return self.blocks.shape[0] - 1

    def reconstruct(self) -> np.ndarray:
        return self.s0 + self.blocks.sum(axis=0)

    def to_csv(self, directory, prefix="block") -> list[str]:
        """One CSV per piece (element_index, value); single-signal decompositions only."""
        import os

        paths = []
        pieces = [("s0", self.s0)] + [(f"{prefix}{j}", b) for j, b in enumerate(self.blocks)]
        for name, vals in pieces:
            path = os.path.join(directory, f"{name}.csv")
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["element_index", "value"])
                for i, v in enumerate(np.asarray(vals).ravel()):
                    w.writerow([i, repr(float(v))])
            paths.append(path)
        return paths


def _relative_l2(err, ref):
    num = np.linalg.norm(err, axis=0)
    den = np.linalg.norm(ref, axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(den > 0, num / np.where(den > 0, den, 1.0), num)
    return float(np.max(rel))


def decompose(bank: FilterBank, u: np.ndarray) -> Decomposition:
    u = np.asarray(u, dtype=float)
    s0 = bank.S(0, u)
    blocks = np.stack([bank.Delta(j, u) for j in bank.scales])
    dec = Decomposition(s0, blocks, 0.0)
    dec.reconstruction_error = _relative_l2(u - dec.reconstruct(), u)
    return dec


def square_function(dec: Decomposition) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(dec.blocks) ** 2, axis=0))


def lp_norm(f, p: float, axis: int = 0):
    """(sum |f|^p)^(1/p) along ``axis``; sup norm for p = inf."""
    if not (p >= 1):
        raise ValueError(f"exponent p must be >= 1 or inf, got {p}")
    a = np.abs(np.asarray(f))
    if np.isinf(p):
        return a.max(axis=axis)
    top = a.max(axis=axis, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    out = np.sum((a / safe) ** p, axis=axis) ** (1.0 / p) * np.squeeze(safe, axis=axis)
    return out


# ------------------------------------------------------------------ ensembles


@dataclass
class Ensemble:
    signals: np.ndarray  # (n, m), one signal per column
    labels: list[str]
    seed: int

    @property
    def size(self) -> int:
        return self.signals.shape[1]


def make_ensemble(L: SubLaplacian, n_random: int, seed: int = 0, structured: bool = True,
                  metric=None, n_eigen: int = 4) -> Ensemble:
    """Seeded standard normals, optionally followed by structured extremes.

    Normals are drawn signal by signal, so a larger ensemble with the same
    seed extends a smaller one.
    """
    n = L.size
    rng = np.random.default_rng(seed)
    cols = [rng.standard_normal(n) for _ in range(n_random)]
    labels = [f"normal{i}" for i in range(n_random)]
    if structured:
        cols.append(delta(L, L.group.identity))
        labels.append("delta_e")
        if metric is not None:
            for r in sorted({1, max(1, metric.r_max // 4)}):
                cols.append(metric.ball(r).astype(float))
                labels.append(f"ball{r}")
        if n <= DENSE_CAP:
            try:
                spec = L.spectrum()
            except DenseCapError:
                spec = None
            if spec is not None:
                lam = spec.eigenvalues
                picks = np.unique(np.linspace(1, n - 1, n_eigen).astype(int))
                for i in picks:
                    cols.append(np.array(spec.eigenvectors[:, i]))
                    labels.append(f"eig{i}(lam={lam[i]:.4g})")
    return Ensemble(np.stack(cols, axis=1), labels, seed)


@dataclass
class LPStats:
    p: float
    ratios: np.ndarray
    empirical_Cp: float
    seed: int
    labels: list[str] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    def as_dict(self):
        return {"p": _json_p(self.p), "ratios": [float(r) for r in self.ratios],
                "empirical_Cp": self.empirical_Cp, "seed": self.seed, "flags": self.flags}

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.as_dict(), fh, indent=2)


def _json_p(p):
    return "inf" if np.isinf(p) else float(p)


def lp_equivalence_stats(bank: FilterBank, ensemble: Ensemble, p: float) -> LPStats:
    """Ratios (||S_0 u||_p + ||g(u)||_p) / ||u||_p over the ensemble."""
    if ensemble.size == 0:
        raise ValueError("empty ensemble")
    flags = []
    if not (1 < p < math.inf):
        flags.append("outside the range where the equivalence holds (requires 1 < p < inf)")
    U = ensemble.signals
    dec = decompose(bank, U)
    num = lp_norm(dec.s0, p) + lp_norm(square_function(dec), p)
    ratios = num / lp_norm(U, p)
    Cp = float(max(ratios.max(), (1.0 / ratios).max()))
    return LPStats(p, ratios, Cp, ensemble.seed, list(ensemble.labels), flags)
