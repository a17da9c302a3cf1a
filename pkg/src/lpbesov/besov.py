"""Dyadic and heat-semigroup Besov norms and their equivalence diagnostics."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .functional_calculus import SpectralFilter
from .littlewood_paley import Ensemble, FilterBank, decompose, lp_norm
from .multipliers import heat, heat_power
from .sublaplacian import SubLaplacian


@dataclass(frozen=True)
class BesovParams:
    s: float
    p: float
    q: float
    m: float

    def problems(self) -> list[str]:
        out = []
        if not self.m > self.s:
            out.append("heat characterization requires m > s")
        if self.m < 0:
            out.append("heat-power order m must be >= 0")
        for name in ("p", "q"):
            v = getattr(self, name)
            if not (v >= 1):
                out.append(f"exponent {name} must be >= 1 or inf, got {v}")
        return out

    def validate(self):
        probs = self.problems()
        if probs:
            raise ValueError("; ".join(probs))

    def as_dict(self):
        enc = lambda v: "inf" if math.isinf(v) else v
        return {"s": self.s, "p": enc(self.p), "q": enc(self.q), "m": self.m}


def _lq(values, q, axis=0):
    if math.isinf(q):
        return np.max(values, axis=axis)
    return np.sum(values**q, axis=axis) ** (1.0 / q)


def dyadic_block_sequence(bank: FilterBank, u, s: float, p: float):
    """||S_0 u||_p and the sequence 2^{js} ||Delta_j u||_p, j = 0..J."""
    dec = decompose(bank, u)
    low = lp_norm(dec.s0, p)
    weights = 2.0 ** (s * np.arange(bank.J + 1))
    seq = np.stack([lp_norm(b, p) for b in dec.blocks])
    seq = seq * (weights if seq.ndim == 1 else weights[:, None])
    return low, seq


def besov_dyadic_norm(bank: FilterBank, u, params: BesovParams):
    params.validate()
    low, seq = dyadic_block_sequence(bank, u, params.s, params.p)
    return low + _lq(seq, params.q)


def default_t_grid(L: SubLaplacian, extend: bool = False) -> np.ndarray:
    """t_i = 2^-i down to the saturation scale 4^-(J+1); optionally up to 2^6."""
    from .littlewood_paley import saturation_index

    J = saturation_index(L.lambda_max)
    t_min = 4.0 ** -(J + 1)
    n = int(math.ceil(math.log2(1.0 / t_min)))
    grid = 2.0 ** -np.arange(n, -1, -1, dtype=float)
    if extend:
        grid = np.concatenate([grid, 2.0 ** np.arange(1, 7, dtype=float)])
    return grid


def _trapezoid_log(values, t_grid):
    """Trapezoid rule of values d(log t) along axis 0."""
    logt = np.log(t_grid)
    w = np.zeros_like(logt)
    dl = np.diff(logt)
    w[:-1] += dl / 2
    w[1:] += dl / 2
    return np.tensordot(w, values, axes=(0, 0))


def heat_integrand(u, L: SubLaplacian, params: BesovParams, t_grid, method="auto", tol=1e-10):
    """t^{-s/2} ||(tL)^{m/2} e^{-tL} u||_p for every t in the grid (axis 0)."""
    hp = heat_power(params.m)
    rows = []
    for t in t_grid:
        v = SpectralFilter(hp, t, L, method, tol)(u)
        rows.append(t ** (-params.s / 2) * lp_norm(v, params.p))
    return np.stack(rows)


def besov_heat_norm(u, L: SubLaplacian, params: BesovParams, t_grid=None, method="auto",
                    extend: bool = False, tol: float = 1e-10):
    """||e^{-L}u||_p + (int (t^{-s/2}||(tL)^{m/2}e^{-tL}u||_p)^q dt/t)^{1/q}."""
    params.validate()
    if t_grid is None:
        t_grid = default_t_grid(L, extend)
    t_grid = np.sort(np.asarray(t_grid, dtype=float))
    low = lp_norm(SpectralFilter(heat(), 1.0, L, method, tol)(u), params.p)
    vals = heat_integrand(u, L, params, t_grid, method, tol)
    if math.isinf(params.q):
        return low + vals.max(axis=0)
    return low + _trapezoid_log(vals**params.q, t_grid) ** (1.0 / params.q)


@dataclass
class BesovReport:
    params: list[BesovParams]
    ratios: list[np.ndarray]  # per params, one ratio per signal
    labels: list[str]
    grid: np.ndarray
    seed: int
    group: str = ""
    notes: list[str] = field(default_factory=list)

    def summary(self):
        out = []
        for prm, r in zip(self.params, self.ratios):
            out.append({"params": prm.as_dict(), "min": float(r.min()), "max": float(r.max()),
                        "spread": float(r.max() / r.min())})
        return out

    def spreads(self) -> list[float]:
        return [float(r.max() / r.min()) for r in self.ratios]

    def as_dict(self):
        return {
            "group": self.group,
            "params": [p.as_dict() for p in self.params],
            "per_signal_ratios": [[float(x) for x in r] for r in self.ratios],
            "spread": self.spreads(),
            "summary": self.summary(),
            "grid": [float(t) for t in self.grid],
            "seed": self.seed,
            "notes": self.notes,
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.as_dict(), fh, indent=2)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "p", "q", "m", "signal", "ratio"])
            for prm, r in zip(self.params, self.ratios):
                d = prm.as_dict()
                for lab, x in zip(self.labels, r):
                    w.writerow([d["s"], d["p"], d["q"], d["m"], lab, repr(float(x))])


def besov_equivalence_report(bank: FilterBank, L: SubLaplacian, ensemble: Ensemble,
                             params_list, t_grid=None) -> BesovReport:
    """Ratios dyadic / heat norm for every (params, signal)."""
    params_list = list(params_list)
    if not params_list or ensemble.size == 0:
        raise ValueError("besov_equivalence_report needs params and a non-empty ensemble")
    for prm in params_list:
        prm.validate()
    grid = default_t_grid(L) if t_grid is None else np.asarray(t_grid, dtype=float)
    U = ensemble.signals
    ratios, notes = [], []
    for prm in params_list:
        dy = besov_dyadic_norm(bank, U, prm)
        ht = besov_heat_norm(U, L, prm, grid, method=bank.method)
        ratios.append(np.asarray(dy / ht))
        tail = heat_tail_estimate(U, L, prm, grid, method=bank.method)
        if tail is not None:
            notes.append(f"{prm.as_dict()}: integral below t_min={grid.min():g} "
                         f"estimated at <= {tail:.3g} of the computed integral")
    return BesovReport(params_list, ratios, list(ensemble.labels), grid, ensemble.seed,
                       group=L.group.spec.label, notes=notes)


def heat_tail_estimate(u, L: SubLaplacian, params: BesovParams, t_grid, method="auto"):
    """Worst-case ratio of the omitted (0, t_min) integral to the computed one.

    Below t_min the integrand is ~ t^{(m-s)/2}, so the omitted q-th power
    integral is about integrand(t_min)^q * 2/((m-s) q).
    """
    if math.isinf(params.q):
        return None
    t_grid = np.sort(np.asarray(t_grid, dtype=float))
    vals = heat_integrand(u, L, params, t_grid, method)
    total = _trapezoid_log(vals**params.q, t_grid)
    tail = vals[0] ** params.q * 2.0 / ((params.m - params.s) * params.q)
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(total > 0, tail / np.where(total > 0, total, 1.0), 0.0)
    return float(np.max(frac))
