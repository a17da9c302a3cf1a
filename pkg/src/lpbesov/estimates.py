"""Empirical checks of the kernel, heat-kernel and Bernstein estimates.

Every check fits the smallest constant that makes the inequality hold over
a parameter sweep and reports it with all rows; nothing is asserted against
a fixed constant here.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .functional_calculus import heat_kernel, kernel_of, spectral_power_apply, wave_cosine, delta
from .group_lattice import GrowthProfile, WordMetric
from .littlewood_paley import Ensemble, FilterBank, lp_norm
from .multipliers import MultiplierFunction, mihlin_constant, multiplier_norm
from .sublaplacian import SubLaplacian, apply_X


@dataclass
class EstimateReport:
    name: str
    rows: list[dict]
    fitted_constant: float
    passed: bool
    notes: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def as_dict(self):
        return {"name": self.name, "fitted_constant": self.fitted_constant,
                "passed": self.passed, "notes": self.notes, "extra": self.extra,
                "rows": self.rows}

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.as_dict(), fh, indent=2, default=_jsonable)

    def to_csv(self, path):
        keys = []
        for r in self.rows:
            keys.extend(k for k in r if k not in keys)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(keys)
            for r in self.rows:
                w.writerow([_cell(r.get(k, "")) for k in keys])


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(type(x))


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return " ".join(str(i) for i in v)
    return v


def conjugate_inverse(p: float) -> float:
    """1/p' with 1/p + 1/p' = 1."""
    return 1.0 if math.isinf(p) else 1.0 - 1.0 / p


def weighted_kernel_norm(K, metric: WordMetric, alpha: float, I, p: float, L: SubLaplacian) -> float:
    """|| (1 + |x|)^alpha (X^I K)(x) ||_p."""
    XK = apply_X(I, K, L) if len(I) else np.asarray(K)
    return float(lp_norm((1.0 + metric.dist) ** alpha * XK, p))


def default_order(profile: GrowthProfile, alpha_max: float) -> int:
    """N_mult plus the margin alpha + log2 K from the weighted-estimate argument."""
    base = profile.N_mult if profile.N_mult is not None else 1
    return int(base + math.ceil(alpha_max + math.log2(max(profile.K_hat, 1.0))))


def check_kernel_estimates(m: MultiplierFunction, t_sweep, alpha_sweep, I_sweep, p_sweep,
                           L: SubLaplacian, metric: WordMetric, profile: GrowthProfile,
                           n: int | None = None, method: str = "auto") -> EstimateReport:
    """Weighted L^p norms of M_t against (1+sqrt t)^a V(sqrt t)^{-1/p'} ||m||_(n)
    (I empty) and t^{-(d/(2p') + |I|/2)} ||m||_(n) (I non-empty, t <= 1)."""
    if n is None:
        n = default_order(profile, max(alpha_sweep))
    mn = multiplier_norm(m, n)
    d = profile.d_loc if profile.d_loc is not None else 0.0
    rows, notes = [], [f"multiplier order n = {n}", f"||m||_(n) = {mn.value!r}"]
    for t in t_sweep:
        K = kernel_of(m, t, L, method)
        for alpha in alpha_sweep:
            for I in I_sweep:
                I = tuple(I)
                for p in p_sweep:
                    lhs = weighted_kernel_norm(K, metric, alpha, I, p, L)
                    ip = conjugate_inverse(p)
                    if not I:
                        env = (1 + math.sqrt(t)) ** alpha * metric.V(math.sqrt(t)) ** (-ip)
                        eq = "normelp"
                    elif t <= 1:
                        env = t ** (-(d * ip / 2 + len(I) / 2))
                        eq = "aggiunta"
                    else:
                        continue
                    denom = env * mn.value
                    if denom == 0:
                        notes.append(f"degenerate envelope at t={t}, alpha={alpha}, I={I}, p={p}")
                        continue
                    rows.append({"estimate": eq, "t": float(t), "alpha": alpha, "I": I,
                                 "p": _p(p), "lhs": lhs, "envelope": env,
                                 "m_norm": mn.value, "ratio": lhs / denom})
    C = max((r["ratio"] for r in rows), default=math.nan)
    return EstimateReport(f"kernel-estimates[{m.name}]", rows, C, bool(np.isfinite(C)), notes,
                          {"n": n, "m_norm": mn.as_dict(), "mihlin": mihlin_constant(m, n)})


def _p(p):
    return "inf" if math.isinf(p) else p


def stability_ratio(a: EstimateReport, b: EstimateReport) -> float:
    """max/min of two fitted constants (e.g. N and 2N); stable when < 2."""
    lo, hi = sorted([a.fitted_constant, b.fitted_constant])
    return hi / lo if lo > 0 else math.inf


def _solve_gaussian_C(target: float, r2: float, t: float) -> float:
    """Smallest C with C exp(-r2/(C t)) >= target (left side increases in C)."""
    if r2 == 0:
        return target
    lo, hi = -60.0, 60.0  # bracket on log C
    f = lambda u: u - r2 / (math.exp(u) * t) - math.log(target)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return math.exp(hi)


def check_gaussian_bound(t_sweep, L: SubLaplacian, metric: WordMetric, floor: float = 1e-12,
                         I=(), d: float | None = None, method: str = "auto") -> EstimateReport:
    """Fit C(t) in p_t(x) <= C V(sqrt t)^{-1} exp(-|x|^2/(C t)) over |x| <= r_max/2.

    With a non-empty I the derivative form |X^I p_t(x)| <= C t^{-(d+|I|)/2}
    exp(-|x|^2/(C t)) is fitted instead (t <= 1).  Values at or below
    ``floor`` are at the resolution of the computed kernel and are skipped.
    """
    I = tuple(I)
    if I and d is None:
        raise ValueError("derivative form needs the local dimension d")
    rows = []
    reach = metric.dist <= metric.r_max / 2
    for t in t_sweep:
        pt = heat_kernel(t, L, method)
        vals = np.abs(apply_X(I, pt, L)) if I else pt
        pref = t ** (-(d + len(I)) / 2) if I else 1.0 / metric.V(math.sqrt(t))
        best, arg = 0.0, 0
        for x in np.flatnonzero(reach & (vals > floor)):
            C = _solve_gaussian_C(vals[x] / pref, float(metric.dist[x]) ** 2, t)
            if C > best:
                best, arg = C, int(x)
        rows.append({"t": float(t), "C": best, "argmax_x": arg,
                     "argmax_dist": int(metric.dist[arg]), "at_identity": float(vals[0] / pref)})
    Cs = [r["C"] for r in rows]
    span = max(Cs) / min(Cs) if Cs and min(Cs) > 0 else math.inf
    name = "gaussian-bound" + (f"[X^{I}]" if I else "")
    return EstimateReport(name, rows, max(Cs), bool(np.isfinite(span)),
                          [f"floor = {floor}"], {"span": span})


def bernstein_ratio(bank: FilterBank, u, I, sigma: float, p: float, q: float, j: int,
                    d: float, variant: str = "Delta"):
    """||X^I (sqrt L)^sigma B_j u||_q / (2^{j(|I| + sigma + d(1/p - 1/q))} ||B_j u||_p).

    B_j is Delta_j or S_j.  Returns None when ||B_j u||_p < 1e-13.
    """
    if p > q:
        raise ValueError("Bernstein ratios need p <= q")
    if variant == "S" and sigma < 0:
        raise ValueError("the S_j form needs sigma >= 0")
    block = bank.Delta(j, u) if variant == "Delta" else bank.S(j, u)
    base = float(lp_norm(block, p))
    if base < 1e-13:
        return None
    v = spectral_power_apply(sigma, bank.L, block) if sigma != 0 else block
    v = apply_X(tuple(I), v, bank.L) if len(I) else v
    expo = len(I) + sigma + d * ((1.0 / p if not math.isinf(p) else 0.0)
                                 - (1.0 / q if not math.isinf(q) else 0.0))
    return float(lp_norm(v, q)) / (2.0 ** (j * expo) * base)


def log_slope(js, values) -> float:
    """Least-squares slope of log(values) against j (natural log)."""
    js = np.asarray(js, dtype=float)
    v = np.asarray(values, dtype=float)
    if js.size < 2:
        return math.nan
    return float(np.polyfit(js, np.log(v), 1)[0])


def bernstein_sweep(bank: FilterBank, ensemble: Ensemble, I, sigma: float, p: float, q: float,
                    d: float, variant: str = "Delta", js=None) -> EstimateReport:
    """Ratios for every (j, signal); the j-trend is the log-slope of the per-j maximum."""
    js = list(bank.scales if js is None else js)
    rows, per_j = [], {}
    for j in js:
        for k, lab in enumerate(ensemble.labels):
            r = bernstein_ratio(bank, ensemble.signals[:, k], I, sigma, p, q, j, d, variant)
            if r is None:
                continue
            rows.append({"j": j, "signal": lab, "ratio": r})
            per_j[j] = max(per_j.get(j, 0.0), r)
    used = sorted(per_j)
    slope = log_slope(used, [per_j[j] for j in used])
    C = max(per_j.values()) if per_j else math.nan
    extra = {"I": tuple(I), "sigma": sigma, "p": _p(p), "q": _p(q), "d": d,
             "variant": variant, "max_ratio_per_j": {str(j): per_j[j] for j in used},
             "slope": slope}
    notes = []
    if len(used) < len(js):
        notes.append(f"scales without a non-negligible block: {sorted(set(js) - set(used))}")
    return EstimateReport(f"bernstein[{variant}]", rows, C, bool(np.isfinite(C)), notes, extra)


def schwartz_decay_profile(K, metric: WordMetric, alphas, I=(), L: SubLaplacian | None = None):
    """sup_x (1 + |x|)^alpha |X^I K(x)| for each alpha."""
    XK = np.abs(apply_X(I, K, L) if len(I) else np.asarray(K))
    w = 1.0 + metric.dist
    return np.array([float(np.max(w**a * XK)) for a in alphas])


def schwartz_seminorm(f, metric: WordMetric, alpha: float, I=(), L=None) -> float:
    return float(schwartz_decay_profile(f, metric, [alpha], I, L)[0])


def sj_convergence_check(bank: FilterBank, f, metric: WordMetric, alpha: float = 0, I=()):
    """p_{alpha,I}(f - S_j f) for j = 0..J+1 (J+1 is past saturation)."""
    f = np.asarray(f, dtype=float)
    return np.array([schwartz_seminorm(f - bank.S(j, f), metric, alpha, I, bank.L)
                     for j in range(bank.J + 2)])


def uniform_block_l1(bank: FilterBank) -> EstimateReport:
    """||kernel(Delta_j)||_1 for j = 0..J and the max/median flatness ratio."""
    norms = [float(lp_norm(bank.kernel("D", j), 1)) for j in bank.scales]
    rows = [{"j": j, "l1": v} for j, v in enumerate(norms)]
    flat = max(norms) / float(np.median(norms))
    return EstimateReport("uniform-block-l1", rows, max(norms), bool(np.isfinite(flat)),
                          [], {"max_over_median": flat})


def wave_decay(s_list, L: SubLaplacian, metric: WordMetric, pad: int = 2,
               method: str = "auto") -> EstimateReport:
    """l^1 mass of cos(s sqrt L) delta_e outside radius ceil(s sqrt(lambda_max)) + pad."""
    rows = []
    c = math.sqrt(L.lambda_max)
    for s in s_list:
        K = wave_cosine(s, L, delta(L), method)
        R = math.ceil(s * c) + pad
        outside = float(np.abs(K[metric.dist > R]).sum())
        profile = np.bincount(metric.dist, weights=np.abs(K))
        rows.append({"s": float(s), "radius": R, "outside_mass": outside,
                     "mass_by_distance": profile.tolist()})
    worst = max(r["outside_mass"] for r in rows)
    return EstimateReport("wave-decay", rows, worst, True,
                          ["measured, not asserted: discrete propagation is approximate"])
