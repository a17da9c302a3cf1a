"""Apply m(tL) to signals, extract convolution kernels, heat and wave operators.

Two backends: ``exact`` diagonalizes L densely (capped size), ``chebyshev``
runs the three-term recurrence on [0, lambda_max] with an adaptively chosen
degree.  ``auto`` picks exact when the spectrum is already cached or the
group is small, chebyshev otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dct

from .multipliers import MultiplierFunction, builtin_family, wave
from .sublaplacian import DENSE_CAP, SubLaplacian

DEFAULT_TOL = 1e-8
DEFAULT_MAX_DEGREE = 2000
AUTO_EXACT_SIZE = 2048
_EPS = np.finfo(float).eps


class DegreeCapError(RuntimeError):
    def __init__(self, message, tail_bound):
        super().__init__(message)
        self.tail_bound = tail_bound


@dataclass(frozen=True)
class FilterApplication:
    method: str
    degree: int | None
    certified_error: float

    def as_dict(self):
        return {"method": self.method, "degree": self.degree,
                "certified_error": self.certified_error}


def chebyshev_coefficients(g, a: float, b: float, n_nodes: int) -> np.ndarray:
    """Coefficients c_k with g(x) ~ sum c_k T_k((2x - a - b)/(b - a)) on [a, b]."""
    k = np.arange(n_nodes)
    y = np.cos(np.pi * (k + 0.5) / n_nodes)
    x = 0.5 * (y * (b - a) + a + b)
    c = dct(np.asarray(g(x), dtype=float), type=2) / n_nodes
    c[0] /= 2
    return c


def _roundoff_bound(degree: int, coef_l1: float) -> float:
    # three-term recurrence error grows at most quadratically in the degree
    return 2.0 * (degree + 1) ** 2 * _EPS * max(coef_l1, 1.0)


def choose_degree(c: np.ndarray, tol: float, max_degree: int):
    """Smallest degree whose truncation tail plus roundoff is within tol."""
    absc = np.abs(c)
    tails = np.concatenate([np.cumsum(absc[::-1])[::-1][1:], [0.0]])  # tails[d] = sum_{k>d}
    l1 = np.cumsum(absc)
    limit = min(max_degree, len(c) - 1)
    for d in range(limit + 1):
        bound = tails[d] + _roundoff_bound(d, l1[d])
        if bound <= tol:
            return d, bound
    return limit, tails[limit] + _roundoff_bound(limit, l1[limit])


class SpectralFilter:
    """m(tL) prepared once for a fixed (m, t, L, method), applicable to many signals."""

    def __init__(self, m: MultiplierFunction, t: float, L: SubLaplacian, method: str = "auto",
                 tol: float = DEFAULT_TOL, max_degree: int = DEFAULT_MAX_DEGREE,
                 dense_cap: int = DENSE_CAP):
        if t <= 0:
            raise ValueError(f"scale t must be positive, got {t}")
        if method == "auto":
            method = "exact" if (L.has_spectrum() or L.size <= AUTO_EXACT_SIZE) else "chebyshev"
        if method not in ("exact", "chebyshev"):
            raise ValueError(f"unknown method {method!r}")
        self.m, self.t, self.L, self.method = m, float(t), L, method
        if method == "exact":
            spec = L.spectrum(dense_cap)
            self._values = np.asarray(m(self.t * spec.eigenvalues), dtype=float)
            err = 10.0 * L.size * _EPS * max(1.0, float(np.max(np.abs(self._values))))
            self.info = FilterApplication("exact", None, err)
        else:
            n_nodes = 1 << int(np.ceil(np.log2(max(2 * max_degree + 2, 64))))
            c = chebyshev_coefficients(lambda lam: m(self.t * lam), 0.0, L.lambda_max, n_nodes)
            degree, bound = choose_degree(c, tol, max_degree)
            if bound > tol:
                raise DegreeCapError(
                    f"degree cap {max_degree} reached for {m.name} at t={t}; "
                    f"achieved tail bound {bound:.3e}", bound)
            self._coef = c[: degree + 1]
            self.info = FilterApplication("chebyshev", degree, float(bound))

    def __call__(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape[0] != self.L.size:
            raise ValueError(f"signal length {f.shape[0]} does not match group size {self.L.size}")
        if self.method == "exact":
            return self.L.spectrum().apply(self._values, f)
        return chebyshev_apply(self._coef, self.L, f)


def chebyshev_apply(coef: np.ndarray, L: SubLaplacian, f: np.ndarray) -> np.ndarray:
    """sum_k coef[k] T_k(A) f with A = 2L/lambda_max - I."""
    A = L.operator
    scale = 2.0 / L.lambda_max
    T_prev = f
    out = coef[0] * f
    if len(coef) == 1:
        return out
    T_cur = scale * (A @ f) - f
    out = out + coef[1] * T_cur
    for ck in coef[2:]:
        T_next = 2.0 * (scale * (A @ T_cur) - T_cur) - T_prev
        out += ck * T_next
        T_prev, T_cur = T_cur, T_next
    return out


def _as_multiplier(m) -> MultiplierFunction:
    return builtin_family(m) if isinstance(m, str) else m


def apply_multiplier(m, t: float, L: SubLaplacian, f: np.ndarray, method: str = "auto",
                     tol: float = DEFAULT_TOL, max_degree: int = DEFAULT_MAX_DEGREE,
                     full_output: bool = False):
    """Compute m(tL) f.  With ``full_output`` also return the FilterApplication."""
    flt = SpectralFilter(_as_multiplier(m), t, L, method, tol, max_degree)
    out = flt(f)
    return (out, flt.info) if full_output else out


def delta(L_or_size, x: int = 0) -> np.ndarray:
    n = L_or_size if isinstance(L_or_size, (int, np.integer)) else L_or_size.size
    e = np.zeros(n)
    e[x] = 1.0
    return e


def kernel_of(m, t: float, L: SubLaplacian, method: str = "auto", **kw) -> np.ndarray:
    """Convolution kernel M_t = m(tL) delta_e, so that m(tL) f = f * M_t."""
    return apply_multiplier(m, t, L, delta(L, L.group.identity), method, **kw)


def heat_kernel(t: float, L: SubLaplacian, method: str = "auto", **kw) -> np.ndarray:
    return kernel_of(builtin_family("heat"), t, L, method, **kw)


def convolve(f: np.ndarray, g: np.ndarray, group) -> np.ndarray:
    """(f * g)(x) = sum_y f(y) g(y^{-1} x)."""
    f = np.asarray(f)
    g = np.asarray(g)
    n = group.size
    if f.ndim != 1:
        raise ValueError("convolve: f must be a single signal")
    if f.shape[0] != n or g.shape[0] != n:
        raise ValueError("convolve: signals must live on the same group")
    out = np.zeros(g.shape, dtype=np.result_type(f, g))
    xs = np.arange(n)
    for y in np.flatnonzero(f):
        out += f[y] * g[group.mul(group.inv(y), xs)]
    return out


def wave_cosine(s: float, L: SubLaplacian, f: np.ndarray, method: str = "auto", **kw) -> np.ndarray:
    """cos(s sqrt(L)) f."""
    if s == 0:
        return np.array(f, dtype=float, copy=True)
    return apply_multiplier(wave(s), 1.0, L, f, method, **kw)


def spectral_power_apply(sigma: float, L: SubLaplacian, f: np.ndarray,
                         zero_tol: float = 1e-10) -> np.ndarray:
    """(sqrt L)^sigma f through the eigenbasis; the 0-eigenspace is mapped to 0 unless sigma = 0."""
    spec = L.spectrum()
    lam = spec.eigenvalues
    vals = np.zeros_like(lam)
    pos = lam > zero_tol * L.lambda_max
    vals[pos] = lam[pos] ** (sigma / 2)
    if sigma == 0:
        vals[:] = 1.0
    return spec.apply(vals, f)
