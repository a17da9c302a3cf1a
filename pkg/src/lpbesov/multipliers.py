"""Spectral multiplier functions with exact derivatives.

Derivatives come from truncated Taylor arithmetic ("jets"): a jet of order
K at points lam is an array ``c`` of shape (K+1, len(lam)) with
``m(lam + h) = sum_k c[k] h**k + O(h**(K+1))``, so ``m^(r) = r! c[r]``.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

# exp(-1/x) and all its derivatives are below 1e-200 for x < 1/600.
_THETA_FLOOR = 1.0 / 600.0
FD_MAX_ORDER = 8


# ---------------------------------------------------------------- jet algebra


def jet_var(x, order, scale=1.0, shift=0.0):
    """Jet of the affine map lam -> scale*lam + shift."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((order + 1,) + x.shape)
    out[0] = scale * x + shift
    if order >= 1:
        out[1] = scale
    return out


def jet_mul(a, b):
    K = a.shape[0] - 1
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b))
    for k in range(K + 1):
        for i in range(k + 1):
            out[k] += a[i] * b[k - i]
    return out


def jet_recip(a):
    K = a.shape[0] - 1
    out = np.zeros_like(a)
    out[0] = 1.0 / a[0]
    for k in range(1, K + 1):
        acc = np.zeros_like(a[0])
        for i in range(1, k + 1):
            acc += a[i] * out[k - i]
        out[k] = -acc * out[0]
    return out


def jet_exp(a):
    K = a.shape[0] - 1
    out = np.zeros_like(a)
    out[0] = np.exp(a[0])
    for k in range(1, K + 1):
        acc = np.zeros_like(a[0])
        for i in range(1, k + 1):
            acc += i * a[i] * out[k - i]
        out[k] = acc / k
    return out


def jet_log(a):
    K = a.shape[0] - 1
    out = np.zeros_like(a)
    out[0] = np.log(a[0])
    for k in range(1, K + 1):
        acc = np.zeros_like(a[0])
        for i in range(1, k):
            acc += i * out[i] * a[k - i]
        out[k] = (a[k] - acc / k) / a[0]
    return out


def jet_pow(a, alpha):
    """a**alpha for a[0] > 0."""
    return jet_exp(alpha * jet_log(a))


def jet_theta(x):
    """Jet of theta(x) = exp(-1/x) for x > 0, 0 otherwise."""
    out = np.zeros_like(x)
    pos = x[0] > _THETA_FLOOR
    if np.any(pos):
        out[:, pos] = jet_exp(-jet_recip(x[:, pos]))
    return out


def _rescale(jet, a):
    """Turn the jet of m at a*lam (in powers of a*h) into the jet of lam -> m(a*lam)."""
    powers = a ** np.arange(jet.shape[0])
    return jet * powers.reshape((-1,) + (1,) * (jet.ndim - 1))


# ------------------------------------------------------------ the cutoff phi


def theta(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def phi_value(lam):
    lam = np.asarray(lam, dtype=float)
    a = theta(1.0 - lam)
    b = theta(lam - 0.25)
    return a / (a + b)


def phi_jet(lam, order):
    a = jet_theta(jet_var(lam, order, -1.0, 1.0))
    b = jet_theta(jet_var(lam, order, 1.0, -0.25))
    return jet_mul(a, jet_recip(a + b))


# ------------------------------------------------------ multiplier functions


class MultiplierFunction:
    """A bounded function m on [0, inf) with derivative access.

    ``func`` is vectorized and must already return the continuous extension
    at 0.  ``jet`` (optional) returns Taylor coefficients for lam > 0; without
    it, derivatives fall back to central finite differences.
    """

    def __init__(self, name, func, jet=None, support=None):
        self.name = name
        self._func = func
        self._jet = jet
        self.support = support

    def __repr__(self):
        return f"MultiplierFunction({self.name!r})"

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        return self._func(lam)

    @property
    def has_jet(self) -> bool:
        return self._jet is not None

    def derivatives(self, lam, order: int) -> np.ndarray:
        """Array of shape (order+1, len(lam)) with m, m', ..., m^(order)."""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        if self._jet is not None:
            coef = self._jet(lam, order)
            fact = np.array([math.factorial(r) for r in range(order + 1)], dtype=float)
            return coef * fact[:, None]
        if order > FD_MAX_ORDER:
            raise ValueError(
                f"finite-difference derivatives capped at order {FD_MAX_ORDER}, got {order}"
            )
        out = np.empty((order + 1, lam.size))
        out[0] = self(lam)
        for r in range(1, order + 1):
            out[r] = finite_difference(self, lam, r)
        return out

    def deriv(self, r: int, lam) -> np.ndarray:
        return self.derivatives(lam, r)[r]

    def to_csv(self, path, lam, order: int = 0) -> None:
        D = self.derivatives(lam, order)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lambda", "value"] + [f"d{r}" for r in range(1, order + 1)])
            for i, x in enumerate(np.atleast_1d(lam)):
                w.writerow([repr(float(x))] + [repr(float(D[r, i])) for r in range(order + 1)])


def finite_difference(m, lam, r: int) -> np.ndarray:
    """Central r-th difference.

    Step is max(1e-6, 1e-6*lam) for r = 1; higher orders widen it to
    eps**(1/(r+2)) * max(1, lam) so cancellation stays below the truncation error.
    """
    lam = np.asarray(lam, dtype=float)
    if r == 1:
        h = np.maximum(1e-6, 1e-6 * lam)
    else:
        h = np.finfo(float).eps ** (1.0 / (r + 2)) * np.maximum(1.0, lam)
    # Keep stencils inside lam > 0.
    h = np.minimum(h, lam / (r + 1) if r > 0 else h)
    total = np.zeros_like(lam)
    for i in range(r + 1):
        total += (-1) ** i * math.comb(r, i) * m(lam + (r / 2 - i) * h)
    return total / h**r


def _from_phi(name, terms, support):
    """Linear combination sum_i coef_i * phi(scale_i * lam)."""

    def func(lam):
        return sum(c * phi_value(a * lam) for c, a in terms)

    def jet(lam, order):
        return sum(c * _rescale(phi_jet(a * lam, order), a) for c, a in terms)

    return MultiplierFunction(name, func, jet, support)


def cutoff_phi() -> MultiplierFunction:
    """phi = theta(1-x) / (theta(1-x) + theta(x-1/4)): 1 on [0, 1/4], 0 on [1, inf)."""
    return _from_phi("phi", [(1.0, 1.0)], (0.0, 1.0))


def psi_from_phi(phi: MultiplierFunction | None = None) -> MultiplierFunction:
    """psi(lam) = phi(lam/4) - phi(lam), supported in [1/4, 4]."""
    if phi is not None and phi.name != "phi":
        raise ValueError("psi_from_phi expects the cutoff returned by cutoff_phi()")
    return _from_phi("psi", [(1.0, 0.25), (-1.0, 1.0)], (0.25, 4.0))


def tilde_phi() -> MultiplierFunction:
    return _from_phi("tilde_phi", [(1.0, 0.25)], (0.0, 4.0))


def tilde_psi() -> MultiplierFunction:
    return _from_phi("tilde_psi", [(1.0, 1.0 / 16), (-1.0, 4.0)], (1.0 / 16, 16.0))


def constant_one() -> MultiplierFunction:
    def jet(lam, order):
        out = np.zeros((order + 1, np.size(lam)))
        out[0] = 1.0
        return out

    return MultiplierFunction("one", lambda lam: np.ones_like(lam, dtype=float), jet)


def heat() -> MultiplierFunction:
    def jet(lam, order):
        return jet_exp(jet_var(lam, order, -1.0))

    return MultiplierFunction("heat", lambda lam: np.exp(-lam), jet)


def heat_power(m: float) -> MultiplierFunction:
    """lam**(m/2) * exp(-lam), with value 0 at lam = 0 when m > 0."""
    if m < 0:
        raise ValueError(f"heat_power order must be >= 0, got {m}")
    if m == 0:
        h = heat()
        return MultiplierFunction("heat_power(0)", h._func, h._jet)

    def func(lam):
        lam = np.asarray(lam, dtype=float)
        out = np.zeros_like(lam)
        pos = lam > 0
        out[pos] = lam[pos] ** (m / 2) * np.exp(-lam[pos])
        return out

    def jet(lam, order):
        x = jet_var(lam, order)
        return jet_mul(jet_pow(x, m / 2), jet_exp(-x))

    return MultiplierFunction(f"heat_power({m:g})", func, jet)


def wave(s: float) -> MultiplierFunction:
    """cos(s*sqrt(lam)); entire in lam."""

    def func(lam):
        return np.cos(s * np.sqrt(np.maximum(np.asarray(lam, dtype=float), 0.0)))

    def jet(lam, order):
        root = jet_pow(jet_var(lam, order), 0.5)
        return jet_exp(1j * s * root).real

    return MultiplierFunction(f"wave({s:g})", func, jet)


def spectral_power(sigma: float) -> MultiplierFunction:
    """lam**(sigma/2), i.e. (sqrt L)^sigma, with value 0 at lam = 0.

    For sigma < 0 the 0-eigenspace is excluded rather than inverted.
    """

    def func(lam):
        lam = np.asarray(lam, dtype=float)
        out = np.zeros_like(lam)
        pos = lam > 0
        out[pos] = lam[pos] ** (sigma / 2)
        if sigma == 0:
            out[~pos] = 1.0
        return out

    def jet(lam, order):
        return jet_pow(jet_var(lam, order), sigma / 2)

    return MultiplierFunction(f"sqrtL^{sigma:g}", func, jet)


_BUILTINS = {
    "phi": cutoff_phi,
    "psi": psi_from_phi,
    "tilde_phi": tilde_phi,
    "tilde_psi": tilde_psi,
    "heat": heat,
    "one": constant_one,
}

_PARAM_RE = re.compile(r"^(heat_power|wave)\(\s*([-+0-9.eE]+)\s*\)$")


def builtin_family(name: str, m: float | None = None) -> MultiplierFunction:
    """Look up a built-in multiplier by name.

    Accepts ``phi``, ``psi``, ``tilde_phi``, ``tilde_psi``, ``heat``, ``one``,
    ``heat_power`` (with ``m``) or the inline forms ``heat_power(2)`` and
    ``wave(1.5)``.
    """
    if name in _BUILTINS:
        return _BUILTINS[name]()
    if name == "heat_power":
        if m is None:
            raise ValueError("heat_power needs an order m")
        return heat_power(m)
    match = _PARAM_RE.match(name.strip())
    if match:
        kind, val = match.group(1), float(match.group(2))
        return heat_power(val) if kind == "heat_power" else wave(val)
    raise ValueError(f"unknown multiplier {name!r}")


# --------------------------------------------------------------- diagnostics


def log_grid(lo=1e-6, hi=1e6, num=1000):
    return np.logspace(np.log10(lo), np.log10(hi), num)


def telescope_check(N: int, grid=None, phi=None, psi=None) -> float:
    """max |phi(lam) + sum_{j<=N} psi(4^-j lam) - phi(4^-(N+1) lam)| over the grid."""
    if N < 0:
        raise ValueError("N must be >= 0")
    lam = log_grid() if grid is None else np.asarray(grid, dtype=float)
    phi = phi or cutoff_phi()
    psi = psi or psi_from_phi(phi)
    total = phi(lam).copy()
    for j in range(N + 1):
        total += psi(lam * 4.0**-j)
    return float(np.max(np.abs(total - phi(lam * 4.0 ** -(N + 1)))))


@dataclass(frozen=True)
class MultiplierNorm:
    n: int
    value: float
    r: int  # derivative order achieving the sup
    lam: float  # point achieving the sup
    boundary: tuple[float, float]  # the weighted sup at the grid ends

    def as_dict(self):
        return {"n": self.n, "value": self.value, "r": self.r, "lambda": self.lam,
                "boundary": list(self.boundary)}


class DerivativeError(ArithmeticError):
    pass


def _weighted_sup(m, n, weight, lo, hi, num):
    lam = np.logspace(np.log10(lo), np.log10(hi), num)
    D = m.derivatives(lam, n)
    W = weight(lam)
    vals = W[None, :] * np.abs(D)
    if not np.all(np.isfinite(vals)):
        r_bad, i_bad = np.argwhere(~np.isfinite(vals))[0]
        raise DerivativeError(
            f"non-finite derivative of order {r_bad} of {m.name} at lambda={lam[i_bad]!r}"
        )
    r_best, i_best = np.unravel_index(np.argmax(vals), vals.shape)
    best = float(vals[r_best, i_best])
    lam_best = float(lam[i_best])
    # golden-section refinement on the neighbouring grid cell, in log lambda
    a = np.log(lam[max(i_best - 1, 0)])
    b = np.log(lam[min(i_best + 1, num - 1)])
    if b > a:
        def neg(u, r=r_best):
            x = np.exp(u)
            return -float(weight(np.array([x]))[0] * abs(m.derivatives(np.array([x]), r)[r, 0]))

        res = minimize_scalar(neg, bracket=None, bounds=(a, b), method="bounded",
                              options={"xatol": 1e-12})
        if -res.fun > best:
            best, lam_best = float(-res.fun), float(np.exp(res.x))
    boundary = (float(vals[:, 0].max()), float(vals[:, -1].max()))
    return best, int(r_best), lam_best, boundary


def multiplier_norm(m: MultiplierFunction, n: int, lo=1e-8, hi=1e8, num=4000) -> MultiplierNorm:
    """sup over r <= n and lam > 0 of (1 + lam)^n |m^(r)(lam)|, on a refined log grid."""
    if n < 0:
        raise ValueError("order n must be >= 0")
    value, r, lam, boundary = _weighted_sup(m, n, lambda x: (1.0 + x) ** n, lo, hi, num)
    return MultiplierNorm(n, value, r, lam, boundary)


def mihlin_constant(m: MultiplierFunction, n: int, lo=1e-8, hi=1e8, num=4000) -> float:
    """max over r <= n of sup_lam lam^r |m^(r)(lam)|."""
    best = 0.0
    for r in range(n + 1):
        lam = np.logspace(np.log10(lo), np.log10(hi), num)
        vals = lam**r * np.abs(m.derivatives(lam, r)[r])
        best = max(best, float(vals.max()))
    return best
