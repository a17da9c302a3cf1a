"""Discrete sub-Laplacian built from generator difference operators."""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .group_lattice import CayleyGroup

DENSE_CAP = 4096


class DenseCapError(RuntimeError):
    """The operator is too large for a dense eigendecomposition."""


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray  # ascending, clipped into [0, lambda_max]
    eigenvectors: np.ndarray  # orthonormal columns

    def apply(self, values: np.ndarray, f: np.ndarray) -> np.ndarray:
        """Q diag(values) Q^T f for f of shape (n,) or (n, m)."""
        Q = self.eigenvectors
        coef = Q.T @ f
        if coef.ndim == 1:
            return Q @ (values * coef)
        return Q @ (values[:, None] * coef)


class SubLaplacian:
    """L = sum_j X_j^* X_j with X_j f(x) = f(x s_j) - f(x).

    ``lambda_max`` is the Gershgorin certificate 4k; ``lambda_max_estimate``
    is a sharper power-iteration value kept for reporting only.
    """

    def __init__(self, group: CayleyGroup, operator: sp.csr_matrix, X_ops: list[sp.csr_matrix]):
        self.group = group
        self.operator = operator
        self.X_ops = X_ops
        self.k = group.k
        self.lambda_max = 4.0 * self.k
        self._spectrum = None
        self._lambda_est = None
        self._lock = threading.Lock()

    def __repr__(self):
        return f"SubLaplacian({self.group.spec.label}, k={self.k}, lambda_max={self.lambda_max})"

    @property
    def size(self) -> int:
        return self.group.size

    def __matmul__(self, f):
        return self.operator @ f

    @property
    def lambda_max_estimate(self) -> float:
        if self._lambda_est is None:
            self._lambda_est = power_iteration(self.operator, seed=0)
        return min(self._lambda_est, self.lambda_max)

    def spectrum(self, dense_cap: int = DENSE_CAP) -> Spectrum:
        with self._lock:
            if self._spectrum is None:
                self._spectrum = eigendecompose(self, dense_cap=dense_cap)
            return self._spectrum

    def has_spectrum(self) -> bool:
        return self._spectrum is not None

    def to_coo_text(self, path) -> None:
        """Write ``row col value`` lines with 0-based indices."""
        coo = self.operator.tocoo()
        order = np.lexsort((coo.col, coo.row))
        with open(path, "w") as fh:
            for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
                fh.write(f"{r} {c} {float(v)!r}\n")


def _right_translation(group: CayleyGroup, s: int) -> sp.csr_matrix:
    n = group.size
    rows = np.arange(n)
    return sp.csr_matrix((np.ones(n), (rows, group.right_table(s))), shape=(n, n))


def build_sublaplacian(group: CayleyGroup) -> SubLaplacian:
    n = group.size
    eye = sp.identity(n, format="csr")
    X_ops = []
    L = sp.csr_matrix((n, n))
    for s, s_inv in group.generators:
        R = _right_translation(group, s)
        R_inv = _right_translation(group, s_inv)
        X_ops.append((R - eye).tocsr())
        L = L + 2 * eye - R - R_inv
    L = L.tocsr()
    L.sum_duplicates()
    L.eliminate_zeros()
    return SubLaplacian(group, L, X_ops)


def apply_X(I, f: np.ndarray, L: SubLaplacian) -> np.ndarray:
    """Apply X^I = X_{i_1} ... X_{i_beta} (1-based indices, rightmost first)."""
    out = np.asarray(f)
    for i in reversed(tuple(I)):
        if not (1 <= int(i) <= L.k):
            raise ValueError(f"generator index {i} out of range 1..{L.k}")
        out = L.X_ops[int(i) - 1] @ out
    return out


def power_iteration(A, n_iter: int = 500, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(A.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(n_iter):
        w = A @ v
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        lam = float(v @ w)
        v = w / nw
    # Rayleigh quotient underestimates; nudge by the last residual.
    res = np.linalg.norm(A @ v - lam * v)
    return lam + res


def eigendecompose(L: SubLaplacian, dense_cap: int = DENSE_CAP) -> Spectrum:
    if L.size > dense_cap:
        raise DenseCapError(
            f"dimension {L.size} exceeds dense cap {dense_cap}; use the chebyshev method"
        )
    w, Q = np.linalg.eigh(L.operator.toarray())
    w = np.clip(w, 0.0, L.lambda_max)
    w.setflags(write=False)
    Q.setflags(write=False)
    return Spectrum(w, Q)


def rayleigh_quotients(L: SubLaplacian, F: np.ndarray) -> np.ndarray:
    """Rayleigh quotient of each column of F."""
    LF = L.operator @ F
    return np.einsum("ij,ij->j", F, LF) / np.einsum("ij,ij->j", F, F)
