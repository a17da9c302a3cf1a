"""Finite Cayley-graph models of polynomial-growth groups.

Two families are supported: the torus Z_N^d and the discrete Heisenberg
group over Z_N (upper-triangular unipotent 3x3 matrices mod N).  Elements
are addressed by integer index; the identity is always index 0.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

DEFAULT_MAX_ELEMENTS = 1 << 20

FAMILIES = ("torus", "heisenberg")


class GrowthFitWarning(UserWarning):
    """Raised (as a warning) when a growth-fit window holds too few radii."""


@dataclass(frozen=True)
class GroupSpec:
    family: str
    N: int
    dim: int = 1

    def validate(self) -> list[str]:
        problems = []
        if self.family not in FAMILIES:
            problems.append(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if not isinstance(self.N, (int, np.integer)) or self.N < 2:
            problems.append(f"modulus N must be an integer >= 2, got {self.N!r}")
        if self.family == "torus" and (not isinstance(self.dim, (int, np.integer)) or self.dim < 1):
            problems.append(f"torus dimension must be a positive integer, got {self.dim!r}")
        return problems

    @property
    def size(self) -> int:
        if self.family == "torus":
            return int(self.N) ** int(self.dim)
        return int(self.N) ** 3

    @property
    def label(self) -> str:
        if self.family == "torus":
            return f"torus-N{self.N}-d{self.dim}"
        return f"heisenberg-N{self.N}"


class CayleyGroup:
    """A finite group with a symmetric generating set.

    ``coords`` holds one row of integer coordinates per element: the lattice
    point for the torus, ``(a, b, c)`` for the Heisenberg matrix
    ``[[1, a, c], [0, 1, b], [0, 0, 1]]``.  Generator ``j`` (1-based in
    multi-indices, 0-based in ``generators``) is the pair ``(s_j, s_j^{-1})``
    of element indices.
    """

    identity = 0

    def __init__(self, spec: GroupSpec, coords: np.ndarray, generators: list[tuple[int, int]]):
        self.spec = spec
        self.coords = coords
        self.coords.setflags(write=False)
        self.generators = list(generators)
        self._right = {}

    def __repr__(self):
        return f"CayleyGroup({self.spec.label}, size={self.size}, k={self.k})"

    @property
    def size(self) -> int:
        return self.coords.shape[0]

    @property
    def k(self) -> int:
        return len(self.generators)

    def index(self, coords) -> np.ndarray:
        """Element indices for an array of coordinate rows (reduced mod N)."""
        c = np.asarray(coords) % self.spec.N
        shape = (self.spec.N,) * c.shape[-1]
        return np.ravel_multi_index(tuple(np.moveaxis(c, -1, 0)), shape)

    def mul(self, x, y) -> np.ndarray:
        """Index of the product x*y, vectorized over broadcastable index arrays."""
        a = self.coords[np.asarray(x)]
        b = self.coords[np.asarray(y)]
        if self.spec.family == "torus":
            return self.index(a + b)
        out = a + b
        out[..., 2] += a[..., 0] * b[..., 1]
        return self.index(out)

    def inv(self, x) -> np.ndarray:
        a = self.coords[np.asarray(x)]
        if self.spec.family == "torus":
            return self.index(-a)
        out = -a
        out[..., 2] += a[..., 0] * a[..., 1]
        return self.index(out)

    def right_table(self, s: int) -> np.ndarray:
        """``table[x]`` is the index of ``x * s`` for every element x."""
        if s not in self._right:
            t = self.mul(np.arange(self.size), s)
            t.setflags(write=False)
            self._right[s] = t
        return self._right[s]

    def generator_elements(self) -> list[int]:
        return [e for pair in self.generators for e in pair]

    def check_group_laws(self, n_samples: int = 1000, seed: int = 0) -> bool:
        rng = np.random.default_rng(seed)
        x, y, z = rng.integers(0, self.size, size=(3, n_samples))
        assoc = np.array_equal(self.mul(self.mul(x, y), z), self.mul(x, self.mul(y, z)))
        ident = np.array_equal(self.mul(x, 0), x) and np.array_equal(self.mul(0, x), x)
        inverse = np.all(self.mul(x, self.inv(x)) == 0) and np.all(self.mul(self.inv(x), x) == 0)
        return bool(assoc and ident and inverse)


def build_group(spec: GroupSpec, max_elements: int = DEFAULT_MAX_ELEMENTS) -> CayleyGroup:
    problems = spec.validate()
    if problems:
        raise ValueError("; ".join(problems))
    if spec.size > max_elements:
        raise ValueError(
            f"{spec.label} has {spec.size} elements, above the cap of {max_elements}"
        )
    N = int(spec.N)
    if spec.family == "torus":
        d = int(spec.dim)
        grids = np.meshgrid(*[np.arange(N)] * d, indexing="ij")
        coords = np.stack([g.ravel() for g in grids], axis=1)
        unit = np.eye(d, dtype=int)
        shape = (N,) * d
        gens = []
        for j in range(d):
            s = int(np.ravel_multi_index(tuple(unit[j] % N), shape))
            s_inv = int(np.ravel_multi_index(tuple(-unit[j] % N), shape))
            gens.append((s, s_inv))
        return CayleyGroup(spec, coords, gens)

    a, b, c = np.meshgrid(np.arange(N), np.arange(N), np.arange(N), indexing="ij")
    coords = np.stack([a.ravel(), b.ravel(), c.ravel()], axis=1)
    group = CayleyGroup(spec, coords, [])
    x = int(group.index(np.array([1, 0, 0])))
    y = int(group.index(np.array([0, 1, 0])))
    group.generators = [(x, int(group.inv(x))), (y, int(group.inv(y)))]
    return group


@dataclass(frozen=True)
class WordMetric:
    dist: np.ndarray
    volumes: np.ndarray  # volumes[r] = #{x : |x| <= r}, r = 0..r_max

    @property
    def r_max(self) -> int:
        return len(self.volumes) - 1

    @property
    def size(self) -> int:
        return int(self.volumes[-1])

    def V(self, r) -> np.ndarray | int:
        """Closed-ball volume #{x : |x| <= r} for real r >= 0."""
        r = np.asarray(r, dtype=float)
        idx = np.clip(np.floor(r + 1e-12).astype(int), -1, self.r_max)
        out = np.where(idx < 0, 0, self.volumes[np.maximum(idx, 0)])
        return int(out) if out.ndim == 0 else out

    def ball(self, r) -> np.ndarray:
        return self.dist <= r

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["element_index", "dist"])
            for i, d in enumerate(self.dist):
                w.writerow([i, int(d)])


def word_metric(g: CayleyGroup) -> WordMetric:
    """BFS hop distance from the identity along right-multiplication edges."""
    dist = np.full(g.size, -1, dtype=np.int64)
    dist[g.identity] = 0
    tables = [g.right_table(s) for s in g.generator_elements()]
    frontier = np.array([g.identity])
    level = 0
    while frontier.size:
        level += 1
        nxt = np.unique(np.concatenate([t[frontier] for t in tables]))
        nxt = nxt[dist[nxt] < 0]
        dist[nxt] = level
        frontier = nxt
    if np.any(dist < 0):
        raise ValueError("generators do not generate the group")
    dist.setflags(write=False)
    volumes = np.cumsum(np.bincount(dist))
    volumes.setflags(write=False)
    return WordMetric(dist=dist, volumes=volumes)


@dataclass(frozen=True)
class GrowthProfile:
    d_loc: float | None
    D_glob: float | None
    K_hat: float
    N_mult: int | None
    local_window: tuple[float, float]
    global_window: tuple[float, float]
    # Raw least-squares slopes of log V(r) against log r on the same windows.
    volume_slope_local: float | None = None
    volume_slope_global: float | None = None
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "d_loc": self.d_loc,
            "D_glob": self.D_glob,
            "K_hat": self.K_hat,
            "N_mult": self.N_mult,
            "local_window": list(self.local_window),
            "global_window": list(self.global_window),
            "volume_slope_local": self.volume_slope_local,
            "volume_slope_global": self.volume_slope_global,
            "notes": list(self.notes),
        }


def _fit_window(metric: WordMetric, lo: float, hi: float, min_points: int):
    r = np.arange(1, metric.r_max + 1)
    mask = (r >= lo) & (r <= hi)
    if mask.sum() < min_points:
        return None, None
    shells = np.diff(metric.volumes)[mask]
    logr = np.log(r[mask])
    shell_slope = np.polyfit(logr, np.log(shells), 1)[0]
    vol_slope = np.polyfit(logr, np.log(metric.volumes[1:][mask]), 1)[0]
    return 1.0 + float(shell_slope), float(vol_slope)


def growth_profile(metric: WordMetric, min_points: int = 2) -> GrowthProfile:
    """Fit local and global growth exponents and the doubling constant.

    The exponent on each window is ``1 + slope`` of log shell size
    ``V(r) - V(r-1)`` against log r; shell counts carry no additive offset
    from V(0) = 1, which otherwise biases desk-scale fits low.
    """
    rmax = metric.r_max
    local = (1.0, min(6.0, rmax / 4))
    glob = (max(1.0, rmax / 8), rmax / 2)

    rs = np.arange(1, rmax // 2 + 1)
    if rs.size:
        K_hat = float(np.max(metric.V(2 * rs) / metric.V(rs)))
    else:
        K_hat = float(metric.size)

    notes = []
    d_loc, vs_loc = _fit_window(metric, *local, min_points)
    D_glob, vs_glob = _fit_window(metric, *glob, min_points)
    for name, val, win in (("local", d_loc, local), ("global", D_glob, glob)):
        if val is None:
            msg = f"insufficient range: {name} window {win} holds fewer than {min_points} radii"
            notes.append(msg)
            warnings.warn(msg, GrowthFitWarning, stacklevel=2)

    N_mult = None
    if d_loc is not None and D_glob is not None:
        N_mult = 1 + max(int(round(d_loc)) // 2, int(round(D_glob)) // 2)
    return GrowthProfile(
        d_loc=d_loc,
        D_glob=D_glob,
        K_hat=K_hat,
        N_mult=N_mult,
        local_window=local,
        global_window=glob,
        volume_slope_local=vs_loc,
        volume_slope_global=vs_glob,
        notes=notes,
    )
