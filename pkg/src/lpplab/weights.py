"""Boundary recipes turning one noise field into the various weight fields."""

from dataclasses import dataclass

import numpy as np

from .errors import InvariantError, ParameterError, require
from .geometry import DownRightPath, path_steps


def _rates_ok(w, z):
    require(np.isfinite(w) and np.isfinite(z), "rates must be finite")


@dataclass(frozen=True)
class TwoParam:
    """Rate w on the horizontal axis, 1 - z on the vertical axis, origin 0."""
    w: float
    z: float
    kind = "two-param"

    def __post_init__(self):
        _rates_ok(self.w, self.z)
        if not (self.w > 0 and self.z < 1):
            raise ParameterError(f"two-param recipe needs w > 0 and z < 1, got w={self.w}, z={self.z}")

    @property
    def hdiv(self):
        return float(self.w)

    @property
    def vdiv(self):
        return 1.0 - float(self.z)


def Stationary(z):
    return TwoParam(z, z)


@dataclass(frozen=True)
class Mixed:
    w: float
    z: float
    k: int
    kind = "mixed"

    def __post_init__(self):
        if not (0 < self.w < 1 and 0 < self.z < 1):
            raise ParameterError(f"mixed recipe needs w, z in (0,1), got w={self.w}, z={self.z}")
        require(self.k >= 0, "mixed recipe needs k >= 0")


@dataclass(frozen=True)
class Northeast:
    w: float
    z: float
    m: int
    n: int
    kind = "northeast"

    def __post_init__(self):
        if not (self.w > 0 and self.z < 1):
            raise ParameterError(f"northeast recipe needs w > 0 and z < 1, got w={self.w}, z={self.z}")
        require(self.m >= 1 and self.n >= 1, "northeast recipe needs m, n >= 1")


@dataclass(frozen=True)
class PathInduced:
    path: DownRightPath
    z: float
    kind = "path-induced"

    def __post_init__(self):
        if not (0 < self.z < 1):
            raise ParameterError(f"path-induced recipe needs z in (0,1), got {self.z}")

    @property
    def base(self):
        return self.path.base


@dataclass(frozen=True)
class BulkOnly:
    kind = "bulk-only"


def path_coefficients(path, z):
    """Sign and divisor of the noise at each path vertex (0-based), and the
    restriction kind: 0 free start, 1 first step forced right, 2 forced up."""
    R, D = path_steps(path)
    b, ell = path.base, len(path)
    sgn = np.zeros(ell)
    div = np.ones(ell)
    kind = np.zeros(ell, dtype=np.int8)
    for k in range(1, ell + 1):
        if k > b:
            if k - 1 in R:
                sgn[k - 1], div[k - 1] = 1.0, z
            elif k in D:
                sgn[k - 1], div[k - 1] = -1.0, 1.0 - z
            else:
                raise InvariantError(f"path vertex {k} has no incoming step")
            if k in D:
                kind[k - 1] = 1
        elif k < b:
            if k in R:
                sgn[k - 1], div[k - 1] = -1.0, z
                kind[k - 1] = 2
            elif k + 1 in D:
                sgn[k - 1], div[k - 1] = 1.0, 1.0 - z
            else:
                raise InvariantError(f"path vertex {k} has no outgoing step")
    return sgn, div, kind


def path_weight(eta, path, z, k):
    """Signed weight of path vertex k (1-based) from its noise value."""
    R, D = path_steps(path)
    b = path.base
    if k == b:
        return 0.0
    if k > b:
        return eta / z if k - 1 in R else -(eta / (1.0 - z))
    return -(eta / z) if k in R else eta / (1.0 - z)


@dataclass(frozen=True)
class WeightField:
    recipe: object
    noise: object
    values: np.ndarray

    @property
    def rect(self):
        return self.noise.rect

    def __call__(self, i, j):
        r = self.rect
        return float(self.values[i - r.i0, j - r.j0])

    def block(self, lo, hi):
        """Weights on [lo, hi] as an array indexed from lo."""
        r = self.rect
        return self.values[lo[0] - r.i0:hi[0] - r.i0 + 1, lo[1] - r.j0:hi[1] - r.j0 + 1]


def build_weights(noise, recipe):
    r = noise.rect
    eta = noise.values
    vals = np.array(eta, dtype=np.float64, copy=True)
    I = np.arange(r.i0, r.i1 + 1)[:, None] + 0 * np.arange(r.j0, r.j1 + 1)[None, :]
    J = np.arange(r.j0, r.j1 + 1)[None, :] + 0 * np.arange(r.i0, r.i1 + 1)[:, None]
    kind = getattr(recipe, "kind", None)
    if kind == "two-param":
        h = (J == 0) & (I > 0)
        v = (I == 0) & (J > 0)
        vals[h] = eta[h] / recipe.hdiv
        vals[v] = eta[v] / recipe.vdiv
        vals[(I == 0) & (J == 0)] = 0.0
    elif kind == "mixed":
        w, z, k = recipe.w, recipe.z, recipe.k
        for mask, rate in (((J == 0) & (I > k), w), ((J == 0) & (I > 0) & (I <= k), z),
                           ((I == 0) & (J > k), 1.0 - w), ((I == 0) & (J > 0) & (J <= k), 1.0 - z)):
            vals[mask] = eta[mask] / rate
        vals[(I == 0) & (J == 0)] = 0.0
    elif kind == "northeast":
        m, n = recipe.m, recipe.n
        top = (J == n + 1) & (I >= 1) & (I <= m)
        side = (I == m + 1) & (J >= 1) & (J <= n)
        vals[top] = eta[top] / recipe.w
        vals[side] = eta[side] / (1.0 - recipe.z)
        vals[(I == m + 1) & (J == n + 1)] = 0.0
    elif kind == "path-induced":
        path = recipe.path
        require(all(r.contains(v) for v in path.vertices),
                "path-induced recipe needs the path inside the noise rectangle")
        for k, (i, j) in enumerate(path.vertices, start=1):
            vals[i - r.i0, j - r.j0] = path_weight(eta[i - r.i0, j - r.j0], path, recipe.z, k)
    elif kind == "bulk-only":
        pass
    else:
        raise ParameterError(f"unknown recipe {recipe!r}")
    vals.setflags(write=False)
    return WeightField(recipe, noise, vals)


def recipe_from_config(cfg):
    """Recipe from a flat mapping with keys kind, w, z, k, m, n, path."""
    kind = cfg.get("kind", "two-param")
    f = lambda key: float(cfg[key])
    if kind == "two-param":
        return TwoParam(f("w"), f("z"))
    if kind == "mixed":
        return Mixed(f("w"), f("z"), int(cfg["k"]))
    if kind == "northeast":
        return Northeast(f("w"), f("z"), int(cfg["m"]), int(cfg["n"]))
    if kind == "path-induced":
        return PathInduced(DownRightPath.parse(cfg["path"]), f("z"))
    if kind == "bulk-only":
        return BulkOnly()
    raise ParameterError(f"unknown recipe kind {kind!r}")
