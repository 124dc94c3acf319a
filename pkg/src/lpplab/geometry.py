"""Lattice geometry: rectangles, up-right paths and down-right paths."""

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, require

INT64_MAX = 2 ** 63 - 1


def check_vertex(v):
    i, j = v
    require(isinstance(i, (int, np.integer)) and isinstance(j, (int, np.integer)),
            f"vertex {v!r} must have integer coordinates")
    require(0 <= i <= INT64_MAX and 0 <= j <= INT64_MAX,
            f"vertex {v!r} outside the nonnegative quadrant")
    return int(i), int(j)


def leq(u, v):
    """Componentwise order u <= v."""
    return u[0] <= v[0] and u[1] <= v[1]


@dataclass(frozen=True)
class Rect:
    """Closed lattice rectangle [i0, i1] x [j0, j1]."""
    i0: int
    j0: int
    i1: int
    j1: int

    def __post_init__(self):
        require(self.i0 <= self.i1 and self.j0 <= self.j1, f"empty rectangle {self}")
        check_vertex((self.i0, self.j0))

    @classmethod
    def span(cls, lo, hi):
        return cls(lo[0], lo[1], hi[0], hi[1])

    @property
    def shape(self):
        return (self.i1 - self.i0 + 1, self.j1 - self.j0 + 1)

    @property
    def origin(self):
        return (self.i0, self.j0)

    def contains(self, v):
        return self.i0 <= v[0] <= self.i1 and self.j0 <= v[1] <= self.j1

    def local(self, v):
        return (v[0] - self.i0, v[1] - self.j0)


def is_up_right(verts):
    return all((b[0] - a[0], b[1] - a[1]) in ((1, 0), (0, 1))
               for a, b in zip(verts, verts[1:]))


_PATH_RE = re.compile(r"^\s*(\d+)\s*,\s*(\d+)\s*:\s*([RD]*)\s*(?:@\s*(\d+))?\s*$")


@dataclass(frozen=True)
class DownRightPath:
    """Staircase from ``start`` using Right (+1,0) and Down (0,-1) steps.

    Vertices and the base index are 1-based in the public API, matching the
    usual way such paths are written down.
    """
    start: tuple
    steps: str = ""
    base: int = 1
    vertices: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        i, j = check_vertex(self.start)
        require(set(self.steps) <= {"R", "D"}, f"steps must use R/D, got {self.steps!r}")
        verts = [(i, j)]
        for s in self.steps:
            i, j = (i + 1, j) if s == "R" else (i, j - 1)
            require(j >= 0, "down-right path leaves the quadrant")
            verts.append((i, j))
        object.__setattr__(self, "start", verts[0])
        object.__setattr__(self, "vertices", tuple(verts))
        require(1 <= self.base <= len(verts),
                f"base index {self.base} outside 1..{len(verts)}")

    @classmethod
    def parse(cls, text):
        """Parse "i,j:RRD...@b"; the base defaults to 1."""
        mt = _PATH_RE.match(text)
        if not mt:
            raise ParameterError(f"cannot parse path {text!r}; expected 'i,j:RD..@b'")
        i, j, steps, b = mt.groups()
        return cls((int(i), int(j)), steps, int(b) if b else 1)

    @classmethod
    def from_vertices(cls, verts, base=1):
        verts = [tuple(v) for v in verts]
        steps = []
        for a, b in zip(verts, verts[1:]):
            d = (b[0] - a[0], b[1] - a[1])
            if d == (1, 0):
                steps.append("R")
            elif d == (0, -1):
                steps.append("D")
            else:
                raise ParameterError(f"{a} -> {b} is not a down-right step")
        return cls(verts[0], "".join(steps), base)

    def __str__(self):
        return f"{self.start[0]},{self.start[1]}:{self.steps}@{self.base}"

    def __len__(self):
        return len(self.vertices)

    def __getitem__(self, k):
        """1-based vertex access."""
        require(1 <= k <= len(self.vertices), f"index {k} outside the path")
        return self.vertices[k - 1]

    @property
    def base_vertex(self):
        return self.vertices[self.base - 1]

    @property
    def first(self):
        return self.vertices[0]

    @property
    def last(self):
        return self.vertices[-1]

    def with_base(self, b):
        return DownRightPath(self.start, self.steps, b)

    def index_of(self, v):
        """1-based index of vertex v, or 0 when v is not on the path."""
        v = tuple(v)
        try:
            return self.vertices.index(v) + 1
        except ValueError:
            return 0

    def column_ranges(self):
        """Per column from first to last: (column, lowest row, highest row,
        0-based index of the highest vertex)."""
        out = []
        for k, (i, j) in enumerate(self.vertices):
            if out and out[-1][0] == i:
                c, lo, hi, k0 = out[-1]
                out[-1] = (c, j, hi, k0)
            else:
                out.append((i, j, j, k))
        return out


def path_steps(nu):
    """Right-step and down-step index sets (1-based).

    R holds k in 1..l-1 whose step k -> k+1 goes right; D holds k in 2..l
    reached from k-1 by a down step."""
    R = {k + 1 for k, s in enumerate(nu.steps) if s == "R"}
    D = {k + 2 for k, s in enumerate(nu.steps) if s == "D"}
    return R, D


def frame(nu):
    """Upper-right corner (u, v): last column and first row of the path."""
    return nu.last[0], nu.first[1]


def reachable_contains(nu, v):
    """True when v lies inside the frame and dominates some path vertex."""
    u, top = frame(nu)
    if v[0] > u or v[1] > top:
        return False
    return any(leq(p, v) for p in nu.vertices)


def l_shaped(p, q, m, n):
    """Path from (p, n) down to (p, q) then right to (m, q), based at (p, q)."""
    require(p <= m and q <= n, f"L-shaped path needs p <= m and q <= n, got {(p, q, m, n)}")
    return DownRightPath((p, n), "D" * (n - q) + "R" * (m - p), n - q + 1)


def axes_path(m, n):
    return l_shaped(0, 0, m, n)


def antidiagonal_path(n, i0=0):
    """Staircase (floor((k-1)/2), n - floor(k/2)), k = 1..2n+1, based at (i0, n-i0)."""
    require(0 <= i0 <= n, "base column outside 0..n")
    return DownRightPath((0, n), "DR" * n, 2 * i0 + 1)


def staircase_path(start, steps, base=1):
    return DownRightPath(tuple(start), steps, base)


def random_down_right(rng, max_cols, max_rows, base=None):
    """Random staircase inside [0, max_cols] x [0, max_rows]."""
    i0 = int(rng.integers(0, max_cols + 1))
    top = int(rng.integers(0, max_rows + 1))
    nr = int(rng.integers(0, max_cols - i0 + 1))
    nd = int(rng.integers(0, top + 1))
    steps = np.array(["R"] * nr + ["D"] * nd)
    rng.shuffle(steps)
    steps = "".join(steps.tolist())
    ell = nr + nd + 1
    b = int(rng.integers(1, ell + 1)) if base is None else base
    return DownRightPath((i0, top), steps, b)


def lattice_paths(src, dst):
    """All up-right paths from src to dst (small rectangles only)."""
    if not leq(src, dst):
        return
    stack = [(src, [src])]
    while stack:
        v, path = stack.pop()
        if v == dst:
            yield path
            continue
        if v[1] < dst[1]:
            w = (v[0], v[1] + 1)
            stack.append((w, path + [w]))
        if v[0] < dst[0]:
            w = (v[0] + 1, v[1])
            stack.append((w, path + [w]))
