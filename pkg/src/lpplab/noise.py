"""Counter-based standard exponential noise field.

Every site value is a pure function of (seed, replica, stream, i, j): Philox
keyed by (seed, replica) evaluated at block (j // 4, i, stream, 0), lane
j % 4.  Any sub-rectangle therefore regenerates the same bits, whatever
rectangle it was first drawn from.
"""

from dataclasses import dataclass

import numpy as np

from . import _fallback
from .errors import SizeError, require
from .geometry import Rect
from .kernels import get

MAIN = 0     # weights of the lattice model
AUX = 1      # auxiliary uniforms (initial particle configurations)
COPY = 2     # first stream of independent copies (two-sample comparisons)

MAX_SITES = 2 ** 31


def inverse_cdf(u):
    """Exp(1) quantile -ln(1 - u), using the same logarithm as the generator."""
    u = np.asarray(u, dtype=np.float64)
    return _fallback.neglog(1.0 - u)


def _key(seed, replica):
    require(0 <= int(seed) < 2 ** 64 and 0 <= int(replica) < 2 ** 64,
            "seed and replica must fit in 64 unsigned bits")
    return int(seed), int(replica)


@dataclass(frozen=True)
class NoiseField:
    seed: int
    replica: int
    rect: Rect
    values: np.ndarray
    stream: int = MAIN

    def __call__(self, i, j):
        return float(self.values[i - self.rect.i0, j - self.rect.j0])

    def sub(self, rect):
        require(self.rect.contains(rect.origin) and self.rect.contains((rect.i1, rect.j1)),
                "sub-rectangle outside the field")
        a, b = self.rect.local(rect.origin)
        ni, nj = rect.shape
        return NoiseField(self.seed, self.replica, rect,
                          self.values[a:a + ni, b:b + nj], self.stream)


def generate_noise(seed, replica, rect, stream=MAIN):
    seed, replica = _key(seed, replica)
    ni, nj = rect.shape
    if ni * nj > MAX_SITES:
        raise SizeError(f"rectangle {rect} has {ni * nj} sites; limit is {MAX_SITES}")
    vals = get("noise_block")(seed, replica, stream, rect.i0, rect.j0, ni, nj)
    vals.setflags(write=False)
    return NoiseField(seed, replica, rect, vals, stream)


def uniforms(seed, replica, stream, col, rows):
    """Uniforms on [0, 1) at (col, rows); U = 1 - v with the generator's v."""
    bits = _fallback.raw_bits(seed, [replica], stream, col, np.asarray(rows))[0]
    v = ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53
    return 1.0 - v
