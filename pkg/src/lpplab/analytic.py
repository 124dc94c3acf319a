"""Closed-form quantities of the exponential corner growth model."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ParameterError, require


def _unit(name, v, lo_open=True, hi_open=True):
    ok = (v > 0 if lo_open else v >= 0) and (v < 1 if hi_open else v <= 1)
    if not ok:
        raise ParameterError(f"{name}={v} outside its admissible range")


def shape(x, y):
    """Bulk shape function (sqrt x + sqrt y)^2."""
    return (math.sqrt(x) + math.sqrt(y)) ** 2


def char_direction(x, y):
    """Minimizer of the mean function over the rate: sqrt x / (sqrt x + sqrt y)."""
    require(x >= 0 and y >= 0 and x + y > 0, "need x, y >= 0, not both zero")
    rx = math.sqrt(x)
    return rx / (rx + math.sqrt(y))


def scale(x, y):
    """Fluctuation scale: (shape / (zeta (1 - zeta)))^(1/3)."""
    require(x > 0 and y > 0, "scale needs x, y > 0")
    c = char_direction(x, y)
    return (shape(x, y) / (c * (1.0 - c))) ** (1.0 / 3.0)


@dataclass(frozen=True)
class ShapeQuantities:
    gamma: float
    zeta: float
    sigma: float


def shape_quantities(x, y):
    require(x >= 0 and y >= 0 and x + y > 0, f"shape quantities need x, y >= 0, got {(x, y)}")
    sig = scale(x, y) if x > 0 and y > 0 else math.nan
    return ShapeQuantities(shape(x, y), char_direction(x, y), sig)


def in_cone(x, y, delta):
    return x > 0 and y > 0 and x >= delta * y and y >= delta * x


def mean_fn(z, x, y):
    """Stationary mean x/z + y/(1 - z)."""
    _unit("z", z)
    require(x >= 0 and y >= 0, "mean function needs x, y >= 0")
    return x / z + y / (1.0 - z)


def lmgf(w, z, x, y):
    """log E exp{(w - z) G} for the two-rate boundary model."""
    _unit("w", w)
    _unit("z", z)
    return x * math.log(w / z) + y * math.log((1.0 - z) / (1.0 - w))


def lmgf_integral(w, z, x, y):
    """Same quantity as the rate integral of the mean function, by quadrature."""
    _unit("w", w)
    _unit("z", z)
    val, _ = integrate.quad(lambda t: mean_fn(t, x, y), z, w, epsabs=1e-14, epsrel=1e-13)
    return val


def taylor_residuals(w, z, x, y):
    """Absolute errors of the quadratic mean and cubic lmgf expansions at zeta."""
    _unit("w", w)
    _unit("z", z)
    require(x > 0 and y > 0, "residuals need x, y > 0")
    g, c, s = shape(x, y), char_direction(x, y), scale(x, y)
    s3 = s ** 3
    mres = abs(mean_fn(z, x, y) - g - s3 * (z - c) ** 2)
    lres = abs(lmgf(w, z, x, y) - (w - z) * g - s3 / 3.0 * ((w - c) ** 3 - (z - c) ** 3))
    return mres, lres


def mean_residual_exact(z, x, y):
    """Closed form of the signed mean residual: (z - c)^3 g (c + z - 1) / (z(1-z)c(1-c))."""
    g, c = shape(x, y), char_direction(x, y)
    return (z - c) ** 3 * g * (c + z - 1.0) / (z * (1.0 - z) * c * (1.0 - c))


def residual_constant(delta=0.5, dz=0.1, nratio=201, nz=201):
    """Largest mean residual / ((x + y)|z - zeta|^3) over a grid of the cone
    (ratios y/x in [delta, 1/delta], endpoints included) and |z - zeta| <= dz.

    The ratio is scale invariant, so x + y = 1 suffices.
    """
    worst, arg = 0.0, None
    for lr in np.linspace(math.log(delta), -math.log(delta), nratio):
        r = math.exp(lr)
        x, y = 1.0 / (1.0 + r), r / (1.0 + r)
        c = char_direction(x, y)
        for d in np.linspace(-dz, dz, nz):
            if d == 0:
                continue
            z = c + d
            ratio = taylor_residuals(0.5, z, x, y)[0] / ((x + y) * abs(d) ** 3)
            if ratio > worst:
                worst, arg = ratio, (x, y, z)
    return worst, arg


def curvature_fd(x, y, h=1e-5):
    """Half the second rate derivative of the mean function at zeta, by central differences."""
    c = char_direction(x, y)
    return 0.5 * (mean_fn(c + h, x, y) - 2.0 * mean_fn(c, x, y) + mean_fn(c - h, x, y)) / h ** 2


def busemann_cdf(kind, z, s=(), t=()):
    """Joint law of boundary increments along a path: product form.

    hor: prod exp(-z s_i^-) prod (1 - exp(-(1 - z) t_j^+));
    ver: prod (1 - exp(-z s_i^+)) prod exp(-(1 - z) t_j^-).
    """
    _unit("z", z)
    s = np.asarray(s, dtype=np.float64).ravel()
    t = np.asarray(t, dtype=np.float64).ravel()
    if kind == "hor":
        a = np.exp(-np.maximum(-s, 0.0) * z).prod()
        b = (1.0 - np.exp(-np.maximum(t, 0.0) * (1.0 - z))).prod()
    elif kind == "ver":
        a = (1.0 - np.exp(-np.maximum(s, 0.0) * z)).prod()
        b = np.exp(-np.maximum(-t, 0.0) * (1.0 - z)).prod()
    else:
        raise ParameterError(f"kind must be 'hor' or 'ver', got {kind!r}")
    return float(a * b)


def cif_limit_cdf(w, z, x):
    """Limit of P{interface column <= n x} for the two-rate boundary model."""
    require(0 <= x <= 1, f"x={x} outside [0, 1]")
    require(0 < w <= 1 and 0 <= z < 1, f"need w in (0,1] and z in [0,1), got {(w, z)}")
    c = char_direction(x, 1.0 - x)
    if w > z:
        return (min(w, c) - min(z, c)) / (w - z)
    rho = char_direction(w * z, (1.0 - w) * (1.0 - z))
    return 1.0 if c > rho else 0.0


def x_for_direction(c):
    """Inverse of x -> zeta(x, 1 - x): x = c^2 / (c^2 + (1 - c)^2)."""
    require(0 <= c <= 1, "direction outside [0, 1]")
    return c * c / (c * c + (1.0 - c) ** 2)


def zeta_shift(x, y, delta, axis="hor"):
    """Exact change of zeta when one coordinate is increased by delta."""
    require(x > 0 and y > 0 and delta >= 0, "zeta shift needs x, y > 0 and delta >= 0")
    c = char_direction(x, y)
    rx, ry = math.sqrt(x), math.sqrt(y)
    if axis == "hor":
        rd = math.sqrt(x + delta)
        return delta * (1.0 - c) / ((rd + ry) * (rd + rx))
    if axis == "ver":
        rd = math.sqrt(y + delta)
        return -delta * c / ((rx + rd) * (ry + rd))
    raise ParameterError(f"axis must be 'hor' or 'ver', got {axis!r}")


def first_step_prediction(s):
    """Refined cubic rate s^3 / 6 for the less likely first step."""
    return s ** 3 / 6.0
