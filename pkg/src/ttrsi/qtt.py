"""Quantics tensor trains: functions of one variable on a dyadic grid.

The grid point for bits ``(s_1, ..., s_n)`` is ``a + (b - a) * sum_j s_j 2^-j``,
so ``s_1`` is the most significant (coarsest) bit and becomes site 0 of the
train.
"""
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import CapacityError
from .tt import DENSE_CAP, tt_from_dense
from .validation import check_finite, check_int, check_real


@dataclass(frozen=True)
class QttGrid:
    """Uniform grid of ``2**n_bits`` points on ``[a, b)``."""

    n_bits: int
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        check_int(self.n_bits, "n_bits", 2)
        check_real(self.a, "a")
        check_real(self.b, "b")
        if not self.b > self.a:
            raise ValueError(f"empty domain [{self.a}, {self.b})")

    @property
    def size(self):
        return 2**self.n_bits

    @property
    def spacing(self):
        return (self.b - self.a) / self.size

    def points(self):
        return self.a + self.spacing * np.arange(self.size)


def bits_to_x(grid, bits):
    """Grid coordinate of a bit string, most significant bit first."""
    bits = list(bits)
    if len(bits) != grid.n_bits:
        raise ValueError(f"expected {grid.n_bits} bits, got {len(bits)}")
    if any(s not in (0, 1) for s in bits):
        raise ValueError(f"bits must be 0 or 1, got {bits}")
    frac = sum(s * 2.0 ** -(j + 1) for j, s in enumerate(bits))
    return grid.a + (grid.b - grid.a) * frac


def x_to_bits(grid, x):
    """Bits of the grid point at or just below ``x``."""
    i = int(math.floor((x - grid.a) / grid.spacing))
    if not 0 <= i < grid.size:
        raise ValueError(f"{x} lies outside [{grid.a}, {grid.b})")
    return tuple(int(c) for c in format(i, f"0{grid.n_bits}b"))


def sample_grid(f, grid, cap=DENSE_CAP):
    """``f`` on every grid point, shaped ``(2,) * n_bits``."""
    if grid.size > cap:
        raise CapacityError(f"grid of {grid.size} points exceeds the dense cap of {cap}")
    values = np.asarray(f(grid.points()), dtype=np.float64)
    if values.shape != (grid.size,):
        values = np.broadcast_to(values, (grid.size,)).copy()
    check_finite(values, "function samples")
    # C order with the first axis most significant matches MSB-first bits
    return values.reshape((2,) * grid.n_bits)


def qtt_from_function(f, grid, chi_max, eps, cap=DENSE_CAP):
    """QTT of a vectorized function via TT-SVD of its samples."""
    return tt_from_dense(sample_grid(f, grid, cap), chi_max, eps, cap=cap)


# -- function catalog ---------------------------------------------------------


def gaussian(mu=0.5, sigma=0.15):
    check_real(mu, "mu")
    sigma = check_real(sigma, "sigma")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return lambda x: np.exp(-((np.asarray(x) - mu) ** 2) / (2.0 * sigma**2))


def osc1():
    def f(x):
        x = np.asarray(x, dtype=float)
        return np.cos(2.0**10 * x) * np.exp(-(x**2)) + 4.0 * np.exp(x) - 3.0 * x**2 + 10.0 * x

    return f


def osc2():
    def f(x):
        x = np.asarray(x, dtype=float)
        return np.sin(2.0**10 * x) * (np.exp(x**2) + 5.0 * x + 2.0) - 4.0 * x

    return f


def relu_target(mu=0.5, sigma=0.1, shift=0.5):
    """Smooth sign-changing input for the ReLU demo: ``gaussian(mu, sigma) - shift``."""
    g = gaussian(mu, sigma)
    shift = check_real(shift, "shift")
    return lambda x: g(x) - shift


def relu(x):
    return np.maximum(x, 0.0)


_CATALOG = {
    "gaussian": gaussian,
    "osc1": osc1,
    "osc2": osc2,
    "relu_target": relu_target,
}


def builtin_functions():
    """Name -> factory; each factory takes keyword parameters and returns ``f(x)``."""
    return dict(_CATALOG)


def make_function(name, params=None):
    """Build a catalog function from its name and a parameter mapping."""
    if name not in _CATALOG:
        raise KeyError(f"unknown function {name!r}; choose from {sorted(_CATALOG)}")
    return _CATALOG[name](**(params or {}))
