"""Uniform periodic (x, p) phase-space lattices with spectral metadata."""

import numpy as np

from .errors import ValidationError


def _is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


class PhaseSpaceGrid:
    """Periodic rectangular lattice over position x and momentum p.

    Lattice points are x_j = x_min + j*dx for j = 0..n_x-1 (x_max itself is
    the wrap-around point and carries no node), and likewise in p.  Index
    arithmetic wraps on both axes.  ``k_x`` and ``k_p`` are the angular
    wavenumbers conjugate to x and p in standard FFT ordering (non-negative
    frequencies first, then negative).  ``k_p`` is the lambda variable used
    by the spectral propagators.
    """

    __slots__ = ("x_min", "x_max", "n_x", "p_min", "p_max", "n_p",
                 "dx", "dp", "x", "p", "k_x", "k_p")

    def __init__(self, x_min, x_max, n_x, p_min, p_max, n_p):
        if not (x_max > x_min):
            raise ValidationError(f"x bounds inverted or empty: [{x_min}, {x_max}]")
        if not (p_max > p_min):
            raise ValidationError(f"p bounds inverted or empty: [{p_min}, {p_max}]")
        for name, n in (("n_x", n_x), ("n_p", n_p)):
            if int(n) != n or n < 8 or not _is_power_of_two(int(n)):
                raise ValidationError(
                    f"{name} must be a power of two >= 8, got {n}")
        self.x_min = float(x_min)
        self.x_max = float(x_max)
        self.n_x = int(n_x)
        self.p_min = float(p_min)
        self.p_max = float(p_max)
        self.n_p = int(n_p)
        self.dx = (self.x_max - self.x_min) / self.n_x
        self.dp = (self.p_max - self.p_min) / self.n_p
        self.x = self.x_min + self.dx * np.arange(self.n_x)
        self.p = self.p_min + self.dp * np.arange(self.n_p)
        self.k_x = 2.0 * np.pi * np.fft.fftfreq(self.n_x, d=self.dx)
        self.k_p = 2.0 * np.pi * np.fft.fftfreq(self.n_p, d=self.dp)

    @property
    def shape(self):
        return (self.n_x, self.n_p)

    @property
    def cell_area(self):
        return self.dx * self.dp

    @property
    def key(self):
        """Hashable value identity, used for propagator caching."""
        return (self.x_min, self.x_max, self.n_x, self.p_min, self.p_max, self.n_p)

    def __eq__(self, other):
        return isinstance(other, PhaseSpaceGrid) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return (f"PhaseSpaceGrid(x=[{self.x_min}, {self.x_max}) n_x={self.n_x}, "
                f"p=[{self.p_min}, {self.p_max}) n_p={self.n_p})")


def make_grid(x_min, x_max, n_x, p_min, p_max, n_p):
    """Build a periodic phase-space grid; sizes must be powers of two >= 8."""
    return PhaseSpaceGrid(x_min, x_max, n_x, p_min, p_max, n_p)
