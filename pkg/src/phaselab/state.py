"""Physical parameters plus the two field types the engines evolve."""

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, NumericalBlowupError, ValidationError


@dataclass(frozen=True)
class PhysicalParams:
    """Planck's constant and mass in dimensionless model units."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValidationError(f"hbar must be positive, got {self.hbar}")
        if not self.mass > 0:
            raise ValidationError(f"mass must be positive, got {self.mass}")

    @property
    def key(self):
        return (self.hbar, self.mass)


def check_resolvability(grid, params):
    """A phase-space cell must fit inside hbar, else the grid cannot resolve
    quantum structure: dx*dp <= hbar."""
    if grid.dx * grid.dp > params.hbar:
        raise ValidationError(
            f"grid cannot resolve a quantum phase-space cell: "
            f"dx*dp = {grid.dx * grid.dp:.6g} > hbar = {params.hbar:.6g}")


class Distribution:
    """Real-valued phase-space density rho[x_index][p_index] on a grid.

    May be negative (Wigner function).  Normalization is tracked by the
    diagnostics, never silently enforced.
    """

    __slots__ = ("grid", "values", "time")

    def __init__(self, grid, values, time=0.0):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.shape != grid.shape:
            raise GridMismatchError(
                f"field shape {values.shape} does not match grid {grid.shape}")
        self.grid = grid
        self.values = values
        self.time = float(time)

    def copy(self):
        return Distribution(self.grid, self.values.copy(), self.time)

    def assert_finite(self, context=""):
        # A single NaN or Inf poisons the sum, so this is an O(N) full check.
        if not np.isfinite(self.values.sum()):
            raise NumericalBlowupError(
                f"non-finite values in distribution{': ' + context if context else ''}")

    def boundary_mass_fraction(self, band=0.05):
        """Fraction of sum|rho| within ``band`` of either edge on either axis."""
        a = np.abs(self.values)
        total = a.sum()
        if total == 0.0:
            return 0.0
        bx = max(1, int(round(band * self.grid.n_x)))
        bp = max(1, int(round(band * self.grid.n_p)))
        inner = a[bx:-bx, bp:-bp].sum()
        return float((total - inner) / total)


class Wavefunction:
    """Complex field psi[x_index] on the x-axis of a grid (oracle engine)."""

    __slots__ = ("grid", "values", "time")

    def __init__(self, grid, values, time=0.0):
        values = np.ascontiguousarray(values, dtype=np.complex128)
        if values.shape != (grid.n_x,):
            raise GridMismatchError(
                f"wavefunction shape {values.shape} does not match grid n_x={grid.n_x}")
        self.grid = grid
        self.values = values
        self.time = float(time)

    def copy(self):
        return Wavefunction(self.grid, self.values.copy(), self.time)

    def norm(self):
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.dx)

    def assert_finite(self, context=""):
        if not np.isfinite(self.values.sum()):
            raise NumericalBlowupError(
                f"non-finite values in wavefunction{': ' + context if context else ''}")


def init_gaussian(grid, x0, p0, sigma_x, sigma_p):
    """Normalized Gaussian phase-space density centered at (x0, p0).

    Preconditions keep the tails representable on the periodic box:
    4*sigma must fit inside the axis width on both axes.
    """
    if not (sigma_x > 0 and sigma_p > 0):
        raise ValidationError("gaussian widths must be positive")
    if 4.0 * sigma_x > grid.x_max - grid.x_min:
        raise ValidationError(
            f"state too wide for the grid: 4*sigma_x = {4 * sigma_x:.6g} exceeds "
            f"x width {grid.x_max - grid.x_min:.6g}")
    if 4.0 * sigma_p > grid.p_max - grid.p_min:
        raise ValidationError(
            f"state too wide for the grid: 4*sigma_p = {4 * sigma_p:.6g} exceeds "
            f"p width {grid.p_max - grid.p_min:.6g}")
    gx = np.exp(-((grid.x - x0) ** 2) / (2.0 * sigma_x ** 2))
    gp = np.exp(-((grid.p - p0) ** 2) / (2.0 * sigma_p ** 2))
    values = np.outer(gx, gp)
    values /= values.sum() * grid.cell_area
    return Distribution(grid, values, time=0.0)


def gaussian_wavepacket(grid, params, x0, p0, sigma_x):
    """Normalized minimum-uncertainty packet exp(-(x-x0)^2/(4 sx^2) + i p0 x / hbar).

    Its Wigner transform is the Gaussian with sigma_p = hbar / (2 sigma_x).
    """
    if not sigma_x > 0:
        raise ValidationError("gaussian width must be positive")
    if 4.0 * sigma_x > grid.x_max - grid.x_min:
        raise ValidationError(
            f"state too wide for the grid: 4*sigma_x = {4 * sigma_x:.6g} exceeds "
            f"x width {grid.x_max - grid.x_min:.6g}")
    x = grid.x
    psi = np.exp(-((x - x0) ** 2) / (4.0 * sigma_x ** 2) + 1j * p0 * x / params.hbar)
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * grid.dx)
    return Wavefunction(grid, psi, time=0.0)
