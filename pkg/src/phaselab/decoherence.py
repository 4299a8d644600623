"""Decoherence models: momentum diffusion and non-selective coarse-graining
measurements, plus their Strang composition with the Moyal engine."""

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import NumericalBlowupError, ValidationError
from .potential import kicks_crossed
from .quantum import moyal_step
from .state import Distribution


@dataclass(frozen=True)
class MeasurementSpec:
    """Unread Gaussian measurement: periodic coarse-graining of the field.

    At least one width must be set; each configured axis is convolved with a
    Gaussian of that width, which models the ensemble-level effect of a
    non-selective measurement of the corresponding observable.
    """

    period: float
    sigma_x: float = None
    sigma_p: float = None

    def __post_init__(self):
        if not self.period > 0:
            raise ValidationError(f"measurement period must be positive, got {self.period}")
        if self.sigma_x is None and self.sigma_p is None:
            raise ValidationError("measurement needs at least one coarse-graining width")
        for name, w in (("sigma_x", self.sigma_x), ("sigma_p", self.sigma_p)):
            if w is not None and not w > 0:
                raise ValidationError(f"measurement {name} must be positive, got {w}")


@dataclass(frozen=True)
class DecoherenceConfig:
    """Momentum diffusion coefficient plus optional periodic measurement.

    ``diffusion_D`` acts on the p axis (position-coupled environment);
    ``diffusion_D_x`` is an optional symmetric channel for experiments.
    """

    diffusion_D: float = 0.0
    measurement: MeasurementSpec = None
    diffusion_D_x: float = 0.0

    def __post_init__(self):
        if self.diffusion_D < 0:
            raise ValidationError(f"diffusion_D must be >= 0, got {self.diffusion_D}")
        if self.diffusion_D_x < 0:
            raise ValidationError(f"diffusion_D_x must be >= 0, got {self.diffusion_D_x}")


_AXES = {"p": 1, "x": 0}


def _smooth(values, grid, axis, damping):
    """Multiply the field's spectrum along one axis by a real damping row."""
    ax = _AXES[axis]
    n = values.shape[ax]
    f = sfft.rfft(values, axis=ax)
    shape = [1, 1]
    shape[ax] = -1
    f *= damping.reshape(shape)
    return sfft.irfft(f, n=n, axis=ax)


def diffusion_step(dist, D, dt, axis="p"):
    """Exact heat-kernel substep: multiply by exp(-D k^2 dt) along one axis.

    The zero mode is untouched so the norm is conserved; every other mode is
    damped, so sum(rho^2) never increases.  D = 0 returns an identical copy.
    """
    if D < 0:
        raise ValidationError(f"diffusion coefficient must be >= 0, got {D}")
    if dt < 0:
        raise ValidationError(f"dt must be >= 0, got {dt}")
    if axis not in _AXES:
        raise ValidationError(f"axis must be 'x' or 'p', got {axis!r}")
    if D == 0.0 or dt == 0.0:
        return dist.copy()
    n = dist.grid.n_p if axis == "p" else dist.grid.n_x
    d = dist.grid.dp if axis == "p" else dist.grid.dx
    k = 2.0 * np.pi * np.fft.rfftfreq(n, d=d)
    out = Distribution(dist.grid, _smooth(dist.values, dist.grid, axis, np.exp(-D * k * k * dt)),
                       time=dist.time)
    out.assert_finite("diffusion step")
    return out


def measurement_event(dist, cfg):
    """Gaussian convolution along each configured axis (spectral product).

    Models an unread measurement as coarse-graining; widths below the grid
    spacing of their axis are rejected.  Convolving twice with width w
    equals once with width w*sqrt(2) (exact semigroup in the spectrum).
    """
    meas = cfg.measurement if isinstance(cfg, DecoherenceConfig) else cfg
    if meas is None:
        raise ValidationError("no measurement configured")
    values = dist.values
    for axis, width in (("x", meas.sigma_x), ("p", meas.sigma_p)):
        if width is None:
            continue
        spacing = dist.grid.dx if axis == "x" else dist.grid.dp
        if width < spacing:
            raise ValidationError(
                f"measurement width {width} on {axis} is below the grid spacing {spacing}")
        n = dist.grid.n_x if axis == "x" else dist.grid.n_p
        k = 2.0 * np.pi * np.fft.rfftfreq(n, d=spacing)
        values = _smooth(values, dist.grid, axis, np.exp(-0.5 * (width * k) ** 2))
    out = Distribution(dist.grid, values, time=dist.time)
    out.assert_finite("measurement event")
    return out


def compose_with(dist, continuous_step, dcfg, dt):
    """Strang-compose diffusion and measurement around any transport step.

    ``continuous_step(dist, dt)`` supplies the coherent part (Moyal or
    Liouville); a measurement event fires whenever the step's time interval
    crosses a multiple of the measurement period (after the kick, if both
    land on the same boundary).
    """
    half = 0.5 * dt
    out = dist
    if dcfg.diffusion_D > 0.0:
        out = diffusion_step(out, dcfg.diffusion_D, half, axis="p")
    if dcfg.diffusion_D_x > 0.0:
        out = diffusion_step(out, dcfg.diffusion_D_x, half, axis="x")
    out = continuous_step(out, dt)
    if dcfg.diffusion_D > 0.0:
        out = diffusion_step(out, dcfg.diffusion_D, half, axis="p")
    if dcfg.diffusion_D_x > 0.0:
        out = diffusion_step(out, dcfg.diffusion_D_x, half, axis="x")
    if dcfg.measurement is not None:
        if kicks_crossed(dist.time, out.time, dcfg.measurement.period):
            out = measurement_event(out, dcfg)
    return out


def compose_step(dist, pot, params, cfg, dcfg, dt):
    """Strang composition: half diffusion, full Moyal step, half diffusion.

    With D = 0 and no measurement this is bit-identical to a bare
    moyal_step.
    """
    return compose_with(
        dist, lambda d, h: moyal_step(d, pot, params, cfg, h), dcfg, dt)
