"""Spectral step machinery shared by the Liouville and Wigner-Moyal engines.

One Strang step is

    half kinetic shear -> full potential phase -> half kinetic shear

where the kinetic substep is the exact spectral x-shift by p*dt/m applied in
(k_x, p) space and the potential substep is a pointwise unimodular
multiplication in (x, lambda) space, lambda being the wavenumber conjugate
to p.  The potential multiplier is exp(i*dt*gamma(x, lambda)) with

    gamma(x, lambda) = sum_{n=0}^{N} hbar^(2n) lambda^(2n+1)
                       / (4^n (2n+1)!) * d^(2n+1)V/dx^(2n+1)

The n = 0 row is the classical (Poisson) transport term; the n >= 1 rows are
the quantum corrections, which vanish identically for quadratic potentials.
For polynomial V the series terminates at N = floor((degree-1)/2), so the
"exact" setting is a finite sum; a cosine kick has an infinite series whose
exact resummation is [V(x + hbar*lambda/2) - V(x - hbar*lambda/2)] / hbar.

Truncation order 0 therefore *is* the classical engine: both engines run
through the same table builder, which makes their equivalence on quadratic
potentials bit-exact.

Real fields are transformed with rfft/irfft; gamma is odd in lambda, so the
multiplier carries the conjugate symmetry that keeps the field real.
"""

import math
from collections import OrderedDict

import numpy as np
import scipy.fft as sfft

from .errors import NumericalBlowupError, ValidationError
from .potential import kicks_crossed, poly_derivative_coeffs, polyval
from .state import Distribution

EXACT = "exact"


def resolve_truncation(truncation_order, poly_coeffs):
    """Finite series bound for the polynomial part; "exact" resolves to
    floor((degree-1)/2).  Terms beyond the exact bound are identically zero,
    so a larger explicit order is clipped to it."""
    c = tuple(poly_coeffs)
    degree = len(c) - 1
    while degree > 0 and c[degree] == 0.0:
        degree -= 1
    exact_bound = max(0, (degree - 1) // 2)
    if truncation_order == EXACT:
        return exact_bound
    n = int(truncation_order)
    if n < 0:
        raise ValidationError(f"truncation_order must be >= 0, got {truncation_order}")
    return min(n, exact_bound)


def poly_phase_table(coeffs, hbar, x, lam, n_max):
    """gamma(x, lambda) for a polynomial potential, series summed to n_max."""
    gamma = np.zeros((x.size, lam.size))
    for n in range(n_max + 1):
        deriv = poly_derivative_coeffs(coeffs, 2 * n + 1)
        if len(deriv) == 1 and deriv[0] == 0.0 and n > 0:
            break
        coeff = hbar ** (2 * n) / (4.0 ** n * math.factorial(2 * n + 1))
        gamma += coeff * np.outer(polyval(deriv, x), lam ** (2 * n + 1))
    return gamma


def cosine_phase_table(strength, hbar, x, lam, truncation_order):
    """gamma(x, lambda) for V = strength*cos(x).

    "exact" uses the closed-form resummation; a finite order sums the series.
    """
    if truncation_order == EXACT:
        return (-2.0 * strength / hbar) * np.outer(np.sin(x), np.sin(hbar * lam / 2.0))
    n_max = int(truncation_order)
    if n_max < 0:
        raise ValidationError(f"truncation_order must be >= 0, got {truncation_order}")
    series = np.zeros_like(lam)
    for n in range(n_max + 1):
        series += ((-1.0) ** n) * (hbar ** (2 * n)) * lam ** (2 * n + 1) \
            / (4.0 ** n * math.factorial(2 * n + 1))
    return -strength * np.outer(np.sin(x), series)


class SpectralPropagator:
    """Precomputed multiplier tables for one (grid, potential, params, dt,
    truncation) stamp; rebuilt whenever the stamp changes.

    ``kin_half`` lives in (k_x, p) space with the reduced rfft x-axis;
    ``pot_full`` and ``kick_mult`` live in (x, lambda) space with the reduced
    rfft p-axis.  For quadratic potentials ``pot_full`` equals the
    Poisson-only multiplier exactly.
    """

    def __init__(self, grid, pot, params, dt, truncation_order, dealias=False):
        if dt <= 0:
            raise ValidationError(f"dt must be positive, got {dt}")
        self.grid = grid
        self.dt = float(dt)
        self.truncation_order = truncation_order
        self.dealias = bool(dealias)
        self.stamp = (grid.key, pot.key, params.key, self.dt, truncation_order, self.dealias)

        # Advection guard: spectral shifts are exact in dt, but the Strang
        # composition error is only controlled when neither substep moves
        # content by more than one cell per step.
        p_abs_max = max(abs(grid.p_min), abs(grid.p_max - grid.dp))
        v1_max = float(np.max(np.abs(pot.derivative(grid.x, 1))))
        if p_abs_max * dt / grid.dx >= 1.0:
            raise ValidationError(
                f"CFL advection guard violated: max|p|*dt/dx = "
                f"{p_abs_max * dt / grid.dx:.3g} >= 1")
        if v1_max * dt / grid.dp >= 1.0:
            raise ValidationError(
                f"CFL advection guard violated: max|V'|*dt/dp = "
                f"{v1_max * dt / grid.dp:.3g} >= 1")

        kx_r = 2.0 * np.pi * np.fft.rfftfreq(grid.n_x, d=grid.dx)
        lam_r = 2.0 * np.pi * np.fft.rfftfreq(grid.n_p, d=grid.dp)
        self.kin_half = np.exp(
            -1j * np.outer(kx_r, grid.p) * (0.5 * dt / params.mass))

        n_pot = resolve_truncation(truncation_order, pot.coeffs)
        gamma = poly_phase_table(pot.coeffs, params.hbar, grid.x, lam_r, n_pot)
        self.pot_is_identity = not np.any(gamma)
        self.pot_full = np.exp(1j * dt * gamma)

        self.kick_mult = None
        self.kick_period = None
        if pot.kick is not None:
            self.kick_period = pot.kick.period
            if pot.kick.is_cosine:
                gk = cosine_phase_table(pot.kick.strength, params.hbar,
                                        grid.x, lam_r, truncation_order)
            else:
                shape = tuple(pot.kick.strength * c for c in pot.kick.shape)
                nk = resolve_truncation(truncation_order, shape)
                gk = poly_phase_table(shape, params.hbar, grid.x, lam_r, nk)
            # Impulse weight 1: the delta-train kick is one full application
            # of the kick potential's multiplier with effective dt = 1.
            self.kick_mult = np.exp(1j * gk)

        if self.dealias:
            self._mask_x = (np.abs(kx_r) <= (2.0 / 3.0) * np.abs(kx_r).max())[:, None]
            self._mask_p = (np.abs(lam_r) <= (2.0 / 3.0) * np.abs(lam_r).max())[None, :]

    def _kinetic_half(self, v):
        f = sfft.rfft(v, axis=0)
        f *= self.kin_half
        if self.dealias:
            f *= self._mask_x
        return sfft.irfft(f, n=self.grid.n_x, axis=0)

    def _apply_in_lambda(self, v, mult):
        g = sfft.rfft(v, axis=1)
        g *= mult
        if self.dealias:
            g *= self._mask_p
        return sfft.irfft(g, n=self.grid.n_p, axis=1)

    def step_values(self, v):
        """One Strang step on a raw (n_x, n_p) field; returns a new array."""
        v = self._kinetic_half(v)
        if not self.pot_is_identity:
            v = self._apply_in_lambda(v, self.pot_full)
        v = self._kinetic_half(v)
        return v

    def apply_kick(self, v):
        return self._apply_in_lambda(v, self.kick_mult)


_CACHE = OrderedDict()
_CACHE_MAX = 16


def get_propagator(grid, pot, params, dt, truncation_order, dealias=False):
    stamp = (grid.key, pot.key, params.key, float(dt), truncation_order, bool(dealias))
    prop = _CACHE.get(stamp)
    if prop is None:
        prop = SpectralPropagator(grid, pot, params, dt, truncation_order, dealias)
        _CACHE[stamp] = prop
        if len(_CACHE) > _CACHE_MAX:
            _CACHE.popitem(last=False)
    else:
        _CACHE.move_to_end(stamp)
    return prop


def advance(dist, pot, params, dt, truncation_order, dealias=False):
    """One step of the spectral phase-space evolution, kicks included.

    Kicks fire after the continuous substeps of any step whose time interval
    (t, t+dt] crosses a kick time j*period.
    """
    prop = get_propagator(dist.grid, pot, params, dt, truncation_order, dealias)
    v = prop.step_values(dist.values)
    t1 = dist.time + dt
    if prop.kick_mult is not None:
        for _ in range(kicks_crossed(dist.time, t1, prop.kick_period)):
            v = prop.apply_kick(v)
    out = Distribution(dist.grid, v, time=t1)
    if not np.isfinite(v.sum()):
        raise NumericalBlowupError("non-finite values after phase-space step")
    return out
