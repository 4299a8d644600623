"""Quantum engine: Wigner-Moyal field evolution plus the independent
Schrodinger split-operator / Wigner-transform oracle pair."""

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import GridMismatchError, NumericalBlowupError, ValidationError
from .potential import kicks_crossed
from .propagator import EXACT, SpectralPropagator, advance, get_propagator  # noqa: F401
from .state import Distribution, Wavefunction, check_resolvability


@dataclass(frozen=True)
class MoyalConfig:
    """Series truncation for the quantum correction terms.

    ``truncation_order`` is the largest n kept in the hbar^(2n) correction
    series; "exact" resolves to the finite bound floor((degree-1)/2) for
    polynomial potentials and to the closed-form resummation for cosine
    kicks.  Order 0 keeps only the Poisson term.  ``dealias`` applies a
    2/3-rule spectral mask during substeps (off by default: the mask alters
    sum(rho^2) conservation and hides the fine-structure growth the
    diagnostics are after).
    """

    truncation_order: object = EXACT
    dealias: bool = False

    def __post_init__(self):
        t = self.truncation_order
        if t != EXACT and (int(t) != t or int(t) < 0):
            raise ValidationError(
                f"truncation_order must be a non-negative integer or 'exact', got {t!r}")


def moyal_step(dist, pot, params, cfg, dt):
    """One Strang step of Wigner-Moyal evolution.

    The kinetic half-steps are the same exact spectral shears as the
    classical engine (the p^2/2m kinetic term has no hbar corrections); the
    potential substep multiplies by exp(i*dt*gamma(x, lambda)) in (x, lambda)
    space, where gamma carries the Poisson term plus the configured number of
    quantum correction rows.  The substep generator is diagonal there, so
    the potential step is exact in dt and unimodular: the field stays real
    and both the norm and sum(rho^2) are conserved to rounding.
    """
    check_resolvability(dist.grid, params)
    return advance(dist, pot, params, dt, cfg.truncation_order, cfg.dealias)


_PHASE_CACHE = OrderedDict()
_PHASE_CACHE_MAX = 16


def _schrodinger_phases(grid, pot, params, dt):
    stamp = (grid.key, pot.key, params.key, float(dt))
    entry = _PHASE_CACHE.get(stamp)
    if entry is None:
        k = 2.0 * np.pi * np.fft.fftfreq(grid.n_x, d=grid.dx)
        half_v = np.exp(-0.5j * pot.value(grid.x) * dt / params.hbar)
        kin = np.exp(-0.5j * params.hbar * k ** 2 * dt / params.mass)
        kick = None
        if pot.kick is not None:
            kick = np.exp(-1j * pot.kick.value(grid.x) / params.hbar)
        entry = (half_v, kin, kick)
        _PHASE_CACHE[stamp] = entry
        if len(_PHASE_CACHE) > _PHASE_CACHE_MAX:
            _PHASE_CACHE.popitem(last=False)
    else:
        _PHASE_CACHE.move_to_end(stamp)
    return entry


def schrodinger_step(psi, pot, params, dt):
    """Strang split-operator step for the wavefunction oracle.

    Half potential phase, full kinetic phase in wavenumber space, half
    potential phase; kick impulses multiply by exp(-i V_kick(x)/hbar) when
    the step interval crosses a kick time.
    """
    if dt <= 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    half_v, kin, kick = _schrodinger_phases(psi.grid, pot, params, dt)
    v = psi.values * half_v
    v = sfft.ifft(kin * sfft.fft(v))
    v *= half_v
    t1 = psi.time + dt
    if kick is not None:
        for _ in range(kicks_crossed(psi.time, t1, pot.kick.period)):
            v = v * kick
    out = Wavefunction(psi.grid, v, time=t1)
    if not np.isfinite(v.sum()):
        raise NumericalBlowupError("non-finite values after wavefunction step")
    return out


def wigner_transform(psi, grid, params):
    """Wigner function of a pure state on the grid's (x, p) lattice.

    W(x, p) = (1/pi*hbar) Int dy psi*(x+y) psi(x-y) exp(2ipy/hbar), evaluated
    by trapezoid quadrature over the y lattice with the state zero-padded to
    twice the x domain.  The padding makes the correlation a real-line
    evaluation for contained states, which kills the half-domain alias the
    periodic wrap would otherwise create.  The quadrature is spectrally
    accurate for states whose momentum content fits the grid's p window.
    The imaginary residue must be below 1e-12 of the field's peak; it is
    asserted and discarded.
    """
    if psi.grid.key[:3] != grid.key[:3]:
        raise GridMismatchError(
            f"wavefunction x-axis {psi.grid.key[:3]} does not match grid {grid.key[:3]}")
    n = grid.n_x
    hbar = params.hbar
    padded = np.zeros(2 * n, dtype=np.complex128)
    padded[:n] = psi.values
    offs = np.arange(-n, n)
    y = offs * grid.dx
    idx = np.arange(n)
    corr = (np.conj(padded)[(idx[:, None] + offs[None, :]) % (2 * n)]
            * padded[(idx[:, None] - offs[None, :]) % (2 * n)])
    kernel = np.exp(2j * np.outer(y, grid.p) / hbar)
    w = corr @ kernel
    w *= grid.dx / (np.pi * hbar)
    peak = max(1.0, float(np.max(np.abs(w.real))))
    resid = float(np.max(np.abs(w.imag)))
    if resid > 1e-12 * peak:
        raise NumericalBlowupError(
            f"wigner transform imaginary residue {resid:.3g} exceeds 1e-12 of peak "
            f"{peak:.3g}; state is not contained in the grid's momentum window")
    return Distribution(grid, np.ascontiguousarray(w.real), time=psi.time)
