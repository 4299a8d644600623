"""Classical engine: Liouville field transport, point trajectories with
tangent dynamics, Benettin Lyapunov estimation, and the standard map."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import NumericalBlowupError, ValidationError
from .potential import poly_derivative_coeffs
from .propagator import advance

_NO_COEFFS = np.zeros(1)


def liouville_step(dist, pot, params, dt):
    """One Strang step of classical phase-space transport.

    This is the truncation-order-0 row of the spectral propagator: exact
    x-shear by p/m and exact p-kick by -V'(x), so each substep is a
    unimodular spectral shift and both the norm and sum(rho^2) are conserved
    to rounding.  Kicks fire between steps when the interval crosses j*T.
    """
    return advance(dist, pot, params, dt, truncation_order=0)


@dataclass
class TrajectoryState:
    """Point (x, p) with its tangent vector and accumulated log stretch."""

    x: float
    p: float
    tangent: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0]))
    log_stretch_accum: float = 0.0
    time: float = 0.0

    def __post_init__(self):
        self.tangent = np.asarray(self.tangent, dtype=float).reshape(2).copy()
        if not np.any(self.tangent):
            raise ValidationError("tangent vector must be nonzero")


@dataclass
class LyapunovResult:
    """Largest-exponent estimate; ``unit`` is "per_time" for flows and
    "per_step" for maps.  lambda_ always equals convergence_series[-1]."""

    lambda_: float
    n_steps: int
    convergence_series: np.ndarray
    unit: str


def _force_arrays(pot):
    d1 = np.asarray(poly_derivative_coeffs(pot.coeffs, 1), dtype=float)
    d2 = np.asarray(poly_derivative_coeffs(pot.coeffs, 2), dtype=float)
    return d1, d2


def _kick_args(pot, dt, t0=0.0):
    """Flatten the kick spec for the kernels; validates step alignment."""
    if pot.kick is None:
        return 0, 0.0, _NO_COEFFS, _NO_COEFFS, 0, 0
    ratio = pot.kick.period / dt
    kick_every = int(round(ratio))
    if kick_every < 1 or abs(ratio - kick_every) > 1e-9 * ratio:
        raise ValidationError(
            f"kick period {pot.kick.period} must be an integer multiple of dt {dt}")
    steps0 = t0 / dt
    step0 = int(round(steps0))
    if abs(steps0 - step0) > 1e-6:
        raise ValidationError(
            f"start time {t0} must sit on the step lattice of dt {dt} for kicked runs")
    if pot.kick.is_cosine:
        return 2, pot.kick.strength, _NO_COEFFS, _NO_COEFFS, kick_every, step0
    shape = tuple(pot.kick.strength * c for c in pot.kick.shape)
    kd1 = np.asarray(poly_derivative_coeffs(shape, 1), dtype=float)
    kd2 = np.asarray(poly_derivative_coeffs(shape, 2), dtype=float)
    return 1, 0.0, kd1, kd2, kick_every, step0


def integrate_trajectory(state, pot, params, dt, n_steps):
    """Leapfrog (kick-drift-kick) integration of (x, p) for n_steps.

    The tangent vector is advanced by the exact Jacobian of the same
    discrete map, i.e. the linearized equations of motion of the integrator
    itself, which keeps the tangent flow symplectic.
    """
    if dt <= 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    d1, d2 = _force_arrays(pot)
    kk, ks, kd1, kd2, kevery, step0 = _kick_args(pot, dt, state.time)
    x, p, tx, tp, status = _kernels.leapfrog_tangent(
        state.x, state.p, state.tangent[0], state.tangent[1],
        dt, int(n_steps), params.mass, d1, d2, kk, ks, kd1, kd2, kevery, step0)
    if status != 0:
        raise NumericalBlowupError("trajectory integration produced non-finite values")
    return TrajectoryState(x, p, np.array([tx, tp]),
                           log_stretch_accum=state.log_stretch_accum,
                           time=state.time + n_steps * dt)


def lyapunov_exponent(state0, pot, params, dt, n_steps, renorm_every=10):
    """Largest Lyapunov exponent by the Benettin scheme (flows, per unit time).

    The tangent is normalized at the start (the estimate is ratio-based, so
    the initial magnitude is irrelevant) and rescaled to unit norm every
    ``renorm_every`` steps while the log stretch factors accumulate.  The
    running estimate is recorded at every renormalization; leftover steps
    past the last full renormalization window contribute a final partial
    stretch so that lambda = total accumulated log / (n_steps*dt).
    """
    n_steps = int(n_steps)
    renorm_every = int(renorm_every)
    if renorm_every < 1:
        raise ValidationError("renorm_every must be >= 1")
    if n_steps < 10 * renorm_every:
        raise ValidationError(
            f"n_steps = {n_steps} too small: need at least 10*renorm_every = {10 * renorm_every}")
    d1, d2 = _force_arrays(pot)
    kk, ks, kd1, kd2, kevery, _ = _kick_args(pot, dt)

    t0 = state0.tangent / np.linalg.norm(state0.tangent)
    n_renorm = n_steps // renorm_every
    conv = np.empty(n_renorm)
    x, p, tx, tp, accum, status = _kernels.leapfrog_benettin(
        state0.x, state0.p, t0[0], t0[1], dt, n_renorm * renorm_every,
        renorm_every, params.mass, d1, d2, kk, ks, kd1, kd2, kevery, conv)
    if status == 2:
        raise ValidationError(
            "tangent norm under/overflowed between renormalizations; "
            "decrease renorm_every")
    if status != 0:
        raise NumericalBlowupError("lyapunov trajectory produced non-finite values")

    leftover = n_steps - n_renorm * renorm_every
    if leftover:
        x, p, tx, tp, status = _kernels.leapfrog_tangent(
            x, p, tx, tp, dt, leftover, params.mass, d1, d2,
            kk, ks, kd1, kd2, kevery, n_renorm * renorm_every)
        if status != 0:
            raise NumericalBlowupError("lyapunov trajectory produced non-finite values")
        accum += math.log(math.hypot(tx, tp))
        conv = np.append(conv, accum / (n_steps * dt))
    return LyapunovResult(float(conv[-1]), n_steps, conv, unit="per_time")


def standard_map_step(theta, p, K, tangent):
    """One Chirikov standard-map step with its exact tangent map.

    p' = p + K sin(theta); theta' = (theta + p') mod 2pi; the tangent is
    multiplied by [[1 + K cos(theta), 1], [K cos(theta), 1]] in the
    (d theta, d p) ordering, whose determinant is exactly 1.
    """
    c = K * math.cos(theta)
    p_new = p + K * math.sin(theta)
    theta_new = (theta + p_new) % (2.0 * math.pi)
    t = np.asarray(tangent, dtype=float)
    tangent_new = np.array([(1.0 + c) * t[0] + t[1], c * t[0] + t[1]])
    return theta_new, p_new, tangent_new


def standard_map_lyapunov(theta0, p0, K, n_steps, renorm_every=10, tangent0=(1.0, 0.0)):
    """Benettin Lyapunov exponent of the standard map, per map step."""
    n_steps = int(n_steps)
    renorm_every = int(renorm_every)
    if renorm_every < 1:
        raise ValidationError("renorm_every must be >= 1")
    if n_steps < 10 * renorm_every:
        raise ValidationError(
            f"n_steps = {n_steps} too small: need at least 10*renorm_every = {10 * renorm_every}")
    t0 = np.asarray(tangent0, dtype=float)
    t0 = t0 / np.linalg.norm(t0)
    n_renorm = n_steps // renorm_every
    conv = np.empty(n_renorm)
    theta, p, tx, tp, accum, status = _kernels.standard_map_benettin(
        float(theta0), float(p0), float(K), n_renorm * renorm_every,
        renorm_every, t0[0], t0[1], conv)
    if status == 2:
        raise ValidationError(
            "tangent norm under/overflowed between renormalizations; "
            "decrease renorm_every")
    if status != 0:
        raise NumericalBlowupError("standard map iteration produced non-finite values")
    leftover = n_steps - n_renorm * renorm_every
    if leftover:
        tangent = np.array([tx, tp])
        for _ in range(leftover):
            theta, p, tangent = standard_map_step(theta, p, K, tangent)
        accum += math.log(np.linalg.norm(tangent))
        conv = np.append(conv, accum / n_steps)
    return LyapunovResult(float(conv[-1]), n_steps, conv, unit="per_step")


def ensemble_momentum_spread(thetas, ps, K, n_steps):
    """Mean square momentum displacement <(p_t - p_0)^2> after each map step.

    Returns an array of length n_steps + 1 whose first entry is 0.  Momentum
    is not wrapped, so the series measures unbounded diffusive transport.
    """
    thetas = np.ascontiguousarray(thetas, dtype=float)
    ps = np.ascontiguousarray(ps, dtype=float).copy()
    if thetas.size == 0:
        raise ValidationError("ensemble is empty")
    if thetas.shape != ps.shape or thetas.ndim != 1:
        raise ValidationError("thetas and ps must be 1-D arrays of equal length")
    if thetas.size < 1000:
        raise ValidationError(
            f"ensemble size {thetas.size} too small for a diffusion estimate; need >= 1000")
    msd = np.empty(int(n_steps) + 1)
    _kernels.standard_map_msd(thetas.copy(), ps, float(K), int(n_steps), msd)
    return msd


def classical_diffusion_coefficient(msd, dt=1.0):
    """D_cl = slope/2 of a linear fit to the final half of an msd series."""
    msd = np.asarray(msd, dtype=float)
    if msd.size < 4:
        raise ValidationError("msd series too short for a linear fit")
    t = np.arange(msd.size) * dt
    half = msd.size // 2
    slope = np.polyfit(t[half:], msd[half:], 1)[0]
    return float(slope / 2.0)
