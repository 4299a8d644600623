"""Hot trajectory/map kernels: numba-jitted with a pure-Python fallback.

The sequential inner loops here (leapfrog with tangent propagation, Benettin
accumulation, standard-map iteration) dominate the runtime of the Lyapunov
and ensemble operations, so they are compiled with numba when available.
Set ``PHASELAB_NUMBA=0`` in the environment to force the fallback path; the
selection is frozen at import time.  ``benchmarks/bench_kernels.py`` compares
both paths.

Each kernel exists in two callable forms: ``<name>_py`` (plain Python over
scalars and numpy arrays) and ``<name>_jit`` (numba-compiled from the same
function object).  The bare ``<name>`` alias points at whichever is active.

Kernels take a flattened description of the force law so they stay
nopython-friendly:

* ``d1``, ``d2`` -- ascending polynomial coefficients of V' and V''
  (float64 arrays), evaluated by an inlined Horner loop.
* ``kick_kind`` -- 0 none, 1 polynomial, 2 cosine.
* ``kick_s`` -- kick strength (cosine kind); ``kick_d1``, ``kick_d2`` --
  strength-scaled coefficients of the kick potential's first and second
  derivatives (polynomial kind).
* ``kick_every`` -- kick fires after every ``kick_every``-th step (0 = never);
  ``step0`` offsets the global step counter so segments can be resumed.

Status codes returned by the kernels: 0 ok, 1 non-finite state, 2 tangent
norm left the representable window between renormalizations.
"""

import math
import os

import numpy as np

_flag = os.environ.get("PHASELAB_NUMBA", "1").strip().lower()
_WANT_NUMBA = _flag not in ("0", "false", "off", "no")

NUMBA_AVAILABLE = False
if _WANT_NUMBA:
    try:
        import numba

        NUMBA_AVAILABLE = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_AVAILABLE = False

USING_NUMBA = NUMBA_AVAILABLE and _WANT_NUMBA


def leapfrog_tangent_py(x, p, tx, tp, dt, n_steps, mass, d1, d2,
                        kick_kind, kick_s, kick_d1, kick_d2, kick_every, step0):
    """Kick-drift-kick leapfrog of (x, p) with the exact step Jacobian
    applied to the tangent (tx, tp).  Returns (x, p, tx, tp, status)."""
    half = 0.5 * dt
    for i in range(n_steps):
        f = 0.0
        g = 0.0
        for j in range(d1.shape[0] - 1, -1, -1):
            f = f * x + d1[j]
        for j in range(d2.shape[0] - 1, -1, -1):
            g = g * x + d2[j]
        p_h = p - half * f
        tp_h = tp - half * g * tx
        x = x + dt * p_h / mass
        tx = tx + dt * tp_h / mass
        f = 0.0
        g = 0.0
        for j in range(d1.shape[0] - 1, -1, -1):
            f = f * x + d1[j]
        for j in range(d2.shape[0] - 1, -1, -1):
            g = g * x + d2[j]
        p = p_h - half * f
        tp = tp_h - half * g * tx
        if kick_every > 0 and (step0 + i + 1) % kick_every == 0:
            if kick_kind == 2:
                p = p + kick_s * math.sin(x)
                tp = tp + kick_s * math.cos(x) * tx
            elif kick_kind == 1:
                kf = 0.0
                kg = 0.0
                for j in range(kick_d1.shape[0] - 1, -1, -1):
                    kf = kf * x + kick_d1[j]
                for j in range(kick_d2.shape[0] - 1, -1, -1):
                    kg = kg * x + kick_d2[j]
                p = p - kf
                tp = tp - kg * tx
        if not (math.isfinite(x) and math.isfinite(p)):
            return x, p, tx, tp, 1
    return x, p, tx, tp, 0


def leapfrog_benettin_py(x, p, tx, tp, dt, n_steps, renorm_every, mass, d1, d2,
                         kick_kind, kick_s, kick_d1, kick_d2, kick_every,
                         conv_out):
    """Benettin accumulation along a leapfrog trajectory.

    The tangent is rescaled to unit norm every ``renorm_every`` steps; log
    stretch factors accumulate and the running exponent estimate is written
    into ``conv_out`` at each renormalization.  Returns
    (x, p, tx, tp, accum, status).
    """
    half = 0.5 * dt
    accum = 0.0
    k = 0
    for i in range(n_steps):
        f = 0.0
        g = 0.0
        for j in range(d1.shape[0] - 1, -1, -1):
            f = f * x + d1[j]
        for j in range(d2.shape[0] - 1, -1, -1):
            g = g * x + d2[j]
        p_h = p - half * f
        tp_h = tp - half * g * tx
        x = x + dt * p_h / mass
        tx = tx + dt * tp_h / mass
        f = 0.0
        g = 0.0
        for j in range(d1.shape[0] - 1, -1, -1):
            f = f * x + d1[j]
        for j in range(d2.shape[0] - 1, -1, -1):
            g = g * x + d2[j]
        p = p_h - half * f
        tp = tp_h - half * g * tx
        if kick_every > 0 and (i + 1) % kick_every == 0:
            if kick_kind == 2:
                p = p + kick_s * math.sin(x)
                tp = tp + kick_s * math.cos(x) * tx
            elif kick_kind == 1:
                kf = 0.0
                kg = 0.0
                for j in range(kick_d1.shape[0] - 1, -1, -1):
                    kf = kf * x + kick_d1[j]
                for j in range(kick_d2.shape[0] - 1, -1, -1):
                    kg = kg * x + kick_d2[j]
                p = p - kf
                tp = tp - kg * tx
        if (i + 1) % renorm_every == 0:
            r = math.sqrt(tx * tx + tp * tp)
            if not (1e-300 < r < 1e300):
                return x, p, tx, tp, accum, 2
            accum += math.log(r)
            tx /= r
            tp /= r
            conv_out[k] = accum / ((i + 1) * dt)
            k += 1
        if not (math.isfinite(x) and math.isfinite(p)):
            return x, p, tx, tp, accum, 1
    return x, p, tx, tp, accum, 0


def standard_map_benettin_py(theta, p, kk, n_steps, renorm_every, tx, tp, conv_out):
    """Benettin accumulation for the standard map; exponent is per step."""
    accum = 0.0
    k = 0
    two_pi = 2.0 * math.pi
    for i in range(n_steps):
        c = kk * math.cos(theta)
        p = p + kk * math.sin(theta)
        theta = (theta + p) % two_pi
        tx_new = (1.0 + c) * tx + tp
        tp_new = c * tx + tp
        tx = tx_new
        tp = tp_new
        if (i + 1) % renorm_every == 0:
            r = math.sqrt(tx * tx + tp * tp)
            if not (1e-300 < r < 1e300):
                return theta, p, tx, tp, accum, 2
            accum += math.log(r)
            tx /= r
            tp /= r
            conv_out[k] = accum / (i + 1)
            k += 1
        if not (math.isfinite(theta) and math.isfinite(p)):
            return theta, p, tx, tp, accum, 1
    return theta, p, tx, tp, accum, 0


def standard_map_msd_py(thetas, ps, kk, n_steps, msd_out):
    """Evolve an ensemble under the standard map in place, recording the mean
    square momentum displacement from the initial momenta after every step."""
    n = thetas.shape[0]
    two_pi = 2.0 * math.pi
    p0 = ps.copy()
    msd_out[0] = 0.0
    for t in range(n_steps):
        acc = 0.0
        for j in range(n):
            ps[j] = ps[j] + kk * math.sin(thetas[j])
            thetas[j] = (thetas[j] + ps[j]) % two_pi
            d = ps[j] - p0[j]
            acc += d * d
        msd_out[t + 1] = acc / n
    return 0


if NUMBA_AVAILABLE:
    _njit = numba.njit(cache=True)
    leapfrog_tangent_jit = _njit(leapfrog_tangent_py)
    leapfrog_benettin_jit = _njit(leapfrog_benettin_py)
    standard_map_benettin_jit = _njit(standard_map_benettin_py)
    standard_map_msd_jit = _njit(standard_map_msd_py)
else:
    leapfrog_tangent_jit = leapfrog_tangent_py
    leapfrog_benettin_jit = leapfrog_benettin_py
    standard_map_benettin_jit = standard_map_benettin_py
    standard_map_msd_jit = standard_map_msd_py

if USING_NUMBA:
    leapfrog_tangent = leapfrog_tangent_jit
    leapfrog_benettin = leapfrog_benettin_jit
    standard_map_benettin = standard_map_benettin_jit
    standard_map_msd = standard_map_msd_jit
else:
    leapfrog_tangent = leapfrog_tangent_py
    leapfrog_benettin = leapfrog_benettin_py
    standard_map_benettin = standard_map_benettin_py
    standard_map_msd = standard_map_msd_py
