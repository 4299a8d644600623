"""Polynomial 1-D potentials with exact analytic derivatives and impulsive kicks."""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

MAX_DEGREE = 8
MAX_DERIVATIVE_ORDER = 32


def poly_derivative_coeffs(coeffs, order):
    """Ascending coefficients of the order-th derivative of sum c_k x^k.

    Computed by the falling-factorial rule, so the result is exact for any
    float coefficients.  Returns (0.0,) when the order exceeds the degree.
    """
    c = tuple(float(v) for v in coeffs)
    if order < 0:
        raise ValidationError(f"derivative order must be >= 0, got {order}")
    for _ in range(order):
        c = tuple(c[k] * k for k in range(1, len(c)))
        if not c:
            return (0.0,)
    return c if c else (0.0,)


def polyval(coeffs, x):
    """Evaluate ascending-coefficient polynomial at x (scalar or array)."""
    return np.polynomial.polynomial.polyval(x, np.asarray(coeffs, dtype=float))


@dataclass(frozen=True)
class Kick:
    """Impulsive driving V_kick(x) * sum_j delta(t - j*period), j >= 1.

    ``shape`` is either the string "cos" (V_kick = strength * cos x, the
    kicked-rotor drive) or ascending polynomial coefficients of a unit-shape
    polynomial that gets multiplied by ``strength``.  Engines apply kicks as
    discrete events between continuous steps, with unit impulse weight.
    """

    strength: float
    period: float
    shape: object = "cos"

    def __post_init__(self):
        if not self.period > 0:
            raise ValidationError(f"kick period must be positive, got {self.period}")
        if isinstance(self.shape, str):
            if self.shape != "cos":
                raise ValidationError(f"unknown kick shape {self.shape!r}")
        else:
            coeffs = tuple(float(v) for v in self.shape)
            if len(coeffs) - 1 > MAX_DEGREE:
                raise ValidationError(
                    f"kick polynomial degree capped at {MAX_DEGREE}, got {len(coeffs) - 1}")
            object.__setattr__(self, "shape", coeffs)

    @property
    def is_cosine(self):
        return self.shape == "cos"

    def derivative(self, x, order):
        """order-th x-derivative of the kick potential strength*shape(x)."""
        if self.is_cosine:
            # d^r/dx^r cos(x) = cos(x + r*pi/2)
            return self.strength * np.cos(np.asarray(x, dtype=float) + order * np.pi / 2.0)
        return self.strength * polyval(poly_derivative_coeffs(self.shape, order), x)

    def value(self, x):
        return self.derivative(x, 0)

    @property
    def key(self):
        return (self.strength, self.period, self.shape)


@dataclass(frozen=True)
class Potential:
    """V(x) = sum_k coeffs[k] x^k (degree <= 8) plus an optional kick train."""

    coeffs: tuple = (0.0,)
    kick: Kick = None

    def __post_init__(self):
        coeffs = tuple(float(v) for v in self.coeffs)
        if not coeffs:
            coeffs = (0.0,)
        if len(coeffs) - 1 > MAX_DEGREE:
            raise ValidationError(
                f"polynomial degree capped at {MAX_DEGREE}, got {len(coeffs) - 1}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self):
        d = len(self.coeffs) - 1
        while d > 0 and self.coeffs[d] == 0.0:
            d -= 1
        return d

    def value(self, x):
        return polyval(self.coeffs, x)

    def derivative(self, x, order):
        if order > MAX_DERIVATIVE_ORDER:
            raise ValidationError(
                f"derivative order capped at {MAX_DERIVATIVE_ORDER}, got {order}")
        return polyval(poly_derivative_coeffs(self.coeffs, order), x)

    @property
    def key(self):
        return (self.coeffs, self.kick.key if self.kick else None)


def potential_derivative(pot, x, order, t=0.0):
    """Exact analytic derivative of the polynomial part of ``pot`` at x.

    The kick train is impulsive and handled by the engines as discrete
    events; it does not contribute here.  ``t`` is accepted for interface
    symmetry with time-dependent evaluation but the polynomial part is
    autonomous.
    """
    return pot.derivative(x, order)


def kicks_crossed(t0, t1, period):
    """Number of kick times j*period (j >= 1) inside (t0, t1].

    A small relative tolerance absorbs float accumulation of step times, so
    a step that lands on j*period to within 1e-9 fires the kick.
    """
    tol = 1e-9 * max(1.0, abs(t1))
    return max(0, int(np.floor((t1 + tol) / period)) - int(np.floor((t0 + tol) / period)))
