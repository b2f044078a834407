"""Scalar functionals: quadratic forms, exponential integrals, Orlicz norm.

The central objects are the remainder-corrected quadratic form

    Q(u) = int_B |grad u|^2 dx - psi(u)

with psi either a potential term int_B V u^2 dx or a multiple of a squared
L^p norm (p > 2), and the exponential functional

    J(u) = int_B exp(c u^2) dx,   c = 4 pi by default.

Also provided: both sides of the Onofri inequality on the disk,

    log((1/pi) int_B e^u) + ((1/pi) int_B e^u)^(-1)
        <=  1 + (1/(16 pi)) * Q(u),

the Luxemburg gauge norm of the Orlicz space generated by
exp(4 pi s^2) - 1, and the scalar subadditivity check for
F(t) = log t + 1/t.

J is overflow-safe: if any quadrature cell's exponent exceeds 700 the
result is reported as math.inf rather than silently saturating, because
divergence detection downstream relies on honest overflow reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .potentials import Potential, parse_potential
from .radial import (RadialFunction, center_cap_area, gradient_norm_sq,
                     integral_weighted, lp_norm)

FOUR_PI = 4.0 * math.pi
EXP_OVERFLOW = 700.0


class Remainder:
    """Base class for the subtracted functional psi(u)."""

    def psi(self, u: RadialFunction) -> float:
        raise NotImplementedError

    def spec_string(self) -> str:
        raise NotImplementedError


class NoRemainder(Remainder):
    def psi(self, u: RadialFunction) -> float:
        return 0.0

    def spec_string(self) -> str:
        return "none"


@dataclass(frozen=True)
class PotentialRemainder(Remainder):
    potential: Potential

    def psi(self, u: RadialFunction) -> float:
        return integral_weighted(u, self.potential)

    def spec_string(self) -> str:
        return f"potential:{self.potential.spec_string()}"


@dataclass(frozen=True)
class LpRemainder(Remainder):
    lam: float
    p: float

    def __post_init__(self):
        if self.p <= 2:
            raise InvalidInputError("Lp remainder needs p > 2")

    def psi(self, u: RadialFunction) -> float:
        return self.lam * lp_norm(u, self.p) ** 2

    def spec_string(self) -> str:
        return f"lp:{self.lam:g}:{self.p:g}"


def parse_form(text: str) -> Remainder:
    """CLI syntax: none | lp:<lam>:<p> | potential:<spec> | <potential spec>."""
    t = text.strip()
    if t.lower() == "none":
        return NoRemainder()
    head, _, rest = t.partition(":")
    if head.lower() == "lp":
        lam_s, _, p_s = rest.partition(":")
        return LpRemainder(float(lam_s), float(p_s))
    if head.lower() == "potential":
        return PotentialRemainder(parse_potential(rest))
    return PotentialRemainder(parse_potential(t))


# ---------------------------------------------------------------------------
# functionals
# ---------------------------------------------------------------------------

def eval_Q(form: Remainder, u: RadialFunction) -> float:
    """Q(u) = gradient energy minus remainder; may be negative."""
    return gradient_norm_sq(u) - form.psi(u)


def _mids_with_cap(u: RadialFunction):
    """Midpoint values and areas including the constant center cap."""
    um = np.concatenate([[u.values[0]], u.at_mids()])
    areas = np.concatenate([[center_cap_area(u.grid)], u.grid.cell_areas])
    return um, areas


def eval_J(u: RadialFunction, coeff: float = FOUR_PI) -> float:
    """J(u) = 2 pi int exp(coeff * u(r)^2) r dr; math.inf on overflow."""
    um, areas = _mids_with_cap(u)
    expo = coeff * um * um
    if np.max(expo) > EXP_OVERFLOW:
        return math.inf
    return math.fsum(np.exp(expo) * areas)


def onofri_lhs(u: RadialFunction) -> float:
    """log A + 1/A with A the disk average of e^u.

    Accepts non-Dirichlet profiles (constants are useful test inputs).
    The average uses the quadrature's own disk measure, so u == 0 gives
    exactly 1.0.
    """
    um, areas = _mids_with_cap(u)
    total = math.fsum(areas)
    m = float(np.max(um))
    if m > EXP_OVERFLOW:
        # A overflows; evaluate log A in shifted form, 1/A underflows to 0.
        log_a = m + math.log(math.fsum(np.exp(um - m) * areas) / total)
        return log_a
    a = math.fsum(np.exp(um) * areas) / total
    return math.log(a) + 1.0 / a


def onofri_rhs(u: RadialFunction, form: Remainder) -> float:
    """1 + Q(u) / (16 pi)."""
    return 1.0 + eval_Q(form, u) / (16.0 * math.pi)


def orlicz_integral(u: RadialFunction, t: float) -> float:
    """2 pi int (exp(4 pi (u/t)^2) - 1) r dr; math.inf on overflow."""
    um, areas = _mids_with_cap(u)
    um = um / t
    expo = FOUR_PI * um * um
    if np.max(expo) > EXP_OVERFLOW:
        return math.inf
    return math.fsum(np.expm1(expo) * areas)


def luxemburg_norm(u: RadialFunction, rel_tol: float = 1e-10) -> float:
    """Gauge norm: smallest t > 0 with orlicz_integral(u, t) <= 1.

    The integral is strictly decreasing in t, so bisection is safe once
    bracketed.  Returns 0 for the zero profile.
    """
    peak = float(np.max(np.abs(u.values)))
    if peak == 0.0:
        return 0.0
    lo = 1e-12
    hi = max(1.0, 10.0 * peak)
    while orlicz_integral(u, hi) > 1.0:
        hi *= 4.0
        if hi > 1e30:
            raise InvalidInputError("Luxemburg bracket expansion failed")
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if orlicz_integral(u, mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return hi


def subadditive_gap(t1: float, t2: float) -> float:
    """F(t1) + F(t2) - F(t1 + t2) for F(t) = log t + 1/t (nonnegative)."""
    if t1 <= 0 or t2 <= 0:
        raise InvalidInputError("subadditivity check needs positive inputs")

    def f(t):
        return math.log(t) + 1.0 / t

    return f(t1) + f(t2) - f(t1 + t2)


def subadditivity_check(t1: float, t2: float) -> bool:
    """F(t1 + t2) <= F(t1) + F(t2)."""
    return subadditive_gap(t1, t2) >= 0.0
