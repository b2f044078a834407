"""Catalogue of radial potentials V(r) on the unit disk.

The potentials supported here are the standard test cases for
Hardy-Moser-Trudinger remainder terms:

    constant      V(r) = lam
    leray         V(r) = 1 / (4 r^2 log(1/r)^2)
    gamma:g       V(r) = 1 / (4 r^2 log(1/r)^2 max(log(1/r)^g, 1))
    wangye        V(r) = 1 / (1 - r^2)^2
    tabulated     samples on a radial grid, interpolated linearly in log r

Two admissibility screens are provided:

  * class-V membership: r -> (1 - r^2)^2 V(r) is nonincreasing (the
    weighted monotonicity that makes hyperbolic rearrangement applicable);
  * a Kato-type vanishing test at the origin:
    r^2 log(1/r)^(2+alpha) V(r) -> 0 along r = 10^-m.

Both are numeric and advisory: the raw diagnostic sequence is always
returned so borderline cases can be audited.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SingularEvaluationError
from .radial import RadialFunction, RadialGrid, log_inv, one_minus_r_sq


class Potential:
    """Base class; subclasses implement vectorized __call__(r)."""

    name = "potential"

    def __call__(self, r):
        raise NotImplementedError

    def eval(self, r):
        """Evaluate at points strictly inside (0, 1); domain-checked."""
        r_arr = np.asarray(r, dtype=float)
        if np.any((r_arr <= 0.0) | (r_arr >= 1.0)):
            raise InvalidInputError("potential defined on 0 < r < 1")
        return self(r)

    def spec_string(self) -> str:
        return self.name


@dataclass(frozen=True)
class ConstantPotential(Potential):
    lam: float

    name = "constant"

    def __call__(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.lam)

    def spec_string(self) -> str:
        return f"constant:{self.lam:g}"


class LerayPotential(Potential):
    """Borderline 2-D Hardy weight 1/(4 r^2 log(1/r)^2)."""

    name = "leray"

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        L = log_inv(r)
        return 1.0 / (4.0 * r * r * L * L)


@dataclass(frozen=True)
class GammaPotential(Potential):
    """Leray weight damped by max(log(1/r)^gamma, 1) near the origin."""

    gamma: float

    name = "gamma"

    def __post_init__(self):
        if self.gamma <= 0:
            raise InvalidInputError("gamma must be positive")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        L = log_inv(r)
        # Evaluate both branches and take the max: the switch at r = 1/e
        # then cannot produce a rounding discontinuity.
        damp = np.maximum(np.power(L, self.gamma, where=L > 0,
                                   out=np.ones_like(L)), 1.0)
        return 1.0 / (4.0 * r * r * L * L * damp)

    def spec_string(self) -> str:
        return f"gamma:{self.gamma:g}"


class WangYePotential(Potential):
    """Boundary Hardy weight 1/(1 - r^2)^2."""

    name = "wangye"

    def __call__(self, r):
        q = one_minus_r_sq(r)
        return 1.0 / (q * q)


class TabulatedPotential(Potential):
    """Nonnegative samples on a radial grid, interpolated linearly in log r.

    Outside the tabulated radius range the boundary samples are extended
    constantly.
    """

    name = "tabulated"

    def __init__(self, radii, values):
        radii = np.asarray(radii, dtype=float)
        values = np.asarray(values, dtype=float)
        if radii.ndim != 1 or radii.size < 2 or not np.all(np.diff(radii) > 0):
            raise InvalidInputError("tabulated radii must be increasing")
        if np.any((radii <= 0) | (radii > 1)):
            raise InvalidInputError("tabulated radii must lie in (0, 1]")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise InvalidInputError("tabulated values must be finite and >= 0")
        self.radii = radii
        self.values = values
        self._log_r = np.log(radii)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return np.interp(np.log(r), self._log_r, self.values)


def parse_potential(text: str) -> Potential:
    """Parse CLI syntax: constant:<lam>, leray, gamma:<g>, wangye,
    tabulated:<path.csv>."""
    head, _, arg = text.strip().partition(":")
    head = head.lower()
    if head == "constant":
        return ConstantPotential(float(arg))
    if head == "leray":
        return LerayPotential()
    if head == "gamma":
        return GammaPotential(float(arg))
    if head == "wangye":
        return WangYePotential()
    if head == "tabulated":
        prof = RadialFunction.from_csv(arg)
        return TabulatedPotential(prof.grid.nodes, prof.values)
    raise InvalidInputError(f"unknown potential spec {text!r}")


# ---------------------------------------------------------------------------
# admissibility checks
# ---------------------------------------------------------------------------

@dataclass
class ClassVReport:
    ok: bool
    violation_index: int | None = None
    violation_radii: tuple[float, float] | None = None
    violation_values: tuple[float, float] | None = None


def check_class_v(pot: Potential, grid: RadialGrid,
                  slack: float = 1e-12) -> ClassVReport:
    """Is g(r) = (1 - r^2)^2 V(r) nonincreasing at the grid nodes?

    The slack is relative to max(1, |g|) and absorbs floating rounding of
    (1 - r^2)^2 near r = 1.  On failure the first offending node pair is
    reported.
    """
    r = grid.nodes[:-1]  # V may be singular at r = 1 exactly
    g = np.asarray(pot(r), dtype=float) * one_minus_r_sq(r) ** 2
    if not np.all(np.isfinite(g)):
        i = int(np.argmax(~np.isfinite(g)))
        raise SingularEvaluationError(r[i], g[i])
    tol = slack * np.maximum(1.0, np.abs(g[:-1]))
    bad = g[1:] > g[:-1] + tol
    if np.any(bad):
        i = int(np.argmax(bad))
        return ClassVReport(False, i, (float(r[i]), float(r[i + 1])),
                            (float(g[i]), float(g[i + 1])))
    return ClassVReport(True)


@dataclass
class KatoReport:
    ok: bool
    radii: np.ndarray
    values: np.ndarray


def check_kato(pot: Potential, alpha: float,
               m_range=(2, 12), tiny: float = 1e-6,
               slope_tol: float = 0.02) -> KatoReport:
    """Does h(r) = r^2 log(1/r)^(2+alpha) V(r) vanish as r -> 0?

    h is sampled along r = 10^-m, m = m_range[0]..m_range[1].  The verdict
    is True when h is decreasing over the last five samples and either has
    dropped below `tiny` or trends to zero with a definitely negative
    log-log slope.  The raw sequence is always returned; the boolean is
    advisory (tabulated potentials have no formula to inspect).
    """
    if alpha <= 0:
        raise InvalidInputError("alpha must be positive")
    m = np.arange(m_range[0], m_range[1] + 1)
    r = 10.0 ** (-m.astype(float))
    L = np.log(1.0 / r)
    h = r * r * L ** (2.0 + alpha) * np.asarray(pot(r), dtype=float)
    if not np.all(np.isfinite(h)):
        i = int(np.argmax(~np.isfinite(h)))
        raise SingularEvaluationError(r[i], h[i])
    tail = h[-5:]
    if np.max(tail) < tiny:
        return KatoReport(True, r, h)
    decreasing = bool(np.all(np.diff(tail) < 0))
    if not decreasing:
        return KatoReport(False, r, h)
    if tail[-1] < tiny:
        return KatoReport(True, r, h)
    # Slow decay (e.g. a negative power of log 1/r): detect via the
    # log-log slope of h against m over the tail.
    slope = np.polyfit(np.log(m[-5:].astype(float)), np.log(tail), 1)[0]
    return KatoReport(bool(slope < -slope_tol), r, h)


# ---------------------------------------------------------------------------
# rearranged potential
# ---------------------------------------------------------------------------

def rearranged_potential(pot: Potential, scale: float = 1.0,
                         grid: RadialGrid | None = None) -> TabulatedPotential:
    """Monotone replacement for a radial potential.

    Forms g(r) = (1 - r^2)^2 * scale^2 * V(r), replaces g by its
    decreasing rearrangement with respect to the hyperbolic measure of the
    Poincare disk, and divides by (1 - r^2)^2.  The result is tabulated,
    passes check_class_v by construction, and is idempotent: already
    monotone g comes back unchanged up to interpolation error.

    `scale` is the radius normalization of the original domain (area
    pi * scale^2); the potential samples are indexed by the rescaled
    radius and carry the 2-D Hardy scaling scale^2.
    """
    from .rearrange import hyperbolic_measure, rearrange_decreasing

    if scale <= 0:
        raise InvalidInputError("scale must be positive")
    if grid is None:
        grid = RadialGrid.default()
    r = grid.nodes
    rr = np.minimum(r, 1.0 - 1e-14)  # g is evaluated up to r = 1
    g_vals = (scale * scale) * np.asarray(pot(rr), dtype=float) \
        * one_minus_r_sq(rr) ** 2
    if not np.all(np.isfinite(g_vals)):
        i = int(np.argmax(~np.isfinite(g_vals)))
        raise SingularEvaluationError(r[i], g_vals[i])
    g = RadialFunction(grid, g_vals, dirichlet=False)
    g_sharp = rearrange_decreasing(g, hyperbolic_measure())
    # Tabulate on the union with the build grid: the class-V screen then
    # reads exact table values at its nodes, so monotonicity survives.
    out_r = np.union1d(g_sharp.grid.nodes, grid.nodes)
    rr_out = np.minimum(out_r, 1.0 - 1e-14)
    v_out = g_sharp(out_r) / one_minus_r_sq(rr_out) ** 2
    return TabulatedPotential(out_r, np.maximum(v_out, 0.0))
