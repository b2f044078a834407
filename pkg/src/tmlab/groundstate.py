"""Radial positive solutions of -Delta phi = V phi and the induced stretch.

The shooting solver integrates the radial equation

    -(1/r) (r phi')' = V(r) phi,    phi(r0) = 1,  (r phi')(r0) = 0,

in the logarithmic variable t = log r, where with q = dphi/dt = r phi' it
becomes the mildly-coefficiented system

    dphi/dt = q,        dq/dt = -r^2 V(r) phi,

and r^2 V is bounded for every potential of the catalogue away from the
endpoints.  If phi crosses zero before r = 1 the form Q_V is indefinite
and NodalSolutionError is raised.

A positive solution induces the coordinate stretch

    log s(r) = int_{1/e}^{r} dt / (t phi(t)^2)   ( = int dt/phi^2 in log r ),

which maps the disk onto a disk of radius s(1) = lim_{r->1} s(r).  The
dichotomy driving everything downstream is whether s(1) is finite:

  * s(1) finite and phi bounded away from 0 at the rim: the form is
    weakly coercive and the constrained exponential supremum is finite;
  * s(1) infinite (or phi(1) = 0): the form has a ground state and the
    supremum diverges.

Numerically s(1) is classified from the growth of log s over the last
grid decades in (1 - r): a borderline ground state produces increments
that stay large decade after decade, a coercive potential produces
increments collapsing at a geometric rate.  The thresholds live in
GroundStateConfig and the raw increments are reported for audit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InvalidInputError, NodalSolutionError, StepFailureError
from .potentials import Potential, check_kato
from .radial import RadialFunction, RadialGrid
from .forms import PotentialRemainder, eval_Q

WEAKLY_COERCIVE = "WeaklyCoercive"
GROUND_STATE = "GroundStateDetected"
INDEFINITE = "Indefinite"


@dataclass
class GroundStateConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    # phi(1) threshold: below this the rim value counts as zero.
    delta_phi: float = 1e-6
    # log s increment over the last (1-r)-decade that flags divergence,
    # provided the increments are not collapsing geometrically.
    div_increment: float = 0.2
    div_ratio: float = 0.6
    kato_alpha: float = 0.5


@dataclass
class GroundStateResult:
    potential: Potential
    phi: RadialFunction
    phi_at_1: float
    kato_ok: bool
    log_s: np.ndarray | None = None
    s_table: RadialFunction | None = None
    s_at_1: float = math.nan
    s_divergent: bool = False
    gamma_fit: float = math.nan
    diagnostics: dict = field(default_factory=dict)

    def s_of_r(self, r):
        """Interpolate the stretch (linearly in log s against log r)."""
        if self.log_s is None:
            raise InvalidInputError("transform_s has not been run")
        t = np.log(np.asarray(r, dtype=float))
        return np.exp(np.interp(t, np.log(self.phi.grid.nodes), self.log_s))


def shoot(pot: Potential, grid: RadialGrid,
          config: GroundStateConfig | None = None) -> GroundStateResult:
    """Integrate the radial equation across the grid; phi normalized to
    max 1 (attained at the center for admissible potentials)."""
    if config is None:
        config = GroundStateConfig()
    nodes = grid.nodes
    # The last node is r = 1 where catalogue potentials may blow up;
    # integrate to the last interior node and extrapolate the final cell.
    t_eval = np.log(nodes[:-1])
    t0, t_end = t_eval[0], t_eval[-1]

    def rhs(t, y):
        r = math.exp(t)
        v = float(pot(np.asarray([r]))[0])
        return [y[1], -r * r * v * y[0]]

    def hit_zero(t, y):
        return y[0]

    hit_zero.terminal = True
    hit_zero.direction = -1

    sol = solve_ivp(rhs, (t0, t_end), [1.0, 0.0], t_eval=t_eval,
                    rtol=config.rtol, atol=config.atol, method="RK45",
                    events=hit_zero, dense_output=False)
    if sol.status == 1:  # zero crossing event
        raise NodalSolutionError(math.exp(float(sol.t_events[0][0])))
    if sol.status != 0:
        raise StepFailureError(sol.message)

    phi_vals = sol.y[0]
    q_vals = sol.y[1]
    # Final cell [nodes[-2], 1]: linear continuation in t.
    dt_last = 0.0 - t_end
    phi_end = phi_vals[-1] + q_vals[-1] * dt_last
    full = np.concatenate([phi_vals, [phi_end]])
    if np.any(full[:-1] <= 0.0):
        i = int(np.argmax(full[:-1] <= 0.0))
        raise NodalSolutionError(nodes[i])
    peak = float(np.max(full))
    full = full / peak
    phi = RadialFunction(grid, full, dirichlet=False)
    try:
        kato_ok = bool(check_kato(pot, config.kato_alpha).ok)
    except Exception:
        kato_ok = False
    return GroundStateResult(pot, phi, float(full[-1]), kato_ok,
                             diagnostics={"q_scaled": q_vals / peak})


def transform_s(gs: GroundStateResult,
                config: GroundStateConfig | None = None) -> GroundStateResult:
    """Fill the stretch table s(r), anchored so s(1/e) = 1 exactly.

    d(log s)/dt = 1/phi(t)^2 in t = log r, integrated cumulatively by the
    trapezoid rule over the grid; s(1) is declared divergent when the
    log s increments over the last two (1-r)-decades fail to collapse,
    else extrapolated geometrically.
    """
    if config is None:
        config = GroundStateConfig()
    nodes = gs.phi.grid.nodes
    phi = gs.phi.values
    if np.any(phi[:-1] <= 0.0):
        raise NodalSolutionError(nodes[int(np.argmax(phi[:-1] <= 0.0))])
    t = np.log(nodes[:-1])
    integ = 1.0 / (phi[:-1] ** 2)
    cum = np.concatenate([[0.0],
                          np.cumsum(0.5 * (integ[1:] + integ[:-1]) * np.diff(t))])
    anchor = np.interp(-1.0, t, cum)  # t = -1 is r = 1/e
    logs_interior = cum - anchor

    # Increments of log s over the last decades of 1 - r.
    probes = 1.0 - np.array([1e-6, 1e-7, 1e-8])
    probes = probes[probes > nodes[0]]
    ls_probe = np.interp(np.log(probes), t, logs_interior)
    if ls_probe.size >= 3:
        inc_prev = float(ls_probe[-2] - ls_probe[-3])
        inc_last = float(ls_probe[-1] - ls_probe[-2])
    else:
        inc_prev = inc_last = 0.0
    divergent = (inc_last > config.div_increment
                 and inc_last > config.div_ratio * inc_prev)

    # Continuation over the final cell and geometric tail estimate; the
    # continuation is capped so a vanishing rim value (critical case,
    # 1/phi^2 ~ 1e16) cannot overflow the stored table.
    last_cell = min((0.0 - t[-1]) * integ[-1], 500.0)
    if divergent:
        s_at_1 = math.inf
        logs_end = logs_interior[-1] + last_cell
    else:
        ratio = min(inc_last / inc_prev, 0.95) if inc_prev > 0 else 0.0
        tail = inc_last * ratio / (1.0 - ratio) if ratio > 0 else 0.0
        logs_end = logs_interior[-1] + last_cell
        s_at_1 = math.exp(logs_end + tail)

    log_s = np.concatenate([logs_interior, [logs_end]])
    # A vanishing rim value can push log s beyond exp range (critical
    # case); the clamped table only matters for coercive results.
    s_table = RadialFunction(gs.phi.grid, np.exp(np.minimum(log_s, 700.0)),
                             dirichlet=False)

    # Linear behavior s(r) ~ gamma r at the center, fitted on the
    # smallest decade of nodes.
    small = nodes <= nodes[0] * 10.0
    gamma = float(np.median(np.exp(log_s[small]) / nodes[small]))

    gs.log_s = log_s
    gs.s_table = s_table
    gs.s_at_1 = s_at_1
    gs.s_divergent = bool(divergent)
    gs.gamma_fit = gamma
    gs.diagnostics.update({"inc_prev_decade": inc_prev,
                           "inc_last_decade": inc_last})
    return gs


def ground_state_analysis(pot: Potential, grid: RadialGrid,
                          config: GroundStateConfig | None = None
                          ) -> GroundStateResult:
    return transform_s(shoot(pot, grid, config), config)


def jacobi_identity_residual(gs: GroundStateResult, u: RadialFunction) -> float:
    """Relative defect of Q_V(u) = 2 pi int phi^2 ((u/phi)')^2 r dr.

    The right side makes the nonnegativity of Q_V manifest whenever phi is
    a positive solution for V; the residual measures how well the discrete
    quadratures reproduce that identity.
    """
    if not u.dirichlet:
        raise InvalidInputError("Jacobi identity residual needs Dirichlet u")
    if u.grid is not gs.phi.grid and not (u.grid == gs.phi.grid):
        raise InvalidInputError("u must live on the ground-state grid")
    phi = gs.phi.values
    w = u.values / phi
    slopes = np.diff(w) / u.grid.widths
    phi_mid = 0.5 * (phi[:-1] + phi[1:])
    transformed = math.fsum(phi_mid**2 * slopes**2 * u.grid.cell_areas)
    q = eval_Q(PotentialRemainder(gs.potential), u)
    return abs(q - transformed) / max(1.0, abs(q))


@dataclass
class CoercivityResult:
    classification: str
    result: GroundStateResult | None
    detail: str


def classify_coercivity(pot: Potential, grid: RadialGrid,
                        config: GroundStateConfig | None = None
                        ) -> CoercivityResult:
    """Weakly coercive / ground state / indefinite verdict for Q_V.

    WeaklyCoercive: finite stretch s(1) and phi(1) above delta_phi.
    GroundStateDetected: divergent stretch, or phi positive but vanishing
    at the rim (critical case).
    Indefinite: the shot solution crosses zero (V too strong).
    """
    if config is None:
        config = GroundStateConfig()
    try:
        gs = ground_state_analysis(pot, grid, config)
    except NodalSolutionError as exc:
        return CoercivityResult(INDEFINITE, None,
                                f"nodal solution at r = {exc.radius:.6g}")
    except StepFailureError as exc:
        return CoercivityResult(INDEFINITE, None, f"integrator failure: {exc}")
    if gs.s_divergent:
        return CoercivityResult(
            GROUND_STATE, gs,
            "stretch diverges (log s increment "
            f"{gs.diagnostics['inc_last_decade']:.4g} per decade)")
    if gs.phi_at_1 <= config.delta_phi:
        return CoercivityResult(GROUND_STATE, gs,
                                f"phi(1) = {gs.phi_at_1:.3g} below threshold")
    return CoercivityResult(WEAKLY_COERCIVE, gs,
                            f"s(1) = {gs.s_at_1:.6g}, phi(1) = {gs.phi_at_1:.6g}")
