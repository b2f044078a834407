"""Seeded random profile generators used by audits and property sweeps.

All samplers take a numpy Generator so sweeps are reproducible; audits
document their sampler so reported slacks can be regenerated.
"""

from __future__ import annotations

import numpy as np

from .radial import RadialFunction, RadialGrid


def bump_profile(rng: np.random.Generator, grid: RadialGrid,
                 max_bumps: int = 4, amp: float = 1.0) -> RadialFunction:
    """Sum of 1..max_bumps smooth radial Gaussians with random centers,
    widths and signs, pinned to zero at r = 1 (Dirichlet) by subtracting
    the boundary value along the ramp r."""
    r = grid.nodes
    vals = np.zeros_like(r)
    for _ in range(int(rng.integers(1, max_bumps + 1))):
        center = rng.uniform(0.0, 0.9)
        width = rng.uniform(0.05, 0.35)
        sign = 1.0 if rng.random() < 0.5 else -1.0
        vals += sign * rng.uniform(0.2, amp) * np.exp(-((r - center) / width) ** 2)
    vals -= vals[-1] * r
    vals[-1] = 0.0
    return RadialFunction(grid, vals, dirichlet=True)


def nonneg_profile(rng: np.random.Generator, grid: RadialGrid,
                   max_bumps: int = 4, amp: float = 1.0) -> RadialFunction:
    u = bump_profile(rng, grid, max_bumps, amp)
    vals = np.abs(u.values)
    vals[-1] = 0.0
    return RadialFunction(grid, vals, dirichlet=True)


def step_profile(rng: np.random.Generator, max_steps: int = 5,
                 support: tuple = (0.02, 0.9), vmax: float = 2.0,
                 ramp: float = 1e-3) -> RadialFunction:
    """Random nonnegative step profile on its own compact grid.

    Plateau boundaries are drawn inside `support` and connected by ramps
    of the given width; the profile vanishes identically beyond the
    support (so hyperbolic integrals stay finite).
    """
    n_steps = int(rng.integers(1, max_steps + 1))
    edges = np.sort(rng.uniform(support[0], support[1], n_steps))
    # Enforce a gap so ramps do not overlap.
    for i in range(1, edges.size):
        edges[i] = max(edges[i], edges[i - 1] + 3.0 * ramp)
    edges = edges[edges < support[1]]
    if edges.size == 0:
        edges = np.array([0.5 * (support[0] + support[1])])
    levels = rng.uniform(0.0, vmax, edges.size + 1)
    levels[-1] = 0.0
    nodes = [edges[0] * 0.1]
    vals = [levels[0]]
    for e, nxt in zip(edges, levels[1:]):
        nodes.extend([e, e + ramp])
        vals.extend([vals[-1], nxt])
    nodes.append(1.0)
    vals.append(0.0)
    return RadialFunction(RadialGrid(np.asarray(nodes)),
                          np.asarray(vals), dirichlet=True)
