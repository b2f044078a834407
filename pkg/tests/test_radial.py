import math

import numpy as np
import pytest

from tmlab.errors import InvalidInputError, SingularEvaluationError
from tmlab.potentials import LerayPotential
from tmlab.radial import (RadialFunction, RadialGrid, derivative,
                          gradient_norm_sq, integral_weighted, lp_norm)
from tmlab.probe import moser_function


def test_default_grid_grading(grid):
    nodes = grid.nodes
    assert len(grid) == 4096
    assert nodes[0] == pytest.approx(1e-8, rel=1e-12)
    assert 1.0 - nodes[-2] == pytest.approx(1e-8, rel=1e-6)
    assert nodes[-1] == 1.0
    assert np.all(np.diff(nodes) > 0)
    # geometric clustering: bounded ratios at both ends
    left_ratios = nodes[1:100] / nodes[:99]
    assert np.all(left_ratios < 1.02)
    right_gaps = 1.0 - nodes[-100:-1]
    assert np.all(right_gaps[1:] / right_gaps[:-1] > 0.97)


def test_grid_validation():
    with pytest.raises(InvalidInputError):
        RadialGrid([0.5])
    with pytest.raises(InvalidInputError):
        RadialGrid([0.5, 0.4, 1.0])
    with pytest.raises(InvalidInputError):
        RadialGrid([0.0, 1.0])
    with pytest.raises(InvalidInputError):
        RadialGrid([0.1, 0.9])  # must end at 1


def test_gradient_norm_examples(grid):
    assert gradient_norm_sq(RadialFunction.zero(grid)) == 0.0
    ramp = RadialFunction.from_callable(grid, lambda r: 1.0 - r)
    assert gradient_norm_sq(ramp) == pytest.approx(math.pi, abs=1e-10)
    m = moser_function(grid, 64)
    assert gradient_norm_sq(m) == pytest.approx(1.0, abs=1e-3)


def test_gradient_needs_two_nodes():
    with pytest.raises(InvalidInputError):
        RadialGrid([1.0])


def test_lp_norm_examples(grid):
    one = RadialFunction.constant(grid, 1.0)
    assert lp_norm(one, 2) == pytest.approx(math.sqrt(math.pi), abs=1e-12)
    assert lp_norm(RadialFunction.zero(grid), 3) == 0.0
    ramp = RadialFunction.from_callable(grid, lambda r: 1.0 - r)
    assert lp_norm(ramp, 1) == pytest.approx(math.pi / 3.0, abs=1e-5)
    with pytest.raises(InvalidInputError):
        lp_norm(one, 0.5)


def test_integral_weighted_examples(grid):
    one = RadialFunction.constant(grid, 1.0)
    assert integral_weighted(one, lambda r: np.zeros_like(r)) == 0.0
    assert integral_weighted(one, lambda r: np.ones_like(r)) == \
        pytest.approx(math.pi, abs=1e-12)


def test_integral_weighted_leray_oracle(grid):
    # sqrt(log 1/r) against the borderline Hardy weight, truncated at the
    # last interior node; oracle is the closed form of the L-substitution.
    u = RadialFunction.from_callable(
        grid, lambda r: np.sqrt(np.log(1.0 / np.minimum(r, 1 - 1e-16))))
    r_lo, eps_edge = grid.nodes[0], grid.nodes[-2]
    pot = LerayPotential()

    def w(r):
        return np.where((r >= r_lo) & (r < eps_edge), pot(r), 0.0)

    disc = integral_weighted(u, w)
    oracle = (math.pi / 2.0) * math.log(math.log(1.0 / grid.nodes[0])
                                        / math.log(1.0 / eps_edge))
    assert disc == pytest.approx(oracle, rel=1e-4)


def test_integral_weighted_singular_report(grid):
    one = RadialFunction.constant(grid, 1.0)

    def bad(r):
        out = np.ones_like(r)
        out[r > 0.5] = np.inf
        return out

    with pytest.raises(SingularEvaluationError) as err:
        integral_weighted(one, bad)
    assert err.value.abscissa > 0.5


def test_integral_weighted_linear_and_monotone(grid):
    rng = np.random.default_rng(5)
    vals = rng.uniform(0, 1, len(grid))
    vals[-1] = 0.0
    u = RadialFunction(grid, vals)
    w1 = lambda r: np.exp(-r)
    w2 = lambda r: np.exp(-r) + 0.3 * r
    a = integral_weighted(u, w1)
    b = integral_weighted(u, lambda r: 0.3 * r)
    assert integral_weighted(u, w2) == pytest.approx(a + b, rel=1e-12)
    assert a <= integral_weighted(u, w2)


def test_derivative_examples(grid):
    const = RadialFunction.constant(grid, 4.0)
    assert np.all(derivative(const) == 0.0)
    ramp = RadialFunction.from_callable(grid, lambda r: 1.0 - r)
    assert np.allclose(derivative(ramp), -1.0)
    u = RadialFunction.from_callable(
        grid, lambda r: np.sqrt(np.log(1.0 / np.minimum(r, 1 - 1e-16))))
    a, b = grid.nodes[100], grid.nodes[101]
    expected = (u.values[101] - u.values[100]) / (b - a)
    assert derivative(u)[100] == expected


def test_scaling_exactness(grid):
    rng = np.random.default_rng(1)
    vals = rng.normal(size=len(grid))
    vals[-1] = 0.0
    u = RadialFunction(grid, vals)
    c = -3.7
    assert gradient_norm_sq(u.scaled(c)) == \
        pytest.approx(c * c * gradient_norm_sq(u), rel=1e-14)
    assert lp_norm(u.scaled(c), 3) == \
        pytest.approx(abs(c) * lp_norm(u, 3), rel=1e-12)


def test_gradient_refinement_second_order():
    exact = math.pi**3 / 8.0 + math.pi / 2.0  # energy of cos(pi r / 2)
    errs = []
    for n in (512, 1024, 2048):
        g = RadialGrid.default(n)
        u = RadialFunction.from_callable(g, lambda r: np.cos(math.pi * r / 2))
        errs.append(abs(gradient_norm_sq(u) - exact))
    assert errs[0] / errs[1] > 3.0
    assert errs[1] / errs[2] > 3.0


def test_dirichlet_flag_enforced(grid):
    vals = np.ones(len(grid))
    with pytest.raises(InvalidInputError):
        RadialFunction(grid, vals, dirichlet=True)


def test_interpolation_constant_left_of_first_node(grid):
    u = RadialFunction.from_callable(grid, lambda r: 1.0 - r)
    assert u(grid.nodes[0] / 10.0) == u.values[0]


def test_csv_roundtrip(tmp_path, grid):
    rng = np.random.default_rng(9)
    vals = rng.normal(size=len(grid))
    vals[-1] = 0.0
    u = RadialFunction(grid, vals)
    path = tmp_path / "prof.csv"
    u.to_csv(path)
    v = RadialFunction.from_csv(path)
    assert np.array_equal(u.values, v.values)
    assert np.array_equal(u.grid.nodes, v.grid.nodes)
    assert v.dirichlet
