import math

import numpy as np
import pytest

from focklab.blocks import a_R, a_symbol, g_symbol
from focklab.errors import InvalidArgument
from focklab.fock import constant_symbol, gaussian_symbol
from focklab.heat import HeatQuery, heat, heat_symbol, heat_transform, quarter_bound_margin, semigroup_residual
from oracles import heat_of_gaussian


def test_query_validation():
    with pytest.raises(InvalidArgument):
        HeatQuery(0.0, (0, 0))


@pytest.mark.parametrize("t", [0.1, 0.25, 1.0, 3.0])
def test_constants_fixed(ctx, t):
    assert abs(heat(ctx, constant_symbol(2.5), t, [1.0, -3.0]).value - 2.5) <= 1e-9


@pytest.mark.parametrize("t, a", [(0.25, (0, 0)), (0.25, (1.0, -0.5)), (0.5, (2.0, 1.0)), (1.3, (0.2, 0.0))])
def test_gaussian_closed_form(ctx, t, a):
    v = heat_transform(ctx, gaussian_symbol(1.0), HeatQuery(t, a)).value
    assert abs(v - heat_of_gaussian(1.0, t, a)) <= 1e-8


def test_quarter_at_origin(ctx):
    assert abs(heat(ctx, gaussian_symbol(1.0), 0.25, [0, 0]).value - 0.5) <= 1e-8


@pytest.mark.parametrize("R", [1.0, 2.0, 4.0])
def test_gR_quarter_is_one(ctx, phi, R):
    assert abs(heat(ctx, g_symbol(phi, R), 0.25, [0, 0]).value - 1.0) <= 1e-6


def test_quarter_bound_constant(ctx):
    lhs, rhs, _ = quarter_bound_margin(ctx, constant_symbol(1.0), [0.3, 0.4])
    assert lhs == pytest.approx(1.0, abs=1e-9) and rhs == pytest.approx(2.0, abs=1e-9)


def test_quarter_bound_gaussian(ctx):
    a = np.array([1.0, 2.0])
    lhs, rhs, tol = quarter_bound_margin(ctx, gaussian_symbol(1.0, a), a)
    assert lhs == pytest.approx(0.5, abs=1e-8)
    # ||e^{-|w-a|^2} k_a||^2 = (2pi)^-1 int e^{-2|u|^2 - |u|^2/2} = 1/5
    assert rhs == pytest.approx(2.0 * math.sqrt(0.2), rel=1e-8)
    assert lhs <= rhs


def test_quarter_bound_block(ctx, phi, tame):
    from focklab.blocks import block_symbol
    m = 2
    lhs, rhs, tol = quarter_bound_margin(ctx, block_symbol(tame, m, phi), tame.center(m))
    assert abs(lhs - m) <= 1e-6
    assert lhs <= rhs


def test_semigroup_constant(ctx):
    assert semigroup_residual(ctx, constant_symbol(3.0), 0.2, 0.3, [1, 1]).residual <= 1e-9


def test_semigroup_gaussian(ctx):
    chk = semigroup_residual(ctx, gaussian_symbol(1.0), 0.25, 0.25, [0, 0])
    assert chk.residual <= 1e-6
    assert abs(chk.direct - 0.5 * 2 / 3 * 1.5) <= 1e-8 or abs(chk.direct - heat_of_gaussian(1.0, 0.5, [0, 0])) <= 1e-8
    assert chk.residual <= 10 * max(chk.tolerance, 1e-15)


def test_semigroup_block(ctx, phi):
    # g_2^(1/2)(0) two ways, and equal to the heat of a_2 at time 1/4
    chk = semigroup_residual(ctx, g_symbol(phi, 2.0), 0.25, 0.25, [0, 0])
    ref = heat(ctx, a_symbol(phi, 2.0), 0.25, [0, 0]).value
    assert chk.residual <= 1e-6
    assert abs(chk.direct - ref) <= 1e-8


def test_heat_symbol_matches_pointwise(ctx):
    g = gaussian_symbol(0.8, [0.5, 0.0])
    hs = heat_symbol(ctx, g, 0.3, 40)
    pts = np.array([[0.0, 0.0], [1.0, -1.0], [2.0, 0.5]])
    np.testing.assert_allclose(hs(pts), [heat_of_gaussian(0.8, 0.3, p - [0.5, 0.0]) for p in pts], atol=1e-10)


def test_gR_round_trip_points(ctx, phi):
    for R in (1.0, 2.0, 4.0):
        for a in ([0.0, 0.0], [1.0, 0.0], [-2.0, 3.0]):
            v = heat(ctx, g_symbol(phi, R), 0.25, a).value
            assert abs(v - float(a_R(phi, R, np.array(a)))) <= 1e-6
