import math

import numpy as np
import pytest
from scipy.special import roots_hermite

from focklab.errors import InvalidArgument
from focklab.numint import (AdaptiveSpec, Box2n, QuadratureRule1D, gaussian_moment, hermite_rule,
                            integrate_box, integrate_gaussian, legendre_rule)
from oracles import bump_raw, bump_constant_box, gaussian_moment_1d


def test_order_one():
    r = hermite_rule(1)
    assert r.nodes.tolist() == [0.0]
    assert r.weights[0] == pytest.approx(math.sqrt(math.pi), rel=1e-15)


def test_order_two():
    r = hermite_rule(2)
    np.testing.assert_allclose(r.nodes, [-1 / math.sqrt(2), 1 / math.sqrt(2)], rtol=1e-15)
    np.testing.assert_allclose(r.weights, [math.sqrt(math.pi) / 2] * 2, rtol=1e-14)


def test_order_zero_rejected():
    with pytest.raises(InvalidArgument):
        hermite_rule(0)


@pytest.mark.parametrize("q", [1, 2, 5, 11, 40, 100, 150])
def test_rule_shape_and_mass(q):
    r = hermite_rule(q)
    assert np.all(r.weights > 0)
    assert np.all(np.diff(r.nodes) > 0)
    assert abs(r.weights.sum() - math.sqrt(math.pi)) <= 1e-12


@pytest.mark.parametrize("q", [3, 20, 64, 120])
def test_matches_scipy(q):
    x, w = roots_hermite(q)
    r = hermite_rule(q)
    np.testing.assert_allclose(r.nodes, x, atol=1e-12)
    np.testing.assert_allclose(r.weights, w, rtol=1e-9, atol=1e-300)


def test_t20_at_order_11():
    r = hermite_rule(11)
    exact = gaussian_moment_1d(20)
    assert abs(np.sum(r.weights * r.nodes ** 20) - exact) / exact <= 1e-10
    assert gaussian_moment(20) == pytest.approx(exact, rel=1e-14)


def test_log_weights_survive_underflow():
    r = hermite_rule(1000)
    assert np.all(np.isfinite(r.log_weights))
    assert r.weights.min() == 0.0 or r.log_weights.min() < -700


def test_rule_kind_checked():
    with pytest.raises(InvalidArgument):
        QuadratureRule1D(np.zeros(1), np.ones(1), "simpson", 1)


def test_box_validation():
    with pytest.raises(InvalidArgument):
        Box2n((0.0, 1.0), (1.0, 1.0))
    assert Box2n.cube(4, 0.5).dim == 4


def test_spec_validation():
    with pytest.raises(InvalidArgument):
        AdaptiveSpec(rtol=0)
    with pytest.raises(InvalidArgument):
        AdaptiveSpec(max_refinements=0)


def test_gaussian_constant():
    res = integrate_gaussian(lambda p: np.ones(len(p)), [0.3, -1.0], 1.0)
    assert abs(res.value - 2 * math.pi) <= 1e-10
    assert res.converged


@pytest.mark.parametrize("sigma2, exact", [(0.5, math.pi / 2), (0.25, math.pi / 3)])
def test_gaussian_product(sigma2, exact):
    # e^{-|w|^2} against e^{-|w|^2 / (2 sigma2)}: int e^{-(1 + 1/(2 sigma2))|w|^2} = pi / (1 + 1/(2 sigma2))
    res = integrate_gaussian(lambda p: np.exp(-np.sum(p * p, axis=1)), [0.0, 0.0], sigma2)
    assert abs(res.value - exact) <= 1e-8


def test_gaussian_odd():
    res = integrate_gaussian(lambda p: p[:, 0], [0.0, 0.0], 1.0)
    assert abs(res.value) <= 1e-10
    assert res.converged


def test_nonconvergence_is_flagged():
    spec = AdaptiveSpec(initial=4, max_refinements=1)
    res = integrate_gaussian(lambda p: np.cos(30 * p[:, 0]), [0.0, 0.0], 1.0, spec)
    assert not res.converged
    assert res.achieved > spec.rtol


def test_box_volume():
    res = integrate_box(lambda p: np.ones(len(p)), Box2n.cube(2, 0.5))
    assert abs(res.value - 1.0) <= 1e-12


def test_box_bump_mass():
    c = bump_constant_box()
    res = integrate_box(lambda p: c * bump_raw(p[:, 0], p[:, 1]), Box2n.cube(2, 0.5),
                        AdaptiveSpec(initial=64, rtol=1e-10))
    assert abs(res.value - 1.0) <= 1e-8


def test_box_oscillatory():
    res = integrate_box(lambda p: np.exp(40j * p[:, 0]), Box2n.cube(2, 0.5), freq=40.0)
    assert abs(res.value - math.sin(20) / 20) <= 1e-8


def test_legendre_interval():
    r = legendre_rule(8, 0.0, 2.0)
    assert np.sum(r.weights * r.nodes ** 3) == pytest.approx(4.0, rel=1e-14)
