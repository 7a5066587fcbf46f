import math

import numpy as np
import pytest

from focklab.blocks import a1_l2_norm, a_symbol
from focklab.errors import InvalidArgument
from focklab.fock import gaussian_symbol, zero_symbol
from focklab.weyl import (DiscreteWeylKernel, PhaseSpaceGrid, hs_norm, operator_norm_disc, power_norm,
                          symbol_l2_norm, weyl_kernel)
from oracles import weyl_kernel_aR

SMALL = PhaseSpaceGrid(8.0, 256)


def test_grid_geometry():
    g = PhaseSpaceGrid(8.0, 256)
    assert g.h * g.samples == pytest.approx(16.0)
    assert g.x[0] == pytest.approx(-8 + g.h / 2) and g.x[-1] == pytest.approx(8 - g.h / 2)
    np.testing.assert_allclose(g.xi, -g.xi[::-1])
    r = g.refined()
    assert r.samples == 512 and r.L == pytest.approx(8 * math.sqrt(2))
    with pytest.raises(InvalidArgument):
        PhaseSpaceGrid(8.0, 255)
    with pytest.raises(InvalidArgument):
        PhaseSpaceGrid(8.0, 256, n=2)


def test_zero_symbol():
    K = weyl_kernel(zero_symbol(), SMALL)
    assert not np.any(K.matrix)
    assert hs_norm(K) == 0.0
    assert operator_norm_disc(K).value == 0.0


def test_gaussian_hermitian_and_hs():
    K = weyl_kernel(gaussian_symbol(1.0), SMALL)
    assert K.hermitian_defect() <= 1e-10
    assert abs(hs_norm(K) - 0.5) <= 1e-4


def test_gaussian_kernel_closed_form():
    # e^{-x^2 - xi^2}: K(x, y) = (4 pi)^{-1/2} e^{-(x+y)^2/4} e^{-(x-y)^2/4}
    g = PhaseSpaceGrid(8.0, 256)
    K = weyl_kernel(gaussian_symbol(1.0), g)
    x = g.x
    ref = np.exp(-((x[:, None] + x[None, :]) ** 2 + (x[:, None] - x[None, :]) ** 2) / 4) / math.sqrt(4 * math.pi)
    np.testing.assert_allclose(K.matrix, ref, atol=1e-13)


def test_aR_kernel_support_and_values(phi):
    R = 4.0
    g = PhaseSpaceGrid(16.0, 1024)
    K = weyl_kernel(a_symbol(phi, R), g)
    x = g.x
    diff = np.abs(x[:, None] - x[None, :])
    assert np.abs(K.matrix[diff > R / 2 + g.h]).max() <= 1e-8
    for i, j in [(512, 512), (502, 537), (256, 263), (700, 690), (100, 80)]:
        assert abs(K.matrix[i, j] - weyl_kernel_aR(R, x[i], x[j])) <= 1e-8


@pytest.mark.parametrize("R", [1.0, 2.0, 4.0, 8.0])
def test_aR_hs_identity(phi, R):
    K = weyl_kernel(a_symbol(phi, R), PhaseSpaceGrid(32.0, 1024))
    target = a1_l2_norm(phi) / (R * math.sqrt(2 * math.pi))
    assert abs(hs_norm(K) / target - 1) <= 0.01


def test_rank_one():
    g = PhaseSpaceGrid(8.0, 256)
    K = DiscreteWeylKernel.from_function(lambda x, y: np.exp(-x ** 2 / 2) * np.exp(-y ** 2 / 2), g)
    assert abs(operator_norm_disc(K).value - math.sqrt(math.pi)) <= 1e-6
    big = DiscreteWeylKernel.from_function(lambda x, y: np.exp(-x ** 2 / 2) * np.exp(-y ** 2 / 2),
                                           PhaseSpaceGrid(8.0, 1024))
    est = operator_norm_disc(big)
    assert est.method == "power" and est.converged
    assert abs(est.value - math.sqrt(math.pi)) <= 1e-6


def test_power_matches_svd():
    rng = np.random.default_rng(7)
    A = rng.normal(size=(60, 60)) + 1j * rng.normal(size=(60, 60))
    est = power_norm(A, tol=1e-13)
    assert est.converged
    assert est.value == pytest.approx(np.linalg.svd(A, compute_uv=False)[0], rel=1e-6)


def test_power_flags_nonconvergence():
    A = np.diag([1.0, 0.9999999])
    est = power_norm(A, tol=1e-16, max_iter=5)
    assert not est.converged and est.iterations == 5


def test_bandwidth_flag(phi):
    assert weyl_kernel(a_symbol(phi, 64.0), PhaseSpaceGrid(8.0, 256)).flags["bandwidth"]
    assert not weyl_kernel(a_symbol(phi, 2.0), PhaseSpaceGrid(8.0, 256)).flags["bandwidth"]


def test_linearity(phi):
    g1, g2 = gaussian_symbol(1.0, [0.5, 0.0]), a_symbol(phi, 2.0)
    K = weyl_kernel(2.0 * g1 + (-0.5j) * g2, SMALL).matrix
    ref = 2.0 * weyl_kernel(g1, SMALL).matrix - 0.5j * weyl_kernel(g2, SMALL).matrix
    np.testing.assert_allclose(K, ref, atol=1e-13)


def test_norm_ordering(phi):
    for R in (1.0, 8.0):
        K = weyl_kernel(a_symbol(phi, R), SMALL)
        assert operator_norm_disc(K).value <= hs_norm(K) + 1e-12


def test_symbol_l2(phi):
    assert symbol_l2_norm(gaussian_symbol(1.0), SMALL) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-10)
