import pytest

from focklab.blocks import BumpProfile, block_envelope
from focklab.correspondence import bridge_check, bridge_pair, default_grid_ladder, hs_bound
from focklab.errors import BudgetExceeded
from focklab.fock import zero_symbol
from focklab.weyl import PhaseSpaceGrid


def test_zero_symbol(ctx):
    br = bridge_pair(ctx, zero_symbol(), zero_symbol(), (4, 8), [PhaseSpaceGrid(8.0, 128)])
    assert br.toeplitz_finest == 0.0 and br.weyl_finest == 0.0 and br.gap == 0.0


def test_hs_bound(phi):
    assert hs_bound(phi, 2.0) == block_envelope(phi, 2.0)


@pytest.mark.parametrize("R", [1.0, 4.0])
def test_bridge(ctx, phi, R):
    br = bridge_check(ctx, phi, R, (16, 32, 48), default_grid_ladder(2))
    assert br.agrees and br.toeplitz_monotone
    assert br.toeplitz_finest <= br.hs_bound + 1e-6
    assert br.weyl_finest <= br.hs_bound * (1 + 1e-3)
    assert br.weyl_step <= 1e-6


def test_products_consistent(ctx, phi):
    one = bridge_check(ctx, phi, 1.0, (48,), [PhaseSpaceGrid(16.0, 512)])
    four = bridge_check(ctx, phi, 4.0, (48,), [PhaseSpaceGrid(16.0, 512)])
    env = block_envelope(phi)
    assert 4 * four.toeplitz_finest <= env + 1e-6 and one.toeplitz_finest <= env + 1e-6


def test_bridge_budget(ctx, phi):
    with pytest.raises(BudgetExceeded):
        bridge_check(ctx, phi, 32.0)
