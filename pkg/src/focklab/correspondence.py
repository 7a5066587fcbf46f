"""Toeplitz side of g_R against the Weyl side of a_R.

The two operators are unitarily equivalent, so their norms must agree. The Toeplitz
ladder gives lower bounds that can only increase with N; the Weyl ladder converges
under grid refinement. Neither pipeline sees the other's symbol.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .blocks import TOEPLITZ_BUDGET_R, BumpProfile, a_symbol, block_envelope, g_symbol
from .errors import BudgetExceeded, InvalidArgument
from .fock import FockContext, Symbol
from .numint import DEFAULT_SPEC, AdaptiveSpec
from .toeplitz import BasisSpec, assemble_toeplitz, operator_norm
from .weyl import PhaseSpaceGrid, operator_norm_disc, weyl_kernel

DEFAULT_N_LADDER = (16, 32, 48)
AGREEMENT_TOL = 0.05


def default_grid_ladder(levels: int = 2, base: PhaseSpaceGrid | None = None) -> list:
    grid = base or PhaseSpaceGrid(16.0, 512)
    out = [grid]
    for _ in range(levels - 1):
        out.append(out[-1].refined())
    return out


def hs_bound(phi: BumpProfile, R: float) -> float:
    """``(2 pi)^{-n/2} R^{-n} ||a_1||_2``."""
    return block_envelope(phi, R)


@dataclass
class BridgeReport:
    R: float | None
    toeplitz: list          # (N, norm, achieved)
    weyl: list              # (L, samples, norm, converged)
    hs_bound: float | None
    flags: dict = field(default_factory=dict)

    @property
    def toeplitz_finest(self) -> float:
        return self.toeplitz[-1][1]

    @property
    def weyl_finest(self) -> float:
        return self.weyl[-1][2]

    @property
    def gap(self) -> float:
        """Relative disagreement of the finest levels (0 when both vanish)."""
        t, w = self.toeplitz_finest, self.weyl_finest
        top = max(t, w)
        return abs(t - w) / top if top > 0 else 0.0

    @property
    def toeplitz_monotone(self) -> bool:
        vals = [r[1] for r in self.toeplitz]
        return all(b >= a * (1 - 1e-12) - 1e-15 for a, b in zip(vals, vals[1:]))

    @property
    def weyl_step(self) -> float:
        """Relative change between the two finest Weyl levels."""
        if len(self.weyl) < 2:
            return 0.0
        a, b = self.weyl[-2][2], self.weyl[-1][2]
        return abs(a - b) / max(a, b) if max(a, b) > 0 else 0.0

    @property
    def agrees(self) -> bool:
        return self.gap <= AGREEMENT_TOL


def bridge_pair(ctx: FockContext, g: Symbol, a: Symbol, N_ladder=DEFAULT_N_LADDER,
                grids=None, quad: AdaptiveSpec = DEFAULT_SPEC, bound: float | None = None,
                R: float | None = None) -> BridgeReport:
    """Norm ladders for a Toeplitz symbol g and the Weyl symbol a it should match."""
    if ctx.n != 1:
        raise InvalidArgument("the bridge runs in complex dimension 1")
    if not N_ladder:
        raise InvalidArgument("empty truncation ladder")
    grids = list(grids) if grids is not None else default_grid_ladder()
    tl = []
    for N in sorted(N_ladder):
        T = assemble_toeplitz(ctx, g, BasisSpec(ctx, N), quad)
        tl.append((N, operator_norm(T).value, T.achieved))
    wl, flags = [], {}
    for grid in grids:
        K = weyl_kernel(a, grid)
        est = operator_norm_disc(K)
        wl.append((grid.L, grid.samples, est.value, est.converged))
        flags = dict(K.flags)
    return BridgeReport(R, tl, wl, bound, flags)


def bridge_check(ctx: FockContext, phi: BumpProfile, R: float, N_ladder=DEFAULT_N_LADDER,
                 grids=None, quad: AdaptiveSpec = DEFAULT_SPEC) -> BridgeReport:
    if R > TOEPLITZ_BUDGET_R:
        raise BudgetExceeded(f"bridge needs the Toeplitz side, which is limited to R <= {TOEPLITZ_BUDGET_R:g}")
    return bridge_pair(ctx, g_symbol(phi, R), a_symbol(phi, R), N_ladder, grids, quad,
                       hs_bound(phi, R), R)
