"""Discretised Weyl quantisation on L^2(R) (n = 1).

The kernel ``K(x, y) = (2 pi)^-1 int a((x+y)/2, xi) e^{i (x-y) xi} d xi`` is built per
midpoint ``u = (x+y)/2``: on the spatial grid ``x_i = -L + (i + 1/2) h`` the midpoints
live on a half-step grid indexed by ``p = i + j`` and the differences are ``(i-j) h``,
so one FFT along xi per midpoint gives every difference at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import svdvals

from .errors import InvalidArgument
from .fock import Symbol

EDGE_FRACTION_TOL = 1e-3


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Spatial grid on [-L, L] with an even number of cell-centred samples.

    xi is handled spectrally on ``2 * samples`` cell-centred nodes covering
    ``[-pi/h, pi/h]``; the doubling makes the FFT period in ``x - y`` equal ``4L``,
    twice the largest difference on the grid.
    """
    L: float = 32.0
    samples: int = 1024
    n: int = 1

    def __post_init__(self):
        if self.n != 1:
            raise InvalidArgument("the Weyl module is implemented for n = 1")
        if self.L <= 0:
            raise InvalidArgument("half-width L must be positive")
        if self.samples < 2 or self.samples % 2:
            raise InvalidArgument("sample count must be even and >= 2")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.samples

    @property
    def x(self) -> np.ndarray:
        return -self.L + (np.arange(self.samples) + 0.5) * self.h

    @property
    def midpoints(self) -> np.ndarray:
        return -self.L + (np.arange(2 * self.samples - 1) + 1.0) * (0.5 * self.h)

    @property
    def xi_count(self) -> int:
        return 2 * self.samples

    @property
    def dxi(self) -> float:
        return 2.0 * math.pi / (self.xi_count * self.h)

    @property
    def xi(self) -> np.ndarray:
        return (np.arange(self.xi_count) - 0.5 * self.xi_count + 0.5) * self.dxi

    @property
    def bandwidth(self) -> float:
        return math.pi / self.h

    def refined(self) -> "PhaseSpaceGrid":
        """Twice the samples on a sqrt(2) wider box: h and the truncation both shrink."""
        return PhaseSpaceGrid(self.L * math.sqrt(2.0), 2 * self.samples, self.n)

    def covers(self, band_limit: float | None) -> bool:
        return band_limit is None or self.bandwidth >= 2.0 * band_limit


@dataclass
class DiscreteWeylKernel:
    matrix: np.ndarray
    grid: PhaseSpaceGrid
    flags: dict = field(default_factory=dict)

    @property
    def weight(self) -> float:
        return self.grid.h

    @property
    def weighted(self) -> np.ndarray:
        """``h K``: the matrix whose spectrum approximates the operator's."""
        return self.weight * self.matrix

    @classmethod
    def from_function(cls, kernel, grid: PhaseSpaceGrid) -> "DiscreteWeylKernel":
        """Sample an explicit kernel function ``kernel(x, y)`` on the grid."""
        x = grid.x
        return cls(np.asarray(kernel(x[:, None], x[None, :]), dtype=complex), grid, {})

    def hermitian_defect(self) -> float:
        m = self.matrix
        scale = max(np.abs(m).max(initial=0.0), np.finfo(float).tiny)
        return float(np.abs(m - m.conj().T).max(initial=0.0) / scale)


def weyl_kernel(a_sym: Symbol, grid: PhaseSpaceGrid, chunk: int = 512) -> DiscreteWeylKernel:
    """Sample the Weyl kernel of ``a_sym`` at all grid pairs ``(x_i, x_j)``.

    Flags: ``bandwidth`` (the xi range is narrower than twice the symbol's band
    limit) and ``edge_fraction`` (symbol mass near the box boundary).
    """
    if a_sym.n != grid.n:
        raise InvalidArgument("symbol and grid dimensions differ")
    M, Mx = grid.samples, grid.xi_count
    mids, xi = grid.midpoints, grid.xi
    F = np.empty((len(mids), Mx), dtype=complex)
    # symbol mass in the outer tenth of the box, on either axis
    xi_edge = np.abs(xi) > 0.9 * grid.bandwidth
    edge_num = edge_den = 0.0
    for p0 in range(0, len(mids), chunk):
        vals = a_sym.eval_grid(mids[p0:p0 + chunk], xi)
        ap = np.abs(vals) ** 2
        edge = xi_edge[None, :] | (np.abs(mids[p0:p0 + chunk]) > 0.9 * grid.L)[:, None]
        edge_den += ap.sum()
        edge_num += ap[edge].sum()
        F[p0:p0 + chunk] = np.fft.ifft(vals, axis=1)
    # F_p(k) = (dxi / 2pi) sum_j a(u_p, xi_j) e^{i k h xi_j}
    #        = (dxi / 2pi) Mx (-1)^k e^{i pi k / Mx} ifft(a_p)[k mod Mx]
    i = np.arange(M)
    k = i[:, None] - i[None, :]
    phase = np.where(k % 2, -1.0, 1.0) * np.exp(1j * math.pi * k / Mx)
    K = F[i[:, None] + i[None, :], k % Mx] * phase * (grid.dxi * Mx / (2.0 * math.pi))
    flags = {
        "bandwidth": not grid.covers(a_sym.band_limit),
        "edge_fraction": float(edge_num / edge_den) if edge_den else 0.0,
    }
    flags["truncated"] = flags["edge_fraction"] > EDGE_FRACTION_TOL
    return DiscreteWeylKernel(K, grid, flags)


def hs_norm(K: DiscreteWeylKernel) -> float:
    """``(sum |K_ij|^2 h^2)^{1/2}``."""
    return float(np.sqrt(np.sum(np.abs(K.matrix) ** 2)) * K.weight)


@dataclass(frozen=True)
class NormEstimate:
    value: float
    method: str
    iterations: int
    converged: bool


def power_norm(A: np.ndarray, tol: float = 1e-10, max_iter: int = 10_000, seed: int = 0) -> NormEstimate:
    """Largest singular value of ``A`` by power iteration on ``A* A`` from a seeded start."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(A.shape[1]) + 1j * rng.standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    est = 0.0
    for it in range(1, max_iter + 1):
        w = A.conj().T @ (A @ v)
        nw = np.linalg.norm(w)
        if nw == 0:
            return NormEstimate(0.0, "power", it, True)
        new = math.sqrt(nw)
        v = w / nw
        if abs(new - est) <= tol * new:
            return NormEstimate(new, "power", it, True)
        est = new
    return NormEstimate(est, "power", max_iter, False)


def matrix_norm(A: np.ndarray, tol: float = 1e-10, svd_limit: int = 512, seed: int = 0) -> NormEstimate:
    if max(A.shape) <= svd_limit:
        s = svdvals(A) if A.size else np.zeros(1)
        return NormEstimate(float(s[0]) if s.size else 0.0, "svd", 0, True)
    return power_norm(A, tol, seed=seed)


def operator_norm_disc(K: DiscreteWeylKernel, tol: float = 1e-10, seed: int = 0) -> NormEstimate:
    """Spectral norm of ``h K`` (full SVD up to 512 samples, power iteration beyond)."""
    return matrix_norm(K.weighted, tol, seed=seed)


def symbol_l2_norm(a_sym: Symbol, grid: PhaseSpaceGrid) -> float:
    """``||a||_2`` by the midpoint rule on the grid's own (x, xi) box."""
    vals = a_sym.eval_grid(grid.x, grid.xi)
    return float(np.sqrt(np.sum(np.abs(vals) ** 2) * grid.h * grid.dxi))
