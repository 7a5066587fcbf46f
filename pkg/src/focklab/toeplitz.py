"""Toeplitz operators compressed to Fock monomials of total degree <= N.

Entries are ``(g e_alpha, e_beta)`` with ``e_alpha = z^alpha / sqrt(2^|alpha| alpha!)``,
computed with tensor Gauss-Hermite after ``z = sqrt(2) s`` per real axis, which turns
``(2 pi)^-n e^{-|z|^2/2} dv`` into ``pi^-n e^{-|s|^2} ds``. With the scaled basis table
``E[k, alpha] = e_alpha(z_k) sqrt(w_k)`` the whole matrix is ``E^T diag(g) conj(E)``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import comb

from .errors import InvalidArgument, ProjectionTailError
from .fock import FockContext, Symbol
from .heat import heat
from .numint import DEFAULT_SPEC, AdaptiveSpec, gaussian_nodes
from .weyl import NormEstimate, matrix_norm

BEREZIN_TAIL_TOL = 1e-6


@dataclass(frozen=True)
class MultiIndex:
    exponents: tuple

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if any(e < 0 for e in exps):
            raise InvalidArgument("multi-index exponents must be nonnegative")
        object.__setattr__(self, "exponents", exps)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def log_norm_sq(self) -> float:
        """log of ``2^|alpha| alpha!``, the squared norm of z^alpha."""
        return self.degree * math.log(2.0) + sum(math.lgamma(e + 1) for e in self.exponents)


@dataclass(frozen=True)
class BasisSpec:
    """All multi-indices of degree <= N, graded, then lexicographically descending.

    For n = 2 the order starts (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
    """
    ctx: FockContext
    N: int
    indices: tuple = field(init=False)

    def __post_init__(self):
        if self.N < 0:
            raise InvalidArgument("maximal degree must be nonnegative")
        n = self.ctx.n
        out = []
        for d in range(self.N + 1):
            level = [e for e in itertools.product(range(d + 1), repeat=n) if sum(e) == d]
            out.extend(MultiIndex(e) for e in sorted(level, reverse=True))
        object.__setattr__(self, "indices", tuple(out))

    def __len__(self):
        return len(self.indices)

    @property
    def expected_size(self) -> int:
        return int(comb(self.N + self.ctx.n, self.ctx.n, exact=True))

    def position(self, alpha) -> int:
        alpha = alpha if isinstance(alpha, MultiIndex) else MultiIndex(tuple(np.ravel(alpha)))
        try:
            return self.indices.index(alpha)
        except ValueError:
            raise InvalidArgument(f"{alpha.exponents} is not in the degree-{self.N} basis") from None


def _power_tables(spec: BasisSpec, zc: np.ndarray) -> list:
    """Per coordinate j, ``t[k] = z_j^k / sqrt(2^k k!)`` for k <= N."""
    out = []
    for j in range(spec.ctx.n):
        t = np.empty((spec.N + 1,) + zc.shape[:-1], dtype=complex)
        t[0] = 1.0
        for k in range(spec.N):
            t[k + 1] = t[k] * zc[..., j] / math.sqrt(2.0 * (k + 1))
        out.append(t)
    return out


def basis_matrix(spec: BasisSpec, z) -> np.ndarray:
    """``e_alpha(z)`` for every point and index: shape (npts, len(spec))."""
    zc = spec.ctx.complexify(np.atleast_2d(np.asarray(z, dtype=float)))
    tables = _power_tables(spec, zc)
    cols = []
    for alpha in spec.indices:
        col = np.ones(zc.shape[:-1], dtype=complex)
        for j, e in enumerate(alpha.exponents):
            col = col * tables[j][e]
        cols.append(col)
    return np.stack(cols, axis=-1)


def basis_eval(spec: BasisSpec, alpha, z) -> complex:
    """``z^alpha / sqrt(2^|alpha| alpha!)`` at a single point."""
    pos = spec.position(alpha)
    return complex(basis_matrix(spec, np.asarray(z, dtype=float).reshape(1, -1))[0, pos])


@dataclass(frozen=True)
class TruncatedToeplitz:
    basis: BasisSpec
    matrix: np.ndarray
    achieved: float
    converged: bool
    order: int

    @property
    def N(self) -> int:
        return self.basis.N

    def hermitian_defect(self) -> float:
        m = self.matrix
        return float(np.abs(m - m.conj().T).max(initial=0.0))


def _scaled_basis(spec: BasisSpec, q: int):
    n = spec.ctx.n
    s, logw = gaussian_nodes(np.zeros(2 * n), 0.5, q, 2 * n)  # weight e^{-|s|^2}, s in units of z
    # gaussian_nodes with sigma2 = 1 would give z directly; sigma2 = 1/2 and then z = sqrt(2) s
    z = math.sqrt(2.0) * s
    w = np.exp(logw - n * math.log(math.pi))
    E = basis_matrix(spec, z) * np.sqrt(w)[:, None]
    return z, E


def assemble_toeplitz(ctx: FockContext, g: Symbol, spec: BasisSpec,
                      quad: AdaptiveSpec = DEFAULT_SPEC) -> TruncatedToeplitz:
    """Matrix of ``(g e_alpha, e_beta)`` for the basis, refined by doubling the Hermite order.

    The starting order N + 2 already integrates ``e_alpha conj(e_beta)`` exactly, so
    for polynomial g of low degree the first two estimates agree immediately.
    """
    if g.n != ctx.n or spec.ctx.n != ctx.n:
        raise InvalidArgument("symbol, basis and context dimensions differ")
    prev = None
    result = None
    start = max(quad.initial, spec.N + 2)
    for q in quad.orders(ctx.dim, start):
        z, E = _scaled_basis(spec, q)
        gv = g(z)
        mat = E.T @ (gv[:, None] * E.conj())
        if prev is not None:
            # floor mirrors numint: cancellation to roundoff of sum |g| w still counts as converged
            scale = float(np.sum(np.abs(gv) * np.sum(np.abs(E) ** 2, axis=1)))
            denom = max(np.linalg.norm(mat), 1e-13 * scale, np.finfo(float).tiny)
            ach = float(np.linalg.norm(mat - prev) / denom)
            result = TruncatedToeplitz(spec, mat, ach, ach <= quad.rtol, q)
            if result.converged:
                return result
        prev = mat
    if result is None:
        raise InvalidArgument("quadrature spec allows fewer than two estimates")
    return result


def operator_norm(T: TruncatedToeplitz, tol: float = 1e-12, seed: int = 0) -> NormEstimate:
    """Largest singular value of the compression: a lower bound for ``||T_g||``."""
    return matrix_norm(T.matrix, tol, seed=seed)


def kernel_coefficients(spec: BasisSpec, a) -> np.ndarray:
    """Coefficients ``e^{-|a|^2/4} conj(a)^alpha / sqrt(2^|alpha| alpha!)`` of k_a."""
    a = np.asarray(a, dtype=float).reshape(spec.ctx.dim)
    n = spec.ctx.n
    conj_pt = np.concatenate([a[:n], -a[n:]])
    return basis_matrix(spec, conj_pt)[0] * math.exp(-0.25 * float(a @ a))


@dataclass(frozen=True)
class BerezinPair:
    via_matrix: complex
    via_heat: complex
    tail: float
    achieved: float

    @property
    def gap(self) -> float:
        return abs(self.via_matrix - self.via_heat)


def berezin(ctx: FockContext, T: TruncatedToeplitz, g: Symbol, a,
            spec: AdaptiveSpec = DEFAULT_SPEC) -> BerezinPair:
    """Berezin transform of ``T_g`` at ``a`` two ways: from the matrix and as ``g^(1/2)(a)``."""
    c = kernel_coefficients(T.basis, a)
    norm_sq = float(np.sum(np.abs(c) ** 2))
    tail = 1.0 - norm_sq
    if tail > BEREZIN_TAIL_TOL:
        raise ProjectionTailError(
            f"degree-{T.N} projection of k_a keeps only {norm_sq:.8f} of its norm at |a|="
            f"{float(np.linalg.norm(a)):.3g}; raise N")
    via_matrix = complex(c @ T.matrix @ c.conj()) / norm_sq
    h = heat(ctx, g, 0.5, a, spec)
    return BerezinPair(via_matrix, h.value, max(tail, 0.0), max(T.achieved, h.achieved))


@dataclass(frozen=True)
class CovarianceGap:
    gap: float
    norm_base: float
    norm_shifted: float


def translation_covariance_gap(ctx: FockContext, g: Symbol, b, N: int, N_shift: int,
                               quad: AdaptiveSpec = DEFAULT_SPEC) -> CovarianceGap:
    """``| ||T_g^(N)|| - ||T_{g(.-b)}^(N')|| |``.

    Translation is unitary on the full space, but a shifted symbol lives on higher
    degrees; the heuristic margin ``N' >= N + 4|b|^2`` is enforced.
    """
    b = np.asarray(b, dtype=float).reshape(ctx.dim)
    if N_shift < N + 4.0 * float(b @ b):
        raise InvalidArgument("shifted truncation needs N' >= N + 4|b|^2")
    base = operator_norm(assemble_toeplitz(ctx, g, BasisSpec(ctx, N), quad)).value
    if not np.any(b):
        return CovarianceGap(0.0, base, base)
    shifted = operator_norm(assemble_toeplitz(ctx, g.shifted(b), BasisSpec(ctx, N_shift), quad)).value
    return CovarianceGap(abs(base - shifted), base, shifted)


def dump_matrix(T: TruncatedToeplitz, path) -> tuple:
    """Write ``<path>.bin`` (row-major binary64, real/imag interleaved) and ``<path>.json``."""
    path = Path(path)
    bin_path = path.with_suffix(".bin")
    meta_path = path.with_suffix(".json")
    np.ascontiguousarray(T.matrix, dtype="<c16").tofile(bin_path)
    meta = {
        "n": T.basis.ctx.n,
        "N": T.N,
        "dim": len(T.basis),
        "ordering": "graded, lexicographic descending within degree",
        "indices": [list(a.exponents) for a in T.basis.indices],
        "dtype": "float64 little-endian, real/imag interleaved",
        "layout": "row-major; entry (alpha, beta) = (g e_alpha, e_beta)",
        "achieved": T.achieved,
        "converged": T.converged,
        "hermite_order": T.order,
    }
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return bin_path, meta_path


def load_matrix(path) -> tuple:
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    d = meta["dim"]
    mat = np.fromfile(path.with_suffix(".bin"), dtype="<c16").reshape(d, d)
    return mat, meta
