"""Quadrature on R^d: Gauss-Hermite for Gaussian-weighted integrals, Gauss-Legendre
for boxes, and doubling refinement for both.

Every estimate is a plain ``np.sum`` over a contiguous array, which numpy reduces
pairwise in a fixed order, so repeated runs give bit-identical values.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal
from scipy.special import logsumexp, roots_legendre

from .errors import InvalidArgument

# achieved tolerance is measured against max(|I|, _FLOOR * sum|w f|) so that
# integrals that cancel to roundoff (odd integrands) still register as converged
_FLOOR = 1e-13
_LOG_RESCALE = 100.0 * math.log(10.0)


@dataclass(frozen=True)
class QuadratureRule1D:
    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    order: int
    log_weights: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("hermite", "uniform"):
            raise InvalidArgument(f"unknown rule kind {self.kind!r}")


@dataclass(frozen=True)
class Box2n:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise InvalidArgument("box bounds must be non-empty and of equal length")
        if any(a >= b for a, b in zip(lo, hi)):
            raise InvalidArgument("box needs lo < hi on every axis")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @classmethod
    def cube(cls, dim: int, half_width: float) -> "Box2n":
        return cls((-half_width,) * dim, (half_width,) * dim)


@dataclass(frozen=True)
class AdaptiveSpec:
    """Refinement controls.

    ``initial`` is the per-axis resolution of the first estimate; each refinement
    doubles it. ``max_points`` caps the tensor-grid size of a single estimate.
    """
    initial: int = 16
    max_refinements: int = 8
    rtol: float = 1e-9
    max_points: int = 4_000_000

    def __post_init__(self):
        if self.rtol <= 0:
            raise InvalidArgument("tolerance must be positive")
        if self.max_refinements < 1:
            raise InvalidArgument("need at least one refinement")
        if self.initial < 1:
            raise InvalidArgument("initial resolution must be positive")

    def orders(self, dim: int, start: int | None = None):
        q = max(self.initial, start or 0)
        for _ in range(self.max_refinements + 1):
            if q ** dim > self.max_points:
                return
            yield q
            q *= 2


DEFAULT_SPEC = AdaptiveSpec()


@dataclass(frozen=True)
class QuadResult:
    value: complex
    achieved: float
    converged: bool
    order: int
    history: tuple = field(default=())

    @property
    def real(self) -> float:
        return float(np.real(self.value))


# ---------------------------------------------------------------------------
# rules


def _hermite_tail(order: int, x: np.ndarray):
    """Orthonormal Hermite polynomials p_q(x), p_{q-1}(x) for weight e^{-x^2}.

    Values are returned divided by exp(log_scale) so large nodes do not overflow.
    """
    prev = np.zeros_like(x)
    cur = np.full_like(x, np.pi ** -0.25)
    log_scale = np.zeros_like(x)
    for k in range(order):
        nxt = math.sqrt(2.0 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > 1e100
        if big.any():
            prev[big] *= 1e-100
            cur[big] *= 1e-100
            log_scale[big] += _LOG_RESCALE
    return cur, prev, log_scale


@functools.lru_cache(maxsize=64)
def _hermite_cached(order: int):
    if order == 1:
        nodes = np.zeros(1)
    else:
        off = np.sqrt(np.arange(1, order) / 2.0)
        nodes = eigvalsh_tridiagonal(np.zeros(order), off)
        nodes = 0.5 * (nodes - nodes[::-1])
        for _ in range(2):
            pq, pqm1, _ = _hermite_tail(order, nodes)
            nodes = nodes - pq / (math.sqrt(2.0 * order) * pqm1)
            nodes = 0.5 * (nodes - nodes[::-1])
    _, pqm1, log_scale = _hermite_tail(order, nodes)
    log_w = -math.log(order) - 2.0 * (np.log(np.abs(pqm1)) + log_scale)
    for arr in (nodes, log_w):
        arr.setflags(write=False)
    return nodes, log_w


def hermite_rule(order: int) -> QuadratureRule1D:
    """Gauss-Hermite rule for the weight e^{-t^2} on the real line.

    Nodes come from the Golub-Welsch eigenproblem, polished by two Newton steps;
    weights use the Christoffel formula ``w = 1 / (q p_{q-1}(t)^2)`` evaluated in
    log form, so ``log_weights`` stays finite even where ``weights`` underflows.
    """
    if not isinstance(order, (int, np.integer)) or order < 1:
        raise InvalidArgument(f"hermite order must be a positive integer, got {order!r}")
    nodes, log_w = _hermite_cached(int(order))
    return QuadratureRule1D(nodes, np.exp(log_w), "hermite", int(order), log_w)


def legendre_rule(order: int, lo: float = -1.0, hi: float = 1.0) -> QuadratureRule1D:
    if order < 1:
        raise InvalidArgument("legendre order must be positive")
    x, w = roots_legendre(int(order))
    half = 0.5 * (hi - lo)
    return QuadratureRule1D(lo + half * (x + 1.0), half * w, "uniform", int(order))


def _tensor(arrays: Sequence[np.ndarray]) -> np.ndarray:
    grids = np.meshgrid(*arrays, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def _tensor_sum(arrays: Sequence[np.ndarray]) -> np.ndarray:
    out = np.zeros(())
    for a in arrays:
        out = np.add.outer(out, a)
    return out.ravel()


def gaussian_nodes(center, sigma2: float, order: int, dim: int):
    """Points and log-weights for ``int f(w) exp(-|w-c|^2 / (2 sigma2)) dw``."""
    if sigma2 <= 0:
        raise InvalidArgument("sigma2 must be positive")
    center = np.broadcast_to(np.asarray(center, dtype=float), (dim,))
    rule = hermite_rule(order)
    scale = math.sqrt(2.0 * sigma2)
    pts = center + scale * _tensor([rule.nodes] * dim)
    logw = _tensor_sum([rule.log_weights] * dim) + dim * math.log(scale)
    return pts, logw


# ---------------------------------------------------------------------------
# integrators


def _achieved(new, old, scale):
    denom = max(abs(new), _FLOOR * scale, np.finfo(float).tiny)
    return float(abs(new - old) / denom)


def integrate_gaussian(f: Callable, center, sigma2: float, spec: AdaptiveSpec = DEFAULT_SPEC,
                       dim: int | None = None, start: int | None = None) -> QuadResult:
    """``int f(w) exp(-|w - center|^2 / (2 sigma2)) dw`` over R^dim.

    ``f`` takes an ``(npts, dim)`` array and returns ``npts`` values. The tensor
    Hermite order doubles until two successive estimates agree to ``spec.rtol``;
    if that never happens the last estimate is returned with ``converged=False``.
    """
    center = np.asarray(center, dtype=float)
    dim = dim or center.size
    prev = None
    history = []
    result = None
    for q in spec.orders(dim, start):
        pts, logw = gaussian_nodes(center, sigma2, q, dim)
        terms = np.exp(logw) * np.asarray(f(pts), dtype=complex)
        est = terms.sum()
        if prev is not None:
            ach = _achieved(est, prev, np.abs(terms).sum())
            history.append(ach)
            result = QuadResult(complex(est), ach, ach <= spec.rtol, q, tuple(history))
            if result.converged:
                return result
        prev = est
    if result is None:
        raise InvalidArgument("spec allows fewer than two estimates; raise max_points")
    return result


def integrate_gaussian_log(logf: Callable, center, sigma2: float,
                           spec: AdaptiveSpec = DEFAULT_SPEC, dim: int | None = None,
                           start: int | None = None) -> QuadResult:
    """Log-space variant for nonnegative integrands.

    ``logf`` returns ``log f`` (``-inf`` where f vanishes); the result's ``value``
    is the log of the integral, accumulated with log-sum-exp so neither the
    weights nor the integrand need to be representable in linear space.
    """
    center = np.asarray(center, dtype=float)
    dim = dim or center.size
    prev = None
    history = []
    result = None
    for q in spec.orders(dim, start):
        pts, logw = gaussian_nodes(center, sigma2, q, dim)
        lf = np.asarray(logf(pts), dtype=float)
        est = float(logsumexp(logw + lf)) if np.isfinite(lf).any() else -np.inf
        if prev is not None:
            if est == prev == -np.inf:
                ach = 0.0
            else:
                ach = float(abs(math.expm1(est - prev))) if np.isfinite(est - prev) else np.inf
            history.append(ach)
            result = QuadResult(est, ach, ach <= spec.rtol, q, tuple(history))
            if result.converged:
                return result
        prev = est
    if result is None:
        raise InvalidArgument("spec allows fewer than two estimates; raise max_points")
    return result


def box_resolution(box: Box2n, freq: float = 0.0, minimum: int = 1) -> int:
    """Per-axis node floor: at least 8 nodes per period of ``exp(i freq t)``."""
    width = max(h - l for l, h in zip(box.lo, box.hi))
    return max(minimum, int(math.ceil(8.0 * freq * width / (2.0 * math.pi))))


def integrate_box(f: Callable, box: Box2n, spec: AdaptiveSpec = DEFAULT_SPEC,
                  freq: float = 0.0) -> QuadResult:
    """Tensor Gauss-Legendre integral of ``f`` over ``box`` with doubling refinement.

    ``freq`` is the largest angular frequency the integrand oscillates with along
    any axis; the starting resolution never drops below 8 nodes per period.
    """
    start = box_resolution(box, freq, spec.initial)
    prev = None
    history = []
    result = None
    for q in spec.orders(box.dim, start):
        rules = [legendre_rule(q, lo, hi) for lo, hi in zip(box.lo, box.hi)]
        pts = _tensor([r.nodes for r in rules])
        w = np.exp(_tensor_sum([np.log(r.weights) for r in rules]))
        terms = w * np.asarray(f(pts), dtype=complex)
        est = terms.sum()
        if prev is not None:
            ach = _achieved(est, prev, np.abs(terms).sum())
            history.append(ach)
            result = QuadResult(complex(est), ach, ach <= spec.rtol, q, tuple(history))
            if result.converged:
                return result
        prev = est
    if result is None:
        raise InvalidArgument("spec allows fewer than two estimates; raise max_points")
    return result


def gaussian_moment(k: int) -> float:
    """Closed form of ``int t^k e^{-t^2} dt``."""
    if k % 2:
        return 0.0
    return math.gamma((k + 1) / 2.0)
