"""Gaussian measure, reproducing kernels and symbols on C^n.

Points of C^n are stored as 2n reals ``(Re z_1..Re z_n, Im z_1..Im z_n)``, which is
also the phase-space layout ``(x, xi)`` used by :mod:`focklab.weyl`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidArgument
from .numint import AdaptiveSpec, DEFAULT_SPEC, QuadResult, integrate_gaussian, integrate_gaussian_log

DECAY_CLASSES = ("schwartz", "gaussian-dominated", "bounded")


@dataclass(frozen=True)
class FockContext:
    n: int = 1

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidArgument("complex dimension n must be a positive integer")

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def log_normalization(self) -> float:
        """log of (2 pi)^{-n}."""
        return -self.n * math.log(2.0 * math.pi)

    def density(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        return np.exp(self.log_normalization - 0.5 * np.sum(w * w, axis=-1))

    def check_normalization(self, spec: AdaptiveSpec = DEFAULT_SPEC) -> QuadResult:
        """Total mass of d(mu), by quadrature against the Gaussian itself."""
        res = integrate_gaussian(lambda p: np.ones(len(p)), np.zeros(self.dim), 1.0, spec)
        return QuadResult(res.value * math.exp(self.log_normalization), res.achieved,
                          res.converged, res.order, res.history)

    def complexify(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape[-1] != self.dim:
            raise InvalidArgument(f"expected points with last axis {self.dim}, got {p.shape}")
        return p[..., : self.n] + 1j * p[..., self.n:]


def as_points(p, dim: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != dim:
        raise InvalidArgument(f"expected points with last axis {dim}, got shape {p.shape}")
    return p


class Symbol:
    """A complex function on C^n = R^{2n} plus the metadata quadrature needs.

    ``func`` maps an ``(..., 2n)`` array of points to an array of values. A symbol
    may also carry ``grid_func(*axes)`` to evaluate on a tensor grid faster than
    pointwise (the Weyl kernel builder uses it).
    """

    def __init__(self, func: Callable, n: int = 1, decay: str = "schwartz",
                 band_limit: float | None = None, center=None, real: bool = False,
                 grid_func: Callable | None = None, name: str = "symbol"):
        if decay not in DECAY_CLASSES:
            raise InvalidArgument(f"decay class must be one of {DECAY_CLASSES}")
        self.func = func
        self.n = int(n)
        self.decay = decay
        self.band_limit = band_limit
        self.center = None if center is None else np.asarray(center, dtype=float)
        self.real = real
        self.grid_func = grid_func
        self.name = name

    @property
    def dim(self) -> int:
        return 2 * self.n

    def __repr__(self):
        return f"Symbol({self.name}, n={self.n}, decay={self.decay})"

    def __call__(self, p) -> np.ndarray:
        p = as_points(p, self.dim)
        out = np.asarray(self.func(p))
        if out.dtype.kind != "c":
            out = out.astype(complex)
        return out

    def eval_grid(self, *axes) -> np.ndarray:
        """Values on the tensor grid ``axes[0] x axes[1] x ...`` (ij indexing)."""
        if len(axes) != self.dim:
            raise InvalidArgument(f"need {self.dim} axes")
        if self.grid_func is not None:
            return np.asarray(self.grid_func(*axes), dtype=complex)
        mesh = np.meshgrid(*axes, indexing="ij")
        return self(np.stack(mesh, axis=-1))

    def _derive(self, func, grid_func=None, **changes):
        attrs = dict(n=self.n, decay=self.decay, band_limit=self.band_limit,
                     center=self.center, real=self.real, name=self.name)
        attrs.update(changes)
        return Symbol(func, grid_func=grid_func, **attrs)

    def shifted(self, b) -> "Symbol":
        """The translate ``z -> g(z - b)``."""
        b = np.asarray(b, dtype=float).reshape(self.dim)
        gf = None
        if self.grid_func is not None:
            gf = lambda *axes: self.grid_func(*(ax - bj for ax, bj in zip(axes, b)))
        center = b if self.center is None else self.center + b
        return self._derive(lambda p: self.func(p - b), gf, center=center,
                            name=f"{self.name}(.-b)")

    def scaled(self, c: complex) -> "Symbol":
        gf = None
        if self.grid_func is not None:
            gf = lambda *axes: c * self.grid_func(*axes)
        real = self.real and np.isreal(c)
        return self._derive(lambda p: c * self.func(p), gf, real=bool(real),
                            name=f"{c}*{self.name}")

    def __mul__(self, c):
        if isinstance(c, Symbol):
            return NotImplemented
        return self.scaled(c)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scaled(-1.0)

    def __add__(self, other: "Symbol") -> "Symbol":
        if not isinstance(other, Symbol):
            return NotImplemented
        if other.n != self.n:
            raise InvalidArgument("cannot add symbols of different dimension")
        gf = None
        if self.grid_func is not None and other.grid_func is not None:
            gf = lambda *axes: self.grid_func(*axes) + other.grid_func(*axes)
        order = DECAY_CLASSES
        decay = order[max(order.index(self.decay), order.index(other.decay))]
        bl = None
        if self.band_limit is not None and other.band_limit is not None:
            bl = max(self.band_limit, other.band_limit)
        return Symbol(lambda p: self.func(p) + other.func(p), n=self.n, decay=decay,
                      band_limit=bl, center=self.center, real=self.real and other.real,
                      grid_func=gf, name=f"({self.name}+{other.name})")

    def __sub__(self, other):
        return self + (-other)


# ---------------------------------------------------------------------------
# stock symbols


def constant_symbol(c: complex = 1.0, n: int = 1) -> Symbol:
    def f(p):
        return np.full(p.shape[:-1], c, dtype=complex)
    gf = lambda *axes: np.full(tuple(len(a) for a in axes), c, dtype=complex)
    return Symbol(f, n, decay="bounded", band_limit=0.0, real=bool(np.isreal(c)),
                  grid_func=gf, name=f"const({c})")


def zero_symbol(n: int = 1) -> Symbol:
    s = constant_symbol(0.0, n)
    s.name = "zero"
    return s


def gaussian_symbol(beta: float = 1.0, center=None, n: int = 1, amplitude: complex = 1.0) -> Symbol:
    """``amplitude * exp(-beta |w - center|^2)``."""
    c = np.zeros(2 * n) if center is None else np.asarray(center, dtype=float)

    def f(p):
        d = p - c
        return amplitude * np.exp(-beta * np.sum(d * d, axis=-1))

    def gf(*axes):
        out = np.asarray(amplitude, dtype=complex)
        for ax, cj in zip(axes, c):
            out = np.multiply.outer(out, np.exp(-beta * (ax - cj) ** 2))
        return out

    return Symbol(f, n, center=c, real=bool(np.isreal(amplitude)), grid_func=gf,
                  name=f"gauss({beta})")


def coordinate_symbol(j: int = 0, n: int = 1, conjugate: bool = False, real_part: bool = False) -> Symbol:
    """The complex coordinate ``z_j`` (or its conjugate, or its real part)."""
    if real_part:
        return Symbol(lambda p: p[..., j], n, decay="gaussian-dominated", real=True,
                      name=f"x{j + 1}")
    sign = -1.0 if conjugate else 1.0
    name = f"conj(z{j + 1})" if conjugate else f"z{j + 1}"
    return Symbol(lambda p: p[..., j] + sign * 1j * p[..., n + j], n,
                  decay="gaussian-dominated", name=name)


def kernel_symbol(ctx: FockContext, b) -> Symbol:
    """The normalized kernel ``k_b`` viewed as a symbol."""
    b = np.asarray(b, dtype=float)
    return Symbol(lambda p: normalized_kernel(ctx, b, p), ctx.n, decay="gaussian-dominated",
                  name="k_b")


# ---------------------------------------------------------------------------
# kernels


def _pairing(ctx: FockContext, z, w):
    zc = ctx.complexify(z)
    wc = ctx.complexify(w)
    return np.sum(zc * np.conj(wc), axis=-1)


def repro_kernel(ctx: FockContext, z, w):
    """``K(z, w) = exp(z . conj(w) / 2)``."""
    return np.exp(0.5 * _pairing(ctx, z, w))


def normalized_kernel(ctx: FockContext, a, z):
    """``k_a(z) = exp(z . conj(a) / 2 - |a|^2 / 4)``; ``k_0`` is identically 1."""
    a = np.asarray(a, dtype=float)
    return np.exp(0.5 * _pairing(ctx, z, a) - 0.25 * np.sum(a * a, axis=-1))


@dataclass(frozen=True)
class NormResult:
    log_value: float
    value: float
    achieved: float
    converged: bool
    order: int


def norm2a(ctx: FockContext, g: Symbol, a, spec: AdaptiveSpec = DEFAULT_SPEC,
           start: int | None = None) -> NormResult:
    """``||g k_a||`` in L^2(d mu), i.e. ``((2pi)^-n int |g|^2 e^{-|w-a|^2/2} dv)^{1/2}``.

    The Gaussian factor is absorbed into Hermite weights centred at ``a`` and the sum
    runs in log space, so block symbols with amplitudes near e^{R^2/16} and
    separations that push the weight below 1e-300 are both handled.
    """
    a = np.asarray(a, dtype=float).reshape(ctx.dim)

    def logf(p):
        with np.errstate(divide="ignore"):
            return 2.0 * np.log(np.abs(g(p)))

    res = integrate_gaussian_log(logf, a, 1.0, spec, dim=ctx.dim, start=start)
    log_sq = ctx.log_normalization + res.value
    log_val = 0.5 * log_sq
    value = math.exp(log_val) if log_val > -745 else 0.0
    return NormResult(log_val, value, res.achieved, res.converged, res.order)
