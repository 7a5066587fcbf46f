"""Bump, oscillatory blocks a_R, their inverse-heat images g_R, schedules and ledgers.

For the radial bump ``Phi(u) = c exp(-1/(1 - 4|u|^2))`` every block is radial, so
pointwise values come from a one-dimensional Hankel-type integral

    int Phi(u) e^{gain |u|^2} e^{i R u.z} du = |S^{2n-1}| int_0^{1/2} Phi(r) e^{gain r^2} r^{2n-1} Lam_{n-1}(R |z| r) dr

with ``Lam_nu(x) = Gamma(nu+1) (2/x)^nu J_nu(x)``; ``gain = 0`` gives a_R and
``gain = R^2/4`` gives g_R. Tensor grids (the Weyl side) use a midpoint box rule
instead, whose only error is aliasing by Poisson summation.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh
from scipy.special import gammaln, j0, jv, logsumexp, roots_legendre

from .errors import BudgetExceeded, InvalidArgument, SymbolicOnly
from .fock import FockContext, Symbol, norm2a
from .numint import AdaptiveSpec, Box2n, QuadResult, integrate_box

SUPPORT_RADIUS = 0.5
GAIN_BUDGET_R = 64.0     # e^{R^2/16} <= e^{256}
TOEPLITZ_BUDGET_R = 16.0  # e^{R^2/16} * eps stays well below Toeplitz entry sizes
# |a_1(rho)| < 1e-13 beyond this radius; sets the aliasing margin of the box rule
_A1_NEGLIGIBLE = 1300.0


def _log_sphere_area(d: int) -> float:
    """log |S^{d-1}|."""
    return math.log(2.0) + 0.5 * d * math.log(math.pi) - gammaln(0.5 * d)


def _bessel_lambda(nu: int, x: np.ndarray) -> np.ndarray:
    if nu == 0:
        return j0(x)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-6
    xs = x[~small]
    out[~small] = math.exp(gammaln(nu + 1)) * (2.0 / xs) ** nu * jv(nu, xs)
    out[small] = 1.0 - x[small] ** 2 / (4.0 * (nu + 1))
    return out


@functools.lru_cache(maxsize=8)
def _bump_constant(n: int) -> float:
    x, w = roots_legendre(512)
    r = 0.25 * (x + 1.0)
    prof = np.exp(-1.0 / (1.0 - 4.0 * r * r))
    integral = math.exp(_log_sphere_area(2 * n)) * np.sum(0.25 * w * prof * r ** (2 * n - 1))
    return 1.0 / integral


class BumpProfile:
    """``Phi(u) = c_Phi exp(-1/(1 - 4|u|^2))`` on ``|u| < 1/2``, normalised to unit mass."""

    support_radius = SUPPORT_RADIUS

    def __init__(self, n: int = 1):
        if n < 1:
            raise InvalidArgument("n must be positive")
        self.n = n
        self.c_phi = _bump_constant(n)

    def __repr__(self):
        return f"BumpProfile(n={self.n}, c_phi={self.c_phi:.12g})"

    @property
    def dim(self) -> int:
        return 2 * self.n

    def radial(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        inside = r < SUPPORT_RADIUS
        out[inside] = self.c_phi * np.exp(-1.0 / (1.0 - 4.0 * r[inside] ** 2))
        return out

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.radial(np.sqrt(np.sum(u * u, axis=-1)))

    def l2_norm(self) -> float:
        x, w = roots_legendre(512)
        r = 0.25 * (x + 1.0)
        sq = math.exp(_log_sphere_area(self.dim)) * np.sum(0.25 * w * self.radial(r) ** 2 * r ** (self.dim - 1))
        return math.sqrt(sq)


def bump(phi: BumpProfile, u) -> np.ndarray:
    return phi(u)


def _nodes_for(omega: float) -> int:
    # omega is the total phase R |z| / 2 across [0, 1/2]
    return 64 + int(math.ceil(0.5 * omega))


def radial_transform(phi: BumpProfile, rho, R: float, gain: float = 0.0) -> np.ndarray:
    """``int Phi(u) e^{gain |u|^2} e^{i R u.z} du`` at ``|z| = rho`` (real: Phi is radial)."""
    rho = np.abs(np.asarray(rho, dtype=float))
    flat = rho.ravel()
    out = np.empty_like(flat)
    d = phi.dim
    log_area = _log_sphere_area(d)
    if flat.size == 0:
        return out.reshape(rho.shape)
    # bands of doubling phase so small radii do not pay for the node count of large ones
    omega = 0.5 * R * flat
    band = np.maximum(0, np.ceil(np.log2(np.maximum(omega, 1e-300) / 64.0))).astype(int)
    for k in np.unique(band):
        idx = np.flatnonzero(band == k)
        P = _nodes_for(64.0 * 2.0 ** k)
        x, w = roots_legendre(P)
        r = 0.25 * (x + 1.0)
        weights = 0.25 * w * phi.radial(r) * r ** (d - 1) * np.exp(gain * r * r + log_area)
        step = max(1, 4_000_000 // P)
        for i in range(0, len(idx), step):
            sel = idx[i:i + step]
            out[sel] = _bessel_lambda(phi.n - 1, np.outer(flat[sel], R * r)) @ weights
    return out.reshape(rho.shape)


def _check_gain_budget(R: float):
    if R > GAIN_BUDGET_R:
        raise BudgetExceeded(
            f"g_R with R={R} needs amplitudes near e^{{{R * R / 16:.0f}}}; "
            f"the binary64 budget allows R <= {GAIN_BUDGET_R:g}")


def a_R(phi: BumpProfile, R: float, z) -> np.ndarray:
    """``a_R(z) = int Phi(u) e^{i R u.z} du`` at points ``z`` of shape (..., 2n)."""
    if R < 1:
        raise InvalidArgument("block parameter R must be >= 1")
    z = np.asarray(z, dtype=float)
    return radial_transform(phi, np.sqrt(np.sum(z * z, axis=-1)), R)


def g_R(phi: BumpProfile, R: float, z) -> np.ndarray:
    """``g_R(z) = int Phi(u) e^{R^2 |u|^2 / 4} e^{i R u.z} du``: the time-1/4 inverse heat image of a_R."""
    if R < 1:
        raise InvalidArgument("block parameter R must be >= 1")
    _check_gain_budget(R)
    z = np.asarray(z, dtype=float)
    return radial_transform(phi, np.sqrt(np.sum(z * z, axis=-1)), R, gain=0.25 * R * R)


def a_R_box(phi: BumpProfile, R: float, z, spec: AdaptiveSpec | None = None) -> QuadResult:
    """a_R at a single point by tensor Gauss-Legendre over the support box.

    Independent of :func:`a_R`; used to cross-check the radial path.
    """
    z = np.asarray(z, dtype=float).reshape(phi.dim)
    spec = spec or AdaptiveSpec(initial=32, rtol=1e-11, max_points=2_000_000)
    box = Box2n.cube(phi.dim, SUPPORT_RADIUS)
    return integrate_box(lambda u: phi(u) * np.exp(1j * R * (u @ z)), box, spec,
                         freq=R * float(np.abs(z).max()))


def _unique_radial(profile, center):
    def f(p):
        d = p - center if center is not None else p
        rho = np.sqrt(np.sum(d * d, axis=-1))
        flat = rho.ravel()
        uniq, inv = np.unique(flat, return_inverse=True)
        return profile(uniq)[inv].reshape(rho.shape).astype(complex)
    return f


def box_grid_transform(phi: BumpProfile, R: float, ax0, ax1, gain: float = 0.0) -> np.ndarray:
    """``int Phi(u) e^{gain|u|^2} e^{i R u.z} du`` on the tensor grid ``ax0 x ax1`` (n = 1).

    Midpoint rule on [-1/2, 1/2]^2 with P nodes per axis equals the exact transform
    periodised with period 2 pi P / R, so P is chosen to push the first alias beyond
    the negligible radius of a_1. The weight matrix is applied through its
    eigen-decomposition, dropping modes below 1e-17 of the largest.
    """
    if phi.n != 1:
        raise InvalidArgument("tensor-grid transform is implemented for n = 1")
    ax0 = np.asarray(ax0, dtype=float)
    ax1 = np.asarray(ax1, dtype=float)
    zmax = max(np.abs(ax0).max(initial=0.0), np.abs(ax1).max(initial=0.0))
    P = max(128, int(math.ceil((R * zmax + _A1_NEGLIGIBLE) / (2.0 * math.pi))))
    P += P % 2
    s = (np.arange(P) + 0.5) / P - 0.5
    r2 = s[:, None] ** 2 + s[None, :] ** 2
    W = phi.radial(np.sqrt(r2)) * np.exp(gain * r2) / (P * P)
    lam, V = eigh(W)
    keep = np.abs(lam) > 1e-17 * np.abs(lam).max()
    lam, V = lam[keep], V[:, keep]
    left = np.exp(1j * R * np.outer(ax0, s)) @ (V * lam)
    right = np.exp(1j * R * np.outer(ax1, s)) @ V
    return left @ right.T


def a_symbol(phi: BumpProfile, R: float) -> Symbol:
    """a_R as a :class:`Symbol` (bounded by 1, band-limited to radius R/2)."""
    if R < 1:
        raise InvalidArgument("block parameter R must be >= 1")
    gf = (lambda x, xi: box_grid_transform(phi, R, x, xi)) if phi.n == 1 else None
    return Symbol(_unique_radial(lambda r: radial_transform(phi, r, R), None), phi.n,
                  decay="schwartz", band_limit=0.5 * R, center=np.zeros(phi.dim),
                  real=True, grid_func=gf, name=f"a_{R:g}")


def g_symbol(phi: BumpProfile, R: float) -> Symbol:
    if R < 1:
        raise InvalidArgument("block parameter R must be >= 1")
    _check_gain_budget(R)
    return Symbol(_unique_radial(lambda r: radial_transform(phi, r, R, 0.25 * R * R), None),
                  phi.n, decay="schwartz", band_limit=0.5 * R, center=np.zeros(phi.dim),
                  real=True, name=f"g_{R:g}")


def a1_l2_norm(phi: BumpProfile) -> float:
    """``||a_1||_2 = (2 pi)^n ||Phi||_2`` by Plancherel."""
    return (2.0 * math.pi) ** phi.n * phi.l2_norm()


def block_envelope(phi: BumpProfile, R: float = 1.0) -> float:
    """The Hilbert-Schmidt envelope ``(2 pi)^{-n/2} R^{-n} ||a_1||_2``."""
    return (2.0 * math.pi) ** (-0.5 * phi.n) * R ** (-phi.n) * a1_l2_norm(phi)


# ---------------------------------------------------------------------------
# schedules


@dataclass(frozen=True)
class BlockSchedule:
    """Block parameters ``(R_m, c_m, a_m)``.

    ``paper`` mode is ``R_m = m^3, c_m = m, log|a_m| = m^7`` and is only ever held in
    log space. ``tame`` mode is ``R_m = min(r0 m, R_cap), c_m = m, a_m = (s m, 0, ...)``.
    """
    mode: str = "tame"
    M: int = 5
    r0: float = 4.0
    R_cap: float = 16.0
    s: float = 20.0
    n: int = 1

    def __post_init__(self):
        if self.mode not in ("tame", "paper"):
            raise InvalidArgument("schedule mode is 'tame' or 'paper'")
        if self.M < 1:
            raise InvalidArgument("need at least one block")
        if self.mode == "tame":
            if self.s <= 0 or self.r0 <= 0:
                raise InvalidArgument("tame schedule needs s > 0 and r0 > 0")
            if self.R_cap > GAIN_BUDGET_R:
                raise BudgetExceeded(f"R_cap={self.R_cap} exceeds the Weyl-side budget {GAIN_BUDGET_R:g}")

    def _check(self, m: int):
        if not 1 <= m:
            raise InvalidArgument("block index starts at 1")

    def R(self, m: int) -> float:
        self._check(m)
        if self.mode == "paper":
            return float(m ** 3)
        return float(max(1.0, min(self.r0 * m, self.R_cap)))

    def c(self, m: int) -> float:
        self._check(m)
        return float(m)

    def log_center(self, m: int) -> float:
        """log |a_m|."""
        self._check(m)
        if self.mode == "paper":
            return float(m ** 7)
        return math.log(self.s * m)

    def center(self, m: int) -> np.ndarray:
        self._check(m)
        if self.mode == "paper":
            if m >= 2:
                raise SymbolicOnly(f"|a_{m}| = e^{m ** 7} has no useful binary64 value")
            mag = math.exp(1.0)
        else:
            mag = self.s * m
        out = np.zeros(2 * self.n)
        out[0] = mag
        return out

    def toeplitz_ready(self) -> bool:
        return self.mode == "tame" and self.R_cap <= TOEPLITZ_BUDGET_R

    def require_toeplitz(self):
        if not self.toeplitz_ready():
            raise BudgetExceeded(
                f"Toeplitz-side assembly needs R_cap <= {TOEPLITZ_BUDGET_R:g} (got {self.R_cap:g})")


def block_symbol(schedule: BlockSchedule, m: int, phi: BumpProfile | None = None) -> Symbol:
    """``g_m(z) = c_m g_{R_m}(z - a_m)``."""
    phi = phi or BumpProfile(schedule.n)
    if schedule.mode == "paper" and m >= 2:
        raise SymbolicOnly(f"paper-mode block {m} is centred at e^{m ** 7}; only log-space reports exist")
    R, c, center = schedule.R(m), schedule.c(m), schedule.center(m)
    base = g_symbol(phi, R)
    sym = base.shifted(center).scaled(c)
    sym.name = f"g_{m}"
    return sym


# ---------------------------------------------------------------------------
# (star) evidence


@dataclass(frozen=True)
class StarTerm:
    m: int
    R: float
    log_norm: float
    norm: float
    achieved: float
    converged: bool


@dataclass
class StarSum:
    a: tuple
    terms: list = field(default_factory=list)

    @property
    def running(self) -> list:
        out, acc = [], 0.0
        for t in self.terms:
            acc += t.norm
            out.append(acc)
        return out

    @property
    def ratios(self) -> list:
        return [math.exp(b.log_norm - a.log_norm) for a, b in zip(self.terms, self.terms[1:])]


def star_partial_sum(ctx: FockContext, schedule: BlockSchedule, a, M: int | None = None,
                     spec: AdaptiveSpec | None = None, phi: BumpProfile | None = None) -> StarSum:
    """Per-block ``||g_m||_{2,a}`` in log space, with the running linear sum."""
    if schedule.mode != "tame":
        raise SymbolicOnly("paper-mode terms are reported by paper_star_ledger")
    if not schedule.s > schedule.r0 / math.sqrt(2.0):
        raise InvalidArgument("tame spacing must satisfy s > r0 / sqrt(2)")
    M = M or schedule.M
    phi = phi or BumpProfile(schedule.n)
    spec = spec or AdaptiveSpec(initial=32, max_refinements=4, rtol=1e-4, max_points=600_000)
    out = StarSum(tuple(np.ravel(a)))
    for m in range(1, M + 1):
        res = norm2a(ctx, block_symbol(schedule, m, phi), a, spec)
        out.terms.append(StarTerm(m, schedule.R(m), res.log_value, res.value, res.achieved, res.converged))
    return out


@dataclass(frozen=True)
class PaperStarRow:
    m: int
    R: float
    c: float
    log_center: float
    log_bound_sq: float        # exponent of the ||g_m||_{2,a}^2 bound, constant C' dropped
    leading_exponent: float    # -2 N m^7 + m^6 / 8
    log_toeplitz_bound: float  # log(C0 m m^{-3n})
    symbolic: bool = True


def paper_star_ledger(M: int, N: int = 1, n: int = 1, phi: BumpProfile | None = None) -> list:
    """Log-space rows of ``C' m^2 e^{m^6/8} m^{6N-6n} e^{-2N m^7}`` (C' left out)."""
    if N < 1:
        raise InvalidArgument("moment order N must be >= 1")
    phi = phi or BumpProfile(n)
    logC0 = math.log(block_envelope(phi))
    rows = []
    for m in range(1, M + 1):
        lm = math.log(m)
        lead = -2.0 * N * m ** 7 + m ** 6 / 8.0
        rows.append(PaperStarRow(
            m=m, R=float(m ** 3), c=float(m), log_center=float(m ** 7),
            log_bound_sq=2 * lm + m ** 6 / 8.0 + (6 * N - 6 * n) * lm - 2.0 * N * m ** 7,
            leading_exponent=lead,
            log_toeplitz_bound=logC0 + lm - 3 * n * lm,
        ))
    return rows


def offdiag_heat_sum(phi: BumpProfile, schedule: BlockSchedule, m: int, M: int | None = None) -> float:
    """``sum_{j<=M, j!=m} c_j |a_{R_j}(a_m - a_j)|``: the other blocks' heat values at a_m."""
    if schedule.mode != "tame":
        raise SymbolicOnly("off-diagonal sums are numeric only for tame schedules")
    M = M or schedule.M
    am = schedule.center(m)
    total = 0.0
    for j in range(1, M + 1):
        if j == m:
            continue
        val = a_R(phi, schedule.R(j), am - schedule.center(j))
        total += schedule.c(j) * abs(float(val))
    return total


def peak_value(phi: BumpProfile, schedule: BlockSchedule, m: int) -> float:
    """``g_m^(1/4)(a_m) = c_m a_{R_m}(0)`` from the closed form."""
    return schedule.c(m) * float(a_R(phi, schedule.R(m), np.zeros(phi.dim)))


# ---------------------------------------------------------------------------
# moments and tails through the Fourier side


@functools.lru_cache(maxsize=32)
def _moment_kernel(n: int, N: int):
    """Rational factor ``Q(y, R)`` with ``|D^N ghat_R|^2 = Q * H^2``.

    In ``y = 4|xi|^2 / R^2`` the Fourier transform of g_R is ``H = K exp(E)`` with
    ``E = R^2 y / 16 - 1/(1-y)``. Multiplying by |u|^2 is ``-Laplacian`` on the
    Fourier side; for a radial profile that is ``L = (16 y d^2/dy^2 + 8 d d/dy) / R^2``
    (d = 2n), and an odd power leaves one gradient, ``|grad f|^2 = 16 y f_y^2 / R^2``.
    """
    import sympy as sp

    y, R = sp.symbols("y R", positive=True)
    d = 2 * n
    E = R ** 2 * y / 16 - 1 / (1 - y)
    Ep = sp.diff(E, y)

    def dy(Q):  # d/dy (Q e^E) = (Q' + Q E') e^E
        return sp.diff(Q, y) + Q * Ep

    def lap(Q):
        return (16 * y * dy(dy(Q)) + 8 * d * dy(Q)) / R ** 2

    Q = sp.Integer(1)
    for _ in range(N // 2):
        Q = sp.together(lap(Q))
    if N % 2:
        expr = 16 * y * dy(Q) ** 2 / R ** 2
    else:
        expr = Q ** 2
    return sp.lambdify((y, R), sp.together(expr), "numpy")


def log_fourier_moment(phi: BumpProfile, R: float, N: int, nodes: int = 1200) -> float:
    """log of ``int |u|^{2N} |g_R(u)|^2 du`` via Plancherel (N = 0 gives ||g_R||_2^2)."""
    if N < 0 or N > 4:
        raise InvalidArgument("moment order must be in 0..4")
    _check_gain_budget(R)
    d = phi.dim
    x, w = roots_legendre(nodes)
    r = 0.25 * R * (x + 1.0)           # |xi| in [0, R/2]
    wr = 0.25 * R * w
    y = 4.0 * r * r / (R * R)
    logK = d * math.log(2.0 * math.pi) - d * math.log(R) + math.log(phi.c_phi)
    E = R * R * y / 16.0 - 1.0 / (1.0 - y)
    Q = np.asarray(_moment_kernel(phi.n, N)(y, float(R)), dtype=float) * np.ones_like(y)
    with np.errstate(divide="ignore"):
        logQ = np.log(np.abs(Q))
    terms = logQ + 2.0 * (logK + E) + np.log(wr) + (d - 1) * np.log(r)
    log_int = float(logsumexp(terms)) + _log_sphere_area(d)
    return log_int - d * math.log(2.0 * math.pi)


def log_gR_l2(phi: BumpProfile, R: float) -> float:
    return 0.5 * log_fourier_moment(phi, R, 0)


@dataclass(frozen=True)
class MomentQuery:
    N: int
    rho: float

    def __post_init__(self):
        if self.N < 1:
            raise InvalidArgument("tail use needs N >= 1")
        if not self.rho > 0:
            raise InvalidArgument("tail radius must be positive")


@dataclass(frozen=True)
class MomentRow:
    R: float
    N: int
    rho: float
    tail: float             # int_{|u|>rho} |g_R|^2
    chebyshev: float        # rho^{-2N} int |u|^{2N} |g_R|^2
    log_moment: float
    log_shape: float        # R^2/8 + (2N - 2n) log R

    @property
    def holds(self) -> bool:
        return self.tail <= self.chebyshev


def moment_tail_ledger(phi: BumpProfile, R: float, q: MomentQuery, nodes: int = 800) -> MomentRow:
    """Tail mass of |g_R|^2 beyond rho against its Chebyshev bound.

    The tail is ``||g_R||^2`` minus the inner radial integral; the moment comes from
    the Fourier side, where g_R is compactly supported and every derivative is exact.
    """
    if q.N > 4:
        raise InvalidArgument("moment order above 4 is outside the supported range")
    d = phi.dim
    total = math.exp(log_fourier_moment(phi, R, 0))
    x, w = roots_legendre(nodes)
    r = 0.5 * q.rho * (x + 1.0)
    prof = radial_transform(phi, r, R, 0.25 * R * R)
    inner = math.exp(_log_sphere_area(d)) * np.sum(0.5 * q.rho * w * prof ** 2 * r ** (d - 1))
    log_mom = log_fourier_moment(phi, R, q.N)
    return MomentRow(
        R=float(R), N=q.N, rho=float(q.rho), tail=max(total - inner, 0.0),
        chebyshev=math.exp(log_mom - 2 * q.N * math.log(q.rho)),
        log_moment=log_mom, log_shape=R * R / 8.0 + (2 * q.N - 2 * phi.n) * math.log(R),
    )
