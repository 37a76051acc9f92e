"""Numerical kernels for the approximate functional equation and Poisson checks.

V_{s,ω}(y) and W_ω(y) are inverse Mellin integrals along a vertical line.
Because the integrand at -t is the conjugate of the integrand at t (for real
y), both kernels are real and we integrate over t ≥ 0 with the trapezoid
rule, which converges geometrically for integrands analytic in a strip.
The line Re w = c is chosen per argument so that |(2πy)^{-c}| stays
moderate; moving the line inside Re w > 0 does not cross any pole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Literal

import numpy as np
from scipy import special
from scipy.interpolate import CubicSpline

from .errors import BudgetExceeded, NonPositiveArgument
from .gauss_sums import LamFrac, _character_sum
from .gaussint import GaussInt, factor, residue_system
from .quartic import symbol_exponents_array

__all__ = [
    "KernelEval",
    "SmoothingBump",
    "BUMP",
    "V_omega",
    "W_omega",
    "V_s_omega",
    "kernel_array",
    "kernel_full_line",
    "mellin_F",
    "bessel_j0",
    "hankel_radial",
    "poisson_verify",
    "PoissonResult",
    "InterpolatedKernel",
    "interpolated_kernel",
]

_EPS = np.finfo(float).eps
# trapezoid step h = c / _STEP_DIV; discretization error ~ exp(-π·_STEP_DIV)
_STEP_DIV = 16


@dataclass(frozen=True)
class KernelEval:
    value: float
    err: float

    def __float__(self) -> float:
        return self.value


# kernels ------------------------------------------------------------------

@lru_cache(maxsize=256)
def _grid(a: float, power: int, c: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes t_k and weights G_k so that kernel(y) = y^{-c} Re Σ G_k e^{-i t_k log y}."""
    h = c / _STEP_DIV
    lg_ratio = power * (special.gammaln(a + c) - special.gammaln(a))
    T = math.sqrt(c * c + 52.0 + max(lg_ratio, 0.0) + power * abs(math.log(2 * math.pi)) * c)
    t = np.arange(0.0, T + h, h)
    w = c + 1j * t
    logg = (-power * w * math.log(2 * math.pi) + w * w
            + power * (special.loggamma(a + w) - special.gammaln(a)) - np.log(w))
    G = np.exp(logg) * (h / math.pi)
    G[0] *= 0.5
    absG = np.abs(G)
    return t, G, absG


def _choose_c(logy: np.ndarray, power: int) -> np.ndarray:
    """Contour abscissa per point: 2 unless (2π)^p·y is small, then 2^{-k} ≤ 1/|log((2π)^p y)|."""
    z = logy + power * math.log(2 * math.pi)
    c = np.full(z.shape, 2.0)
    small = z < -0.5
    if np.any(small):
        target = 1.0 / np.abs(z[small])
        k = np.ceil(-np.log2(np.minimum(target, 2.0)))
        c[small] = np.minimum(2.0, 2.0 ** (-k))
    return c


def _kernel_eval(y: np.ndarray, s: float, omega: int, power: int) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise NonPositiveArgument("kernel argument must be positive")
    a = s + abs(omega) / 2.0
    logy = np.log(y)
    cs = _choose_c(logy, power)
    out = np.empty_like(y)
    err = np.empty_like(y)
    for c in np.unique(cs):
        idx = np.nonzero(cs == c)[0]
        t, G, absG = _grid(a, power, float(c))
        scale_abs = absG.sum()
        for start in range(0, len(idx), 20000):
            sel = idx[start:start + 20000]
            ly = logy[sel]
            theta = np.outer(ly, t)
            vals = np.cos(theta) @ G.real + np.sin(theta) @ G.imag
            pref = np.exp(-c * ly)
            out[sel] = pref * vals
            # rounding in the phase (|t log y|) and in the summation, plus the
            # geometric discretization error of the trapezoid rule
            phase_err = _EPS * (4.0 + np.abs(ly) * t[-1])
            edge = np.exp(0.5 * c * np.abs(ly + power * math.log(2 * math.pi)))
            err[sel] = pref * scale_abs * (8 * phase_err + math.exp(-math.pi * _STEP_DIV) * edge) + 2 * _EPS * np.abs(out[sel])
    return out, err


def kernel_array(y, omega: int, which: Literal["V", "W"] = "V", s: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized kernel values and error bounds."""
    power = 1 if which == "V" else 2
    return _kernel_eval(np.atleast_1d(np.asarray(y, dtype=float)), s, omega, power)


def V_s_omega(y: float, s: float, omega: int) -> KernelEval:
    v, e = _kernel_eval(np.array([y], dtype=float), s, omega, 1)
    return KernelEval(float(v[0]), float(e[0]))


def V_omega(y: float, omega: int) -> KernelEval:
    """V_ω(y) = V_{1/2,ω}(y)."""
    return V_s_omega(y, 0.5, omega)


def W_omega(y: float, omega: int) -> KernelEval:
    v, e = _kernel_eval(np.array([y], dtype=float), 0.5, omega, 2)
    return KernelEval(float(v[0]), float(e[0]))


def kernel_full_line(y: float, omega: int, which: Literal["V", "W"] = "V", c: float = 2.0,
                     step_div: int = _STEP_DIV) -> complex:
    """Trapezoid over the whole line Re w = c without using symmetry (diagnostic)."""
    if y <= 0:
        raise NonPositiveArgument("kernel argument must be positive")
    power = 1 if which == "V" else 2
    a = 0.5 + abs(omega) / 2.0
    h = c / step_div
    T = math.sqrt(c * c + 60.0 + power * max(special.gammaln(a + c) - special.gammaln(a), 0))
    t = np.arange(-T, T + h / 2, h)
    w = c + 1j * t
    logg = (-power * w * math.log(2 * math.pi) - w * math.log(y) + w * w
            + power * (special.loggamma(a + w) - special.gammaln(a)) - np.log(w))
    return complex(np.exp(logg).sum() * h / (2 * math.pi))


# smoothing bump -----------------------------------------------------------------

@dataclass(frozen=True)
class SmoothingBump:
    """F(t) = exp(4 - 1/((t-1)(2-t))) on (1, 2), zero elsewhere; F(3/2) = 1."""

    name: str = "bump4"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        inside = (t > 1.0) & (t < 2.0)
        ti = t[inside]
        out[inside] = np.exp(4.0 - 1.0 / ((ti - 1.0) * (2.0 - ti)))
        return np.clip(out, 0.0, 1.0) if out.ndim else float(np.clip(out, 0.0, 1.0))

    def mellin(self, w: complex) -> tuple[complex, float]:
        return mellin_F(w)


BUMP = SmoothingBump()


def _bump_scalar(t: float) -> float:
    if t <= 1.0 or t >= 2.0:
        return 0.0
    return math.exp(4.0 - 1.0 / ((t - 1.0) * (2.0 - t)))


@lru_cache(maxsize=1)
def _tanh_sinh(levels: int = 7, hstep: float = 1 / 64):
    """Nodes/weights of the tanh-sinh rule on (1, 2); exact to rounding for F·t^w."""
    k = np.arange(-6 * int(1 / hstep), 6 * int(1 / hstep) + 1)
    x = k * hstep
    u = 0.5 * math.pi * np.sinh(x)
    nodes = np.tanh(u)
    wts = hstep * 0.5 * math.pi * np.cosh(x) / np.cosh(u) ** 2
    t = 1.5 + 0.5 * nodes
    keep = (t > 1.0) & (t < 2.0)
    t, wts = t[keep], 0.5 * wts[keep]
    return t, wts * BUMP(t)


@lru_cache(maxsize=1024)
def _mellin_cached(wr: float, wi: float) -> tuple[complex, float]:
    t, fw = _tanh_sinh()
    val = complex(np.sum(fw * np.exp(complex(wr, wi) * np.log(t))))
    t2 = t[::2]
    fw2 = 2 * fw[::2]
    coarse = complex(np.sum(fw2 * np.exp(complex(wr, wi) * np.log(t2))))
    # the rule converges double-exponentially: the half-step difference bounds the error
    return val, float(abs(val - coarse) ** 2 + 64 * _EPS * np.sum(np.abs(fw) * t ** wr))


def mellin_F(w: complex) -> tuple[complex, float]:
    """F̌(w) = ∫_1^2 F(t) t^w dt by tanh-sinh quadrature; returns (value, err)."""
    w = complex(w)
    return _mellin_cached(w.real, w.imag)


# Bessel J0 --------------------------------------------------------------------

def bessel_j0(x):
    """J0(x); thin wrapper over scipy.special.j0 (absolute error well below 1e-12)."""
    return special.j0(x)


# Poisson summation harness ---------------------------------------------------------

_PROFILES: dict[str, Callable] = {
    "gaussian": lambda x: np.exp(-np.pi * np.asarray(x, dtype=float)),
    "bump": BUMP,
}
# support of the profile in x (f vanishes or is below 1e-40 outside)
_SUPPORT = {"gaussian": (0.0, 30.0), "bump": (1.0, 2.0)}


def hankel_radial(profile: str, a, nodes: int | None = None) -> np.ndarray:
    """∫_0^∞ u f(u²) J0(a u) du for the named profile f, vectorized over a ≥ 0."""
    f = _PROFILES[profile]
    lo, hi = _SUPPORT[profile]
    ulo, uhi = math.sqrt(lo), math.sqrt(hi)
    a = np.atleast_1d(np.asarray(a, dtype=float))
    order = np.argsort(a)
    out = np.empty(a.shape)
    for start in range(0, a.size, 2048):
        sel = order[start:start + 2048]
        blk = a[sel]
        n = nodes if nodes is not None else 120 + int(1.5 * blk.max() * (uhi - ulo))
        x, wts = _legendre(n)
        u = 0.5 * (uhi - ulo) * x + 0.5 * (uhi + ulo)
        base = wts * 0.5 * (uhi - ulo) * u * f(u * u)
        out[sel] = special.j0(np.outer(blk, u)) @ base
    return out


@lru_cache(maxsize=64)
def _legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


_ENV_STEP = 0.25
_ENV_MAX = 2400.0


@lru_cache(maxsize=8)
def _envelope(profile: str) -> tuple[np.ndarray, np.ndarray]:
    """Right-running maximum of |hankel| on a grid; a monotone majorant of the decay."""
    grid = np.arange(0.0, _ENV_MAX + _ENV_STEP, _ENV_STEP)
    if profile == "gaussian":
        h = np.exp(-grid ** 2 / (4 * np.pi)) / (2 * np.pi)
    else:
        h = np.abs(hankel_radial(profile, grid))
    # the grid spacing is far below the oscillation period (≥ 2π/√2), so
    # doubling the sampled maximum covers the peaks between grid points
    env = 2.0 * np.maximum.accumulate(h[::-1])[::-1]
    return grid, env


def _tail_table(profile: str, scale: float) -> tuple[np.ndarray, np.ndarray]:
    grid, env = _envelope(profile)
    # lattice points in the shell [r, r + dr] number about 2π(r + 1) dr
    r = grid / scale
    dens = env * 2 * np.pi * (r + 1.5) * (_ENV_STEP / scale)
    return r, np.cumsum(dens[::-1])[::-1]


def _tail_bound(profile: str, scale: float, K: float) -> float:
    r, tail = _tail_table(profile, scale)
    i = int(np.searchsorted(r, K - 1.5))
    return float(tail[min(i, len(tail) - 1)])


def _transform_cutoff(profile: str, scale: float, tol: float) -> float:
    """Radius K with Σ_{|k|>K} |hankel(scale·|k|)| < tol, from the envelope."""
    r, tail = _tail_table(profile, scale)
    ok = np.nonzero(tail < tol)[0]
    if ok.size == 0:
        raise BudgetExceeded("transform does not decay within the tabulated range")
    return float(r[ok[0]]) + 1.5


@dataclass(frozen=True)
class PoissonResult:
    level: str
    lhs: complex
    rhs: complex
    discrepancy: float
    lhs_terms: int
    rhs_terms: int
    cutoff: float
    tail_bound: float


def _lattice_disk(R: float) -> tuple[np.ndarray, np.ndarray]:
    r = int(math.ceil(R))
    xs = np.arange(-r, r + 1, dtype=np.int64)
    X, Y = np.meshgrid(xs, xs)
    X, Y = X.ravel(), Y.ravel()
    keep = X * X + Y * Y <= R * R
    return X[keep], Y[keep]


class _ResidueIndexer:
    """Maps Gaussian integers to indices of the standard residue system mod q."""

    def __init__(self, q: GaussInt):
        self.q = q
        n = q.norm()
        self.g = math.gcd(q.re, q.im)
        self.w = n // self.g
        self.t = next(t for t in range(self.w) if q.divides(GaussInt(t, self.g)))

    def index(self, kr: np.ndarray, ki: np.ndarray) -> np.ndarray:
        y0 = ki % self.g
        j = (ki - y0) // self.g
        x0 = (kr - j * self.t) % self.w
        return y0 * self.w + x0


def _psi_exponents(psi: str, q: GaussInt, xr: np.ndarray, xi: np.ndarray) -> np.ndarray:
    if psi == "one" or q.norm() == 1:
        return np.zeros(xr.shape, dtype=np.int64)
    if psi == "chi":
        return symbol_exponents_array(xr, xi, factor(q))
    if psi == "chi_shift":
        return symbol_exponents_array(xr + 1, xi, factor(q))
    raise ValueError(f"unknown periodic function {psi!r}")


# default M per (level, profile): large enough that the dual lattice stays small
_DEFAULT_M = {
    ("plain", "gaussian"): 1.0, ("plain", "bump"): 3.0,
    ("periodic", "gaussian"): 1.0, ("periodic", "bump"): 10.0,
    ("congruence", "gaussian"): 10.0, ("congruence", "bump"): 1000.0,
}


def poisson_verify(level: str = "plain", q=1, profile: str = "gaussian", M: float | None = None,
                   c=1, psi: str = "chi", tol: float = 1e-15, cutoff: float | None = None,
                   max_cutoff: float = 1500.0) -> PoissonResult:
    """Evaluate both sides of the plain / periodic / congruence Poisson identities.

    ``profile`` selects the radial test function f ("gaussian": e^{-πx}, "bump":
    the smoothing bump); in the planar levels V(z) = f(N(z)/M).  ``psi`` is the
    q-periodic weight: "chi" for the quartic character (·/q)_4, "chi_shift"
    for m ↦ (m+1 / q)_4 (not invariant under units), "one" for 1.
    The dual sum runs over |k| ≤ ``cutoff`` (default: the radius where the
    transform tail drops below ``tol``).  Small M with the bump profile
    needs a very large dual lattice; BudgetExceeded beyond ``max_cutoff``.
    """
    if level not in ("plain", "periodic", "congruence"):
        raise ValueError(f"unknown level {level!r}")
    if profile not in _PROFILES:
        raise ValueError(f"unknown profile {profile!r}")
    if M is None:
        M = _DEFAULT_M[(level, profile)]
    if M <= 0:
        raise NonPositiveArgument("M must be positive")
    q = GaussInt.of(q)
    c = GaussInt.of(c)
    lo, hi = _SUPPORT[profile]
    f = _PROFILES[profile]
    if level == "plain":
        q = GaussInt(1)
        psi = "one"
    if level in ("plain", "periodic"):
        # LHS
        X, Y = _lattice_disk(math.sqrt(hi * M) + 1)
        nrm = (X * X + Y * Y).astype(float)
        vals = f(nrm / M)
        ex = _psi_exponents(psi, q, X, Y)
        weights = np.where(ex < 0, 0, np.array([1, 1j, -1, -1j])[np.where(ex < 0, 0, ex)])
        lhs = complex(np.sum(weights * vals))
        # RHS: (1/N(q)) Σ_k ψ̇(k) V̇(k/q), V̇(r) = 2πM·hankel(2π|r|√M)
        nq = q.norm()
        scale = 2 * math.pi * math.sqrt(M) / math.sqrt(nq)
        K = cutoff if cutoff is not None else _transform_cutoff(profile, scale, tol)
        if K > max_cutoff:
            raise BudgetExceeded(f"dual lattice radius {K:.0f} too large")
        KX, KY = _lattice_disk(K)
        # ψ̇ on residues mod q
        rx, ry = residue_system(q)
        ex_t = _psi_exponents(psi, q, rx, ry)
        psidot = np.empty(len(rx), dtype=complex)
        for idx in range(len(rx)):
            k = GaussInt(int(rx[idx]), int(ry[idx]))
            # ě(-k t/(2q)); -1/2 = -i/λ²
            nu = LamFrac(k * GaussInt(0, -1), 2)
            psidot[idx] = _character_sum(nu, q, rx, ry, ex_t).value
        ind = _ResidueIndexer(q).index(KX, KY)
        kn = KX * KX + KY * KY
        uniq, inv = np.unique(kn, return_inverse=True)
        hv = hankel_radial(profile, scale * np.sqrt(uniq.astype(float)))
        rhs = complex(np.sum(psidot[ind] * (2 * math.pi * M) * hv[inv]) / nq)
        # |ψ̇| ≤ N(q)
        tb = _tail_bound(profile, scale, K) * 2 * math.pi * M
        return PoissonResult(level, lhs, rhs, abs(lhs - rhs), len(X), len(KX), K, tb)
    if level == "congruence":
        lam7 = GaussInt(8, -8)
        X, Y = _lattice_disk(math.sqrt(hi * M) + 1)
        mask = ((X - c.re) - (Y - c.im)) % 16 == 0
        mask &= ((X - c.re) + (Y - c.im)) % 16 == 0
        X, Y = X[mask], Y[mask]
        nrm = (X * X + Y * Y).astype(float)
        ex = _psi_exponents(psi, q, X, Y)
        weights = np.where(ex < 0, 0, np.array([1, 1j, -1, -1j])[np.where(ex < 0, 0, ex)])
        lhs = complex(np.sum(weights * f(nrm / M)))
        nq = q.norm()
        # V̈(k√M/q) = hankel(π |k| √M / (4√2 |q|))
        scale = math.pi * math.sqrt(M) / (4 * math.sqrt(2) * math.sqrt(nq))
        K = cutoff if cutoff is not None else _transform_cutoff(profile, scale, tol)
        if K > max_cutoff:
            raise BudgetExceeded(f"dual lattice radius {K:.0f} too large")
        KX, KY = _lattice_disk(K)
        rx, ry = residue_system(q)
        # ψ(2λ⁷ b)
        two_l7 = GaussInt(2, 0) * lam7
        br = two_l7.re * rx - two_l7.im * ry
        bi = two_l7.re * ry + two_l7.im * rx
        ex_b = _psi_exponents(psi, q, br, bi)
        psiddot = np.empty(len(rx), dtype=complex)
        for idx in range(len(rx)):
            k = GaussInt(int(rx[idx]), int(ry[idx]))
            psiddot[idx] = _character_sum(LamFrac(-k), q, rx, ry, ex_b).value
        ind = _ResidueIndexer(q).index(KX, KY)
        # ě(-k c q³/(2λ⁷)) = e(-Re(k · c q³ λ̄⁷) / 128)
        P = c * q * q * q * lam7.conj()
        ph = (-(KX * (P.re % 128) - KY * (P.im % 128))) % 128
        twist = np.exp(2j * np.pi * ph / 128.0)
        kn = KX * KX + KY * KY
        uniq, inv = np.unique(kn, return_inverse=True)
        hv = hankel_radial(profile, scale * np.sqrt(uniq.astype(float)))
        rhs = complex(math.pi * M / (64 * nq) * np.sum(twist * psiddot[ind] * hv[inv]))
        # |ψ̈| ≤ N(q)
        tb = _tail_bound(profile, scale, K) * math.pi * M / 64
        return PoissonResult(level, lhs, rhs, abs(lhs - rhs), len(X), len(KX), K, tb)
    raise ValueError(f"unknown level {level!r}")


# interpolated kernel for very long sums --------------------------------------------

class InterpolatedKernel:
    """Cubic spline of a kernel in log y on [ymin, ymax].

    The reported error is the larger of the midpoint deviation (times 4) and the
    pointwise kernel bound, so it stays a bound for spline evaluations as well.
    Below ymin the kernel is 1 - O(y^c) and is evaluated exactly.
    """

    def __init__(self, omega: int, which: Literal["V", "W"] = "V", ymin: float = 1e-8,
                 ymax: float = 1e4, per_decade: int = 2000):
        n = int(per_decade * math.log10(ymax / ymin)) + 2
        ly = np.linspace(math.log(ymin), math.log(ymax), n)
        v, e = kernel_array(np.exp(ly), omega, which)
        self._spline = CubicSpline(ly, v)
        mid = 0.5 * (ly[1:] + ly[:-1])
        vm, em = kernel_array(np.exp(mid), omega, which)
        # per-cell bound: 4 × midpoint deviation (over the cell and its neighbours)
        # plus the larger pointwise kernel bound at the cell ends and midpoint
        dev = np.abs(self._spline(mid) - vm)
        dev = np.maximum(dev, np.maximum(np.r_[dev[1:], 0.0], np.r_[0.0, dev[:-1]]))
        self._cell_err = 4 * dev + np.maximum(np.maximum(e[1:], e[:-1]), em)
        self._ly0, self._dly = float(ly[0]), float(ly[1] - ly[0])
        self.err = float(self._cell_err.max())
        self.ymin, self.ymax = ymin, ymax
        self.omega, self.which = omega, which

    def __call__(self, y) -> tuple[np.ndarray, np.ndarray]:
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        err = np.full(y.shape, self.err)
        inside = (y >= self.ymin) & (y <= self.ymax)
        ly = np.log(y[inside])
        out[inside] = self._spline(ly)
        cell = np.clip(((ly - self._ly0) / self._dly).astype(np.int64), 0, len(self._cell_err) - 1)
        err[inside] = self._cell_err[cell]
        low = y < self.ymin
        if np.any(low):
            out[low], err[low] = kernel_array(y[low], self.omega, self.which)
        high = y > self.ymax
        if np.any(high):
            out[high], err[high] = kernel_array(y[high], self.omega, self.which)
        return out, err


@lru_cache(maxsize=32)
def interpolated_kernel(omega: int, which: str, ymin: float, ymax: float) -> InterpolatedKernel:
    return InterpolatedKernel(omega, which, ymin, ymax)
