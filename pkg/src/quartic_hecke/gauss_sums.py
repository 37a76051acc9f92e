"""Quartic and quadratic Gauss sums over Z[i].

``g4(nu, c) = sum_{d mod c} (d/c)_4 e(2 Re(nu d / c))`` for primary c and
``nu`` in λ^{-2}Z[i].  The direct evaluator sums over a residue system with
exact integer phase reduction.  The fast evaluator factors c, reduces to prime
powers with twisted multiplicativity and uses the local table for
g4(π^k, π^ℓ), needing only the prime sums g4(π) and g2(π) (cached).
"""

from __future__ import annotations

import json
import math
import os
import re
import threading
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BudgetExceeded, NotCoprime, NotPrimary, NotSquarefree
from .gaussint import (
    LAMBDA,
    ONE,
    Factorization,
    GaussInt,
    factor,
    is_primary,
    is_squarefree,
    lambda_valuation,
    parse_gaussint,
    residue_system,
)
from .quartic import quartic_symbol_fast, symbol_exponents_array

__all__ = [
    "LamFrac",
    "GaussSumValue",
    "gauss4_direct",
    "gauss2_direct",
    "gauss4_fast",
    "gauss2_fast",
    "gauss4",
    "gauss4_normalized",
    "gauss4_prime",
    "gauss2_prime",
    "gauss4_scaling",
    "h4_tilde_direct",
    "h4_tilde_formula",
    "h4_tilde",
    "DIRECT_BUDGET",
    "save_prime_cache",
    "load_prime_cache",
]

DIRECT_BUDGET = 10**6
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class LamFrac:
    """The element num / λ^j of λ^{-2}Z[i], stored with j minimal."""

    num: GaussInt
    j: int = 0

    def __post_init__(self):
        if not 0 <= self.j <= 2:
            raise ValueError("only denominators λ^0, λ^1, λ^2 are supported")

    @staticmethod
    def of(x) -> "LamFrac":
        if isinstance(x, LamFrac):
            return x.reduced()
        if isinstance(x, str):
            return parse_lamfrac(x)
        return LamFrac(GaussInt.of(x), 0)

    def reduced(self) -> "LamFrac":
        num, j = self.num, self.j
        while j and num and (num.re + num.im) % 2 == 0:
            num = num.exact_div(LAMBDA)
            j -= 1
        if not num:
            j = 0
        return LamFrac(num, j)

    def is_zero(self) -> bool:
        return not self.num

    def __mul__(self, other) -> "LamFrac":
        o = LamFrac.of(other)
        num, j = self.num * o.num, self.j + o.j
        while j > 2:
            num = num.exact_div(LAMBDA)
            j -= 1
        return LamFrac(num, j).reduced()

    __rmul__ = __mul__

    def div_exact(self, d: GaussInt) -> "LamFrac":
        return LamFrac(self.num.exact_div(d), self.j)

    def __complex__(self) -> complex:
        return complex(self.num) / complex(1, 1) ** self.j

    def __str__(self) -> str:
        return str(self.num) if self.j == 0 else f"lam^-{self.j}*({self.num})"


_LAMFRAC_RE = re.compile(r"^\s*lam\^-?(\d)\s*\*\s*\(?(.+?)\)?\s*$")


def parse_lamfrac(text: str) -> LamFrac:
    m = _LAMFRAC_RE.match(text.replace("λ", "lam"))
    if m:
        return LamFrac(parse_gaussint(m.group(2)), int(m.group(1))).reduced()
    return LamFrac(parse_gaussint(text), 0)


@dataclass(frozen=True)
class GaussSumValue:
    value: complex
    err: float

    def __complex__(self) -> complex:
        return complex(self.value)

    def __abs__(self) -> float:
        return abs(self.value)


def _require_primary(c) -> GaussInt:
    c = GaussInt.of(c)
    if not is_primary(c):
        raise NotPrimary(f"{c} is not primary (≡ 1 mod λ³)")
    return c


# direct summation --------------------------------------------------------------

def _additive_phase(nu: LamFrac, modulus: GaussInt, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, int]:
    """Integer t and denominator D with ě(ν d / modulus) = e(t / D) for d = x + iy."""
    nu = nu.reduced()
    D = (2 ** nu.j) * modulus.norm()
    P = nu.num * GaussInt(1, -1) ** nu.j * modulus.conj()
    pr, pi = P.re % D, P.im % D
    # Re(P d) = pr x - pi y; ě doubles it
    t = (2 * ((pr * (x % D)) % D - (pi * (y % D)) % D)) % D
    return t, D


def _character_sum(nu: LamFrac, modulus: GaussInt, x: np.ndarray, y: np.ndarray,
                   exps: np.ndarray) -> GaussSumValue:
    keep = exps >= 0
    x, y, exps = x[keep], y[keep], exps[keep]
    t, D = _additive_phase(nu, modulus, x, y)
    # total angle (t/D + k/4) as an exact fraction over 4D
    num = (4 * t + exps * D) % (4 * D)
    terms = np.exp(2j * np.pi * (num / (4 * D)))
    val = complex(terms.sum())
    n = len(terms)
    err = 4.0 * _EPS * (n + 1) + 8.0 * _EPS * abs(val)
    return GaussSumValue(val, err)


def _direct(nu, c, power: int, budget: Optional[int]) -> GaussSumValue:
    nu = LamFrac.of(nu)
    c = _require_primary(c)
    n = c.norm()
    if budget is None:
        budget = DIRECT_BUDGET
    if n > budget:
        raise BudgetExceeded(f"N(c) = {n} exceeds the direct-evaluation budget {budget}")
    if n == 1:
        return GaussSumValue(1.0 + 0j, 0.0)
    x, y = residue_system(c)
    exps = symbol_exponents_array(x, y, factor(c), power=power)
    return _character_sum(nu, c, x, y, exps)


def gauss4_direct(nu, c, budget: Optional[int] = None) -> GaussSumValue:
    """g4(ν, c) by literal summation over a complete residue system mod c."""
    return _direct(nu, c, 1, budget)


def gauss2_direct(nu, c, budget: Optional[int] = None) -> GaussSumValue:
    """g2(ν, c), the same sum with the quadratic symbol (d/c)_4^2."""
    return _direct(nu, c, 2, budget)


# prime cache ------------------------------------------------------------------

_prime_cache: dict[tuple[int, int, int], GaussSumValue] = {}
_cache_lock = threading.Lock()


def _prime_sum(pi: GaussInt, power: int) -> GaussSumValue:
    key = (pi.re, pi.im, power)
    v = _prime_cache.get(key)
    if v is None:
        v = _direct(LamFrac(ONE), pi, power, budget=max(DIRECT_BUDGET, pi.norm()))
        with _cache_lock:
            _prime_cache.setdefault(key, v)
    return v


def gauss4_prime(pi) -> GaussSumValue:
    """g4(π) = g4(1, π) for a primary prime π (direct summation, cached)."""
    return _prime_sum(GaussInt.of(pi), 1)


def gauss2_prime(pi) -> GaussSumValue:
    return _prime_sum(GaussInt.of(pi), 2)


def save_prime_cache(path: str) -> None:
    with _cache_lock:
        data = [[k[0], k[1], k[2], v.value.real, v.value.imag, v.err] for k, v in sorted(_prime_cache.items())]
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump({"version": 1, "entries": data}, fh)
    os.replace(tmp, path)


def load_prime_cache(path: str) -> int:
    if not os.path.exists(path):
        return 0
    with open(path) as fh:
        data = json.load(fh)
    with _cache_lock:
        for a, b, p, vr, vi, err in data.get("entries", []):
            _prime_cache[(a, b, p)] = GaussSumValue(complex(vr, vi), err)
    return len(data.get("entries", []))


# fast evaluation ----------------------------------------------------------------

def _qexp(a: GaussInt, c: GaussInt) -> Optional[int]:
    v = quartic_symbol_fast(a, c)
    return v.exponent


_I_POW = (1, 1j, -1, -1j)


def _local_g4(pi: GaussInt, k: Optional[int], ell: int) -> tuple[complex, float]:
    """g4(π^k, π^ℓ); k=None stands for k = ∞ (the ν = 0 case)."""
    if ell == 0:
        return 1.0, 0.0
    n = pi.norm()
    if k is not None and ell == k + 1:
        scale = float(n) ** k
        r = k % 4
        if r == 0:
            g = gauss4_prime(pi)
            return scale * g.value, scale * g.err
        if r == 1:
            g = gauss2_prime(pi)
            return scale * g.value, scale * g.err
        if r == 2:
            g = gauss4_prime(pi)
            chi = _I_POW[_qexp(GaussInt(-1), pi)]
            return scale * chi * g.value.conjugate(), scale * g.err
        return -scale, 0.0
    if (k is None or k >= ell) and ell % 4 == 0:
        return float(n) ** (ell - 1) * (n - 1), 0.0
    return 0.0, 0.0


def _valuation(z: GaussInt, pi: GaussInt) -> tuple[int, GaussInt]:
    k = 0
    while pi.divides(z):
        z = z.exact_div(pi)
        k += 1
    return k, z


def _fast(nu, c, quadratic: bool) -> GaussSumValue:
    nu = LamFrac.of(nu)
    c = _require_primary(c)
    if c.norm() == 1:
        return GaussSumValue(1.0 + 0j, 0.0)
    fac = factor(c)
    if quadratic and any(e > 1 for _, e in fac.factors):
        return gauss2_direct(nu, c, budget=max(DIRECT_BUDGET, c.norm()))
    power = 2 if quadratic else 1
    # g(num/λ^j, c) = χ_c(λ)^{j·power} g(num, c)
    k_total = 0
    if nu.j:
        k_total += power * nu.j * _qexp(LAMBDA, c)
    value: complex = 1.0
    rel = 0.0
    num = nu.num
    for pi, ell in fac.factors:
        if num:
            k, rest = _valuation(num, pi)
        else:
            k, rest = None, None
        if quadratic:
            if k is None or k:
                return GaussSumValue(0j, 0.0)
            g = gauss2_prime(pi)
            loc, lerr = g.value, g.err
        else:
            loc, lerr = _local_g4(pi, k, ell)
        if loc == 0:
            return GaussSumValue(0j, 0.0)
        if rest is not None and (rest.norm() != 1 or rest.re != 1):
            e = _qexp(rest, pi)
            k_total -= power * ell * e  # conj χ_{π^ℓ}(n')
        value *= loc
        rel += lerr / abs(loc)
    # twisting factors χ_{c_j}(c_k) χ_{c_k}(c_j)
    if not quadratic:
        fs = fac.factors
        for a in range(len(fs)):
            for b in range(a + 1, len(fs)):
                (p1, l1), (p2, l2) = fs[a], fs[b]
                k_total += l1 * l2 * (_qexp(p2, p1) + _qexp(p1, p2))
    value *= _I_POW[k_total % 4]
    err = abs(value) * (rel + 16 * _EPS * (len(fac.factors) + 1))
    return GaussSumValue(complex(value), err)


def gauss4_fast(nu, c) -> GaussSumValue:
    """g4(ν, c) from the factorization of c and cached prime Gauss sums."""
    return _fast(nu, c, quadratic=False)


def gauss2_fast(nu, c) -> GaussSumValue:
    """g2(ν, c); squarefree c uses prime sums, other moduli fall back to direct summation."""
    return _fast(nu, c, quadratic=True)


gauss4 = gauss4_fast


def gauss4_normalized(nu, c) -> GaussSumValue:
    """g̃4(ν, c) = g4(ν, c) / √N(c)."""
    g = gauss4_fast(nu, c)
    s = math.sqrt(GaussInt.of(c).norm())
    return GaussSumValue(g.value / s, g.err / s)


def gauss2_normalized(nu, c) -> GaussSumValue:
    g = gauss2_fast(nu, c)
    s = math.sqrt(GaussInt.of(c).norm())
    return GaussSumValue(g.value / s, g.err / s)


def gauss4_scaling(nu, mu, c) -> bool:
    """Check g4(νμ, c) = conj((ν/c)_4) g4(μ, c) using direct sums on both sides."""
    nu_g = GaussInt.of(nu)
    c = _require_primary(c)
    e = _qexp(nu_g, c)
    if e is None:
        raise NotCoprime(f"({nu_g}, {c}) ≠ 1")
    lhs = gauss4_direct(LamFrac.of(mu) * LamFrac(nu_g), c)
    rhs = gauss4_direct(mu, c)
    pred = _I_POW[(-e) % 4] * rhs.value
    return abs(lhs.value - pred) <= 10 * (lhs.err + rhs.err) + 1e-12


# finite Fourier transforms of quartic characters ------------------------------------------

def _check_h4_args(c1, c2, c3, need_coprime: bool):
    c1, c2, c3 = (_require_primary(x) for x in (c1, c2, c3))
    if not is_squarefree(c1 * c2):
        raise NotSquarefree("c1·c2 must be squarefree")
    if need_coprime:
        for a, b in ((c1, c2), (c1, c3), (c2, c3)):
            if _qexp(a, b) is None and b.norm() > 1:
                raise NotCoprime(f"{a} and {b} share a factor")
    return c1, c2, c3


def h4_tilde_direct(mu, c1, c2, c3, budget: Optional[int] = None) -> GaussSumValue:
    """h̃4(μ, χ_c) for c = c1 c2² c3³ by summing over units mod c1c2c3."""
    c1, c2, c3 = _check_h4_args(c1, c2, c3, need_coprime=False)
    mu = LamFrac.of(mu)
    m = c1 * c2 * c3
    n = m.norm()
    if budget is None:
        budget = DIRECT_BUDGET
    if n > budget:
        raise BudgetExceeded(f"N(c1c2c3) = {n} exceeds budget {budget}")
    if n == 1:
        return GaussSumValue(1.0 + 0j, 0.0)
    x, y = residue_system(m)
    total = np.zeros(x.shape, dtype=np.int64)
    unit_mask = symbol_exponents_array(x, y, factor(m)) >= 0
    for ci, power in ((c1, 1), (c2, 2), (c3, 3)):
        if ci.norm() > 1:
            e = symbol_exponents_array(x, y, factor(ci), power=power)
            total += np.where(e < 0, 0, e)
    exps = np.where(unit_mask, total % 4, -1)
    s = _character_sum(mu, m, x, y, exps)
    r = math.sqrt(n)
    return GaussSumValue(s.value / r, s.err / r)


def _chi_exp(c: GaussInt, a: GaussInt) -> int:
    """Exponent of χ_c(a) = (a/c)_4 for coprime arguments."""
    if c.norm() == 1:
        return 0
    e = _qexp(a, c)
    if e is None:
        raise NotCoprime(f"({a}, {c}) ≠ 1")
    return e


def h4_tilde_formula(mu, c1, c2, c3, variant: str = "corrected") -> GaussSumValue:
    """Product formula for h̃4 with pairwise coprime c1, c2, c3.

    ``variant="literal"`` uses conj(g̃4(μ, c3)) for the cube part.  The
    ``"corrected"`` variant (default) uses conj(g̃4(-μ, c3)), which differs by
    χ_{c3}(-1) and is what the direct sum reproduces.
    """
    c1, c2, c3 = _check_h4_args(c1, c2, c3, need_coprime=True)
    mu = LamFrac.of(mu)
    k = (_chi_exp(c1, c2 * c3) + 2 * _chi_exp(c2, c1 * c3) - _chi_exp(c3, c1 * c2)) % 4
    g1 = gauss4_normalized(mu, c1)
    g2 = gauss2_normalized(mu, c2)
    mu3 = mu if variant == "literal" else LamFrac(-mu.num, mu.j)
    g3 = gauss4_normalized(mu3, c3)
    val = _I_POW[k] * g1.value * g2.value * g3.value.conjugate()
    err = g1.err * abs(g2.value * g3.value) + g2.err * abs(g1.value * g3.value) + g3.err * abs(g1.value * g2.value)
    return GaussSumValue(complex(val), err + 8 * _EPS)


h4_tilde = h4_tilde_formula
