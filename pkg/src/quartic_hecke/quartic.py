"""Quartic and quadratic residue symbols over Z[i].

Two independent evaluators are provided.  ``quartic_symbol_euler`` factors
the modulus and applies the Euler criterion in each residue field;
``quartic_symbol_fast`` never factors anything and instead runs a
Euclidean-style loop driven by biquadratic reciprocity and its two
supplements.  Values are exact exponents mod 4; no floating point here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NotPrimary
from .gaussint import (
    GaussInt,
    Factorization,
    factor,
    is_primary,
    lambda_valuation,
    prime_above,
    primary_associate,
)

__all__ = [
    "QuarticValue",
    "ZERO",
    "quartic_symbol_euler",
    "quartic_symbol_fast",
    "quartic_symbol",
    "quadratic_symbol",
    "reciprocity_sign",
    "lambda_digits",
    "supplement_lambda",
    "supplement_i",
    "symbol_exponents_array",
    "unit_exponent",
]

_ROOTS = (1, 1j, -1, -1j)
_NAMES = ("1", "i", "-1", "-i")


@dataclass(frozen=True, slots=True)
class QuarticValue:
    """i**exponent, or zero when ``exponent`` is None."""

    exponent: Optional[int]

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    def __mul__(self, other: "QuarticValue") -> "QuarticValue":
        if self.exponent is None or other.exponent is None:
            return ZERO
        return QuarticValue((self.exponent + other.exponent) % 4)

    def __pow__(self, k: int) -> "QuarticValue":
        if self.exponent is None:
            return ZERO if k > 0 else QuarticValue(0)
        return QuarticValue((self.exponent * k) % 4)

    def conj(self) -> "QuarticValue":
        return self if self.exponent is None else QuarticValue((-self.exponent) % 4)

    def to_complex(self) -> complex:
        return 0j if self.exponent is None else _ROOTS[self.exponent]

    def __complex__(self) -> complex:
        return self.to_complex()

    def __str__(self) -> str:
        return "0" if self.exponent is None else _NAMES[self.exponent]


ZERO = QuarticValue(None)
ONE_Q = QuarticValue(0)


def _require_primary(c: GaussInt) -> GaussInt:
    c = GaussInt.of(c)
    if not is_primary(c):
        raise NotPrimary(f"{c} is not primary (≡ 1 mod λ³)")
    return c


def unit_exponent(u: GaussInt) -> int:
    """m with u = i**m."""
    return {(1, 0): 0, (0, 1): 1, (-1, 0): 2, (0, -1): 3}[(u.re, u.im)]


# Euler criterion ----------------------------------------------------------------

def _gauss_powmod(a: int, b: int, e: int, p: int) -> tuple[int, int]:
    rr, ri = 1, 0
    a, b = a % p, b % p
    while e:
        if e & 1:
            rr, ri = (rr * a - ri * b) % p, (rr * b + ri * a) % p
        a, b = (a * a - b * b) % p, (2 * a * b) % p
        e >>= 1
    return rr, ri


def _euler_prime_exponent(a: GaussInt, pi: GaussInt) -> Optional[int]:
    """(a/π)₄ as an exponent, via a^{(N(π)-1)/4} mod π."""
    n = pi.norm()
    if pi.im == 0:
        p = abs(pi.re)
        rr, ri = _gauss_powmod(a.re, a.im, (n - 1) // 4, p)
        table = {(1, 0): 0, (0, 1): 1, (p - 1, 0): 2, (0, p - 1): 3}
        if (a.re % p, a.im % p) == (0, 0):
            return None
        return table[(rr, ri)]
    p = n
    _, s = prime_above(p)
    if pi != prime_above(p)[0]:
        s = p - s  # conjugate prime: i ≡ -s there
    x = (a.re + a.im * s) % p
    if x == 0:
        return None
    t = pow(x, (p - 1) // 4, p)
    if t == 1:
        return 0
    if t == s:
        return 1
    if t == p - 1:
        return 2
    if t == p - s:
        return 3
    raise ArithmeticError("Euler criterion produced a non-root of unity")


def quartic_symbol_euler(a, c) -> QuarticValue:
    """(a/c)₄ by factoring c and applying the Euler criterion prime by prime."""
    a = GaussInt.of(a)
    c = _require_primary(c)
    if c.norm() == 1:
        return ONE_Q
    k = 0
    for pi, e in factor(c).factors:
        v = _euler_prime_exponent(a, pi)
        if v is None:
            return ZERO
        k += e * v
    return QuarticValue(k % 4)


# supplements and reciprocity -------------------------------------------------------

def reciprocity_sign(alpha, gamma) -> int:
    """(-1)^{C(α,γ)} with C = (N(α)-1)/4 · (N(γ)-1)/4."""
    alpha, gamma = _require_primary(alpha), _require_primary(gamma)
    c = ((alpha.norm() - 1) // 4) * ((gamma.norm() - 1) // 4)
    return -1 if c % 2 else 1


def lambda_digits(gamma) -> tuple[int, int, int, int]:
    """(a3, a4, a5, a6): binary λ-adic digits of a primary γ = 1 + a3λ³ + a4λ⁴ + ..."""
    gamma = _require_primary(gamma)
    x = gamma - 1
    digits = []
    # x is divisible by λ³; peel digits from λ³ upward
    for _ in range(3):
        x = x.exact_div(GaussInt(1, 1))
    for _ in range(4):
        d = (x.re + x.im) % 2
        digits.append(d)
        x = (x - d).exact_div(GaussInt(1, 1))
    return tuple(digits)  # type: ignore[return-value]


def supplement_lambda(gamma) -> int:
    """Exponent of (λ/γ)₄."""
    a3, a4, a5, a6 = lambda_digits(gamma)
    k = -a4 + 2 * a6
    if a3:
        k += 2
    return k % 4


def supplement_i(gamma) -> int:
    """Exponent of (i/γ)₄."""
    a3, a4, a5, a6 = lambda_digits(gamma)
    k = 2 * (a4 + a5)
    if a3:
        k += 1
    return k % 4


def _fast_supplements(c: GaussInt) -> tuple[int, int]:
    a3, a4, a5, a6 = lambda_digits(c)
    kl = -a4 + 2 * a6 + 2 * a3
    ki = 2 * (a4 + a5) + a3
    return kl % 4, ki % 4


def quartic_symbol_fast(a, c) -> QuarticValue:
    """(a/c)₄ by the reciprocity-driven Euclidean loop (factorization-free)."""
    a = GaussInt.of(a)
    c = _require_primary(c)
    k = 0
    while True:
        if c.norm() == 1:
            return QuarticValue(k % 4)
        a = a % c
        if not a:
            return ZERO
        j, a = lambda_valuation(a)
        u, a = primary_associate(a)
        if j or u.re != 1:
            kl, ki = _fast_supplements(c)
            k += j * kl + unit_exponent(u) * ki
        if ((a.norm() - 1) // 4) * ((c.norm() - 1) // 4) % 2:
            k += 2
        a, c = c, a


quartic_symbol = quartic_symbol_fast


def quadratic_symbol(a, c, method: str = "fast") -> int:
    """(a/c)₂ = (a/c)₄² as an integer in {-1, 0, 1}."""
    fn = quartic_symbol_fast if method == "fast" else quartic_symbol_euler
    v = fn(a, c)
    if v.is_zero:
        return 0
    return 1 if v.exponent % 2 == 0 else -1


# vectorized Euler criterion ----------------------------------------------------------

def _powmod_array(x: np.ndarray, e: int, p: int) -> np.ndarray:
    result = np.ones_like(x)
    base = x % p
    while e:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


def _gauss_powmod_array(xr: np.ndarray, xi: np.ndarray, e: int, p: int):
    rr = np.ones_like(xr)
    ri = np.zeros_like(xr)
    a, b = xr % p, xi % p
    while e:
        if e & 1:
            rr, ri = (rr * a - ri * b) % p, (rr * b + ri * a) % p
        a, b = (a * a - b * b) % p, (2 * a * b) % p
        e >>= 1
    return rr, ri


def _prime_exponents_array(xr: np.ndarray, xi: np.ndarray, pi: GaussInt) -> np.ndarray:
    """Exponent of (x/π)₄ for arrays of x, with -1 marking zero."""
    out = np.full(xr.shape, -1, dtype=np.int64)
    if pi.im == 0:
        p = abs(pi.re)
        if p > 3_000_000:
            raise OverflowError("inert prime too large for int64 vector path")
        rr, ri = _gauss_powmod_array(xr, xi, (p * p - 1) // 4, p)
        out[(rr == 1) & (ri == 0)] = 0
        out[(rr == 0) & (ri == 1)] = 1
        out[(rr == p - 1) & (ri == 0)] = 2
        out[(rr == 0) & (ri == p - 1)] = 3
        out[(xr % p == 0) & (xi % p == 0)] = -1
        return out
    p = pi.norm()
    if p > 3_000_000_000:
        raise OverflowError("prime too large for int64 vector path")
    base_pi, s = prime_above(p)
    if pi != base_pi:
        s = p - s
    x = (xr % p + (xi % p) * s) % p
    t = _powmod_array(x, (p - 1) // 4, p)
    out[t == 1] = 0
    out[t == s] = 1
    out[t == p - 1] = 2
    out[t == p - s] = 3
    out[x == 0] = -1
    return out


def symbol_exponents_array(xr: np.ndarray, xi: np.ndarray, fac: Factorization | GaussInt,
                           power: int = 1) -> np.ndarray:
    """Exponents of (x/c)₄^power for integer arrays x = xr + i·xi; -1 where gcd(x, c) ≠ 1.

    ``fac`` is the factorization of a primary c (or c itself).
    """
    if isinstance(fac, GaussInt):
        fac = factor(_require_primary(fac))
    xr = np.asarray(xr, dtype=np.int64)
    xi = np.asarray(xi, dtype=np.int64)
    total = np.zeros(xr.shape, dtype=np.int64)
    zero = np.zeros(xr.shape, dtype=bool)
    for pi, e in fac.factors:
        v = _prime_exponents_array(xr, xi, pi)
        zero |= v < 0
        total += e * power * np.where(v < 0, 0, v)
    total %= 4
    total[zero] = -1
    return total
