"""Exact arithmetic in the Gaussian integers Z[i].

The universal scalar is :class:`GaussInt`.  Elements coprime to
``LAMBDA = 1 + i`` have exactly one *primary* associate, i.e. one that is
congruent to 1 modulo ``LAMBDA**3 = -2 + 2i``.  Every nonzero ideal has a
canonical generator ``LAMBDA**k * c`` with ``c`` primary, and all character
evaluations elsewhere in the package go through that convention.
"""

from __future__ import annotations

import math
import re as _re
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np
from sympy import factorint

from .errors import NormEven, ZeroError

__all__ = [
    "GaussInt",
    "Factorization",
    "LAMBDA",
    "UNITS",
    "ONE",
    "I",
    "is_primary",
    "primary_associate",
    "canonical_generator",
    "factor",
    "moebius",
    "euler_phi",
    "radical",
    "is_squarefree",
    "gcd",
    "enumerate_primary",
    "sqrt_minus_one",
    "prime_above",
    "residue_system",
    "parse_gaussint",
]


def _round_div(a: int, n: int) -> int:
    """Nearest integer to a/n for n > 0 (ties rounded up)."""
    return (2 * a + n) // (2 * n)


@dataclass(frozen=True, slots=True)
class GaussInt:
    re: int
    im: int = 0

    # construction -----------------------------------------------------
    @staticmethod
    def of(x) -> "GaussInt":
        if isinstance(x, GaussInt):
            return x
        if isinstance(x, (int, np.integer)):
            return GaussInt(int(x), 0)
        if isinstance(x, complex):
            if x.real != int(x.real) or x.imag != int(x.imag):
                raise ValueError(f"not a Gaussian integer: {x}")
            return GaussInt(int(x.real), int(x.imag))
        if isinstance(x, str):
            return parse_gaussint(x)
        if isinstance(x, tuple) and len(x) == 2:
            return GaussInt(int(x[0]), int(x[1]))
        raise TypeError(f"cannot convert {type(x).__name__} to GaussInt")

    # basic protocol ---------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.re or self.im)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def __str__(self) -> str:
        return format_gaussint(self)

    def __repr__(self) -> str:
        return f"GaussInt({self.re}, {self.im})"

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def conj(self) -> "GaussInt":
        return GaussInt(self.re, -self.im)

    def is_unit(self) -> bool:
        return self.norm() == 1

    # ring operations --------------------------------------------------
    def __neg__(self) -> "GaussInt":
        return GaussInt(-self.re, -self.im)

    def __add__(self, other) -> "GaussInt":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return GaussInt(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other) -> "GaussInt":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return GaussInt(self.re - o.re, self.im - o.im)

    def __rsub__(self, other) -> "GaussInt":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return GaussInt(o.re - self.re, o.im - self.im)

    def __mul__(self, other) -> "GaussInt":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        a, b, c, d = self.re, self.im, o.re, o.im
        return GaussInt(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "GaussInt":
        if k < 0:
            raise ValueError("negative powers are not Gaussian integers")
        result, base = GaussInt(1, 0), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other) -> tuple["GaussInt", "GaussInt"]:
        """Division with remainder of least norm (quotient rounded componentwise)."""
        o = _coerce(other)
        if o is None:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroError("division by zero")
        num = self * o.conj()
        q = GaussInt(_round_div(num.re, n), _round_div(num.im, n))
        return q, self - q * o

    def __floordiv__(self, other) -> "GaussInt":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "GaussInt":
        return divmod(self, other)[1]

    def divides(self, other) -> bool:
        """True if self | other."""
        o = GaussInt.of(other)
        n = self.norm()
        if n == 0:
            return not o
        num = o * self.conj()
        return num.re % n == 0 and num.im % n == 0

    def exact_div(self, other) -> "GaussInt":
        o = GaussInt.of(other)
        n = o.norm()
        if n == 0:
            raise ZeroError("division by zero")
        num = self * o.conj()
        if num.re % n or num.im % n:
            raise ArithmeticError(f"{o} does not divide {self}")
        return GaussInt(num.re // n, num.im // n)


def _coerce(x):
    if isinstance(x, GaussInt):
        return x
    if isinstance(x, (int, np.integer)):
        return GaussInt(int(x), 0)
    return None


ONE = GaussInt(1, 0)
I = GaussInt(0, 1)
LAMBDA = GaussInt(1, 1)
UNITS = (GaussInt(1, 0), GaussInt(0, 1), GaussInt(-1, 0), GaussInt(0, -1))


# text form ------------------------------------------------------------------

_GI_RE = _re.compile(r"^\s*([+-]?\d+)?\s*(?:([+-])\s*(\d*)\s*i)?\s*$")
_PURE_IM_RE = _re.compile(r"^\s*([+-]?)\s*(\d*)\s*i\s*$")


def parse_gaussint(text: str) -> GaussInt:
    """Parse ``a+bi``, ``a-bi``, ``a``, ``bi``, ``i`` and ``-i`` forms."""
    s = text.strip().replace("−", "-").replace(" ", "").replace("j", "i")
    m = _PURE_IM_RE.match(s)
    if m:
        mag = int(m.group(2)) if m.group(2) else 1
        return GaussInt(0, -mag if m.group(1) == "-" else mag)
    m = _GI_RE.match(s)
    if not m or (m.group(1) is None and m.group(2) is None):
        raise ValueError(f"cannot parse Gaussian integer from {text!r}")
    re_part = int(m.group(1)) if m.group(1) is not None else 0
    im_part = 0
    if m.group(2) is not None:
        mag = int(m.group(3)) if m.group(3) else 1
        im_part = -mag if m.group(2) == "-" else mag
    return GaussInt(re_part, im_part)


def format_gaussint(z: GaussInt) -> str:
    a, b = z.re, z.im
    if b == 0:
        return str(a)
    bs = "" if abs(b) == 1 else str(abs(b))
    if a == 0:
        return f"{'-' if b < 0 else ''}{bs}i"
    return f"{a}{'-' if b < 0 else '+'}{bs}i"


# primary normalization -----------------------------------------------------

def is_primary(z: GaussInt) -> bool:
    """z ≡ 1 mod λ³, i.e. re odd, im even, re + im ≡ 1 mod 4."""
    return (z.re - 1 - z.im) % 4 == 0 and (z.re - 1 + z.im) % 4 == 0


def primary_associate(z: GaussInt) -> tuple[GaussInt, GaussInt]:
    """Return ``(unit, primary)`` with ``z == unit * primary``."""
    z = GaussInt.of(z)
    if not z:
        raise ZeroError("zero has no primary associate")
    if (z.re + z.im) % 2 == 0:
        raise NormEven(f"{z} is divisible by 1+i")
    for u in UNITS:
        w = u * z
        if is_primary(w):
            return u.conj(), w
    raise AssertionError("unreachable: some associate of an odd element is primary")


def lambda_valuation(z: GaussInt) -> tuple[int, GaussInt]:
    """Return (k, w) with z = λ^k w and λ ∤ w."""
    if not z:
        raise ZeroError("valuation of zero")
    k = 0
    a, b = z.re, z.im
    while (a + b) % 2 == 0:
        # z / (1+i) = z (1-i) / 2
        a, b = (a + b) // 2, (b - a) // 2
        k += 1
    return k, GaussInt(a, b)


def canonical_generator(z: GaussInt) -> tuple[int, GaussInt]:
    """Ideal generator λ^k·c with c primary; returns (k, c)."""
    k, w = lambda_valuation(GaussInt.of(z))
    return k, primary_associate(w)[1]


# primes ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def sqrt_minus_one(p: int) -> int:
    """A square root of -1 modulo a prime p ≡ 1 mod 4."""
    if p % 4 != 1:
        raise ValueError(f"{p} is not 1 mod 4")
    c = 2
    while pow(c, (p - 1) // 2, p) != p - 1:
        c += 1
    return pow(c, (p - 1) // 4, p)


def _gcd_raw(a: GaussInt, b: GaussInt) -> GaussInt:
    while b:
        a, b = b, a % b
    return a


@lru_cache(maxsize=None)
def prime_above(p: int) -> tuple[GaussInt, int]:
    """Primary prime π above p ≡ 1 mod 4 together with s such that i ≡ s mod π."""
    s = sqrt_minus_one(p)
    pi = _gcd_raw(GaussInt(p, 0), GaussInt(s, -1))
    if pi.norm() != p:
        raise ArithmeticError(f"failed to split {p}")
    return primary_associate(pi)[1], s


def _prime_sort_key(pi: GaussInt):
    return (pi.norm(), pi.re, pi.im)


# factorization ----------------------------------------------------------------

@dataclass(frozen=True)
class Factorization:
    unit: GaussInt
    lambda_exp: int
    factors: tuple[tuple[GaussInt, int], ...] = field(default_factory=tuple)

    def value(self) -> GaussInt:
        z = self.unit * LAMBDA ** self.lambda_exp
        for pi, e in self.factors:
            z = z * pi ** e
        return z

    def odd_part(self) -> GaussInt:
        """Primary part Π π^e."""
        z = ONE
        for pi, e in self.factors:
            z = z * pi ** e
        return z

    def primes(self) -> list[GaussInt]:
        return [pi for pi, _ in self.factors]

    def __mul__(self, other: "Factorization") -> "Factorization":
        exps: dict[GaussInt, int] = {}
        for pi, e in self.factors + other.factors:
            exps[pi] = exps.get(pi, 0) + e
        return Factorization(
            self.unit * other.unit,
            self.lambda_exp + other.lambda_exp,
            tuple(sorted(exps.items(), key=lambda t: _prime_sort_key(t[0]))),
        )


_factor_lock = threading.Lock()


@lru_cache(maxsize=1 << 18)
def _factor_cached(a: int, b: int) -> Factorization:
    z = GaussInt(a, b)
    k, w = lambda_valuation(z)
    out: list[tuple[GaussInt, int]] = []
    n = w.norm()
    for p, e in sorted(factorint(n).items()):
        if p % 4 == 3:
            pi = GaussInt(-p, 0)
            w = w.exact_div(pi ** (e // 2))
            out.append((pi, e // 2))
        else:
            pi, s = prime_above(p)
            j = 0
            while j < e and (w.re + w.im * s) % p == 0:
                w = w.exact_div(pi)
                j += 1
            if j:
                out.append((pi, j))
            if e - j:
                pib = pi.conj()
                w = w.exact_div(pib ** (e - j))
                out.append((pib, e - j))
    if w.norm() != 1:
        raise ArithmeticError(f"factorization of {z} left a non-unit cofactor {w}")
    out.sort(key=lambda t: _prime_sort_key(t[0]))
    return Factorization(w, k, tuple(out))


def factor(z) -> Factorization:
    """Factor z as unit · λ^k · Π π^e with primary primes π (sorted by (norm, re, im))."""
    z = GaussInt.of(z)
    if not z:
        raise ZeroError("cannot factor zero")
    with _factor_lock:
        return _factor_cached(z.re, z.im)


# multiplicative functions ------------------------------------------------------

def moebius(z) -> int:
    f = factor(z)
    if f.lambda_exp > 1 or any(e > 1 for _, e in f.factors):
        return 0
    return (-1) ** (f.lambda_exp + len(f.factors))


def euler_phi(z) -> int:
    f = factor(z)
    out = 2 ** (f.lambda_exp - 1) if f.lambda_exp else 1
    for pi, e in f.factors:
        n = pi.norm()
        out *= n ** (e - 1) * (n - 1)
    return out


def radical(z) -> GaussInt:
    f = factor(z)
    r = LAMBDA if f.lambda_exp else ONE
    for pi, _ in f.factors:
        r = r * pi
    return r


def is_squarefree(z) -> bool:
    return moebius(z) != 0


def gcd(a, b) -> GaussInt:
    """Greatest common divisor as the canonical generator λ^k·(primary)."""
    a, b = GaussInt.of(a), GaussInt.of(b)
    if not a and not b:
        raise ZeroError("gcd(0, 0)")
    g = _gcd_raw(a, b)
    k, c = canonical_generator(g)
    return LAMBDA ** k * c


# enumeration -------------------------------------------------------------------

_MODULI = {"lam3": GaussInt(-2, 2), "lam7": GaussInt(8, -8)}


def _modulus(cond) -> GaussInt:
    if isinstance(cond, GaussInt):
        return cond
    key = str(cond).lower().replace("λ", "lam").replace("^", "").replace("³", "3").replace("⁷", "7")
    if key in ("3", "lam3"):
        return _MODULI["lam3"]
    if key in ("7", "lam7"):
        return _MODULI["lam7"]
    raise ValueError(f"unknown modulus condition {cond!r}")


def _congruence_class(X: float, L: GaussInt) -> np.ndarray:
    """All z = 1 + L·m with N(z) ≤ X as an (n, 2) int64 array sorted by (norm, re, im)."""
    nl = L.norm()
    R = int(math.isqrt(int(X) // nl)) + 2
    mr, mi = np.meshgrid(np.arange(-R, R + 1, dtype=np.int64), np.arange(-R, R + 1, dtype=np.int64))
    mr, mi = mr.ravel(), mi.ravel()
    zr = 1 + L.re * mr - L.im * mi
    zi = L.re * mi + L.im * mr
    nrm = zr * zr + zi * zi
    keep = nrm <= X
    zr, zi, nrm = zr[keep], zi[keep], nrm[keep]
    order = np.lexsort((zi, zr, nrm))
    return np.stack([zr[order], zi[order]], axis=1)


def enumerate_primary(X: float, modulus_condition="lam3", squarefree_only: bool = False) -> Iterator[GaussInt]:
    """Primary q with N(q) ≤ X and q ≡ 1 mod the given λ-power, in nondecreasing norm."""
    L = _modulus(modulus_condition)
    if L.norm() < 8 or not is_primary(ONE + L):
        raise ValueError("modulus must be a multiple of λ³")
    for a, b in _congruence_class(X, L):
        z = GaussInt(int(a), int(b))
        if squarefree_only and not is_squarefree(z):
            continue
        yield z


# residue systems ---------------------------------------------------------------

def residue_system(c: GaussInt) -> tuple[np.ndarray, np.ndarray]:
    """A complete residue system mod c as arrays (x, y) of representatives x + y·i.

    With g the rational content of c, the lattice cZ[i] has Hermite basis
    (N(c)/g, 0), (t, g), so {x + yi : 0 ≤ x < N(c)/g, 0 ≤ y < g} is complete.
    """
    c = GaussInt.of(c)
    n = c.norm()
    if n == 0:
        raise ZeroError("residue system mod 0")
    g = math.gcd(c.re, c.im)
    w = n // g
    x = np.tile(np.arange(w, dtype=np.int64), g)
    y = np.repeat(np.arange(g, dtype=np.int64), w)
    return x, y
