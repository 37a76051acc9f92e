"""Hecke characters over Q(i): ξ of frequency ω, χ_q, ν_{q,ω} and root numbers."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BudgetExceeded, NotInFamily, NotPrimitive, TrivialCharacter
from .gauss_sums import (
    LamFrac,
    _character_sum,
    gauss2_normalized,
    gauss4_normalized,
)
from .gaussint import (
    LAMBDA,
    ONE,
    GaussInt,
    canonical_generator,
    factor,
    is_primary,
    residue_system,
)
from .quartic import QuarticValue, quartic_symbol_fast, symbol_exponents_array

__all__ = [
    "HeckeCharSpec",
    "make_spec",
    "m_omega",
    "xi_eval",
    "chi_xi",
    "chi_inf",
    "chi_q_eval",
    "nu_eval",
    "epsilon_factor",
    "root_number",
    "root_number_direct",
    "root_number_formula",
    "in_family",
    "decompose",
    "ROOT_DIRECT_BUDGET",
]

ROOT_DIRECT_BUDGET = 10**4
_LAM7 = GaussInt(8, -8)
_I_POW = (1, 1j, -1, -1j)


def in_family(q: GaussInt) -> bool:
    """q ≡ 1 mod λ⁷."""
    return _LAM7.divides(GaussInt.of(q) - 1)


def m_omega(omega: int) -> GaussInt:
    """Generator of the modulus 𝔪_ω: λ³ for odd ω, 2 for ω ≡ 2 mod 4, 1 otherwise."""
    if omega % 2:
        return GaussInt(-2, 2)
    if omega % 4 == 2:
        return GaussInt(2, 0)
    return ONE


def decompose(q: GaussInt) -> tuple[GaussInt, GaussInt, GaussInt, GaussInt, GaussInt]:
    """(q1, q2, q3, q4, q5) with q = q1 q2² q3³ q4⁴ q5⁴, µ²(q1q2q3q4) = 1, q5 | (q1q2q3q4)^∞."""
    parts = [ONE] * 5
    for pi, e in factor(q).factors:
        r = e % 4
        idx = 3 if r == 0 else r - 1
        parts[idx] = parts[idx] * pi
        rest = (e - (r if r else 4)) // 4
        if rest:
            parts[4] = parts[4] * pi ** rest
    return tuple(parts)  # type: ignore[return-value]


@dataclass(frozen=True)
class HeckeCharSpec:
    """The character ν_{q,ω} = χ_q · ξ."""

    q: GaussInt
    omega: int
    decomposition: tuple[GaussInt, GaussInt, GaussInt, GaussInt, GaussInt]
    conductor: GaussInt
    modulus: GaussInt
    primitive: bool

    @property
    def squarefree(self) -> bool:
        q1, q2, q3, q4, q5 = self.decomposition
        return q2 == ONE and q3 == ONE and q4 == ONE and q5 == ONE

    @property
    def trivial(self) -> bool:
        return self.q == ONE and self.omega == 0

    def kernel_norm(self) -> int:
        """N(q·𝔪_ω), the normalization used inside the AFE kernels."""
        return self.q.norm() * m_omega(self.omega).norm()


def make_spec(q, omega: int) -> HeckeCharSpec:
    q = GaussInt.of(q)
    if not is_primary(q) or not in_family(q):
        raise NotInFamily(f"{q} is not ≡ 1 mod λ⁷")
    dec = decompose(q)
    q1, q2, q3, q4, _ = dec
    rad = q1 * q2 * q3 * q4
    m = m_omega(omega)
    return HeckeCharSpec(q, int(omega), dec, q1 * q2 * q3 * m, rad * m, q4 == ONE)


# ξ and its classical components -------------------------------------------------

def _unit_power(z: GaussInt, omega: int) -> complex:
    """(z̄/|z|)^ω."""
    if omega == 0:
        return 1.0 + 0j
    theta = math.atan2(z.im, z.re)
    return cmath.exp(-1j * omega * theta)


def chi_inf(z, omega: int) -> complex:
    return _unit_power(GaussInt.of(z), omega)


def xi_eval(n, omega: int) -> complex:
    """ξ(n) = (n̄/|n|)^ω on the canonical generator; 0 if (n, 𝔪_ω) ≠ 1."""
    n = GaussInt.of(n)
    k, c = canonical_generator(n)
    if k and omega % 4:
        return 0j
    return _unit_power(LAMBDA ** k * c, omega)


_UNIT_EXP = {(1, 0): 0, (0, 1): 1, (-1, 0): 2, (0, -1): 3}


def _unit_class_table(mod: GaussInt) -> np.ndarray:
    """Table[x mod 4, y mod 4] = exponent e with x+iy ≡ i^e mod `mod` (or -1)."""
    t = np.full((4, 4), -1, dtype=np.int64)
    for x in range(4):
        for y in range(4):
            for u, e in _UNIT_EXP.items():
                if mod.divides(GaussInt(x - u[0], y - u[1])):
                    t[x, y] = e
                    break
    return t


_TABLES = {1: _unit_class_table(GaussInt(-2, 2)), 2: _unit_class_table(GaussInt(2, 0))}


def chi_xi(x, omega: int) -> complex:
    """χ_ξ(x) = u^ω where x ≡ u mod 𝔪_ω; zero if x is not coprime to 𝔪_ω."""
    x = GaussInt.of(x)
    if omega % 4 == 0:
        return 1.0 + 0j
    key = 1 if omega % 2 else 2
    e = _TABLES[key][x.re % 4, x.im % 4]
    return 0j if e < 0 else _I_POW[(e * omega) % 4]


def _chi_xi_exponents(xr: np.ndarray, xi: np.ndarray, omega: int) -> np.ndarray:
    if omega % 4 == 0:
        return np.zeros(xr.shape, dtype=np.int64)
    key = 1 if omega % 2 else 2
    e = _TABLES[key][xr % 4, xi % 4]
    return np.where(e < 0, -1, (e * omega) % 4)


# χ_q and ν -------------------------------------------------------------------

def chi_q_eval(q, n) -> QuarticValue:
    """χ_q((n)) evaluated on the canonical generator of (n)."""
    k, c = canonical_generator(GaussInt.of(n))
    return quartic_symbol_fast(LAMBDA ** k * c, GaussInt.of(q))


def nu_eval(spec: HeckeCharSpec, n) -> complex:
    """ν_{q,ω}((n)) = χ_q((n)) ξ((n))."""
    x = xi_eval(n, spec.omega)
    if x == 0:
        return 0j
    return chi_q_eval(spec.q, n).to_complex() * x


# root numbers ------------------------------------------------------------------

def epsilon_factor(omega: int) -> int:
    """(-1)^{(ω+1)/2} (2/ω) for odd ω with (2/ω) = (-1)^{(ω²-1)/8}; 1 for even ω."""
    if omega % 2 == 0:
        return 1
    s = -1 if ((omega + 1) // 2) % 2 else 1
    t = -1 if ((omega * omega - 1) // 8) % 2 else 1
    return s * t


def _check_root_spec(spec: HeckeCharSpec):
    if spec.trivial:
        raise TrivialCharacter("ν_{1,0} is the trivial character")
    if not spec.primitive:
        raise NotPrimitive(f"q = {spec.q} has a fourth-power part")


def _convention_sign(omega: int, convention: str) -> int:
    """i^{-|ω|} / i^{ω}: -1 exactly for positive odd ω."""
    if convention == "printed":
        return 1
    if convention == "afe":
        return -1 if (omega > 0 and omega % 2) else 1
    raise ValueError(f"unknown convention {convention!r}")


def root_number_formula(spec: HeckeCharSpec, variant: str = "corrected",
                        convention: str = "printed") -> tuple[complex, float]:
    """W(ν_{q,ω}) from normalized Gauss sums of the decomposition of q.

    For squarefree q this is ε(ω)ξ(q)g̃4(q).  For q3 ≠ 1 the cube part enters
    through h̃4; ``variant="corrected"`` carries the extra factor χ_{q3}(-1)
    needed to match the defining sum, ``"literal"`` omits it.

    ``convention="printed"`` uses the archimedean factor i^ω of the Gauss-sum
    definition; ``"afe"`` uses i^{-|ω|}, the sign for which the approximate
    functional equation is balanced (they differ for positive odd ω).
    """
    _check_root_spec(spec)
    q1, q2, q3, _, _ = spec.decomposition
    eps = epsilon_factor(spec.omega) * _convention_sign(spec.omega, convention)
    xi = xi_eval(q1 * q2 * q3, spec.omega)
    if spec.squarefree:
        g = gauss4_normalized(1, spec.q)
        return eps * xi * g.value, g.err

    def ex(c, a):
        return 0 if c == ONE else quartic_symbol_fast(a, c).exponent

    k = ex(q1, q2 * q3) + 2 * ex(q2, q1 * q3) - ex(q3, q1 * q2)
    if variant == "corrected":
        k += ex(q3, GaussInt(-1))
    g1 = gauss4_normalized(1, q1)
    g2 = gauss2_normalized(1, q2)
    g3 = gauss4_normalized(1, q3)
    val = eps * xi * _I_POW[k % 4] * g1.value * g2.value * g3.value.conjugate()
    return complex(val), g1.err + g2.err + g3.err


def root_number_direct(spec: HeckeCharSpec, budget: int | None = None,
                       convention: str = "printed") -> tuple[complex, float]:
    """W(ν_{q,ω}) by summing the defining Gauss sum over units mod the conductor."""
    _check_root_spec(spec)
    if budget is None:
        budget = ROOT_DIRECT_BUDGET
    m = spec.conductor
    n = m.norm()
    if n > budget:
        raise BudgetExceeded(f"N(conductor) = {n} exceeds budget {budget}")
    omega = spec.omega
    x, y = residue_system(m)
    ex_q = symbol_exponents_array(x, y, factor(spec.q)) if spec.q != ONE else np.zeros(x.shape, np.int64)
    ex_x = _chi_xi_exponents(x, y, omega)
    exps = np.where((ex_q < 0) | (ex_x < 0), -1, (ex_q + ex_x) % 4)
    if spec.q != ONE:
        # coprimality to the conductor, not just to q
        q1, q2, q3 = spec.decomposition[:3]
        rad_ex = symbol_exponents_array(x, y, factor(q1 * q2 * q3))
        exps = np.where(rad_ex < 0, -1, exps)
    s = _character_sum(LamFrac(GaussInt(0, 1), 2), m, x, y, exps)  # ě(x/(2m)), 1/2 = i/λ²
    arch = _I_POW[omega % 4] if convention == "printed" else _I_POW[(-abs(omega)) % 4]
    if convention not in ("printed", "afe"):
        raise ValueError(f"unknown convention {convention!r}")
    pref = arch * chi_inf(2 * m, omega) / math.sqrt(n)
    return complex(pref * s.value), s.err / math.sqrt(n)


def root_number(spec: HeckeCharSpec, method: str = "formula", convention: str = "printed") -> complex:
    if method == "direct":
        return root_number_direct(spec, convention=convention)[0]
    return root_number_formula(spec, convention=convention)[0]
