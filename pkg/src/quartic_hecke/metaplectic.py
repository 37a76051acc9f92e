"""Truncated Dirichlet series of quartic Gauss sums and the coprimality-reduction identities.

    ψ_α(r, s, ξ; v) = Σ_{c ≡ v (4), (c, α) = 1} g4(r, c) ξ(c) N(c)^{-s}

converges absolutely for Re s > 3/2.  Everything here is a finite sum plus
an explicit tail bound; identities are checked by comparing both sides at
the same norm cutoff, where they can differ only through the tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import HypothesisViolated, NotPrimary, NotSquarefree, RegionError
from .gauss_sums import LamFrac, gauss2_fast, gauss4_fast
from .gaussint import LAMBDA, ONE, GaussInt, factor, gcd, is_primary, is_squarefree
from .hecke import xi_eval
from .lvalues import prime_sieve
from .quartic import quartic_symbol_fast

__all__ = [
    "PsiEval",
    "IdentityCheck",
    "psi_truncated",
    "psi_tail_bound",
    "delta_factor",
    "delta_star",
    "zeta_lambda",
    "zeta_lambda_series",
    "verify_lemma61",
    "verify_corollary62",
    "STANDARD_MATRIX",
    "MIN_REAL_S",
]

MIN_REAL_S = 1.6
_EPS = float(np.finfo(float).eps)
_FOUR = GaussInt(4, 0)


@dataclass(frozen=True)
class PsiEval:
    s: complex
    partial: complex
    tail_bound: float
    err: float  # rounding in the partial sum
    terms: int
    cutoff: float


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    lhs: complex
    rhs: complex
    discrepancy: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.discrepancy <= self.bound


# helpers ---------------------------------------------------------------------------

def _lattice_tail(a: float, X: float, index: int, half_diag: float) -> float:
    """Bound for Σ N(c)^{-a} over a coset of a lattice of the given index, N(c) > X.

    Uses #{c : N(c) ≤ t} ≤ (π/index)(√t + h)² and partial summation.
    """
    if a <= 1:
        return math.inf
    h = half_diag
    return (math.pi * a / index) * (X ** (1 - a) / (a - 1) + 2 * h * X ** (0.5 - a) / (a - 0.5)
                                    + h * h * X ** (-a) / a)


def _odd_norm(r: LamFrac) -> int:
    n = r.num
    while n and (n.re + n.im) % 2 == 0:
        n = n.exact_div(LAMBDA)
    return max(n.norm(), 1)


def psi_tail_bound(r, s: complex, cutoff: float) -> float:
    """Σ_{N(c) > cutoff, c ≡ v (4)} √(N(r)N(c)) N(c)^{-Re s}, using |g4(r, c)| ≤ √(N(r)N(c))."""
    r = LamFrac.of(r)
    return math.sqrt(_odd_norm(r)) * _lattice_tail(complex(s).real - 0.5, cutoff, 16, 2 * math.sqrt(2))


def _check_s(s: complex):
    if complex(s).real < MIN_REAL_S:
        raise RegionError(f"Re s = {complex(s).real} < {MIN_REAL_S}")


def _primary(z, what: str) -> GaussInt:
    z = GaussInt.of(z)
    if not is_primary(z):
        raise NotPrimary(f"{what} = {z} is not primary")
    return z


@lru_cache(maxsize=64)
def _coset(v: GaussInt, cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    """All c = v + 4m with N(c) ≤ cutoff, sorted by (norm, re, im)."""
    R = int(math.isqrt(cutoff) // 4) + 2
    m = np.arange(-R, R + 1, dtype=np.int64)
    mr, mi = np.meshgrid(m, m)
    cr = v.re + 4 * mr.ravel()
    ci = v.im + 4 * mi.ravel()
    nrm = cr * cr + ci * ci
    keep = nrm <= cutoff
    cr, ci, nrm = cr[keep], ci[keep], nrm[keep]
    order = np.lexsort((ci, cr, nrm))
    return cr[order], ci[order]


@lru_cache(maxsize=512)
def _terms(r: LamFrac, v: GaussInt, omega: int, cutoff: int):
    """(c_re, c_im, N(c), g4(r, c)ξ(c), err) over c ≡ v mod 4, N(c) ≤ cutoff."""
    cr, ci = _coset(v, cutoff)
    vals = np.empty(cr.size, dtype=complex)
    errs = np.empty(cr.size)
    for k, (a, b) in enumerate(zip(cr.tolist(), ci.tolist())):
        c = GaussInt(a, b)
        g = gauss4_fast(r, c)
        x = xi_eval(c, omega) if omega else 1.0
        vals[k] = g.value * x
        errs[k] = g.err
    return cr, ci, (cr * cr + ci * ci).astype(float), vals, errs


def _coprime_mask(cr: np.ndarray, ci: np.ndarray, alpha: GaussInt) -> np.ndarray:
    mask = np.ones(cr.shape, dtype=bool)
    if alpha.norm() == 1:
        return mask
    for pi, _ in factor(alpha).factors:
        n = pi.norm()
        # π | c  ⇔  c·π̄ ≡ 0 mod N(π)
        divisible = ((cr * pi.re + ci * pi.im) % n == 0) & ((ci * pi.re - cr * pi.im) % n == 0)
        mask &= ~divisible
    return mask


def _as_lamfrac(r) -> LamFrac:
    r = LamFrac.of(r)
    if r.is_zero():
        raise ValueError("r must be nonzero")
    return r


def _scale(r: LamFrac, z: GaussInt) -> LamFrac:
    return LamFrac(r.num * z, r.j).reduced()


# ψ ------------------------------------------------------------------------------------

def psi_truncated(alpha, r, s: complex, omega: int = 0, v=1, cutoff: float = 10**4) -> PsiEval:
    """Partial sum of ψ_α(r, s, ξ; v) over N(c) ≤ cutoff with an explicit tail bound."""
    s = complex(s)
    _check_s(s)
    alpha = _primary(alpha, "alpha")
    if not is_squarefree(alpha):
        raise NotSquarefree(f"alpha = {alpha} is not squarefree")
    v = _primary(v, "v")
    r = _as_lamfrac(r)
    cutoff = int(cutoff)
    cr, ci, nrm, vals, errs = _terms(r, v, int(omega), cutoff)
    mask = _coprime_mask(cr, ci, alpha)
    w = np.exp(-s * np.log(nrm[mask]))
    t = vals[mask] * w
    partial = complex(math.fsum(t.real), math.fsum(t.imag))
    err = float(np.sum(errs[mask] * np.abs(w))) + 4 * _EPS * float(np.sum(np.abs(t)))
    return PsiEval(s, partial, psi_tail_bound(r, s, cutoff), err, int(mask.sum()), float(cutoff))


# finite Euler factors -----------------------------------------------------------------

def _alpha_primes(alpha) -> tuple[GaussInt, ...]:
    alpha = _primary(alpha, "alpha")
    if not is_squarefree(alpha):
        raise NotSquarefree(f"alpha = {alpha} is not squarefree")
    if alpha.norm() == 1:
        return ()
    return tuple(pi for pi, _ in factor(alpha).factors)


def delta_factor(alpha, s: complex, omega: int = 0) -> complex:
    """Δ_α(s, ξ) = Π_{π | α} (1 - N(π)^{3-4s} ξ(π)⁴)."""
    s = complex(s)
    out = 1.0 + 0j
    for pi in _alpha_primes(alpha):
        out *= 1 - pi.norm() ** (3 - 4 * s) * xi_eval(pi, omega) ** 4
    return out


def delta_star(alpha, r, s: complex, omega: int = 0) -> complex:
    """Δ*_α(r, s, ξ) = Π_{π | α} (1 + g2(r/π, π) N(π)^{1-2s} ξ(π)²), g2(r/π, π) = 0 when π ∤ r."""
    s = complex(s)
    r = _as_lamfrac(r)
    out = 1.0 + 0j
    for pi in _alpha_primes(alpha):
        if not pi.divides(r.num):
            continue
        g = gauss2_fast(r.div_exact(pi), pi).value
        out *= 1 + g * pi.norm() ** (1 - 2 * s) * xi_eval(pi, omega) ** 2
    return out


def zeta_lambda(s: complex, omega: int = 0, P: int = 10**6) -> tuple[complex, float]:
    """L(s, ξ⁴)(1 - ξ(λ)⁴ 2^{-s}) with L(s, ξ⁴) as an Euler product over N(𝔭) ≤ P.

    ξ⁴ is taken pointwise, so it vanishes at λ whenever ξ does.  Returns
    (value, bound on the omitted Euler factors).
    """
    s = complex(s)
    sigma = s.real
    if sigma <= 1.2:
        raise RegionError("Euler product evaluation needs Re s > 1.2")
    isp = prime_sieve(P)
    logs = []
    xl4 = xi_eval(LAMBDA, omega) ** 4
    logs.append(-np.log1p(-xl4 * 2.0 ** (-s)))
    for p in np.nonzero(isp)[0].tolist():
        if p % 4 == 1:
            from .gaussint import prime_above  # local import keeps the module import light
            pi, _ = prime_above(p)
            for z in (pi, pi.conj()):
                x4 = xi_eval(z, omega) ** 4
                logs.append(-np.log1p(-x4 * p ** (-s)))
        elif p % 4 == 3 and p * p <= P:
            logs.append(-np.log1p(-(float(p) ** (-2 * s))))
    arr = np.array(logs, dtype=complex)
    L = np.exp(complex(math.fsum(arr.real), math.fsum(arr.imag)))
    value = L * (1 - xl4 * 2.0 ** (-s))
    # omitted: at most two prime ideals per norm n > P, each |log factor| ≤ 1.01 n^{-σ}
    S = 2.02 * P ** (1 - sigma) / (sigma - 1)
    return complex(value), abs(value) * math.expm1(S) + 16 * _EPS * abs(value)


def zeta_lambda_series(s: complex, omega: int = 0, cutoff: int = 10**5) -> tuple[complex, float]:
    """Σ_{c ≡ 1 (λ³), N(c) ≤ cutoff} ξ(c)⁴ N(c)^{-s}, with a tail bound."""
    s = complex(s)
    from .gaussint import _congruence_class

    zs = _congruence_class(cutoff, GaussInt(-2, 2))
    theta = np.arctan2(zs[:, 1].astype(float), zs[:, 0].astype(float))
    nrm = (zs[:, 0] ** 2 + zs[:, 1] ** 2).astype(float)
    t = np.exp(-4j * omega * theta) * np.exp(-s * np.log(nrm))
    val = complex(math.fsum(t.real), math.fsum(t.imag))
    return val, _lattice_tail(s.real, cutoff, 8, 2.0) + 4 * _EPS * float(np.sum(np.abs(t)))


# identities ----------------------------------------------------------------------------

def _C_sign(a: GaussInt, b: GaussInt) -> int:
    """(-1)^{C(a,b)} with C(a, b) = (N(a)-1)/4 · (N(b)-1)/4."""
    return -1 if ((a.norm() - 1) // 4) * ((b.norm() - 1) // 4) % 2 else 1


def _chi_minus_one(d: GaussInt) -> complex:
    if d.norm() == 1:
        return 1.0
    return quartic_symbol_fast(GaussInt(-1, 0), d).to_complex()


def _divisors(primes: tuple[GaussInt, ...]):
    for k in range(len(primes) + 1):
        for sub in combinations(primes, k):
            d = ONE
            for p in sub:
                d = d * p
            yield (-1) ** k, d


def _check_variant(variant: str):
    if variant not in ("corrected", "printed"):
        raise ValueError("variant must be 'corrected' or 'printed'")


def _check_lemma_hyp(alpha: GaussInt, beta: GaussInt, r: LamFrac):
    if gcd(alpha, beta).norm() != 1 or gcd(alpha, r.num).norm() != 1:
        raise HypothesisViolated(f"need (alpha, beta·r) = 1 for alpha={alpha}, beta={beta}, r={r}")


def _psi(alpha, r, s, omega, v, cutoff) -> PsiEval:
    return psi_truncated(alpha, r, s, omega, v, cutoff)


def verify_lemma61(part: str, alpha, beta, r, s: complex, omega: int = 0, v=1,
                   cutoff: float = 10**4, variant: str = "corrected") -> IdentityCheck:
    """Evaluate both sides of the chosen reduction identity at one cutoff.

    ``bound`` collects the tail bounds of every ψ involved (weighted by the
    absolute value of its coefficient) plus rounding, so a correct identity
    must give discrepancy ≤ bound.

    Peeling a prime π off c ≡ v (mod 4) leaves a cofactor ≡ πv (mod 4), so the
    reciprocity sign is (-1)^{C(π, πv)} = (-1)^{C(π, v)} χ_π(-1).  With
    ``variant="corrected"`` (default) parts (ii) and (iv) use that sign, which
    removes χ_d(-1) from (ii) and adds it to (iv).  ``variant="printed"``
    keeps (-1)^{C(d, v)} with χ_d(-1) in (ii) only; it disagrees whenever a
    prime of α has norm ≡ 5 mod 8.
    """
    part = str(part).lower().removeprefix("6.1")
    if part not in ("i", "ii", "iii", "iv"):
        raise ValueError("part must be one of i, ii, iii, iv")
    _check_variant(variant)
    fixed = variant == "corrected"
    s = complex(s)
    _check_s(s)
    alpha = _primary(alpha, "alpha")
    beta = _primary(beta, "beta")
    v = _primary(v, "v")
    r = _as_lamfrac(r)
    if not is_squarefree(alpha):
        raise HypothesisViolated(f"alpha = {alpha} must be squarefree")
    _check_lemma_hyp(alpha, beta, r)
    ab = alpha * beta
    if not is_squarefree(ab):
        # ψ_{αβ} only depends on the primes of αβ
        ab_rad = ONE
        for pi, _ in factor(ab).factors:
            ab_rad = ab_rad * pi
        ab = ab_rad
    beta_rad = ONE
    if beta.norm() > 1:
        for pi, _ in factor(beta).factors:
            beta_rad = beta_rad * pi
    primes = _alpha_primes(alpha)

    def both(rho: LamFrac, lhs_factor: complex):
        L = _psi(ab, rho, s, omega, v, cutoff)
        return L.partial * lhs_factor, abs(lhs_factor) * (L.tail_bound + L.err)

    if part in ("i", "iii"):
        rho = _scale(r, alpha ** 3 if part == "i" else alpha)
        fac = delta_factor(alpha, s, omega) if part == "i" else delta_star(alpha, rho, s, omega)
        lhs, lb = both(rho, fac)
        R = _psi(beta_rad, rho, s, omega, v, cutoff)
        rhs, rb = R.partial, R.tail_bound + R.err
        return IdentityCheck(f"6.1{part}", lhs, rhs, abs(lhs - rhs), lb + rb)

    if part == "ii":
        rho = _scale(r, alpha ** 2)
        lhs, bound = both(rho, delta_factor(alpha, s, omega))
        rhs_terms = []
        for mu, d in _divisors(primes):
            rho_d = _scale(r, alpha.exact_div(d) ** 2)
            coef = (mu * _C_sign(d, v) * (1.0 if fixed else _chi_minus_one(d)) * xi_eval(d, omega) ** 3
                    * d.norm() ** (2 - 3 * s) * np.conj(gauss4_fast(rho_d, d).value))
            P = _psi(beta_rad, rho_d, s, omega, d * v, cutoff)
            rhs_terms.append(coef * P.partial)
            bound += abs(coef) * (P.tail_bound + P.err)
    else:  # iv
        lhs, bound = both(r, delta_factor(alpha, s, omega))
        rhs_terms = []
        for mu, d in _divisors(primes):
            coef = (mu * _C_sign(d, v) * (_chi_minus_one(d) if fixed else 1.0)
                    * (xi_eval(d, omega) if omega else 1.0)
                    * d.norm() ** (-s) * gauss4_fast(r, d).value)
            P = _psi(beta_rad, _scale(r, d * d), s, omega, d * v, cutoff)
            rhs_terms.append(coef * P.partial)
            bound += abs(coef) * (P.tail_bound + P.err)
    rhs = complex(sum(rhs_terms))
    bound += 8 * _EPS * (abs(lhs) + sum(abs(t) for t in rhs_terms))
    return IdentityCheck(f"6.1{part}", lhs, rhs, abs(lhs - rhs), bound)


def verify_corollary62(a, b, c, d, r, s: complex, omega: int = 0, v=1,
                       cutoff: float = 10**4, variant: str = "corrected") -> IdentityCheck:
    """ψ_{abcd}(ab²c³r) against the double divisor sum over e | b, f | d.

    The corrected sign, obtained by chaining the corrected parts (ii) with v
    and (iv) with ev, is (-1)^{C(e, v) + C(f, ev)} χ_f(-1); the printed one is
    (-1)^{C(ef, v)} χ_e(-1).
    """
    _check_variant(variant)
    fixed = variant == "corrected"
    s = complex(s)
    _check_s(s)
    a, b, c, d = (_primary(z, n) for z, n in zip((a, b, c, d), "abcd"))
    v = _primary(v, "v")
    r = _as_lamfrac(r)
    abcd = a * b * c * d
    if not is_squarefree(abcd):
        raise HypothesisViolated("abcd must be squarefree")
    if gcd(abcd, r.num).norm() != 1:
        raise HypothesisViolated("(abcd, r) must be 1")
    rho = _scale(r, a * b * b * c ** 3)
    L = _psi(abcd, rho, s, omega, v, cutoff)
    lhs = L.partial
    bound = L.tail_bound + L.err
    pref = 1 / (delta_star(a, _scale(r, a * c), s, omega) * delta_factor(b * c * d, s, omega))
    terms = []
    bprimes = _alpha_primes(b)
    dprimes = _alpha_primes(d)
    for mu_e, e in _divisors(bprimes):
        rho_e = _scale(r, a * (b.exact_div(e)) ** 2 * c ** 3)  # ab²c³r/e²
        ge = np.conj(gauss4_fast(rho_e, e).value)
        for mu_f, f in _divisors(dprimes):
            ef = e * f
            sign = (_C_sign(e, v) * _C_sign(f, e * v) * _chi_minus_one(f) if fixed
                    else _C_sign(ef, v) * _chi_minus_one(e))
            coef = (mu_e * mu_f * sign
                    * (xi_eval(e ** 3 * f, omega) if omega else 1.0)
                    * e.norm() ** 2 * (e ** 3 * f).norm() ** (-s)
                    * ge * gauss4_fast(rho_e, f).value) * pref
            P = _psi(ONE, _scale(rho_e, f * f), s, omega, ef * v, cutoff)
            terms.append(coef * P.partial)
            bound += abs(coef) * (P.tail_bound + P.err)
    rhs = complex(sum(terms))
    bound += 8 * _EPS * (abs(lhs) + sum(abs(t) for t in terms))
    return IdentityCheck("cor6.2", lhs, rhs, abs(lhs - rhs), bound)


# fixed parameter matrix ------------------------------------------------------------------

def _g(re: int, im: int) -> GaussInt:
    return GaussInt(re, im)


# (a, b, c, d, r, omega, v): abcd squarefree primary, coprime to r.  Lemma checks
# use alpha = a·b and beta = c·d.
STANDARD_MATRIX: tuple[tuple, ...] = (
    (_g(-3, 0), ONE, ONE, ONE, LamFrac.of(1), 0, _g(1, 0)),
    (ONE, _g(-1, -2), ONE, ONE, LamFrac.of(1), 0, _g(1, 0)),
    (_g(-1, -2), ONE, ONE, _g(-3, 0), LamFrac.of(1), 0, _g(1, 0)),
    (_g(-3, 0), _g(-1, -2), ONE, ONE, LamFrac.of(1), 0, _g(-1, 2)),
    (_g(3, 2), ONE, _g(-1, -2), ONE, LamFrac.of(_g(0, 1)), 0, _g(1, 0)),
    (ONE, _g(3, -2), ONE, _g(-1, 2), LamFrac.of(1), 1, _g(1, 0)),
    (_g(-1, 2), _g(-3, 0), ONE, ONE, LamFrac(_g(1, 0), 2), 0, _g(1, 0)),
    (_g(1, 4), ONE, ONE, _g(3, 2), LamFrac.of(1), 4, _g(-1, 2)),
    (_g(-3, 0), ONE, _g(3, 2), _g(-1, -2), LamFrac.of(_g(1, 1)), 0, _g(1, 0)),
    (ONE, _g(-7, 0), _g(-1, -2), ONE, LamFrac.of(1), 2, _g(1, 0)),
    (_g(3, -2), ONE, ONE, _g(-7, 0), LamFrac.of(_g(-1, 0)), 3, _g(-1, 2)),
    (_g(1, -4), _g(-1, -2), ONE, ONE, LamFrac.of(1), 0, _g(3, 2)),
    (ONE, _g(-3, 0), ONE, _g(1, 4), LamFrac(_g(1, 0), 1), 0, _g(1, 0)),
    (_g(5, 4), ONE, ONE, ONE, LamFrac.of(_g(3, 2)), 0, _g(1, 0)),
    (_g(-1, -2), _g(3, 2), ONE, ONE, LamFrac.of(_g(-3, 0)), -1, _g(1, 0)),
    (ONE, ONE, _g(-3, 0), _g(-1, -2), LamFrac.of(1), 0, _g(-1, 2)),
    (_g(-7, 0), ONE, ONE, _g(1, 4), LamFrac.of(_g(-1, -2)), 1, _g(1, 0)),
    (_g(-1, 2), _g(1, -4), _g(-3, 0), ONE, LamFrac.of(1), 0, _g(1, 0)),
    (_g(3, 2), ONE, ONE, _g(-1, 2), LamFrac(_g(3, 0), 2), 2, _g(-1, 2)),
    (ONE, _g(-1, -2), _g(-7, 0), _g(3, -2), LamFrac.of(1), 4, _g(1, 0)),
)
