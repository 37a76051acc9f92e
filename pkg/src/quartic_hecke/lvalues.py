"""Central values L(1/2, ν_{q,ω}) from the approximate functional equation.

Sums over ideals are collapsed by norm: a_m = Σ_{N(n)=m} ν(n) is
multiplicative in m, so one sieve over rational primes gives every
coefficient up to the truncation point.  The split primes come from
primary lattice points of prime norm; the symbol values are vectorized.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterator

import numpy as np

from .analytic import kernel_array
from .errors import BudgetExceeded, CorruptCache, NotInFamily, TrivialCharacter
from .gaussint import (
    LAMBDA,
    GaussInt,
    factor,
    is_squarefree,
)
from .hecke import HeckeCharSpec, chi_q_eval, make_spec, xi_eval
from .quartic import symbol_exponents_array

__all__ = [
    "ideal_stream",
    "prime_sieve",
    "norm_coefficients",
    "B_value",
    "B_tilde",
    "A_value",
    "central_value",
    "central_value_of",
    "CentralValueRecord",
    "SumResult",
    "dirichlet_square",
    "dirichlet_square_odd",
    "tail_estimate",
    "LValueCache",
    "truncation_length",
    "IDEAL_BUDGET",
]

# stored coefficients per sum; 10⁸ complex entries is about 1.6 GB
IDEAL_BUDGET = int(os.environ.get("QH_IDEAL_BUDGET", 10**8))
_CHUNK = 4_000_000
_I_POW = np.array([1, 1j, -1, -1j])


# ideals ----------------------------------------------------------------------

def ideal_stream(norm_bound: float) -> Iterator[tuple[GaussInt, int]]:
    """Each nonzero ideal of norm ≤ bound once, as λ^g·n with n primary, by nondecreasing norm."""
    B = int(norm_bound)
    if B < 1:
        return
    r = math.isqrt(B)
    items = []
    for b in range(-r - (r % 2), r + 1, 2):
        rem = B - b * b
        if rem < 1:
            continue
        s = math.isqrt(rem)
        start = -s if (-s) % 2 else -s + 1
        for a in range(start, s + 1, 2):
            if (a + b) % 4 == 1:
                n = GaussInt(a, b)
                nn = a * a + b * b
                g = 0
                while nn << g <= B:
                    items.append((nn << g, g, a, b))
                    g += 1
    items.sort()
    for nrm, g, a, b in items:
        yield (LAMBDA ** g) * GaussInt(a, b), nrm


# coefficient sieve -------------------------------------------------------------

@lru_cache(maxsize=4)
def prime_sieve(n: int) -> np.ndarray:
    """Boolean primality table for 0..n."""
    s = np.ones(n + 1, dtype=bool)
    s[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if s[p]:
            s[p * p::p] = False
    return s


def _split_prime_values(spec: HeckeCharSpec, K: int) -> tuple[np.ndarray, np.ndarray]:
    """(p, ν(π)) for both primary primes π above each split p ≤ K."""
    isprime = prime_sieve(K)
    fac_q = factor(spec.q) if spec.q.norm() > 1 else None
    ps, vals = [], []
    r = math.isqrt(K)
    bs = np.arange(-(r - r % 2), r + 1, 2, dtype=np.int64)
    for b in bs:
        rem = K - int(b) * int(b)
        if rem < 1:
            continue
        s = math.isqrt(rem)
        a = np.arange(-s, s + 1, dtype=np.int64)
        a = a[(a % 2 == 1) & ((a + b) % 4 == 1)]
        nrm = a * a + b * b
        keep = isprime[nrm] & (nrm % 4 == 1)
        a, nrm = a[keep], nrm[keep]
        if not a.size:
            continue
        bb = np.full(a.shape, b)
        if fac_q is not None:
            ex = symbol_exponents_array(a, bb, fac_q)
            chi = np.where(ex < 0, 0, _I_POW[np.where(ex < 0, 0, ex)])
        else:
            chi = np.ones(a.shape, dtype=complex)
        if spec.omega:
            xi = np.exp(-1j * spec.omega * np.arctan2(bb.astype(float), a.astype(float)))
        else:
            xi = 1.0
        ps.append(nrm)
        vals.append(chi * xi)
    if not ps:
        return np.zeros(0, np.int64), np.zeros(0, complex)
    return np.concatenate(ps), np.concatenate(vals)


def _nu_ideal(spec: HeckeCharSpec, gen: GaussInt) -> complex:
    x = xi_eval(gen, spec.omega)
    if x == 0:
        return 0j
    return complex(chi_q_eval(spec.q, gen).to_complex() * x)


def _odd_only(spec: HeckeCharSpec) -> bool:
    """ν(λ) = 0 exactly when λ divides 𝔪_ω; then a_m vanishes for even m."""
    return spec.omega % 4 != 0


def _stored(spec: HeckeCharSpec, K: int) -> int:
    """Array entries needed for coefficients up to K (the budget unit)."""
    return (K + 1) // 2 if _odd_only(spec) else K + 1


def norm_coefficients(spec: HeckeCharSpec, K: int, odd_only: bool = False) -> np.ndarray:
    """a_m = Σ_{N(n)=m} ν_{q,ω}(n) for 0 ≤ m ≤ K (a_0 = 0).

    With ``odd_only`` the array holds a_1, a_3, a_5, ... (entry j is a_{2j+1});
    this is only meaningful when ν(λ) = 0.
    """
    K = int(K)
    if odd_only and _nu_ideal(spec, LAMBDA) != 0:
        raise ValueError("odd-only storage requires ν(λ) = 0")
    if K < 1:
        return np.zeros(1, complex) if not odd_only else np.zeros(0, complex)
    isprime = prime_sieve(K)
    root = math.isqrt(K)
    sp, sv = _split_prime_values(spec, K)
    order = np.argsort(sp, kind="stable")
    sp, sv = sp[order], sv[order]
    p_split, first = np.unique(sp, return_index=True)
    ap_split = np.add.reduceat(sv, first) if sp.size else np.zeros(0, complex)
    small_pairs: dict[int, list[complex]] = {}
    for p, v in zip(sp[sp <= root].tolist(), sv[sp <= root].tolist()):
        small_pairs.setdefault(p, []).append(v)
    nu_lam = _nu_ideal(spec, LAMBDA)
    itype = np.int32 if K < 2**31 - 1 else np.int64
    if odd_only:
        rest = np.arange(1, K + 1, 2, dtype=itype)
        a = np.ones(rest.shape, dtype=complex)
    else:
        rest = np.arange(K + 1, dtype=itype)
        a = np.ones(K + 1, dtype=complex)
        a[0] = 0
    for p in np.nonzero(isprime[: root + 1])[0].tolist():
        if odd_only and p == 2:
            continue
        emax = 1
        while p ** (emax + 1) <= K:
            emax += 1
        f = np.zeros(emax + 1, dtype=complex)
        f[0] = 1
        if p == 2:
            for e in range(1, emax + 1):
                f[e] = nu_lam ** e
        elif p % 4 == 3:
            nu_p = _nu_ideal(spec, GaussInt(-p))
            for e in range(2, emax + 1, 2):
                f[e] = nu_p ** (e // 2)
        else:
            u, w = small_pairs[p]
            for e in range(1, emax + 1):
                f[e] = sum(u ** j * w ** (e - j) for j in range(e + 1))
        step = 2 * p if odd_only else p
        for m0 in range(p, K + 1, step * _CHUNK):
            mult = np.arange(m0, min(K + 1, m0 + step * _CHUNK), step, dtype=itype)
            pos = (mult - 1) // 2 if odd_only else mult
            v = np.ones(mult.shape, dtype=np.int8)
            pe = p
            for _ in range(emax - 1):
                pe *= p
                v[mult % pe == 0] += 1
            a[pos] *= f[v]
            rest[pos] //= (np.asarray(p, dtype=itype) ** v.astype(itype))
    # at most one prime factor > √K remains; inert primes above √K have norm > K
    for s0 in range(0, len(rest), _CHUNK):
        r = rest[s0: s0 + _CHUNK]
        big = np.nonzero(r > 1)[0]
        if not big.size:
            continue
        rb = r[big]
        factor_big = np.zeros(big.shape, dtype=complex)
        if len(p_split):
            at = np.minimum(np.searchsorted(p_split, rb), len(p_split) - 1)
            hit = p_split[at] == rb
            factor_big[hit] = ap_split[at[hit]]
        a[s0 + big] *= factor_big
    return a


# sums ----------------------------------------------------------------------------

def _check(spec: HeckeCharSpec):
    if spec.trivial:
        raise TrivialCharacter("ν_{1,0} is the trivial character")


def _scale(spec: HeckeCharSpec, U: float, which: str) -> float:
    N = spec.kernel_norm()
    return 2 * U * math.sqrt(N) if which == "V" else 4.0 * N


@lru_cache(maxsize=64)
def _sq_tail_table(omega: int, which: str) -> tuple[np.ndarray, np.ndarray]:
    """u-grid and ∫_u^∞ K(t)² dt/t for the kernel K = V_ω or W_ω."""
    us = np.geomspace(1e-3, 1e9, 4801)
    kv = kernel_array(us, omega, which)[0]
    g = kv * kv
    seg = 0.5 * (g[1:] + g[:-1]) * np.diff(np.log(us))
    tails = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    return us, tails


def _rho2_guess(which: str, length: float) -> float:
    # mean |a_m|² is ≈ 1; mean |c_k|² grows like a power of log k (≈ 13 at k = 10⁶)
    return 1.5 if which == "V" else 1.0 + 0.1 * math.log(max(length, 3.0)) ** 2


def tail_estimate(spec: HeckeCharSpec, U: float, length: int, which: str = "V",
                  rho2: float | None = None) -> float:
    """Truncation error estimate 3·sqrt(ρ2·∫_{M/Y}^∞ K(u)² du/u).

    This models the discarded terms as having independent phases with mean
    square ρ2 (measured on the computed range when supplied).  It is an
    estimate, not a bound; the trivial absolute bound is orders of magnitude
    larger at the lengths used here.
    """
    Y = _scale(spec, U, which)
    us, tails = _sq_tail_table(spec.omega, which)
    u0 = length / Y
    i = int(np.searchsorted(us, u0))
    t = float(tails[min(i, len(tails) - 1)]) if i < len(us) else 0.0
    if rho2 is None:
        rho2 = _rho2_guess(which, length)
    return 3.0 * math.sqrt(rho2 * t)


def truncation_length(spec: HeckeCharSpec, U: float, tail: float = 1e-10, which: str = "V") -> int:
    """Smallest length whose tail estimate is below ``tail``."""
    Y = _scale(spec, U, which)
    us, tails = _sq_tail_table(spec.omega, which)
    lengths = np.maximum(us * Y, 1.0)
    rho2 = np.array([_rho2_guess(which, L) for L in lengths])
    est = 3.0 * np.sqrt(rho2 * tails)
    ok = np.nonzero(est < tail)[0]
    if not ok.size:
        raise BudgetExceeded("kernel tail does not reach the tolerance")
    return max(int(math.ceil(lengths[ok[0]])), 16)


def _kernel_values(x: np.ndarray, omega: int, which: str, interpolate: bool):
    if interpolate and x.size > 50000:
        from .analytic import interpolated_kernel
        lo = float(2.0 ** math.floor(math.log2(max(x.min(), 1e-12))))
        hi = float(2.0 ** math.ceil(math.log2(x.max() * 1.0001)))
        return interpolated_kernel(omega, which, lo, hi)(x)
    return kernel_array(x, omega, which)




@dataclass(frozen=True)
class SumResult:
    value: complex
    err: float
    terms: int
    tail: float


def _weighted_sum(coef: np.ndarray, Y: float, omega: int, which: str, interpolate: bool,
                  odd: bool = False):
    """Σ_{m≥1} coef_m m^{-1/2} K(m/Y) with rounding/kernel error and mean |coef|².

    ``odd``: entry j of ``coef`` is the coefficient of m = 2j+1 (even ones are 0).
    """
    first, n = (0, len(coef)) if odd else (1, len(coef))
    total = 0j
    err = 0.0
    sq = 0.0
    eps = np.finfo(float).eps
    for start in range(first, n, _CHUNK):
        stop = min(n, start + _CHUNK)
        j = np.arange(start, stop, dtype=float)
        m = 2 * j + 1 if odd else j
        kv, ke = _kernel_values(m / Y, omega, which, interpolate)
        c = coef[start:stop]
        w = np.abs(c) / np.sqrt(m)
        total += complex(np.sum(c * (kv / np.sqrt(m))))
        err += float(np.sum(w * ke) + 4 * eps * np.sum(w * np.abs(kv)))
        sq += float(np.sum(np.abs(c) ** 2))
    span = 2 * n if odd else n - 1
    return total, err, sq / max(span, 1)


def _B_sum(spec: HeckeCharSpec, U: float, length: int | None, tol: float, budget: int,
           coeffs: np.ndarray | None, interpolate: bool) -> SumResult:
    _check(spec)
    if not U > 0:
        raise ValueError("U must be positive")
    M = int(length) if length is not None else truncation_length(spec, U, tol, "V")
    if _stored(spec, M) > budget:
        raise BudgetExceeded(f"B needs {M} ideal norms > budget {budget}")
    odd = _odd_only(spec)
    need = (M + 1) // 2 if odd else M + 1
    if coeffs is not None and len(coeffs) >= need:
        a = coeffs[:need]
    else:
        a = norm_coefficients(spec, M, odd_only=odd)
    val, err, rho2 = _weighted_sum(a, _scale(spec, U, "V"), spec.omega, "V", interpolate, odd)
    tail = tail_estimate(spec, U, M, "V", max(rho2, 0.5))
    return SumResult(val, err + tail, M, tail)


def B_value(spec: HeckeCharSpec, U: float = 1.0, length: int | None = None, tol: float = 1e-10,
            budget: int | None = None, interpolate: bool = False) -> SumResult:
    """B_{ω,U}(q) = Σ ν(n) N(n)^{-1/2} V_ω(N(n) / (2U√N(q𝔪_ω)))."""
    return _B_sum(spec, U, length, tol, budget or IDEAL_BUDGET, None, interpolate)


def B_tilde(spec: HeckeCharSpec, U: float = 1.0, length: int | None = None, tol: float = 1e-10,
            budget: int | None = None, interpolate: bool = False) -> SumResult:
    """Same sum with conj(ν), summed independently from the conjugated coefficients."""
    _check(spec)
    M = int(length) if length is not None else truncation_length(spec, U, tol, "V")
    budget = budget or IDEAL_BUDGET
    if _stored(spec, M) > budget:
        raise BudgetExceeded(f"B needs {M} ideal norms > budget {budget}")
    a = np.conj(norm_coefficients(spec, M, odd_only=_odd_only(spec)))
    return _B_sum(spec, U, M, tol, budget, a, interpolate)


def dirichlet_square(a: np.ndarray) -> np.ndarray:
    """c_k = Σ_{k1 k2 = k} a_{k1} conj(a_{k2}) for k ≤ len(a)-1 (real since symmetric)."""
    K = len(a) - 1
    c = np.zeros(K + 1, dtype=float)
    for k1 in range(1, math.isqrt(K) + 1):
        if a[k1] == 0:
            continue
        c[k1 * k1] += abs(a[k1]) ** 2
        hi = K // k1
        if hi <= k1:
            continue
        _accumulate(c, k1 * k1 + k1, k1, a[k1], a, k1 + 1, hi + 1)
    return c


def _accumulate(c: np.ndarray, c0: int, cstep: int, x: complex, a: np.ndarray, lo: int, hi: int):
    """c[c0 + cstep·t] += 2 Re(x · conj(a[lo + t])) for lo + t < hi, in bounded chunks."""
    for s0 in range(lo, hi, _CHUNK):
        s1 = min(hi, s0 + _CHUNK)
        blk = a[s0:s1]
        start = c0 + cstep * (s0 - lo)
        c[start: start + cstep * (s1 - s0): cstep] += 2.0 * (x.real * blk.real + x.imag * blk.imag)


def dirichlet_square_odd(a: np.ndarray) -> np.ndarray:
    """As dirichlet_square for odd-compressed storage (entry j ↔ 2j+1), result compressed too."""
    n = len(a)
    K = 2 * n - 1
    c = np.zeros(n, dtype=float)
    for k1 in range(1, math.isqrt(K) + 1, 2):
        x = a[(k1 - 1) // 2]
        if x == 0:
            continue
        c[(k1 * k1 - 1) // 2] += abs(x) ** 2
        hi = K // k1
        if hi % 2 == 0:
            hi -= 1
        if hi <= k1:
            continue
        # k2 = k1+2, ..., hi (odd); k1·k2 steps by 2k1, i.e. by k1 in compressed index
        lo_idx = (k1 * (k1 + 2) - 1) // 2
        _accumulate(c, lo_idx, k1, x, a, (k1 + 1) // 2, (hi - 1) // 2 + 1)
    return c


def A_value(spec: HeckeCharSpec, length: int | None = None, tol: float = 1e-9,
            budget: int | None = None, interpolate: bool = False) -> SumResult:
    """A_ω(q) over the coupled norm k = N(n1 n2) with coefficients c_k = Σ_{k1k2=k} a_{k1} conj(a_{k2})."""
    _check(spec)
    K = int(length) if length is not None else truncation_length(spec, 1.0, tol, "W")
    budget = budget or IDEAL_BUDGET
    if _stored(spec, K) > budget:
        raise BudgetExceeded(f"A needs {K} norms ({_stored(spec, K)} stored) > budget {budget}")
    odd = _odd_only(spec)
    a = norm_coefficients(spec, K, odd_only=odd)
    c = dirichlet_square_odd(a) if odd else dirichlet_square(a)
    del a
    val, err, rho2 = _weighted_sum(c, _scale(spec, 1.0, "W"), spec.omega, "W", interpolate, odd)
    # rounding in the convolution itself: each c_k is a sum of ≲ τ(k) unit-size terms
    err += 8 * np.finfo(float).eps * abs(val) * math.log(K + 1) ** 2
    tail = tail_estimate(spec, 1.0, K, "W", max(rho2, 1.0))
    return SumResult(float(val.real), err + tail, K, tail)


# central values ------------------------------------------------------------------

@dataclass(frozen=True)
class CentralValueRecord:
    q: GaussInt
    omega: int
    U: float
    value: complex
    err: float
    root_number: complex
    terms_used: int


def _require_subfamily(spec: HeckeCharSpec):
    _check(spec)
    if not is_squarefree(spec.q):
        raise NotInFamily(f"{spec.q} is not squarefree")


def central_value(spec: HeckeCharSpec, U: float = 1.0, length: int | None = None,
                  tol: float = 1e-10, budget: int | None = None,
                  interpolate: bool = False) -> CentralValueRecord:
    """L(1/2, ν_{q,ω}) = B_{ω,U}(q) + W·conj(B_{ω,1/U}(q)) for squarefree q ≡ 1 mod λ⁷.

    W = ε(ω)ξ(q)g̃4(q) with the archimedean sign fixed so that the two halves
    balance (``hecke.root_number(..., convention="afe")``).
    """
    if not isinstance(spec, HeckeCharSpec):
        raise TypeError("expected a HeckeCharSpec")
    _require_subfamily(spec)
    from .hecke import root_number_formula
    W, werr = root_number_formula(spec, convention="afe")
    budget = budget or IDEAL_BUDGET
    M1 = int(length) if length is not None else truncation_length(spec, U, tol, "V")
    M2 = int(length) if length is not None else truncation_length(spec, 1.0 / U, tol, "V")
    a = norm_coefficients(spec, max(M1, M2), odd_only=_odd_only(spec)) if _stored(spec, max(M1, M2)) <= budget else None
    if a is None:
        raise BudgetExceeded(f"central value needs {max(M1, M2)} ideal norms > budget {budget}")
    b1 = _B_sum(spec, U, M1, tol, budget, a, interpolate)
    b2 = _B_sum(spec, 1.0 / U, M2, tol, budget, a, interpolate)
    val = b1.value + W * b2.value.conjugate()
    err = b1.err + b2.err + werr * abs(b2.value)
    return CentralValueRecord(spec.q, spec.omega, float(U), complex(val), float(err), complex(W),
                              max(M1, M2))


def central_value_of(q, omega: int, U: float = 1.0, **kw) -> CentralValueRecord:
    return central_value(make_spec(q, omega), U, **kw)


# cache -----------------------------------------------------------------------------

def _record_line(r: CentralValueRecord) -> str:
    body = " ".join([str(r.q.re), str(r.q.im), str(r.omega), repr(float(r.U)),
                     repr(r.value.real), repr(r.value.imag), repr(float(r.err))])
    digest = hashlib.sha256(body.encode()).hexdigest()[:16]
    return f"{body} {digest}"


def _parse_line(line: str, lineno: int) -> tuple[tuple, CentralValueRecord]:
    parts = line.split()
    if len(parts) != 8:
        raise CorruptCache(f"line {lineno}: expected 8 fields, got {len(parts)}")
    body = " ".join(parts[:7])
    if hashlib.sha256(body.encode()).hexdigest()[:16] != parts[7]:
        raise CorruptCache(f"line {lineno}: hash mismatch")
    try:
        qr, qi, om = int(parts[0]), int(parts[1]), int(parts[2])
        U, vr, vi, err = (float(x) for x in parts[3:7])
    except ValueError as exc:
        raise CorruptCache(f"line {lineno}: {exc}") from exc
    rec = CentralValueRecord(GaussInt(qr, qi), om, U, complex(vr, vi), err, complex("nan"), 0)
    return (qr, qi, om, U), rec


class LValueCache:
    """Append-only record file: ``q_re q_im omega U value_re value_im err hash`` per line.

    Every line carries a truncated SHA-256 of its fields; a mismatch raises
    CorruptCache.  On load a deterministic 0.1% sample (at least one record
    when ``verify`` is set) is recomputed and must agree within err.
    """

    FILENAME = "lvalues.txt"

    def __init__(self, directory: str | os.PathLike | None, verify: bool = True,
                 sample_rate: float = 0.001, recompute=None):
        self.path = None if directory is None else Path(directory) / self.FILENAME
        self.records: dict[tuple, CentralValueRecord] = {}
        self.hits = 0
        self.misses = 0
        self._pending: list[str] = []
        self._recompute = recompute or (lambda r: central_value(make_spec(r.q, r.omega), r.U))
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            if self.path.exists():
                self._load(verify, sample_rate)

    def _load(self, verify: bool, rate: float):
        with open(self.path, "r", encoding="ascii") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                key, rec = _parse_line(line, lineno)
                self.records[key] = rec
        if verify and self.records:
            keys = sorted(self.records)
            step = max(1, int(round(1 / rate)))
            for key in keys[::step]:
                rec = self.records[key]
                fresh = self._recompute(rec)
                if abs(fresh.value - rec.value) > rec.err + fresh.err:
                    raise CorruptCache(f"record {key} disagrees with recomputation")

    def get(self, q: GaussInt, omega: int, U: float) -> CentralValueRecord | None:
        rec = self.records.get((q.re, q.im, int(omega), float(U)))
        if rec is None:
            self.misses += 1
        else:
            self.hits += 1
        return rec

    def put(self, rec: CentralValueRecord):
        key = (rec.q.re, rec.q.im, rec.omega, float(rec.U))
        if key in self.records:
            return
        self.records[key] = rec
        if self.path is not None:
            self._pending.append(_record_line(rec))

    def flush(self):
        if self.path is None or not self._pending:
            return
        with open(self.path, "a", encoding="ascii") as fh:
            fh.write("\n".join(self._pending) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        self._pending.clear()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.flush()
