"""Family sweeps over squarefree q ≡ 1 mod λ⁷.

Contents: the sieve split µ² = M_Y + R_Y, the local factors r, g, h, G, H
and the Euler constants C_ω, D_ω, the mollifier tables κ and λ, directly
summed (mollified) moments, and the non-vanishing census.

Moment sums use exact µ² and compute every L-value; no asymptotic formula
enters a reported total.  Predicted main terms are reported alongside.
"""

from __future__ import annotations

import hashlib
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import mpmath
import numpy as np

from .analytic import BUMP, mellin_F
from .errors import BudgetExceeded, EvenPrime, NonPositiveArgument
from .gaussint import GaussInt, enumerate_primary, factor, prime_above
from .hecke import make_spec, nu_eval, xi_eval
from .lvalues import A_value, CentralValueRecord, LValueCache, central_value, prime_sieve
from .quartic import symbol_exponents_array

__all__ = [
    "zeta_K2",
    "zeta_K2_euler",
    "odd_prime_ideals",
    "sieve_MY_RY",
    "mult_fn",
    "euler_constant",
    "MollifierSpec",
    "mollifier_build",
    "q1_kappa_form",
    "q1_lambda_form",
    "kappa_from_lambda",
    "mollifier_value",
    "family",
    "family_central_values",
    "WindowStats",
    "MomentReport",
    "second_moment_experiment",
    "MollifiedMoments",
    "mollified_moments",
    "Census",
    "nonvanishing_census",
    "LargeSieveReport",
    "large_sieve_spotcheck",
    "DESK_BUDGET",
]

DESK_BUDGET = 10**5
_EPS = float(np.finfo(float).eps)
_I_POW = np.array([1, 1j, -1, -1j])


# ζ_{Q(i)}(2) ----------------------------------------------------------------------

def zeta_K2() -> tuple[float, float]:
    """ζ_{Q(i)}(2) = ζ(2)·L(2, χ₋₄) = π²G/6 with G Catalan's constant."""
    with mpmath.workdps(30):
        v = mpmath.pi ** 2 / 6 * mpmath.catalan
    return float(v), 2 * _EPS * float(v)


def zeta_K2_euler(P: int = 10**6) -> tuple[float, float]:
    """Euler product over prime ideals of norm ≤ P, with a bound for the omitted factors."""
    isp = prime_sieve(P)
    p = np.nonzero(isp)[0]
    logs = []
    for pr in p.tolist():
        if pr == 2:
            logs.append(-math.log1p(-0.25))
        elif pr % 4 == 1:
            logs.append(-2 * math.log1p(-1.0 / pr ** 2))
        elif pr * pr <= P:
            logs.append(-math.log1p(-1.0 / pr ** 4))
    # inert primes with p² > P contribute ≤ Σ_{p>√P} p⁻⁴; split ≤ 2 Σ_{n>P} 1/(n²-1)
    tail = 2.0 / P + 1.0 / (3 * (math.sqrt(P) - 1) ** 3)
    val = math.exp(math.fsum(logs))
    return val, val * math.expm1(1.01 * tail)


# prime ideals ----------------------------------------------------------------------

@dataclass(frozen=True)
class PrimeTable:
    """Odd prime ideals with primary generators, sorted by norm."""

    norm: np.ndarray  # N(𝔭)
    re: np.ndarray
    im: np.ndarray

    def xi4(self, omega: int) -> np.ndarray:
        """ξ(𝔭⁴) = (π̄/|π|)^{4ω}; independent of the generator."""
        theta = np.arctan2(self.im.astype(float), self.re.astype(float))
        return np.exp(-4j * omega * theta)


@lru_cache(maxsize=8)
def odd_prime_ideals(P: int) -> PrimeTable:
    P = int(P)
    isp = prime_sieve(max(P, 2))
    rows = []
    for p in np.nonzero(isp)[0].tolist():
        if p % 4 == 1:
            pi, _ = prime_above(p)
            rows.append((p, pi.re, pi.im))
            rows.append((p, pi.re, -pi.im))
        elif p % 4 == 3 and p * p <= P:
            rows.append((p * p, -p, 0))
    rows.sort()
    arr = np.array(rows, dtype=np.int64).reshape(-1, 3)
    return PrimeTable(arr[:, 0], arr[:, 1], arr[:, 2])


# sieve decomposition ---------------------------------------------------------------

def sieve_MY_RY(q, Y: float) -> tuple[int, int]:
    """(M_Y(q), R_Y(q)): Σ µ(𝔩) over 𝔩² | q split at N(𝔩) = Y."""
    if Y < 1:
        raise NonPositiveArgument("Y must be ≥ 1")
    fac = factor(GaussInt.of(q))
    square_primes = [pi.norm() for pi, e in fac.factors if e >= 2]
    if fac.lambda_exp >= 2:
        square_primes.append(2)
    MY = RY = 0
    for k in range(len(square_primes) + 1):
        for sub in combinations(square_primes, k):
            n = math.prod(sub)
            if n <= Y:
                MY += (-1) ** k
            else:
                RY += (-1) ** k
    return MY, RY


# local factors -----------------------------------------------------------------------

def _den(q, x):
    return q ** 5 + 2 * q ** 4 + q ** 3 + (1 - 2 * np.real(x)) * q ** 2 + 1


def _local(name: str, q, x, k: int = 1):
    """Value of the named function at 𝔭^k, where q = N(𝔭) and x = ξ(𝔭⁴)."""
    q = np.asarray(q, dtype=float)
    r = q ** 3 / (q ** 3 + q ** 2 - x)
    g = q ** 2 * (q ** 2 + 1) * (q + 1) / _den(q, x)
    h = q ** 3 * (q ** 2 + q * (x + 1) + 1) / _den(q, x)
    if k == 0:
        return np.ones_like(r)
    if name == "r":
        return r
    if name == "g":
        return g + 0j
    if name == "h":
        return h
    if name == "G":
        # (ξ⁴r/N) * (µh) at 𝔭^k
        prev = r if k > 1 else 1.0
        return x ** k * r / q ** k - h * x ** (k - 1) * prev / q ** (k - 1)
    if name == "H":
        # g * (µ|h|²/N) at 𝔭^k
        prev = g if k > 1 else 1.0
        return g - np.abs(h) ** 2 / q * prev + 0j
    raise ValueError(f"unknown function {name!r}")


def mult_fn(name: str, n, omega: int) -> complex:
    """Multiplicative r, g, h, G or H of an odd ideal (n)."""
    if name not in ("r", "g", "h", "G", "H"):
        raise ValueError(f"unknown function {name!r}")
    fac = factor(GaussInt.of(n))
    if fac.lambda_exp:
        raise EvenPrime("these functions are defined on ideals coprime to 2")
    out = 1.0 + 0j
    for pi, e in fac.factors:
        x = xi_eval(pi ** 4, omega)
        out *= complex(_local(name, pi.norm(), x, e))
    return out


# Euler constants ---------------------------------------------------------------------

def _xi_lambda(omega: int) -> complex:
    return xi_eval(GaussInt(1, 1), omega)


def euler_constant(name: str, omega: int, P: int = 10**5) -> tuple[complex, float]:
    """C_ω or D_ω with the Euler product truncated at N(𝔭) ≤ P; returns (value, tail bound)."""
    if P < 1000:
        raise ValueError("prime norm cutoff must be at least 1000")
    tab = odd_prime_ideals(int(P))
    q = tab.norm.astype(float)
    x = tab.xi4(omega)
    zk, _ = zeta_K2()
    s2 = math.sqrt(2.0)
    xl = _xi_lambda(omega)
    if name == "C":
        u = q / ((q + 1) * (q ** 2 * np.conj(x) - 1))
        pref = math.pi / (48 * s2 * zk * (s2 - xl))
        c = 1.0  # |u| < 1/(q²-1)
    elif name == "D":
        u = -1 / (q * (q + 1)) + 2 * np.real(q / ((q + 1) * (q ** 2 * x - 1)))
        pref = math.pi ** 2 / (768 * zk * abs(s2 - xl) ** 2)
        c = 3.0  # |u| < 3/(q²-1)
    else:
        raise ValueError("name must be 'C' or 'D'")
    logs = np.log1p(u.astype(complex))
    lsum = complex(math.fsum(logs.real), math.fsum(logs.imag))
    value = pref * np.exp(lsum)
    if name == "D":
        value = value.real
    # at most two prime ideals per norm: Σ_{N𝔭>P} |u| ≤ 2c Σ_{n>P} 1/(n²-1) ≤ 2c/P
    S = 2 * c / P
    tail = abs(value) * math.expm1(S / (1 - S))
    rounding = abs(value) * _EPS * (8 + 4 * math.sqrt(len(q)))
    return value, tail + rounding


# mollifier -----------------------------------------------------------------------------

@dataclass
class MollifierSpec:
    M: float
    omega: int
    theta: float
    kappa: dict[GaussInt, complex]
    lam: dict[GaussInt, complex]
    C: complex
    D: float
    primes: dict[GaussInt, tuple[GaussInt, ...]] = field(repr=False, default_factory=dict)
    lambda_bound: float = 0.0  # max N(𝔡)|λ(𝔡)|·log M

    def support(self) -> list[GaussInt]:
        return list(self.kappa)


def _subsets(ps: tuple[GaussInt, ...]):
    for k in range(len(ps) + 1):
        for sub in combinations(ps, k):
            yield k, sub


def _prod(ps) -> GaussInt:
    out = GaussInt(1, 0)
    for p in ps:
        out = out * p
    return out


def _local_at(name: str, pi: GaussInt, omega: int) -> complex:
    return complex(_local(name, pi.norm(), xi_eval(pi ** 4, omega)))


def _mult(name: str, ps, omega: int) -> complex:
    out = 1.0 + 0j
    for p in ps:
        out *= _local_at(name, p, omega)
    return out


def mollifier_build(M: float, omega: int, theta: float = 0.3, P: int = 10**5) -> MollifierSpec:
    """κ from the optimal choice, λ by Möbius inversion; both on squarefree odd ideals of norm ≤ M."""
    if M < 2:
        raise ValueError("mollifier length must be ≥ 2")
    C, _ = euler_constant("C", omega, P)
    D, _ = euler_constant("D", omega, P)
    scale = np.conj(C) / (D * math.log(M))
    kappa: dict[GaussInt, complex] = {}
    primes: dict[GaussInt, tuple[GaussInt, ...]] = {}
    for d in enumerate_primary(M, squarefree_only=True):
        ps = tuple(pi for pi, _ in factor(d).factors)
        primes[d] = ps
        G = _mult("G", ps, omega)
        H = _mult("H", ps, omega).real
        kappa[d] = complex(scale * np.conj(G) / (d.norm() * H))
    lam: dict[GaussInt, complex] = {d: 0j for d in kappa}
    # λ(𝔩) = Σ_𝔞 µ(𝔞)h(𝔞)κ(𝔩𝔞): push each κ(𝔡) down to its divisors
    for d, kd in kappa.items():
        for k, sub in _subsets(primes[d]):
            ell = d.exact_div(_prod(sub))
            lam[ell] += (-1) ** k * _mult("h", sub, omega) * kd
    lb = max((abs(v) * d.norm() for d, v in lam.items()), default=0.0) * math.log(M)
    return MollifierSpec(float(M), int(omega), float(theta), kappa, lam, complex(C), float(D),
                         primes, lb)


def kappa_from_lambda(spec: MollifierSpec) -> dict[GaussInt, complex]:
    """κ(𝔩) = Σ_𝔞 λ(𝔩𝔞) h(𝔞), computed from the λ table alone."""
    out: dict[GaussInt, complex] = {d: 0j for d in spec.lam}
    for d, ld in spec.lam.items():
        for _, sub in _subsets(spec.primes[d]):
            out[d.exact_div(_prod(sub))] += _mult("h", sub, spec.omega) * ld
    return out


def q1_kappa_form(spec: MollifierSpec) -> complex:
    """Σ κ(𝔡) G(𝔡)."""
    terms = [spec.kappa[d] * _mult("G", spec.primes[d], spec.omega) for d in spec.kappa]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def q1_lambda_form(spec: MollifierSpec) -> complex:
    """Σ λ(𝔟) ξ(𝔟⁴) r(𝔟) / N(𝔟)."""
    terms = []
    for b, lb in spec.lam.items():
        ps = spec.primes[b]
        x4 = 1.0 + 0j
        for p in ps:
            x4 *= xi_eval(p ** 4, spec.omega)
        terms.append(lb * x4 * _mult("r", ps, spec.omega) / b.norm())
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def mollifier_value(spec: MollifierSpec | None, q) -> complex:
    """𝓜_ω(q) = Σ λ(𝔟)√N(𝔟) ν_{q,ω}(𝔟); the trivial mollifier (None) is 1."""
    if spec is None:
        return 1.0 + 0j
    hs = make_spec(q, spec.omega)
    total = 0j
    for b, lb in spec.lam.items():
        if lb:
            total += lb * math.sqrt(b.norm()) * nu_eval(hs, b)
    return total


# family scans ------------------------------------------------------------------------------

def family(X: float) -> list[GaussInt]:
    """Squarefree q ≡ 1 mod λ⁷ with X < N(q) ≤ 2X, sorted by (norm, re, im)."""
    return [q for q in enumerate_primary(2 * X, "lam7", squarefree_only=True) if q.norm() > X]


def _cv_task(args) -> tuple[int, int, complex, float, int]:
    qr, qi, omega, U, tol, interpolate = args
    rec = central_value(make_spec(GaussInt(qr, qi), omega), U, tol=tol, interpolate=interpolate)
    return qr, qi, rec.value, rec.err, rec.terms_used


def _workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get("THREADS", "1") or 1)
    return max(1, int(workers))


def family_central_values(qs: list[GaussInt], omega: int, U: float = 1.0, tol: float = 1e-10,
                          interpolate: bool = True, cache: LValueCache | None = None,
                          workers: int | None = None) -> list[CentralValueRecord]:
    """Central values for each q (same order).

    L(1/2, ν_{q̄,ω}) = conj L(1/2, ν_{q,ω}), so only one of each conjugate pair
    is computed.  Results do not depend on ``workers``.
    """
    keyset = {(q.re, q.im) for q in qs}
    todo: list[tuple] = []
    have: dict[tuple[int, int], tuple[complex, float, int]] = {}
    for q in qs:
        if cache is not None:
            rec = cache.get(q, omega, U)
            if rec is not None and rec.err <= 10 * tol:
                have[(q.re, q.im)] = (rec.value, rec.err, rec.terms_used)
                continue
        if q.im < 0 and (q.re, -q.im) in keyset:
            continue
        todo.append((q.re, q.im, omega, U, tol, interpolate))
    todo = [t for t in todo if (t[0], t[1]) not in have]
    n = _workers(workers)
    if n > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            results = list(ex.map(_cv_task, todo, chunksize=4))
    else:
        results = [_cv_task(t) for t in todo]
    for qr, qi, val, err, terms in results:
        have[(qr, qi)] = (val, err, terms)
        if cache is not None:
            cache.put(CentralValueRecord(GaussInt(qr, qi), omega, float(U), val, err, complex("nan"), terms))
    out = []
    for q in qs:
        key = (q.re, q.im)
        if key not in have:
            v, e, t = have[(q.re, -q.im)]
            have[key] = (v.conjugate(), e, t)
            if cache is not None:
                cache.put(CentralValueRecord(q, omega, float(U), v.conjugate(), e, complex("nan"), t))
        v, e, t = have[key]
        out.append(CentralValueRecord(q, omega, float(U), v, e, complex("nan"), t))
    if cache is not None:
        cache.flush()
    return out


def _fsum_c(values) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def _sampled(q: GaussInt, omega: int, rate: float) -> bool:
    h = hashlib.sha256(f"{q.re} {q.im} {omega}".encode()).digest()
    return int.from_bytes(h[:8], "big") < rate * 2 ** 64


@dataclass
class WindowStats:
    X: float
    family_size: int
    S1: complex
    S1_err: float
    S2: float
    S2_err: float
    weight: float  # Σ µ² F(N(q)/X)
    ratio: float  # S2 / (2 D_ω F̌(0) X)
    nonzero: int
    undecidable: int


@dataclass
class MomentReport:
    omega: int
    bump: str
    windows: list[WindowStats]
    slope: float
    intercept: float
    C: complex
    D: float
    F0: float
    tol: float
    mutual_checks: list[tuple[str, float, float]] = field(default_factory=list)
    mutual_skipped: int = 0
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "omega": self.omega,
            "bump": self.bump,
            "windows": [
                {"X": w.X, "family_size": w.family_size, "S1": [w.S1.real, w.S1.imag],
                 "S1_err": w.S1_err, "S2": w.S2, "S2_err": w.S2_err, "weight": w.weight,
                 "ratio": w.ratio, "nonzero": w.nonzero, "undecidable": w.undecidable}
                for w in self.windows
            ],
            "fit": {"slope": self.slope, "intercept": self.intercept},
            "predicted": {"C": [self.C.real, self.C.imag], "D": self.D, "F0": self.F0},
            "tol": self.tol,
            "mutual_checks": [list(t) for t in self.mutual_checks],
            "mutual_skipped": self.mutual_skipped,
            "notes": list(self.notes),
        }


def _threshold(err: float, threshold: float) -> float:
    return max(threshold, 3 * err)


def _window(X: float, omega: int, tol: float, cache, workers, D: float, F0: float,
            threshold: float, interpolate: bool) -> tuple[WindowStats, list[CentralValueRecord]]:
    qs = family(X)
    recs = family_central_values(qs, omega, tol=tol, interpolate=interpolate, cache=cache,
                                 workers=workers)
    w = BUMP(np.array([r.q.norm() / X for r in recs], dtype=float)) if recs else np.zeros(0)
    s1 = _fsum_c(wi * r.value for wi, r in zip(w, recs))
    s1e = math.fsum(wi * r.err for wi, r in zip(w, recs))
    s2 = math.fsum(wi * abs(r.value) ** 2 for wi, r in zip(w, recs))
    s2e = math.fsum(wi * (2 * abs(r.value) * r.err + r.err ** 2) for wi, r in zip(w, recs))
    nz = sum(abs(r.value) > _threshold(r.err, threshold) for r in recs)
    und = sum(abs(r.value) <= 3 * r.err for r in recs)
    ratio = s2 / (2 * D * F0 * X)
    stats = WindowStats(float(X), len(recs), s1, s1e, s2, s2e, math.fsum(w), ratio, nz, und)
    return stats, recs


def second_moment_experiment(X_list, omega: int = 0, bump: str = "bump4", tol: float = 1e-8,
                             cache: LValueCache | None = None, workers: int | None = None,
                             budget: float = DESK_BUDGET, mutual_rate: float = 0.01,
                             threshold: float = 1e-6, interpolate: bool = True) -> MomentReport:
    """𝒮(µ²|L(1/2, ν_{q,ω})|²; F) by direct summation over each window X < N(q) ≤ 2X.

    The ratio S2/(2D_ωF̌(0)X) is fitted against log X by least squares.  A
    deterministic ``mutual_rate`` fraction of q also gets 2A_ω(q) computed
    independently and compared with |L|².
    """
    if bump != BUMP.name:
        raise ValueError(f"unknown bump {bump!r}; available: {BUMP.name}")
    X_list = sorted(float(x) for x in X_list)
    if not X_list or X_list[-1] > budget:
        raise BudgetExceeded(f"largest window {X_list[-1] if X_list else None} exceeds desk budget {budget}")
    D, _ = euler_constant("D", omega)
    C, _ = euler_constant("C", omega)
    F0 = mellin_F(0)[0].real
    windows, checks, skipped = [], [], 0
    for X in X_list:
        stats, recs = _window(X, omega, tol, cache, workers, D, F0, threshold, interpolate)
        windows.append(stats)
        for r in recs:
            if mutual_rate > 0 and _sampled(r.q, omega, mutual_rate):
                try:
                    a = A_value(make_spec(r.q, omega), tol=tol, interpolate=True)
                except BudgetExceeded:
                    skipped += 1
                    continue
                checks.append((str(r.q), abs(abs(r.value) ** 2 - 2 * a.value),
                               2 * abs(r.value) * r.err + 2 * a.err))
    if len(windows) >= 2:
        slope, intercept = np.polyfit(np.log([w.X for w in windows]), [w.ratio for w in windows], 1)
    else:
        slope = intercept = float("nan")
    notes = ["S2 uses exact µ² and directly computed central values; the fit is a desk-scale trend check"]
    return MomentReport(int(omega), bump, windows, float(slope), float(intercept), complex(C),
                        float(D), float(F0), float(tol), checks, skipped, notes)


@dataclass
class MollifiedMoments:
    X: float
    M: float
    Y: float
    U: float
    omega: int
    theta: float
    S1: complex
    S1_err: float
    S2: float
    S2_err: float
    weight: float
    cs_ratio: float  # |S1|² / (S2 · Σµ²F)
    predicted_S1: float
    predicted_S2: float
    family_size: int
    warnings: list[str] = field(default_factory=list)


def mollified_moments(X: float, M: float, Y: float = 1.0, U: float = 1.0, omega: int = 0,
                      theta: float = 0.3, tol: float = 1e-8, cache: LValueCache | None = None,
                      workers: int | None = None, budget: float = DESK_BUDGET,
                      interpolate: bool = True) -> MollifiedMoments:
    """𝒮(L·𝓜; F) and 𝒮(|L·𝓜|²; F) by direct summation; M < 2 means 𝓜 ≡ 1."""
    if X > budget:
        raise BudgetExceeded(f"X = {X} exceeds desk budget {budget}")
    notes = []
    if (1 + abs(omega)) * M * Y ** 2 * U > X ** 0.5:
        notes.append("parameters violate (1+|ω|)·M·Y²·U ≤ X^(1/2); asymptotic regime not reached")
        warnings.warn(notes[-1], RuntimeWarning, stacklevel=2)
    spec = mollifier_build(M, omega, theta) if M >= 2 else None
    qs = family(X)
    recs = family_central_values(qs, omega, U, tol=tol, interpolate=interpolate, cache=cache,
                                 workers=workers)
    w = BUMP(np.array([q.norm() / X for q in qs], dtype=float)) if qs else np.zeros(0)
    mol = [mollifier_value(spec, q) for q in qs]
    s1 = _fsum_c(wi * r.value * m for wi, r, m in zip(w, recs, mol))
    s1e = math.fsum(wi * r.err * abs(m) for wi, r, m in zip(w, recs, mol))
    s2 = math.fsum(wi * abs(r.value * m) ** 2 for wi, r, m in zip(w, recs, mol))
    s2e = math.fsum(wi * abs(m) ** 2 * (2 * abs(r.value) * r.err + r.err ** 2)
                    for wi, r, m in zip(w, recs, mol))
    weight = math.fsum(w)
    zk, _ = zeta_K2()
    F0 = mellin_F(0)[0].real
    p1 = math.pi / (48 * zk) * F0 * X
    p2 = math.pi / (24 * zk) * (1 + 1 / theta ** 3) * F0 * X
    cs = abs(s1) ** 2 / (s2 * weight) if s2 > 0 and weight > 0 else float("nan")
    return MollifiedMoments(float(X), float(M), float(Y), float(U), int(omega), float(theta), s1, s1e,
                            s2, s2e, weight, cs, p1, p2, len(qs), notes)


# census ----------------------------------------------------------------------------------------

@dataclass
class Census:
    X: float
    omega: int
    threshold: float
    total: int
    nonzero: int
    undecidable: int
    records: list[CentralValueRecord] = field(repr=False, default_factory=list)

    @property
    def proportion(self) -> float:
        return self.nonzero / self.total if self.total else float("nan")

    @property
    def band_fraction(self) -> float:
        return self.undecidable / self.total if self.total else float("nan")


def nonvanishing_census(X: float, omega: int = 0, threshold: float = 1e-6, tol: float = 1e-10,
                        cache: LValueCache | None = None, workers: int | None = None,
                        interpolate: bool = True) -> Census:
    """Count X < N(q) ≤ 2X with |L(1/2, ν_{q,ω})| > max(threshold, 3·err); |L| ≤ 3·err is undecidable."""
    qs = family(X)
    recs = family_central_values(qs, omega, tol=tol, interpolate=interpolate, cache=cache,
                                 workers=workers)
    nz = sum(abs(r.value) > _threshold(r.err, threshold) for r in recs)
    und = sum(abs(r.value) <= 3 * r.err for r in recs)
    return Census(float(X), int(omega), float(threshold), len(recs), nz, und, recs)


# large sieve -----------------------------------------------------------------------------------

@dataclass
class LargeSieveReport:
    A: float
    B: float
    eps: float
    ratios: list[float]

    @property
    def max_ratio(self) -> float:
        return max(self.ratios) if self.ratios else 0.0

    def running_max(self) -> list[float]:
        return list(np.maximum.accumulate(self.ratios)) if self.ratios else []


def _symbol_matrix(A: float, B: float) -> np.ndarray:
    """Rows a, columns b (squarefree primary); entries χ_a(b), zero when (a, b) ≠ 1."""
    a_list = list(enumerate_primary(A, squarefree_only=True))
    b_arr = np.array([(b.re, b.im) for b in enumerate_primary(B, squarefree_only=True)], dtype=np.int64)
    out = np.zeros((len(a_list), len(b_arr)), dtype=complex)
    for i, a in enumerate(a_list):
        if a.norm() == 1:
            out[i] = 1.0
            continue
        e = symbol_exponents_array(b_arr[:, 0], b_arr[:, 1], factor(a))
        out[i] = np.where(e < 0, 0, _I_POW[np.maximum(e, 0) % 4])
    return out


def large_sieve_spotcheck(A: float, B: float, trials: int = 10, eps: float = 0.01,
                          seed: int = 0, vectors: str = "pm1") -> LargeSieveReport:
    """LHS / ((AB)^ε (A + B + (AB)^{2/3}) ‖λ‖²) for random coefficient vectors."""
    if A > 1000 or B > 1000:
        raise ValueError("A and B are limited to 1000")
    mat = _symbol_matrix(A, B)
    rng = np.random.default_rng(seed)
    denom_scale = (A * B) ** eps * (A + B + (A * B) ** (2 / 3))
    ratios = []
    for _ in range(trials):
        if vectors == "pm1":
            lam = rng.choice([-1.0, 1.0], size=mat.shape[1]).astype(complex)
        elif vectors == "gaussian":
            lam = rng.standard_normal(mat.shape[1]) + 1j * rng.standard_normal(mat.shape[1])
        elif vectors == "single":
            lam = np.zeros(mat.shape[1], dtype=complex)
            lam[rng.integers(mat.shape[1])] = 1.0
        else:
            raise ValueError(f"unknown vector kind {vectors!r}")
        lhs = float(np.sum(np.abs(mat @ lam) ** 2))
        ratios.append(lhs / (denom_scale * float(np.sum(np.abs(lam) ** 2))))
    return LargeSieveReport(float(A), float(B), float(eps), ratios)
