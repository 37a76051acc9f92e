import math

import mpmath
import pytest
from sympy import primerange

from quartic_hecke.errors import BudgetExceeded, EvenPrime, NonPositiveArgument
from quartic_hecke.gaussint import LAMBDA, GaussInt, enumerate_primary
from quartic_hecke.hecke import make_spec, xi_eval
from quartic_hecke.lvalues import central_value
from quartic_hecke.moments import (
    _local, euler_constant, family, family_central_values, kappa_from_lambda,
    large_sieve_spotcheck, mollified_moments, mollifier_build, mollifier_value, mult_fn,
    nonvanishing_census, q1_kappa_form, q1_lambda_form, second_moment_experiment, sieve_MY_RY,
    zeta_K2, zeta_K2_euler,
)


def _divides(d: GaussInt, q: GaussInt) -> bool:
    n = d.norm()
    t = q * d.conj()
    return t.re % n == 0 and t.im % n == 0


def _mu2_brute(q: GaussInt) -> int:
    N = q.norm()
    r = math.isqrt(math.isqrt(N))
    for a in range(0, r + 1):
        for b in range(0, r + 1):
            if a * a + b * b >= 2:
                d = GaussInt(a, b)
                if (a * a + b * b) ** 2 <= N and _divides(d * d, q):
                    return 0
    return 1


# sieve split ------------------------------------------------------------------

def test_sieve_examples():
    assert sieve_MY_RY(GaussInt(-7, -8), 1) == (1, 0)
    assert sieve_MY_RY(GaussInt(-3), 1e6) == (1, 0)
    assert sieve_MY_RY(GaussInt(49), 10) == (1, -1)
    assert sieve_MY_RY(GaussInt(49), 49) == (0, 0)
    with pytest.raises(NonPositiveArgument):
        sieve_MY_RY(GaussInt(49), 0.5)


def test_sieve_identity_exhaustive():
    qs = list(enumerate_primary(1e4))
    qs += [LAMBDA ** 2 * q for q in enumerate_primary(2500)]
    qs += [LAMBDA * q for q in enumerate_primary(5000)]
    bad = []
    for q in qs:
        mu2 = _mu2_brute(q)
        for Y in (1, 10, 100):
            M, R = sieve_MY_RY(q, Y)
            if M + R != mu2:
                bad.append((q, Y))
    assert not bad
    assert len(qs) > 3000


# local factors -------------------------------------------------------------------

def _split_primes(limit):
    for p in primerange(5, limit):
        if p % 4 == 1:
            a = next(a for a in range(1, math.isqrt(p) + 1) if math.isqrt(p - a * a) ** 2 == p - a * a)
            yield p, complex(a, math.isqrt(p - a * a))


def test_r_at_omega_zero():
    for p in (5, 13, 101, 9973):
        assert abs(complex(_local("r", p, 1.0)) - p ** 3 / (p ** 3 + p ** 2 - 1)) < 1e-15
    pi = GaussInt(-1, 2)
    assert abs(mult_fn("r", pi, 0) - 125 / (125 + 25 - 1)) < 1e-15


@pytest.mark.parametrize("omega", [0, 1, 3, 4])
def test_h_independent_of_k(omega):
    pi = GaussInt(3, 2)
    h1 = mult_fn("h", pi, omega)
    for k in (2, 3, 5):
        assert abs(mult_fn("h", pi ** k, omega) - h1) < 1e-15


@pytest.mark.parametrize("omega", [0, 1, 2, 4, 7])
def test_local_factors_near_one(omega):
    for p, z in _split_primes(3000):
        if p < 100:
            continue
        x = (z.conjugate() / abs(z)) ** (4 * omega)
        for name in ("r", "g", "h", "H"):
            assert abs(complex(_local(name, p, x)) - 1) <= 10 / p
        assert abs(complex(_local("G", p, x)) + 1) <= 10 / p


@pytest.mark.parametrize("omega", [0, 2, 5])
def test_G_H_are_convolutions(omega):
    pi = GaussInt(1, 4)
    q = pi.norm()
    x = xi_eval(pi ** 4, omega)
    r = complex(_local("r", q, x))
    g = complex(_local("g", q, x))
    h = complex(_local("h", q, x))
    for k in range(1, 5):
        # f1(𝔭^j) = ξ⁴ʲ r(𝔭^j)/q^j, f2 = µh
        f1 = [1] + [x ** j * r / q ** j for j in range(1, k + 1)]
        f2 = [1, -h] + [0] * k
        G = sum(f1[j] * f2[k - j] for j in range(k + 1))
        assert abs(mult_fn("G", pi ** k, omega) - G) < 1e-14
        g1 = [1] + [g] * k
        m2 = [1, -abs(h) ** 2 / q] + [0] * k
        H = sum(g1[j] * m2[k - j] for j in range(k + 1))
        assert abs(mult_fn("H", pi ** k, omega) - H) < 1e-14


def test_mult_fn_multiplicative_and_errors():
    a, b = GaussInt(-1, 2), GaussInt(3, 2)
    for name in ("r", "g", "h", "G", "H"):
        assert abs(mult_fn(name, a * b, 3) - mult_fn(name, a, 3) * mult_fn(name, b, 3)) < 1e-14
    with pytest.raises(EvenPrime):
        mult_fn("r", LAMBDA * a, 0)
    with pytest.raises(ValueError):
        mult_fn("z", a, 0)


@pytest.mark.parametrize("omega", [0, 1, 4])
def test_per_prime_identity_for_Q(omega):
    for p, z in _split_primes(500):
        x = (z.conjugate() / abs(z)) ** (4 * omega)
        G = complex(_local("G", p, x))
        H = complex(_local("H", p, x)).real
        uC = p / ((p + 1) * (p * p * x.conjugate() - 1))
        uD = -1 / (p * (p + 1)) + 2 * (p / ((p + 1) * (p * p * x - 1))).real
        lhs = (1 - 1 / p) * (1 + abs(G) ** 2 / (p * H)) * abs(1 + uC) ** 2 / (1 + uD)
        assert abs(lhs - 1) < 1e-14


# Euler constants -------------------------------------------------------------------

def test_zeta_K2_closed_form_vs_product():
    v, e = zeta_K2()
    assert abs(v - float(mpmath.zeta(2) * mpmath.catalan)) <= e
    ve, te = zeta_K2_euler(10 ** 6)
    assert abs(v - ve) <= te
    assert abs(v - ve) > 0


@pytest.mark.parametrize("omega", [0, 1, 2, 3, 4])
def test_two_truncations(omega):
    for name in ("C", "D"):
        lo, tlo = euler_constant(name, omega, 10 ** 3)
        hi, thi = euler_constant(name, omega, 10 ** 5)
        assert abs(lo - hi) <= tlo
        assert thi < tlo


@pytest.mark.parametrize("omega", range(-3, 9))
def test_D_real_positive(omega):
    D, _ = euler_constant("D", omega, 10 ** 3)
    assert isinstance(D, float) and D > 0


def _C_by_hand(omega, P):
    """Direct loop over prime ideals, using ξ(λ) = −1 when ω = 4 and 0 when 4 ∤ ω."""
    zk = mpmath.zeta(2) * mpmath.catalan
    xl = {0: 1, 4: -1}.get(omega % 8, 0) if omega % 4 == 0 else 0
    pref = mpmath.pi / (48 * mpmath.sqrt(2) * zk * (mpmath.sqrt(2) - xl))
    prod = mpmath.mpc(1)
    for p in primerange(3, P + 1):
        if p % 4 == 1:
            a = next(a for a in range(1, math.isqrt(p) + 1) if math.isqrt(p - a * a) ** 2 == p - a * a)
            b = math.isqrt(p - a * a)
            gens = [mpmath.mpc(a, b), mpmath.mpc(a, -b)]
            norm = p
        elif p * p <= P:
            gens = [mpmath.mpc(p, 0)]
            norm = p * p
        else:
            continue
        for z in gens:
            x = (mpmath.conj(z) / abs(z)) ** (4 * omega)
            prod *= 1 + norm / ((norm + 1) * (norm ** 2 * mpmath.conj(x) - 1))
    return complex(pref * prod)


@pytest.mark.parametrize("omega", [0, 1, 4])
def test_C_against_hand_expansion(omega):
    C, t = euler_constant("C", omega, 10 ** 3)
    assert abs(C - _C_by_hand(omega, 10 ** 3)) < 1e-13 * abs(C)
    # ω = 4: ξ(λ) = ((1 − i)/√2)⁴ = −1, giving a 1/(√2 + 1) prefactor
    assert abs(xi_eval(LAMBDA, 4) + 1) < 1e-15


# mollifier ----------------------------------------------------------------------------

@pytest.fixture(scope="module")
def moll():
    return mollifier_build(1000, 0)


def test_kappa_at_unit(moll):
    one = GaussInt(1, 0)
    assert abs(moll.kappa[one] - moll.C.conjugate() / (moll.D * math.log(1000))) < 1e-15
    assert all(d.norm() <= 1000 and d.norm() % 2 for d in moll.kappa)
    assert set(moll.kappa) == set(moll.lam)


def test_roundtrip_and_Q1(moll):
    back = kappa_from_lambda(moll)
    scale = max(abs(v) for v in moll.kappa.values())
    assert max(abs(back[d] - moll.kappa[d]) for d in moll.kappa) <= 1e-12 * scale
    a, b = q1_kappa_form(moll), q1_lambda_form(moll)
    assert abs(a - b) <= 1e-10 * abs(a)


@pytest.mark.parametrize("omega", [1, 4])
def test_roundtrip_other_omega(omega):
    spec = mollifier_build(300, omega)
    back = kappa_from_lambda(spec)
    scale = max(abs(v) for v in spec.kappa.values())
    assert max(abs(back[d] - spec.kappa[d]) for d in spec.kappa) <= 1e-12 * scale
    assert abs(q1_kappa_form(spec) - q1_lambda_form(spec)) <= 1e-10 * abs(q1_kappa_form(spec))


def test_mollifier_value_trivial():
    assert mollifier_value(None, GaussInt(-7, -8)) == 1


# family sums ------------------------------------------------------------------------------

def test_family_size_matches_enumeration():
    for X in (100, 1000, 3000):
        direct = [q for q in enumerate_primary(2 * X, "lam7") if q.norm() > X and _mu2_brute(q)]
        assert family(X) == direct


def test_conjugate_halving_matches_direct():
    qs = family(1000)[:8]
    recs = family_central_values(qs, 1, tol=1e-9, interpolate=False)
    for q, rec in zip(qs, recs):
        assert rec.q == q
        direct = central_value(make_spec(q, 1), tol=1e-9)
        assert abs(direct.value - rec.value) <= direct.err + rec.err


def test_second_moment_small_windows():
    rep = second_moment_experiment([1e3, 3e3], 0, mutual_rate=0.2)
    assert len(rep.windows) == 2
    for w in rep.windows:
        assert w.S2 > 0
        assert w.family_size == len(family(w.X))
    assert rep.mutual_checks
    for _, diff, bound in rep.mutual_checks:
        assert diff <= bound
    assert math.isfinite(rep.slope)
    with pytest.raises(BudgetExceeded):
        second_moment_experiment([1e6], 0)


def test_second_moment_omega_one_shape():
    a = second_moment_experiment([1e3, 3e3], 0, mutual_rate=0)
    b = second_moment_experiment([1e3, 3e3], 1, mutual_rate=0)
    assert a.to_dict().keys() == b.to_dict().keys()
    assert [w.X for w in a.windows] == [w.X for w in b.windows]
    assert all(w.S2 >= -w.S2_err for w in b.windows)


def test_workers_do_not_change_totals():
    a = second_moment_experiment([1e3], 0, mutual_rate=0, workers=1)
    b = second_moment_experiment([1e3], 0, mutual_rate=0, workers=2)
    assert a.windows[0].S2 == b.windows[0].S2 and a.windows[0].S1 == b.windows[0].S1


def test_trivial_mollifier_reduces_to_first_moment():
    mm = mollified_moments(1e3, 1, omega=0)
    rep = second_moment_experiment([1e3], 0, mutual_rate=0)
    w = rep.windows[0]
    assert abs(mm.S1 - w.S1) <= mm.S1_err + w.S1_err
    assert abs(mm.S2 - w.S2) <= mm.S2_err + w.S2_err


def test_cauchy_schwarz_small():
    X = 3e3
    mm = mollified_moments(X, X ** 0.3, omega=0)
    assert 0 < mm.cs_ratio <= 1
    assert abs(mm.S1) ** 2 <= mm.S2 * mm.weight


@pytest.mark.slow
def test_cauchy_schwarz_at_1e4():
    X = 1e4
    mm = mollified_moments(X, X ** 0.3, omega=0)
    assert 0 < mm.cs_ratio <= 1


def test_census_small():
    c = nonvanishing_census(1e3, 0)
    assert c.total == len(family(1e3))
    assert c.proportion > 0
    assert c.nonzero + c.undecidable <= c.total


@pytest.mark.slow
@pytest.mark.parametrize("omega", [0, 1])
def test_census_1e4(omega):
    c = nonvanishing_census(1e4, omega)
    assert c.proportion >= 0.5
    assert c.band_fraction < 0.01


# large sieve -------------------------------------------------------------------------------

def test_large_sieve_pm1():
    rep = large_sieve_spotcheck(200, 200, trials=5)
    assert 0 < rep.max_ratio <= 1e3


def test_large_sieve_single():
    A = B = 100
    rep = large_sieve_spotcheck(A, B, trials=8, vectors="single")
    n_a = sum(1 for _ in enumerate_primary(A, squarefree_only=True))
    denom = (A * B) ** 0.01 * (A + B + (A * B) ** (2 / 3))
    assert all(r * denom <= n_a + 1e-9 for r in rep.ratios)


def test_large_sieve_running_max():
    rep = large_sieve_spotcheck(100, 150, trials=12, vectors="gaussian", seed=3)
    rm = rep.running_max()
    assert all(b >= a for a, b in zip(rm, rm[1:]))
    assert rm[-1] == rep.max_ratio
    with pytest.raises(ValueError):
        large_sieve_spotcheck(2000, 10)
