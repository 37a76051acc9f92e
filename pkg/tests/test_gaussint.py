import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quartic_hecke.errors import NormEven, ZeroError
from quartic_hecke.gaussint import (
    I, LAMBDA, ONE, UNITS, GaussInt, enumerate_primary, euler_phi, factor, format_gaussint, gcd,
    is_primary, is_squarefree, moebius, parse_gaussint, prime_above, primary_associate, radical,
)
from quartic_hecke.moments import zeta_K2

gints = st.builds(GaussInt, st.integers(-300, 300), st.integers(-300, 300))
nonzero = gints.filter(lambda z: z.norm() > 0)
odd = nonzero.filter(lambda z: z.norm() % 2 == 1)


def test_norm_and_multiplicativity_examples():
    assert GaussInt(3, 4).norm() == 25
    assert (GaussInt(1, 2) * GaussInt(3, -1)) == GaussInt(5, 5)
    assert LAMBDA.norm() == 2
    assert GaussInt(0, 0).norm() == 0


@given(nonzero, nonzero)
def test_norm_multiplicative(a, b):
    assert (a * b).norm() == a.norm() * b.norm()


@pytest.mark.parametrize("z, unit, prim", [
    (GaussInt(1), GaussInt(1), GaussInt(1)),
    (GaussInt(3), GaussInt(-1), GaussInt(-3)),
    (GaussInt(1, 2), GaussInt(-1), GaussInt(-1, -2)),
])
def test_primary_associate_examples(z, unit, prim):
    assert primary_associate(z) == (unit, prim)


def test_primary_associate_errors():
    with pytest.raises(NormEven):
        primary_associate(GaussInt(2))
    with pytest.raises(ZeroError):
        primary_associate(GaussInt(0))


@given(odd)
def test_exactly_one_primary_associate(z):
    assert sum(is_primary(u * z) for u in UNITS) == 1
    u, p = primary_associate(z)
    assert u * p == z and is_primary(p)
    assert primary_associate(p) == (ONE, p)


def test_factor_examples():
    f = factor(GaussInt(2))
    assert f.unit == GaussInt(0, -1) and f.lambda_exp == 2 and f.factors == ()
    f = factor(GaussInt(-3))
    assert f.unit == ONE and f.lambda_exp == 0 and f.factors == ((GaussInt(-3), 1),)
    f = factor(GaussInt(5))
    assert {p for p, _ in f.factors} == {GaussInt(-1, -2), GaussInt(-1, 2)}
    assert f.value() == GaussInt(5)


def test_factor_zero():
    with pytest.raises(ZeroError):
        factor(GaussInt(0))


@settings(max_examples=200)
@given(nonzero)
def test_factor_reassembles(z):
    f = factor(z)
    assert f.unit in UNITS
    assert f.value() == z
    keys = [(p.norm(), p.re, p.im) for p, _ in f.factors]
    assert keys == sorted(keys)
    for p, e in f.factors:
        assert is_primary(p) and e >= 1
        assert len(factor(p).factors) == 1 and factor(p).factors[0][1] == 1


@settings(max_examples=100)
@given(nonzero, nonzero)
def test_factor_of_product(a, b):
    assert (factor(a) * factor(b)).value() == a * b
    assert factor(a * b).factors == (factor(a) * factor(b)).factors


def test_arithmetic_function_examples():
    assert moebius(ONE) == 1 and euler_phi(ONE) == 1
    assert euler_phi(GaussInt(-3)) == 8
    assert not is_squarefree(GaussInt(49))
    assert radical(GaussInt(49)) == GaussInt(-7)
    assert moebius(GaussInt(49)) == 0
    assert moebius(GaussInt(5)) == 1


@settings(max_examples=100)
@given(odd, odd)
def test_multiplicative_on_coprime(a, b):
    if gcd(a, b).norm() != 1:
        return
    assert moebius(a * b) == moebius(a) * moebius(b)
    assert euler_phi(a * b) == euler_phi(a) * euler_phi(b)
    assert radical(a * b).norm() == radical(a).norm() * radical(b).norm()


@pytest.mark.parametrize("p", [5, 13, 3, 7])
def test_phi_prime_powers(p):
    pi = prime_above(p)[0] if p % 4 == 1 else GaussInt(-p)
    for k in range(1, 4):
        n = pi.norm()
        assert euler_phi(pi ** k) == n ** (k - 1) * (n - 1)


@settings(max_examples=200)
@given(nonzero, nonzero)
def test_gcd_divides_and_is_greatest(a, b):
    g = gcd(a, b)
    assert g.divides(a) and g.divides(b)
    # any common divisor found by factorization divides g
    for p, _ in factor(a).factors:
        if p.divides(b):
            assert p.divides(g)
    if g.norm() % 2 == 1:
        assert is_primary(g)


def test_enumerate_primary_small():
    assert list(enumerate_primary(1, "lam7")) == [ONE]
    fam3 = list(enumerate_primary(50, "lam3", squarefree_only=True))
    assert GaussInt(-7) in fam3 and GaussInt(49) not in fam3
    # -7 - 1 = -8 has norm 64 < N(λ⁷) = 128, so -7 is not ≡ 1 mod λ⁷
    fam7 = list(enumerate_primary(50, "lam7", squarefree_only=True))
    assert fam7 == [ONE]


def test_enumerate_primary_against_brute_force():
    X = 2000
    got = list(enumerate_primary(X, "lam3"))
    r = int(math.isqrt(X))
    brute = [GaussInt(a, b) for a in range(-r, r + 1) for b in range(-r, r + 1)
             if 0 < a * a + b * b <= X and is_primary(GaussInt(a, b))]
    assert sorted(got, key=lambda z: (z.norm(), z.re, z.im)) == got
    assert set(got) == set(brute) and len(got) == len(brute)
    lam7 = GaussInt(8, -8)
    got7 = list(enumerate_primary(X, "lam7"))
    assert set(got7) == {z for z in brute if lam7.divides(z - ONE)}


def test_family_density():
    X = 10 ** 4
    count = sum(1 for _ in enumerate_primary(X, "lam7", squarefree_only=True))
    zk, _ = zeta_K2()
    expected = math.pi / 96 * X / zk
    assert abs(count / expected - 1) < 0.05


@given(gints)
def test_text_roundtrip(z):
    assert parse_gaussint(format_gaussint(z)) == z


@pytest.mark.parametrize("text, z", [
    ("-1-2i", GaussInt(-1, -2)), ("3", GaussInt(3)), ("i", I), ("-i", GaussInt(0, -1)),
    ("2+i", GaussInt(2, 1)), ("0", GaussInt(0)),
])
def test_parse(text, z):
    assert parse_gaussint(text) == z


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_gaussint("1+2j+")
