import cmath
import math

import pytest

from conftest import primaries
from quartic_hecke.errors import NotInFamily, NotPrimitive, TrivialCharacter
from quartic_hecke.gaussint import I, LAMBDA, ONE, UNITS, GaussInt, factor, gcd, is_squarefree
from quartic_hecke.hecke import (
    decompose, epsilon_factor, in_family, m_omega, make_spec, nu_eval, root_number_direct,
    root_number_formula, xi_eval,
)
from quartic_hecke.quartic import quartic_symbol_fast

FAMILY = [q for q in primaries(1000, "lam7", squarefree=True) if q != ONE]


def test_xi_examples():
    for n in (GaussInt(-1, -2), GaussInt(3, 4), LAMBDA, GaussInt(-3)):
        assert xi_eval(n, 0) == 1
    assert xi_eval(LAMBDA, 2) == 0
    v = xi_eval(GaussInt(-1, -2), 4)
    assert abs(v - (complex(-1, 2) / math.sqrt(5)) ** 4) < 1e-12
    assert abs(abs(v) - 1) < 1e-12


def test_xi_unit_invariant():
    for w in range(-5, 9):
        for n in (GaussInt(-1, -2), GaussInt(7, 2), GaussInt(-3)):
            vals = {complex(round(xi_eval(u * n, w).real, 12), round(xi_eval(u * n, w).imag, 12))
                    for u in UNITS}
            assert len(vals) == 1


def test_modulus_table():
    assert m_omega(0) == ONE and m_omega(4) == ONE
    assert m_omega(2).norm() == 4
    assert m_omega(1).norm() == 8 and m_omega(3).norm() == 8


def test_nu_eval_examples():
    spec = make_spec(FAMILY[0], 1)
    assert nu_eval(spec, ONE) == 1
    spec0 = make_spec(FAMILY[3], 0)
    for n in (GaussInt(-1, -2), GaussInt(-3), GaussInt(5, 2)):
        assert nu_eval(spec0, n) == quartic_symbol_fast(n, spec0.q).to_complex()


def test_nu_multiplicative_and_unit_trivial(rng):
    for q in FAMILY[:6]:
        for w in (0, 1, 2, 4):
            spec = make_spec(q, w)
            for _ in range(20):
                a = GaussInt(rng.randint(-40, 40), rng.randint(-40, 40))
                b = GaussInt(rng.randint(-40, 40), rng.randint(-40, 40))
                if a.norm() == 0 or b.norm() == 0:
                    continue
                assert abs(nu_eval(spec, a * b) - nu_eval(spec, a) * nu_eval(spec, b)) < 1e-12
                for u in UNITS:
                    assert abs(nu_eval(spec, u * a) - nu_eval(spec, a)) < 1e-12


def test_nu_zero_off_coprime():
    q = FAMILY[2]
    spec = make_spec(q, 0)
    p = factor(q).factors[0][0]
    assert nu_eval(spec, p * 3) == 0


def test_epsilon_factor():
    assert epsilon_factor(0) == 1
    assert epsilon_factor(1) == -1
    # (2/3) read as the rational Kronecker symbol (-1)^{(9-1)/8}
    assert epsilon_factor(3) == -1
    assert all(epsilon_factor(w) == 1 for w in (2, 4, -2, 6))


def test_root_number_trivial_cases():
    w, _ = root_number_formula(make_spec(ONE, 4))
    assert abs(w - 1) < 1e-15
    with pytest.raises(TrivialCharacter):
        root_number_formula(make_spec(ONE, 0))


def test_not_in_family():
    with pytest.raises(NotInFamily):
        make_spec(GaussInt(-3), 0)


def test_not_primitive():
    q = GaussInt(-3) ** 4
    assert in_family(q)
    with pytest.raises(NotPrimitive):
        root_number_formula(make_spec(q, 0))


def test_decompose_reassembles():
    for q in primaries(3000, "lam7"):
        q1, q2, q3, q4, q5 = decompose(q)
        assert q1 * q2 ** 2 * q3 ** 3 * q4 ** 4 * q5 ** 4 == q
        assert is_squarefree(q1 * q2 * q3 * q4)


def test_root_number_unit_modulus_and_direct(rng):
    qs = rng.sample(FAMILY, 8)
    for q in qs:
        for w in range(5):
            spec = make_spec(q, w)
            f, fe = root_number_formula(spec)
            d, de = root_number_direct(spec)
            assert abs(abs(f) - 1) < 1e-9
            assert abs(f - d) < 1e-8


def test_root_number_unit_modulus_whole_range():
    for q in FAMILY:
        w, _ = root_number_formula(make_spec(q, 1))
        assert abs(abs(w) - 1) < 1e-9


def test_units_trivial_iff_norm_1_mod_16_on_family():
    for q in FAMILY:
        assert (quartic_symbol_fast(I, q).exponent == 0) == (q.norm() % 16 == 1)


def test_cube_part_formula_against_direct():
    # q with q3 ≠ 1 and χ_{q3}(-1) = -1: only the corrected product matches the direct sum
    q = GaussInt(-1, -2) ** 3 * GaussInt(-1, 2)
    q = next(q * c for c in primaries(400) if in_family(q * c) and gcd(q, c).norm() == 1)
    spec = make_spec(q, 0)
    d, de = root_number_direct(spec)
    c, ce = root_number_formula(spec, variant="corrected")
    assert abs(c - d) < 1e-8
    lit, _ = root_number_formula(spec, variant="literal")
    assert abs(lit - d) > 1e-3
