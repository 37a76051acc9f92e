import math

import pytest

from quartic_hecke.errors import HypothesisViolated, NotPrimary, NotSquarefree, RegionError
from quartic_hecke.gauss_sums import LamFrac, gauss4_fast
from quartic_hecke.gaussint import ONE, GaussInt, enumerate_primary, factor
from quartic_hecke.metaplectic import (
    STANDARD_MATRIX, delta_factor, delta_star, psi_tail_bound, psi_truncated, verify_corollary62,
    verify_lemma61, zeta_lambda, zeta_lambda_series,
)
from quartic_hecke.metaplectic import _C_sign, _chi_minus_one

CUT = 3000


def test_alpha_absorbing_everything_leaves_c_equal_one():
    alpha = ONE
    for p in enumerate_primary(CUT):
        fac = factor(p).factors
        if len(fac) == 1 and fac[0][1] == 1:
            alpha = alpha * p
    ev = psi_truncated(alpha, 1, 2, cutoff=CUT)
    assert ev.terms == 1
    assert abs(ev.partial - 1) < 1e-15


@pytest.mark.parametrize("s", [2, 2.5, 2 + 1j])
def test_two_truncations(s):
    lo = psi_truncated(1, 1, s, cutoff=10 ** 4)
    hi = psi_truncated(1, 1, s, cutoff=4 * 10 ** 4)
    assert abs(lo.partial - hi.partial) <= lo.tail_bound + lo.err + hi.err


def test_doubling_stays_inside_bound():
    prev = psi_truncated(GaussInt(-3), LamFrac.of(GaussInt(0, 1)), 1.8, omega=1, cutoff=1000)
    for cut in (2000, 4000, 8000):
        cur = psi_truncated(GaussInt(-3), LamFrac.of(GaussInt(0, 1)), 1.8, omega=1, cutoff=cut)
        assert abs(cur.partial - prev.partial) <= prev.tail_bound + prev.err + cur.err
        assert cur.tail_bound < prev.tail_bound
        prev = cur


def test_omega_changes_value():
    a = psi_truncated(1, 1, 2, omega=0, cutoff=CUT)
    b = psi_truncated(1, 1, 2, omega=4, cutoff=CUT)
    assert abs(a.partial - b.partial) > 1e-3


def test_tail_bound_shape():
    assert psi_tail_bound(1, 2, 1e4) > psi_tail_bound(1, 2, 4e4)
    assert psi_tail_bound(GaussInt(-3), 2, 1e4) == pytest.approx(3 * psi_tail_bound(1, 2, 1e4))
    assert math.isinf(psi_tail_bound(1, 1.5, 1e4))


def test_psi_errors():
    with pytest.raises(RegionError):
        psi_truncated(1, 1, 1.55)
    with pytest.raises(NotSquarefree):
        psi_truncated(GaussInt(9), 1, 2)
    with pytest.raises(NotPrimary):
        psi_truncated(GaussInt(3), 1, 2)
    with pytest.raises(ValueError):
        psi_truncated(1, 0, 2)


# finite factors -------------------------------------------------------------------------

def test_delta_examples():
    assert delta_factor(1, 2) == 1
    assert delta_star(1, 5, 2) == 1
    assert abs(delta_factor(-3, 2, 0) - (1 - 9.0 ** -5)) < 1e-16
    # π ∤ r
    assert delta_star(GaussInt(-1, 2), GaussInt(-3), 2) == 1
    assert delta_star(GaussInt(-3), GaussInt(-3), 2) != 1
    with pytest.raises(NotSquarefree):
        delta_factor(GaussInt(-3) * GaussInt(-3), 2)


def test_delta_factor_omega():
    pi = GaussInt(-1, 2)
    z = complex(-1, 2) / abs(complex(-1, 2))
    want = 1 - 5.0 ** (3 - 8) * (z.conjugate() ** 3) ** 4
    assert abs(delta_factor(pi, 2, 3) - want) < 1e-15


@pytest.mark.parametrize("omega", [0, 4, 8])
def test_zeta_lambda_closed_form_vs_series(omega):
    a, ea = zeta_lambda(2, omega)
    b, eb = zeta_lambda_series(2, omega, 10 ** 5)
    assert abs(a - b) <= ea + eb
    with pytest.raises(RegionError):
        zeta_lambda(1.1)


def test_zeta_lambda_omega_not_multiple_of_four():
    a, ea = zeta_lambda(2.2, 2)
    b, eb = zeta_lambda_series(2.2, 2, 10 ** 5)
    assert abs(a - b) <= ea + eb


# identities -----------------------------------------------------------------------------

@pytest.mark.parametrize("part", ["i", "ii", "iii", "iv"])
def test_alpha_one_is_trivial(part):
    ck = verify_lemma61(part, 1, GaussInt(-3), 1, 2, cutoff=CUT)
    assert ck.passed
    assert ck.discrepancy <= 1e-13


def test_part_i_example():
    ck = verify_lemma61("i", GaussInt(-3), 1, 1, 2, 0, 1, cutoff=10 ** 4)
    assert ck.passed


def test_part_iv_example():
    ck = verify_lemma61("iv", GaussInt(-1, -2), GaussInt(-3), GaussInt(0, 1), 2, cutoff=10 ** 4)
    assert ck.passed


def test_corollary_trivial():
    ck = verify_corollary62(1, 1, 1, 1, 1, 2, cutoff=CUT)
    direct = psi_truncated(1, 1, 2, cutoff=CUT)
    assert ck.lhs == direct.partial
    assert abs(ck.rhs - direct.partial) < 1e-14


def test_corollary_matches_part_iii():
    a = GaussInt(-3)
    cor = verify_corollary62(a, 1, 1, 1, 1, 2, cutoff=CUT)
    lem = verify_lemma61("iii", a, 1, 1, 2, cutoff=CUT)
    ds = delta_star(a, a, 2)
    assert cor.passed and lem.passed
    assert abs(cor.lhs - lem.lhs / ds) < 1e-14
    assert abs(cor.rhs - lem.rhs / ds) < 1e-14


def test_corollary_e_sum():
    ck = verify_corollary62(1, GaussInt(-1, -2), 1, 1, 1, 2, cutoff=CUT)
    assert ck.passed


@pytest.mark.parametrize("row", range(len(STANDARD_MATRIX)))
def test_matrix_row_at_s2(row):
    a, b, c, d, r, w, v = STANDARD_MATRIX[row]
    for part in ("i", "ii", "iii", "iv"):
        assert verify_lemma61(part, a * b, c * d, r, 2, w, v, CUT).passed, part
    assert verify_corollary62(a, b, c, d, r, 2, w, v, CUT).passed


@pytest.mark.parametrize("row", [3, 10, 11])
def test_printed_sign_fails(row):
    a, b, c, d, r, w, v = STANDARD_MATRIX[row]
    printed = verify_lemma61("iv", a * b, c * d, r, 2, w, v, CUT, variant="printed")
    fixed = verify_lemma61("iv", a * b, c * d, r, 2, w, v, CUT)
    assert not printed.passed
    assert fixed.passed


@pytest.mark.parametrize("pi", [GaussInt(-1, 2), GaussInt(-1, -2), GaussInt(3, 2), GaussInt(-3),
                                GaussInt(1, 4)])
@pytest.mark.parametrize("v", [ONE, GaussInt(-1, 2)])
def test_single_prime_split_exact(pi, v):
    """Terms with π | c, c ≡ v (4), re-indexed as c = πc' with c' ≡ πv (4): no tails involved."""
    s, X = 2.3, 2000
    r = LamFrac.of(GaussInt(0, 1))
    lhs = psi_truncated(1, r, s, v=v, cutoff=X).partial - psi_truncated(pi, r, s, v=v, cutoff=X).partial
    inner = psi_truncated(pi, LamFrac(r.num * pi * pi, r.j).reduced(), s, v=pi * v,
                          cutoff=X // pi.norm()).partial
    g = gauss4_fast(r, pi).value * pi.norm() ** -s
    sign = _C_sign(pi, v)
    assert abs(lhs - sign * _chi_minus_one(pi) * g * inner) < 1e-15
    if pi.norm() % 8 == 5:
        assert abs(lhs - sign * g * inner) > 1e-4


def test_hypotheses_enforced():
    with pytest.raises(HypothesisViolated):
        verify_lemma61("i", GaussInt(-3), GaussInt(-3), 1, 2, cutoff=CUT)
    with pytest.raises(HypothesisViolated):
        verify_lemma61("ii", GaussInt(-3), 1, GaussInt(-3), 2, cutoff=CUT)
    with pytest.raises(HypothesisViolated):
        verify_corollary62(GaussInt(-3), GaussInt(-3), 1, 1, 1, 2, cutoff=CUT)
    with pytest.raises(RegionError):
        verify_lemma61("i", GaussInt(-3), 1, 1, 1.55)
    with pytest.raises(ValueError):
        verify_lemma61("v", GaussInt(-3), 1, 1, 2)
    with pytest.raises(ValueError):
        verify_lemma61("i", GaussInt(-3), 1, 1, 2, variant="other")
