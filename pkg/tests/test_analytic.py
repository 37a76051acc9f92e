import math

import mpmath
import numpy as np
import pytest
from scipy import integrate, special

from quartic_hecke.analytic import (
    BUMP, V_omega, V_s_omega, W_omega, bessel_j0, hankel_radial, interpolated_kernel,
    kernel_array, kernel_full_line, mellin_F, poisson_verify,
)
from quartic_hecke.errors import NonPositiveArgument
from quartic_hecke.gaussint import GaussInt


def _mp_kernel(y, omega, power, s=0.5, c=2):
    """Contour integral on Re w = c by mpmath quadrature (independent oracle)."""
    a = mpmath.mpf(s) + abs(omega) / mpmath.mpf(2)

    def f(t):
        w = mpmath.mpc(c, t)
        g = (mpmath.gamma(a + w) / mpmath.gamma(a)) ** power
        return (2 * mpmath.pi) ** (-power * w) * mpmath.mpf(y) ** (-w) * mpmath.exp(w * w) * g / w

    with mpmath.workdps(30):
        val = mpmath.quad(f, [-mpmath.inf, -10, 0, 10, mpmath.inf]) / (2 * mpmath.pi)
    return complex(val)


@pytest.mark.parametrize("y, omega, which", [(0.3, 0, "V"), (1.0, 2, "V"), (5.0, 1, "W"), (0.05, 4, "W"),
                                             (40.0, 3, "V")])
def test_kernels_against_mpmath(y, omega, which):
    k = (V_omega if which == "V" else W_omega)(y, omega)
    ref = _mp_kernel(y, omega, 1 if which == "V" else 2)
    assert abs(ref.imag) < 1e-12
    assert abs(k.value - ref.real) <= max(k.err, 1e-14) * 10


def test_small_argument_residue_expansion():
    # moving the contour past the pole at w = -1/2 (simple for V, double for W)
    g = 0.5772156649015329
    for y in (1e-6, 1e-8, 1e-10):
        v = 1 - 2 * math.exp(0.25) * math.sqrt(2 * y)
        w = 1 - 4 * math.exp(0.25) * math.sqrt(y) * (1 - 2 * math.log(2 * math.pi) - math.log(y) - 2 * g)
        assert abs(V_omega(y, 0).value - v) < 100 * y ** 1.5
        assert abs(W_omega(y, 0).value - w) < 50 * y ** 1.5 * abs(math.log(y)) ** 2


def test_small_argument_limits():
    assert abs(V_omega(1e-10, 0).value - 1) < 1e-4
    assert abs(W_omega(1e-14, 0).value - 1) < 1e-4


def test_decay():
    y = np.geomspace(1.0, 1e4, 200)
    v, _ = kernel_array(y, 0, "V")
    scaled = np.abs(v) * (1 + y) ** 3
    assert scaled.max() < 10
    peak = int(np.argmax(scaled))
    assert np.all(np.diff(scaled[peak:]) < 0)
    assert scaled[-1] < 0.05 * scaled.max()


def test_realness_full_line():
    z = kernel_full_line(1.0, 2, "V")
    assert abs(z.imag) < 1e-10
    assert abs(z.real - V_omega(1.0, 2).value) < 1e-10
    for y in (0.1, 1.0, 10.0):
        assert abs(kernel_full_line(y, 3, "W").imag) < 1e-10


def test_step_halving():
    for y, w, which in ((0.5, 0, "V"), (2.0, 4, "W"), (10.0, 1, "V")):
        k = (V_omega if which == "V" else W_omega)(y, w)
        a = kernel_full_line(y, w, which, step_div=16).real
        b = kernel_full_line(y, w, which, step_div=32).real
        assert abs(a - b) < 10 * k.err + 1e-15
        assert abs(k.value - b) < 10 * k.err + 1e-15


def test_W_growth_with_omega():
    ys = [0.5, 2.0, 8.0, 32.0]
    ratios = [W_omega(y, 4).value / W_omega(y, 0).value for y in ys]
    assert all(r2 > r1 for r1, r2 in zip(ratios, ratios[1:]))


def test_kernel_bounded_by_one():
    y = np.geomspace(1e-5, 1e3, 60)
    for w in (0, 1, 4):
        v, e = kernel_array(y, w, "V")
        assert np.all(np.abs(v) <= 1 + e)


def test_nonpositive_argument():
    with pytest.raises(NonPositiveArgument):
        V_omega(0.0, 0)
    with pytest.raises(NonPositiveArgument):
        W_omega(-1.0, 2)


def test_interpolated_kernel_error_is_a_bound():
    ik = interpolated_kernel(1, "V", 1e-6, 1e3)
    y = np.geomspace(1e-6, 1e3, 777)
    v, e = ik(y)
    exact, ee = kernel_array(y, 1, "V")
    assert np.all(np.abs(v - exact) <= e + ee)


def test_V_s_general():
    ref = _mp_kernel(1.5, 2, 1, s=0.75)
    assert abs(V_s_omega(1.5, 0.75, 2).value - ref.real) < 1e-12


def test_bump():
    t = np.linspace(0, 3, 301)
    f = BUMP(t)
    assert np.all((f >= 0) & (f <= 1))
    assert np.all(f[(t <= 1) | (t >= 2)] == 0)
    assert abs(BUMP(1.5) - 1) < 1e-15


def test_mellin():
    f0, e0 = mellin_F(0)
    assert f0.real > 0 and e0 <= 1e-12
    ref, _ = integrate.quad(lambda t: BUMP(t), 1, 2, epsabs=1e-14, limit=200)
    assert abs(f0.real - ref) < 1e-12
    for t in (1.0, 5.0, 20.0):
        assert abs(mellin_F(1j * t)[0]) <= f0.real
    # Taylor step with a separately integrated derivative
    w, h = 0.3 + 0.4j, 1e-3
    d_re, _ = integrate.quad(lambda t: BUMP(t) * (t ** w * math.log(t)).real, 1, 2, epsabs=1e-14, limit=200)
    d_im, _ = integrate.quad(lambda t: BUMP(t) * (t ** w * math.log(t)).imag, 1, 2, epsabs=1e-14, limit=200)
    step = mellin_F(w + h)[0] - mellin_F(w)[0] - h * complex(d_re, d_im)
    assert abs(step) < 1e-6


def test_bessel():
    assert bessel_j0(0.0) == 1.0
    assert abs(bessel_j0(2.404825557695773)) < 1e-10
    ref, _ = integrate.quad(lambda th: math.cos(math.cos(th)), 0, 2 * math.pi)
    assert abs(bessel_j0(1.0) - ref / (2 * math.pi)) < 1e-10
    x = np.linspace(0, 60, 1201)
    assert np.max(np.abs(bessel_j0(x) - special.j0(x))) < 1e-12


def test_hankel_gaussian_closed_form():
    # ∫_0^∞ u e^{-πu²} J0(a u) du = e^{-a²/(4π)}/(2π)
    a = np.array([0.0, 1.0, 3.0, 7.5])
    got = hankel_radial("gaussian", a)
    assert np.max(np.abs(got - np.exp(-a ** 2 / (4 * math.pi)) / (2 * math.pi))) < 1e-12


def test_poisson_plain_gaussian():
    r = poisson_verify("plain", profile="gaussian", M=1.0)
    assert r.discrepancy < 1e-12


def test_poisson_periodic_trivial_reduces_to_plain():
    a = poisson_verify("plain", profile="gaussian", M=3.0)
    b = poisson_verify("periodic", q=1, profile="gaussian", M=3.0, psi="one")
    assert abs(a.lhs - b.lhs) < 1e-12 and abs(a.rhs - b.rhs) < 1e-10


def test_poisson_congruence_example():
    r = poisson_verify("congruence", q=GaussInt(-3), profile="gaussian", M=10, c=1, psi="chi")
    assert r.discrepancy < 1e-8


@pytest.mark.parametrize("q", [1, GaussInt(-3), GaussInt(-1, -2)])
@pytest.mark.parametrize("level", ["plain", "periodic", "congruence"])
@pytest.mark.parametrize("profile", ["gaussian", "bump"])
def test_poisson_suite(q, level, profile):
    r = poisson_verify(level, q=q, profile=profile)
    assert r.discrepancy < 1e-8


def test_poisson_cutoff_monotone():
    a = poisson_verify("periodic", q=GaussInt(-1, -2), profile="gaussian", M=20.0)
    b = poisson_verify("periodic", q=GaussInt(-1, -2), profile="gaussian", M=20.0, cutoff=a.cutoff / 2 ** 0.5)
    assert a.discrepancy <= b.discrepancy + 1e-15
