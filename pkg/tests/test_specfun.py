import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirac_scatter import specfun
from dirac_scatter.acceptance import kummer_ode_residual
from dirac_scatter.errors import DegenerateParameterError, InsufficientDecayError, PoleError

finite = dict(allow_nan=False, allow_infinity=False)


def taylor_oracle(a, c, x, terms=200, dps=60):
    """Brute-force arbitrary-precision Taylor sum of 1F1."""
    with mpmath.workdps(dps):
        a, c, x = mpmath.mpc(a), mpmath.mpc(c), mpmath.mpc(x)
        term = total = mpmath.mpc(1)
        for n in range(terms):
            term *= (a + n) / (c + n) * x / (n + 1)
            total += term
        return complex(total)


# ---------------------------------------------------------------- gamma


def test_gamma_at_one():
    assert specfun.gamma_complex(1) == pytest.approx(1, abs=1e-15)


def test_gamma_product_identity_phi_07():
    phi = 0.7
    val = specfun.gamma_complex(1 + 1j * phi) * specfun.gamma_complex(-1j * phi)
    assert abs(val - 1j * math.pi / math.sinh(0.7 * math.pi)) < 1e-12


def test_gamma_half_plus_2i_against_60_digit_oracle():
    with mpmath.workdps(60):
        ref = complex(mpmath.gamma(mpmath.mpc(0.5, 2)))
    assert abs(specfun.gamma_complex(0.5 + 2j) - ref) / abs(ref) < 1e-13


@settings(max_examples=200, deadline=None)
@given(st.floats(-25, 25, **finite), st.floats(-20, 20, **finite))
def test_gamma_relative_error_disk(x, y):
    z = complex(x, y)
    if abs(z) > 30 or min(abs(z + n) for n in range(0, 30)) < 1e-3:
        return
    with mpmath.workdps(40):
        ref = complex(mpmath.gamma(mpmath.mpc(x, y)))
    assert abs(specfun.gamma_complex(z) - ref) <= 1e-12 * abs(ref)


@settings(max_examples=100, deadline=None)
@given(st.floats(-8, 8, **finite), st.floats(-4, 4, **finite))
def test_gamma_reflection(x, y):
    z = complex(x, y)
    if abs(z - round(x)) < 1e-2:
        return
    val = specfun.gamma_complex(z) * specfun.gamma_complex(1 - z) * cmath.sin(math.pi * z) / math.pi
    assert abs(val - 1) < 1e-10


@pytest.mark.parametrize("z", [0, -1, -2, -7, 1e-13])
def test_gamma_poles(z):
    with pytest.raises(PoleError):
        specfun.gamma_complex(z)


def test_rgamma_is_zero_at_poles():
    assert specfun.rgamma_complex(-3) == 0


# ---------------------------------------------------------------- Kummer Phi


def test_phi_at_zero_is_one():
    assert specfun.kummer_phi(0.3 + 2j, -1.5 + 0.2j, 0) == 1


def test_phi_exponential_identity():
    x = 2 + 1j
    assert abs(specfun.kummer_phi(1, 1, x) - cmath.exp(x)) < 1e-13 * abs(cmath.exp(x))


def test_phi_against_taylor_oracle():
    ref = taylor_oracle(0.3 + 0.4j, 2.1, 5j)
    assert abs(specfun.kummer_phi(0.3 + 0.4j, 2.1, 5j) - ref) < 1e-12 * abs(ref)


@pytest.mark.parametrize("x", [0.5 + 0.5j, 7 - 3j, 18j, -15 + 2j, 25.0, 45j, -50 + 5j])
def test_phi_against_mpmath_hyp1f1(x):
    a, c = 0.3 + 0.4j, 2.1 - 0.3j
    with mpmath.workdps(50):
        ref = complex(mpmath.hyp1f1(a, c, x))
    assert abs(specfun.kummer_phi(a, c, x) - ref) <= 1e-9 * abs(ref)


def test_phi_degenerate_c():
    with pytest.raises(DegenerateParameterError):
        specfun.kummer_phi(0.5, -2.0, 1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(-2, 2, **finite), st.floats(-2, 2, **finite), st.floats(0.6, 4, **finite),
       st.floats(0, 20, **finite), st.floats(-math.pi, math.pi, **finite))
def test_kummer_transformation(ar, ai, c, r, th):
    a, x = complex(ar, ai), r * cmath.exp(1j * th)
    lhs = specfun.kummer_phi(a, c, x)
    rhs = cmath.exp(x) * specfun.kummer_phi(c - a, c, -x)
    assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs), 1e-300)


@pytest.mark.parametrize("x", [0.5 + 1j, 5j, 12.0, -8 + 3j, 25j, 40j, 60 - 10j])
def test_phi_ode_residual(x):
    assert kummer_ode_residual(specfun.kummer_phi, 0.3 + 0.4j, 2.1, x) < 1e-7


def test_series_and_asymptotic_regimes_agree_on_switch_annulus():
    a, c = 0.3 + 0.4j, 2.1
    for th in (0.5, 1.2, 1.9, 2.8):
        x_in = 29.99 * cmath.exp(1j * th)
        x_out = 30.01 * cmath.exp(1j * th)
        with mpmath.workdps(50):
            r_in, r_out = complex(mpmath.hyp1f1(a, c, x_in)), complex(mpmath.hyp1f1(a, c, x_out))
        assert abs(specfun.kummer_phi(a, c, x_in) - r_in) < 1e-9 * abs(r_in)
        assert abs(specfun.kummer_phi(a, c, x_out) - r_out) < 1e-9 * abs(r_out)


# ---------------------------------------------------------------- Tricomi Psi


def test_psi_large_argument_normalisation():
    a, c = 0.5 + 0.2j, 2.1
    for x in (1e3, 1e3j, -1e3j):
        val = specfun.tricomi_psi(a, c, x) * specfun.cpow(x, a)
        assert abs(val - 1) <= 2 * abs(a * (a - c + 1)) / abs(x)


def test_psi_connection_formula_oracle():
    a, c, x = 0.4, 1.7, 3j
    g = specfun.gamma_complex
    ref = (g(1 - c) / g(a - c + 1) * specfun.kummer_phi(a, c, x)
           + g(c - 1) / g(a) * specfun.cpow(x, 1 - c) * specfun.kummer_phi(a - c + 1, 2 - c, x))
    with mpmath.workdps(40):
        ref_mp = complex(mpmath.hyperu(a, c, x))
    assert abs(specfun.tricomi_psi(a, c, x) - ref) < 1e-11 * abs(ref)
    assert abs(specfun.tricomi_psi(a, c, x) - ref_mp) < 1e-11 * abs(ref_mp)


def test_psi_special_case_power():
    a, x = 1.2, 2 + 2j
    assert abs(specfun.tricomi_psi(a, a + 1, x) - specfun.cpow(x, -a)) < 1e-12


@pytest.mark.parametrize("x", [0.3 + 0.1j, 4 + 4j, 12.0, 20j, 45 - 5j])
def test_psi_against_mpmath_hyperu(x):
    a, c = 0.3 + 0.4j, 2.1
    with mpmath.workdps(50):
        ref = complex(mpmath.hyperu(a, c, x))
    assert abs(specfun.tricomi_psi(a, c, x) - ref) <= 1e-9 * abs(ref)


@pytest.mark.parametrize("x", [0.5 + 1j, 5j, 12.0, 25j, 40j])
def test_psi_ode_residual(x):
    assert kummer_ode_residual(specfun.tricomi_psi, 0.3 + 0.4j, 2.1, x) < 1e-7


def test_psi_integer_c_rejected():
    with pytest.raises(DegenerateParameterError):
        specfun.tricomi_psi(0.5, 2.0, 1.0)


# ---------------------------------------------------------------- asymptotics


def test_phi_large_x_a_equals_c():
    exp = specfun.phi_large_x(2.5, 2.5, 1j)
    assert exp.algebraic.leading == 0
    assert exp.exponential.correction_1_over_r == 0
    rho = 40.0
    assert abs(exp(rho) - cmath.exp(1j * rho)) < 1e-12


def test_phi_large_x_matches_series_at_40():
    a, c = 0.3 + 0.4j, 2.1
    for d in (1j, cmath.exp(0.7j), -1j):
        exp = specfun.phi_large_x(a, c, d)
        with mpmath.workdps(50):
            ref = complex(mpmath.hyp1f1(a, c, 40 * d))
        assert abs(exp(40.0) - ref) <= 1e-9 * abs(ref)


def test_phi_large_x_has_both_branches():
    exp = specfun.phi_large_x(0.3 + 0.4j, 2.1, 1j)
    assert exp.algebraic.leading != 0 and exp.exponential.leading != 0


def test_phi_large_x_remainder_bound_holds():
    a, c = 0.3 + 0.4j, 2.1
    exp = specfun.phi_large_x(a, c, 1j)
    for rho in (50.0, 100.0, 300.0):
        for branch in (exp.algebraic, exp.exponential):
            full = branch(rho)
            first = branch.first_order(rho)
            assert abs(full - first) <= branch.remainder_bound / rho**2 * abs(branch.leading * branch.carrier(rho)) * 1.01


def test_phi_large_x_insufficient_decay():
    with pytest.raises(InsufficientDecayError):
        specfun.phi_large_x(8 + 5j, 1.5, 1j, tol=1e-14, radius=5.0)


def test_cpow_principal_branch():
    assert abs(specfun.cpow(-1 + 0j, 0.5) - 1j) < 1e-15
    assert np.isclose(specfun.cpow(4.0, 0.5), 2.0)
