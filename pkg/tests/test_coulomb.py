import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirac_scatter import coulomb as C
from dirac_scatter.acceptance import dirac_ode_residual
from dirac_scatter.errors import InvalidParametersError, SpectralGapError
from oracles import ode_regular

P = C.SystemParams(1.0, 2.0, 0.5)

lam_strategy = st.one_of(st.floats(1.05, 6.0), st.floats(-6.0, -1.05))
params_strategy = st.tuples(st.floats(0.5, 3.0), st.floats(-0.8, 0.8)).filter(lambda t: abs(t[1]) > 0.05 and abs(t[0]) > abs(t[1]) + 0.05)


# ---------------------------------------------------------------- parameters


def test_energy_point_fields_m1_k2_A1_lambda2():
    ep = C.make_energy(C.SystemParams(1, 2, 1), 2.0)
    assert ep.gamma == pytest.approx(math.sqrt(3), abs=1e-15)
    assert ep.eps == pytest.approx(math.sqrt(3), abs=1e-15)
    assert ep.phi == pytest.approx(2 / math.sqrt(3), abs=1e-15)


def test_beta_m1_lambda2():
    ep = C.make_energy(C.SystemParams(1, 2, 1), 2.0)
    assert ep.beta == pytest.approx(-1 / math.sqrt(3), abs=1e-15)


def test_spectral_gap_guard():
    with pytest.raises(SpectralGapError):
        C.make_energy(C.SystemParams(1, 2, 1), 1.0005)


@pytest.mark.parametrize("m,k,A", [(0, 2, 1), (1, 0, 0), (1, 1, 1), (1, 1, 1.5), (-1, 2, 0)])
def test_system_params_reject_invalid(m, k, A):
    with pytest.raises(InvalidParametersError):
        C.SystemParams(m, k, A)


@settings(max_examples=60, deadline=None)
@given(lam_strategy)
def test_branch_rules(lam):
    ep = C.make_energy(P, lam)
    assert ep.eps**2 + P.m**2 == pytest.approx(lam**2, rel=1e-14)
    assert ep.gamma**2 + P.A**2 == pytest.approx(P.k**2, rel=1e-14)
    if lam > P.m:
        assert ep.sqrt_m_plus_lambda.real > 0 and abs(ep.sqrt_m_plus_lambda.imag) == 0
        assert (-1j * ep.sqrt_m_minus_lambda).real > 0
    else:
        assert ep.sqrt_m_minus_lambda.real > 0 and abs(ep.sqrt_m_minus_lambda.imag) == 0
        assert (-1j * ep.sqrt_m_plus_lambda).real > 0
    assert ep.case == (C.Case.POSITIVE if lam > 0 else C.Case.NEGATIVE)


# ---------------------------------------------------------------- regular solution


def test_regular_small_r_limit():
    p = C.SystemParams(1, 2, 1)
    ep = C.make_energy(p, 2.0)
    r = 1e-6
    F = C.regular_solution(p, ep, r).as_array() / r**ep.gamma
    assert abs(F[0] - 1) < 1e-5
    assert abs(F[1] - (math.sqrt(3) + 2)) < 1e-5 * (math.sqrt(3) + 2)


@settings(max_examples=60, deadline=None)
@given(params_strategy, lam_strategy)
def test_regular_coefficient_normalisation(kA, lam):
    p = C.SystemParams(1.0, *kA)
    ep = C.make_energy(p, lam)
    a1, a2 = C.regular_coefficients(p, ep)
    assert abs((a1 + a2) * ep.sqrt_m_plus_lambda - 1) < 1e-12


def test_regular_matches_ode_oracle():
    ep = C.make_energy(P, 1.5)
    ref = ode_regular(1, 2, 0.5, 1.5, [3.0])[:, 0]
    got = C.regular_solution(P, ep, 3.0).as_array()
    assert np.linalg.norm(got - ref) / np.linalg.norm(ref) < 1e-6


def test_regular_is_real():
    ep = C.make_energy(P, 1.5)
    for r in (0.3, 7.0, 80.0):
        F = C.regular_solution(P, ep, r).as_array()
        assert np.max(np.abs(F.imag)) < 1e-9 * np.max(np.abs(F))


def test_kummer_sign_selection_unique():
    for lam in (1.5, -2.0):
        res = C.kummer_sign_residuals(P, C.make_energy(P, lam))
        passing = [s for s, v in res.items() if v <= 1e-7]
        assert passing == [C.KUMMER_SIGN]


# ---------------------------------------------------------------- irregular solution


@settings(max_examples=60, deadline=None)
@given(params_strategy, lam_strategy)
def test_irregular_homogeneous_relation(kA, lam):
    """Small-r condition: the r^-gamma leading vector is fixed up to scale."""
    p = C.SystemParams(1.0, *kA)
    ep = C.make_energy(p, lam)
    B1, B2 = C.irregular_small_r_amplitudes(p, ep)
    lhs = (B2 + B1) * ep.sqrt_m_plus_lambda * (-ep.gamma + p.k)
    rhs = p.A * (B2 - B1) * ep.sqrt_m_minus_lambda
    assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs), 1e-300)


def test_irregular_small_r_growth():
    ep = C.make_energy(P, 1.5)
    g1 = np.linalg.norm(C.irregular_solution(P, ep, 1e-3).as_array())
    g2 = np.linalg.norm(C.irregular_solution(P, ep, 1e-4).as_array())
    assert g2 / g1 == pytest.approx(10**ep.gamma, rel=1e-2)


def test_regular_small_r_growth():
    ep = C.make_energy(P, 1.5)
    f1 = np.linalg.norm(C.regular_solution(P, ep, 1e-3).as_array())
    f2 = np.linalg.norm(C.regular_solution(P, ep, 1e-4).as_array())
    assert f1 / f2 == pytest.approx(10**ep.gamma, rel=1e-2)


def test_irregular_pivot_b1_is_one():
    b1, _ = C.irregular_coefficients(P, C.make_energy(P, 1.5))
    assert b1 == 1


@pytest.mark.parametrize("lam", [1.5, -1.5, 3.0])
@pytest.mark.parametrize("r", [0.01, 0.7, 5.0, 40.0])
def test_ode_residual_both_columns(lam, r):
    ep = C.make_energy(P, lam)
    assert dirac_ode_residual(P, ep, lambda x: C.regular_solution(P, ep, x).as_array(), r) < 1e-7
    assert dirac_ode_residual(P, ep, lambda x: C.irregular_solution(P, ep, x).as_array(), r) < 1e-7


# ---------------------------------------------------------------- fundamental matrix


def test_det_constant_half_vs_twenty():
    ep = C.make_energy(P, 1.5)
    d1 = C.fundamental_matrix(P, ep, 0.5).det
    d2 = C.fundamental_matrix(P, ep, 20.0).det
    assert abs(d1 - d2) <= 1e-8 * abs(d1)
    assert abs(d1) > 1e-10


def test_det_matches_closed_constant_over_decades():
    ep = C.make_energy(P, -2.5)
    Md = C.wronskian_constant(P, ep)
    for r in np.geomspace(1e-3, 1e3, 13):
        assert abs(C.fundamental_matrix(P, ep, r).det - Md) <= 1e-8 * abs(Md)


def test_propagator_identity():
    ep = C.make_energy(P, 1.5)
    Dr = C.fundamental_matrix(P, ep, 2.0)
    Dt = C.fundamental_matrix(P, ep, 9.0)
    prop = Dr.entries @ (Dt.adjugate() / Dt.det)
    assert np.allclose(prop @ Dt.entries, Dr.entries, rtol=1e-12, atol=1e-12 * np.abs(Dr.entries).max())


# ---------------------------------------------------------------- large r


def test_irregular_large_r_modulus():
    ep = C.make_energy(P, 1.5)
    b1, _ = C.irregular_coefficients(P, ep)
    phi = ep.phi
    for r in (300.0, 1000.0):
        G = C.irregular_solution(P, ep, r)
        val = abs(G.f) * abs(cmath.exp(1j * phi * cmath.log(2j * ep.eps * r)))
        ref = abs(b1 * ep.sqrt_m_plus_lambda) * abs(2j * ep.eps) ** (-ep.gamma)
        assert val / ref == pytest.approx(1, abs=2.0 / r)


def test_envelope_has_no_power_growth():
    ep = C.make_energy(P, 1.5)
    r = np.geomspace(100, 400, 40)
    G = np.array([C.irregular_solution(P, ep, x).as_array() for x in r]).T
    slope = np.polyfit(np.log(r), np.log(np.linalg.norm(G, axis=0)), 1)[0]
    assert abs(slope) < 1e-3


@pytest.mark.parametrize("which", list(C.Which))
def test_large_r_expansion_matches_exact(which):
    ep = C.make_energy(P, 1.5)
    exp_f, exp_g = C.coulomb_large_r(P, ep, which)
    sol = C.regular_solution if which.name.upper().startswith("REG") else C.irregular_solution
    for r in (50.0, 150.0, 500.0):
        Z = sol(P, ep, r).as_array()
        approx = np.array([exp_f(r), exp_g(r)])
        if which.name.upper().startswith("REG"):
            approx = 2 * approx.real
        assert np.linalg.norm(Z - approx) <= 50.0 / r**2 * np.linalg.norm(Z)


def test_jost_series_free_reference_is_plane_wave():
    p = C.SystemParams.free_reference(1.0)
    ep = C.make_energy(p, 1.5)
    r = np.array([5.0, 50.0])
    ref = np.exp(-1j * ep.eps * r) * np.array([[ep.sqrt_m_plus_lambda], [-ep.sqrt_m_minus_lambda]])
    assert np.allclose(C.jost_free(p, ep, r), ref, atol=1e-14)
