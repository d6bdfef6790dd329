import cmath
import inspect
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirac_scatter import coulomb as C
from dirac_scatter import perturb as Pt
from dirac_scatter import scatter as S
from dirac_scatter.errors import ZeroCoefficientError

P = C.SystemParams(1.0, 2.0, 0.5)
Q = Pt.PerturbationSpec.exp_decay(0.3, 1.0)


@pytest.fixture(scope="module")
def generic():
    return S.scattering_data(P, Q, 1.5, r_max=400.0)


@pytest.fixture(scope="module")
def coulomb_only():
    return S.scattering_data(P, Pt.PerturbationSpec.zero(), 1.5)


# ---------------------------------------------------------------- deviation factor


def test_deviation_factor_trivial_potential():
    V0 = S.DeviationFactorStationary(1.5, 1.0, 0.0)
    assert np.all(V0(np.linspace(0.1, 50, 20)) == 1)


def test_deviation_factor_coulomb_phase_slope():
    ep = C.make_energy(P, 1.5)
    V0 = S.DeviationFactorStationary(1.5, 1.0, 0.5)
    r = np.array([3.0, 3.0 * math.e])
    dphase = np.angle(V0(r[1]) / V0(r[0]))
    assert dphase == pytest.approx(0.5 * 1.5 / ep.eps, abs=1e-13)


def test_deviation_factor_is_power_for_pure_coulomb():
    ep = C.make_energy(P, 1.5)
    r = np.geomspace(0.5, 300, 9)
    assert np.allclose(S.deviation_factor(ep, None, 1.0, r), r ** (1j * ep.phi), atol=1e-13)


def test_deviation_factor_unimodular_random_radii():
    rng = np.random.default_rng(7)
    r = rng.uniform(0.01, 500, 100)
    V0 = S.DeviationFactorStationary(-2.2, 1.0, 0.5, Q)
    assert np.max(np.abs(np.abs(V0(r)) - 1)) < 1e-14


def test_deviation_factor_has_no_angular_input():
    fields = {f for f in inspect.signature(S.DeviationFactorStationary).parameters}
    assert "k" not in fields
    a = S.deviation_factor(C.make_energy(C.SystemParams(1, 2, 0.5), 1.5), Q, 1.0, 7.0)
    b = S.deviation_factor(C.make_energy(C.SystemParams(1, -3, 0.5), 1.5), Q, 1.0, 7.0)
    assert a == b


def test_reference_point_changes_constant_phase_only():
    r = np.array([2.0, 20.0, 200.0])
    v1 = S.DeviationFactorStationary(1.5, 1.0, 0.5, Q, a=1.0)(r)
    v2 = S.DeviationFactorStationary(1.5, 1.0, 0.5, Q, a=3.0)(r)
    ratio = v1 / v2
    assert np.allclose(ratio, ratio[0], atol=1e-12)


def test_limit_offset_is_asymptotic_phase():
    V0 = S.DeviationFactorStationary(1.5, 1.0, 0.5, Q)
    r = 80.0
    assert V0.log_phase(r)[0] - V0.phi * math.log(r) == pytest.approx(V0.limit_offset(), abs=1e-12)


# ---------------------------------------------------------------- extraction


def test_free_reference_ratio_is_i_beta():
    for lam in (2.0, 1.3, -1.7):
        sd = S.free_reference_data(1.0, lam)
        beta = (1.0 - lam) / math.sqrt(lam**2 - 1)
        assert sd.c1[1] / sd.c1[0] == pytest.approx(1j * beta, abs=1e-12)


def test_free_reference_density_self_consistent():
    sd = S.free_reference_data(1.0, 2.0)
    assert sd.rho == pytest.approx(S.rho1(2.0, 1.0), rel=1e-14)


def test_coulomb_phase_stable_across_windows(coulomb_only):
    phases = [cmath.phase(c[0]) for c in coulomb_only.diagnostics["window_c1"]]
    assert max(phases) - min(phases) < 1e-4


def test_window_fit_agrees_with_wronskian_route(generic):
    assert generic.diagnostics["window_agreement"] < 1e-6
    assert max(generic.diagnostics["window_residuals"]) < S.FIT_RESIDUAL_TOL


def test_wronskian_alpha_is_r_independent(generic):
    assert generic.diagnostics["alpha_spread"] < 1e-8


def test_generic_invariants(generic):
    assert abs(abs(generic.s11) - 1) < 1e-12
    assert abs(abs(generic.s21) - 1) < 1e-12
    assert abs(generic.s11 + generic.s21) < 1e-6
    assert np.max(np.abs(generic.c2 - np.conj(generic.c1))) < 1e-4
    assert abs(abs(generic.c1[0]) - 1) < 1e-14


def test_s_maps_c2_to_c1(generic):
    assert np.allclose(generic.s_matrix @ generic.c2, generic.c1, atol=1e-12)


def test_rho_relation(generic):
    assert generic.rho * abs(generic.c1[0]) == pytest.approx(S.rho1(1.5, 1.0), rel=1e-14)
    assert S.spectral_density_perturbed(generic) == pytest.approx(generic.rho, rel=1e-14)


def test_flagship_regression_values(generic):
    """Regression pins for the (m, k, A) = (1, 2, 0.5), q = 0.3 e^{-r} run at lam = 1.5."""
    assert generic.c1[0] == pytest.approx(-0.99695055 - 0.07803593j, abs=1e-6)
    assert generic.s11 == pytest.approx(0.98782079 + 0.15559593j, abs=1e-6)


# ---------------------------------------------------------------- S-matrix algebra


def _data(c11, c21=1.0):
    c1 = np.array([c11, c21], dtype=complex)
    return S.ScatteringData(1.5, 1.0, c1, np.conj(c1), np.eye(2), 1.0, 1.0, 1.0, 1.0)


def test_real_coefficient_gives_diag_one_minus_one():
    assert np.allclose(S.stationary_s_matrix(_data(0.8, -0.8j)), np.diag([1, -1]))


@settings(max_examples=50, deadline=None)
@given(st.floats(-math.pi, math.pi), st.floats(0.1, 5.0))
def test_phase_shift_doubling(delta, modulus):
    s = S.stationary_s_matrix(_data(modulus * cmath.exp(1j * delta), 1j * cmath.exp(1j * delta)))
    assert s[0, 0] == pytest.approx(cmath.exp(2j * delta), abs=1e-12)
    assert abs(abs(s[0, 0]) - 1) < 1e-12 and abs(s[0, 1]) == 0


def test_zero_coefficient_rejected():
    with pytest.raises(ZeroCoefficientError):
        S.stationary_s_matrix(_data(0.0))
    with pytest.raises(ZeroCoefficientError):
        S.spectral_density_perturbed(_data(1e-14))


def test_rho1_values():
    assert S.rho1(2.0, 1.0) == pytest.approx(0.551329, abs=1e-6)
    assert S.rho1(-2.0, 1.0) == pytest.approx(0.183776, abs=1e-6)
    assert S.rho1(1e9, 1.0) == pytest.approx(1 / math.pi, rel=1e-8)
