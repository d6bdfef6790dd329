import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirac_scatter import coulomb as C
from dirac_scatter import perturb as Pt
from dirac_scatter.errors import InvalidParametersError, TailTruncationError
from oracles import ode_regular

P = C.SystemParams(1.0, 2.0, 0.5)
Q = Pt.PerturbationSpec.exp_decay(0.3, 1.0)
FREE = C.SystemParams.free_reference(1.0)


@pytest.fixture(scope="module")
def ep():
    return C.make_energy(P, 1.5)


@pytest.fixture(scope="module")
def regular(ep):
    return Pt.solve_regular(P, ep, Q)


@pytest.fixture(scope="module")
def jost(ep):
    return Pt.solve_jost(P, ep, Q)


# ---------------------------------------------------------------- perturbation specs


def test_exp_decay_values():
    assert Q(0.0) == pytest.approx(0.3)
    assert Q(2.0) == pytest.approx(0.3 * math.exp(-2))


def test_compact_bump_support():
    b = Pt.PerturbationSpec.compact_bump(1.0, 3.0, 1.0)
    assert b(1.9) == 0 and b(4.1) == 0 and b(3.0) == pytest.approx(1.0)
    assert b.support_end == 4.0


def test_custom_table_from_text():
    spec = Pt.PerturbationSpec.from_table_text("# tail_bound = 1e-12\n0 0.5\n1 0.25\n2 0.0\n")
    assert spec(0.5) == pytest.approx(0.375)
    assert spec(5.0) == 0
    assert spec.tail_bound == 1e-12


def test_custom_table_needs_tail_bound():
    with pytest.raises(InvalidParametersError):
        Pt.PerturbationSpec.from_table_text("0 0.5\n1 0.25\n")


def test_custom_table_monotone_radii():
    with pytest.raises(InvalidParametersError):
        Pt.PerturbationSpec.custom([0, 2, 1], [1, 1, 1], 0.0)


def test_r_infinity_meets_tail_tolerance():
    R = Pt.select_r_infinity(Q)
    assert Q.tail_integral(R) <= 1.0000001e-10
    assert Q.tail_integral(0.99 * R) > 1e-10


def test_r_infinity_cap_enforced():
    slow = Pt.PerturbationSpec.exp_decay(1.0, 0.01)
    with pytest.raises(TailTruncationError):
        Pt.select_r_infinity(slow)


def test_radial_grid_resolution():
    g = Pt.radial_grid(2.0, 100.0)
    assert g[0] == pytest.approx(1e-6)
    small = g[g <= 1]
    assert len(small) >= 40 * 6
    big = np.diff(g[g >= 1])
    assert np.all(big <= math.pi / (20 * 2.0) * (1 + 1e-12))


# ---------------------------------------------------------------- regular solution


def test_zero_perturbation_reproduces_coulomb(ep):
    grid = np.array([1e-4, 0.01, 0.5, 3.0, 12.0])
    F = Pt.solve_regular(P, ep, Pt.PerturbationSpec.zero(), grid=grid)
    ref = np.array([C.regular_solution(P, ep, r).as_array() for r in grid]).T
    assert np.max(np.abs(F.values - ref) / np.abs(ref).max(axis=0)) < 1e-9


def test_regular_matches_independent_ode(regular):
    ref = ode_regular(1, 2, 0.5, 1.5, [10.0], q=Q)[:, 0]
    got = regular.dense([10.0])[:, 0]
    assert np.linalg.norm(got - ref) / np.linalg.norm(ref) < 1e-6


def test_regular_picard_contracts(regular):
    ratios = Pt.contraction_ratios(regular.diagnostics["picard_trace"])
    assert np.all(ratios[2:] < 0.5)


def test_regular_cross_check_recorded(regular):
    assert regular.diagnostics["rk_agreement"] < 1e-6


def test_regular_residual(regular):
    assert regular.residual(P, Q) < 1e-6


def test_regular_small_r_leading_vector(regular, ep):
    Z = regular.dense([1e-4])[:, 0] / 1e-4**ep.gamma
    b0 = (ep.gamma + P.k) / P.A
    # the first Frobenius correction is O(r); compare against the norm
    assert np.linalg.norm(Z - [1, b0]) / np.linalg.norm([1, b0]) < 1e-4


def test_regular_realness(regular):
    assert Pt.realness_defect(regular.values) < 1e-7


# ---------------------------------------------------------------- Jost solution


def test_free_jost_is_plane_wave():
    ep = C.make_energy(FREE, 1.5)
    J = Pt.solve_jost(FREE, ep, Pt.PerturbationSpec.zero())
    ref = np.exp(-1j * ep.eps * J.radii) * np.array([[ep.sqrt_m_plus_lambda], [-ep.sqrt_m_minus_lambda]])
    assert np.max(np.abs(J.values - ref)) < 1e-9


def test_jost_zero_perturbation_reproduces_coulomb(ep):
    grid = np.array([0.05, 0.5, 3.0, 12.0])
    J = Pt.solve_jost(P, ep, Pt.PerturbationSpec.zero(), grid=grid)
    scale = C.irregular_to_jost_scale(P, ep)
    ref = np.array([C.irregular_solution(P, ep, r).as_array() for r in grid]).T * scale
    assert np.max(np.abs(J.values - ref) / np.abs(ref).max(axis=0)) < 1e-9


def test_jost_conjugate_wronskian_constant(jost):
    r = np.linspace(1.0, jost.diagnostics["r_inf"], 60)
    V = jost.dense(r)
    W = V[0] * np.conj(V[1]) - V[1] * np.conj(V[0])
    assert np.max(np.abs(W - W[0])) <= 1e-7 * abs(W[0])


def test_jost_upper_envelope_at_200(jost):
    assert abs(abs(jost.dense([200.0])[0, 0]) / math.sqrt(2.5) - 1) < 1e-3


def test_jost_residual(jost):
    assert jost.residual(P, Q) < 1e-6


def test_jost_picard_converges(jost):
    trace = jost.diagnostics["picard_trace"]
    assert trace[-1] < Pt.PICARD_TOL
    assert np.all(Pt.contraction_ratios(trace) < 1)


def test_free_jost_asymptotics_corrections_vanish():
    ep = C.make_energy(FREE, 1.5)
    J = Pt.solve_jost(FREE, ep, Pt.PerturbationSpec.zero())
    rep = Pt.verify_jost_asymptotics(J, FREE, ep)
    assert abs(rep.M_phi) < 1e-4 and abs(rep.M_psi) < 1e-4


def test_jost_remainder_integrable(jost, ep):
    rep = Pt.verify_jost_asymptotics(jost, P, ep, q=Q)
    assert math.isfinite(rep.remainder_integral)
    assert rep.remainder_tail < rep.remainder_integral - rep.remainder_tail


def test_jost_first_order_coefficient_matches_coulomb(jost, ep):
    rep = Pt.verify_jost_asymptotics(jost, P, ep, q=Q)
    ref = C.jost_series(P, ep).coefficients
    assert abs(rep.M_phi - ref[1, 0] / ref[0, 0]) < 1e-3 * abs(ref[1, 0] / ref[0, 0])


def test_jost_M_stable_under_refinement(jost, ep):
    fine_grid = Pt.radial_grid(ep.eps, jost.radii[-1], per_decade=120, osc=80)
    fine = Pt.solve_jost(P, ep, Q, grid=fine_grid)
    m1 = Pt.verify_jost_asymptotics(jost, P, ep, q=Q).M_phi
    m2 = Pt.verify_jost_asymptotics(fine, P, ep, q=Q).M_phi
    assert abs(m1 - m2) <= 0.05 * abs(m1)


# ---------------------------------------------------------------- kernel bounds


def test_kernel_bound_small_finite(ep):
    bound = Pt.kernel_bound_small(P, ep, np.geomspace(1e-4, 1, 25))
    assert math.isfinite(bound) and bound < 1e3


def test_kernel_bound_large_finite(ep):
    bound = Pt.kernel_bound_large(P, ep, np.linspace(10, 25, 20))
    assert math.isfinite(bound) and bound < 1e3


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.5, 3.0))
def test_exp_decay_integrability_property(c, alpha):
    spec = Pt.PerturbationSpec.exp_decay(c, alpha)
    first, second = spec.integrability()
    assert first == pytest.approx(c / alpha + c / alpha**2, rel=1e-8)
    assert math.isfinite(second)
