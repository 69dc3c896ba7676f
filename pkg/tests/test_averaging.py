import logging
import math

import numpy as np
import pytest

from saddlecount.errors import EmptySample, InvalidParameter
from saddlecount.operations.averaging import (
    IntervalIndicator,
    SiegelVeechFunctional,
    SmoothedDensity,
    SystoleFunctional,
    arc_contribution,
    circle_average,
    constant_functional,
    cusp_decompose,
    derivative_commutation_check,
    ellipse_average,
    full_circle,
    orbit_matrices,
    psi_difference_integral,
    psi_gap_constant,
    psi_integral,
    sandwich_check,
    smooth_psi,
    sobolev_estimate,
    theta_t,
)
from saddlecount.operations.flat_sampling import TorusSample
from saddlecount.operations.models import SectorSpec
from saddlecount.operations.planar_functions import AngularBump, BallIndicator, RadialBump, SectorIndicator, SmoothBump
from saddlecount.operations.saddle_enum import enumerate_holonomies
from saddlecount.operations.surface_core import GroupElement, PlanarVector, a_t, apply_group, r_theta, systole


def _closed_form_gap(theta: float) -> float:
    delta = theta * theta
    c2 = math.cos(theta) ** 2
    return (2 * theta + delta) / (2 * c2) - c2 * (2 * theta - delta) / 2


def test_theta_t_shrinks_along_the_flow():
    assert theta_t(0.5, 0.0) == pytest.approx(0.5)
    assert theta_t(0.5, 1.0) == pytest.approx(math.atan(math.exp(-2.0) * math.tan(0.5)))
    assert theta_t(0.5, 3.0) < theta_t(0.5, 1.0)
    with pytest.raises(InvalidParameter):
        theta_t(2.0, 1.0)


def test_density_masses():
    assert full_circle().mass() == pytest.approx(1.0)
    assert IntervalIndicator(-0.5, 0.5).mass() == pytest.approx(1.0 / (2 * math.pi))
    assert SmoothedDensity(0.0, 0.5, 0.1).mass() == pytest.approx(0.9 / (2 * math.pi))
    with pytest.raises(InvalidParameter):
        IntervalIndicator(1.0, 0.0)
    with pytest.raises(InvalidParameter):
        SmoothedDensity(0.0, 0.1, 0.5)


def test_constant_average_is_density_mass(torus):
    result = circle_average(constant_functional(2.0), torus, 1.0, full_circle(), n_quad=16)
    assert result.value == pytest.approx(2.0)
    assert result.nodes == 32
    smoothed = ellipse_average(constant_functional(), torus, 0.0, SmoothedDensity(0.3, 0.5, 0.1),
                               GroupElement(1.0, 1.0, 0.0, 1.0), n_quad=64)
    assert smoothed.value == pytest.approx(0.9 / (2 * math.pi), rel=1e-6)


def test_quadrature_needs_enough_nodes(torus):
    with pytest.raises(InvalidParameter):
        circle_average(constant_functional(), torus, 0.0, full_circle(), n_quad=8)


def test_rotations_keep_the_ball_count(torus, l_origami):
    ball = SiegelVeechFunctional(BallIndicator(1.2))
    assert circle_average(ball, torus, 0.0, full_circle(), n_quad=32).value == pytest.approx(4.0)
    ball = SiegelVeechFunctional(BallIndicator(1.2))
    assert circle_average(ball, l_origami, 0.0, full_circle(), n_quad=32).value == pytest.approx(12.0)


def test_systole_average_on_unstretched_torus(torus):
    result = circle_average(SystoleFunctional(1.5), torus, 0.0, full_circle(), n_quad=32)
    assert result.value == pytest.approx(1.0)


def test_systole_batch_matches_rebuilt_surfaces(l_origami):
    functional = SystoleFunctional(1.5)
    betas = np.array([0.0, 0.4, 1.3, 2.9])
    values = functional.batch(orbit_matrices(1.0, betas), l_origami)
    expected = [systole(apply_group(a_t(1.0) @ r_theta(float(beta)), l_origami)) ** -1.5 for beta in betas]
    assert values == pytest.approx(expected)
    assert functional(a_t(1.0) @ r_theta(0.4), l_origami) == pytest.approx(expected[1])


def test_orbit_matrices_compose_the_flow():
    g = GroupElement(1.0, 1.0, 0.0, 1.0)
    matrices = orbit_matrices(0.5, np.array([0.3]), g)
    assert np.allclose(matrices[0], (a_t(0.5) @ r_theta(0.3) @ g).matrix)


def test_node_ceiling_is_not_a_warning(l_origami, caplog):
    with caplog.at_level(logging.DEBUG, logger="saddlecount"):
        result = circle_average(SystoleFunctional(1.5), l_origami, 1.0, full_circle(), n_quad=16, max_nodes=64)
    assert result.nodes == 64
    assert any("[QUAD] node ceiling" in record.getMessage() for record in caplog.records)
    assert not [record for record in caplog.records if record.levelno >= logging.WARNING]


def test_arc_contribution_of_vertical_vector():
    v = PlanarVector(0.0, 0.5)
    assert arc_contribution(v, 0.0, 0.3, "W2", math.pi) == pytest.approx(0.6 / (2 * math.pi))
    assert arc_contribution(PlanarVector(0.0, 5.0), 0.0, 0.3, "W2", math.pi) == 0.0
    with pytest.raises(InvalidParameter):
        arc_contribution(v, 0.0, 0.3, "W3", math.pi)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0, 3.0])
@pytest.mark.parametrize("theta", [0.1, 0.4, 0.8])
def test_sandwich_holds_on_l_origami(l_origami, t, theta):
    sec = SectorSpec.about_vertical(-0.6, 0.6)
    report = sandwich_check(l_origami, t, theta, sec)
    assert report.holds
    assert report.lower <= report.upper


def test_sandwich_full_circle_on_torus(torus):
    for t in (1.0, 2.5):
        assert sandwich_check(torus, t, 0.5, SectorSpec.full_circle()).holds


def test_sandwich_quadrature_matches_exact(l_origami):
    sec = SectorSpec(phi1=0.3, phi2=1.5)
    exact = sandwich_check(l_origami, 1.5, 0.4, sec)
    quad = sandwich_check(l_origami, 1.5, 0.4, sec, n_quad=512, method="quadrature")
    assert quad.holds
    assert quad.middle == exact.middle
    assert abs(quad.lower - exact.lower) <= quad.slack
    assert abs(quad.upper - exact.upper) <= quad.slack


def test_sandwich_rejects_bad_input(torus):
    with pytest.raises(InvalidParameter):
        sandwich_check(torus, 1.0, 1.2, SectorSpec.full_circle())
    with pytest.raises(InvalidParameter):
        sandwich_check(torus, 1.0, 0.5, SectorSpec.full_circle(), method="simpson")


def test_smooth_bumps_are_ordered():
    minus, plus = SmoothBump(0.4, "-"), SmoothBump(0.4, "+")
    for v in (PlanarVector(0.0, 0.5), PlanarVector(0.2, 0.8), PlanarVector(0.35, 0.7), PlanarVector(1.0, 0.1)):
        assert smooth_psi(minus, v) <= smooth_psi(plus, v)
    assert smooth_psi(minus, PlanarVector(0.0, 0.5)) == 1.0
    assert smooth_psi(plus, PlanarVector(0.0, 1.05)) == 1.0


@pytest.mark.parametrize("theta", [0.1, 0.3, 0.5])
def test_psi_difference_integral_matches_closed_form(theta):
    assert psi_difference_integral(theta) == pytest.approx(_closed_form_gap(theta), rel=1e-3)


def test_psi_integrals():
    theta = 0.5
    minus, plus = SmoothBump(theta, "-"), SmoothBump(theta, "+")
    assert psi_integral(minus) == pytest.approx(0.5 * math.cos(theta) ** 2 * (2 * theta - theta ** 2))
    assert psi_integral(plus) - psi_integral(minus) == pytest.approx(_closed_form_gap(theta))


def test_psi_gap_constant_is_bounded():
    assert psi_gap_constant([0.05, 0.1, 0.3, 0.5, 0.8]) < 10.0


def test_cusp_decomposition(torus):
    psi = BallIndicator(1.2)
    assert cusp_decompose(psi, torus, 0.5) == (4.0, 0.0)
    thin = apply_group(a_t(1.0), torus)
    main, cusp = cusp_decompose(psi, thin, 0.5)
    assert main == 0.0
    assert cusp == pytest.approx(2.0)
    with pytest.raises(InvalidParameter):
        cusp_decompose(psi, torus, 0.0)


def test_rotation_derivative_commutes_with_transform(l_origami):
    for psi in (AngularBump(0.3, 2.0, 3.0), RadialBump(2.5), SmoothBump(0.5, "+")):
        finite, exact, gap = derivative_commutation_check(psi, l_origami, h_step=1e-5)
        assert gap <= 1e-5 * max(1.0, abs(exact))
    finite, exact, _ = derivative_commutation_check(AngularBump(0.3, 2.0, 3.0), l_origami)
    assert exact != 0.0


def test_derivative_check_rejects_bad_input(torus):
    with pytest.raises(InvalidParameter):
        derivative_commutation_check(RadialBump(2.0), torus, h_step=0.1)
    with pytest.raises(InvalidParameter):
        derivative_commutation_check(SectorIndicator(1.0, 0.3), torus)


def test_sobolev_estimate_on_known_lattices():
    psi = SmoothBump(0.5, "+")
    report = sobolev_estimate(psi, [TorusSample(0.0, 1.0, 0.0), TorusSample(0.0, 1.0, 0.6)], eps=0.5)
    value = 0.6 * 0.6 * (3.0 - 2.0 * 0.6)
    slope = 6.0 * 0.6 * 0.4 / 0.25
    assert report.n == 2
    assert report.norm_term == pytest.approx((1.0 + value ** 2) / 2)
    assert report.derivative_term == pytest.approx(slope ** 2 / 2)
    assert report.estimate == pytest.approx(report.norm_term + report.derivative_term)


def test_sobolev_estimate_cuts_off_the_cusp(torus):
    psi = SmoothBump(0.5, "+")
    assert sobolev_estimate(psi, [TorusSample(0.0, 9.0, 0.0)], eps=0.5).estimate == 0.0
    assert sobolev_estimate(psi, [torus], eps=0.5).norm_term == pytest.approx(1.0)
    with pytest.raises(EmptySample):
        sobolev_estimate(psi, [], eps=0.5)


def test_siegel_veech_functional_reuses_enumeration(l_origami):
    functional = SiegelVeechFunctional(BallIndicator(2.0))
    first = functional(GroupElement.identity(), l_origami)
    cached = functional.holonomies(l_origami, 1.0)
    assert first == float(enumerate_holonomies(l_origami, 2.0).total)
    assert cached.radius >= 2.0
    wide = enumerate_holonomies(l_origami, 3.0)
    expected = np.sum(BallIndicator(2.0)(*a_t(0.1).apply_arrays(wide.x, wide.y)) * wide.multiplicity)
    assert functional(a_t(0.1), l_origami) == float(expected)
