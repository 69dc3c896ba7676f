import math

import numpy as np
import pytest

from saddlecount.errors import InsufficientData, InvalidParameter, RadiusExceedsEnumeration, SupportExceedsEnumeration
from saddlecount.operations.counting import (
    boundbyell_probe,
    count_ellipse,
    count_sector,
    ellipse_fit,
    fit_growth,
    interpolation_check,
    prefix_counts,
    scan_counts,
    scan_rows,
    siegel_veech_transform,
)
from saddlecount.operations.models import SectorSpec
from saddlecount.operations.planar_functions import AngularBump, BallIndicator, RotatedFunction
from saddlecount.operations.saddle_enum import enumerate_holonomies
from saddlecount.operations.surface_core import GroupElement, a_t, r_theta

INVERSE_ZETA2 = 6.0 / math.pi ** 2


def test_torus_count_within_two(torus):
    h = enumerate_holonomies(torus, 2.0)
    assert count_sector(h, 2.0, SectorSpec.full_circle()) == 8
    assert count_sector(h, 1.0, SectorSpec.full_circle()) == 4


def test_quarter_sectors_partition_the_circle(l_origami):
    h = enumerate_holonomies(l_origami, 15.0)
    quarters = [SectorSpec(phi1=k * math.pi / 2, phi2=(k + 1) * math.pi / 2) for k in range(4)]
    assert sum(count_sector(h, 15.0, sec) for sec in quarters) == count_sector(h, 15.0, SectorSpec.full_circle())


def test_sector_wrapping_through_zero(torus):
    h = enumerate_holonomies(torus, 1.0)
    sec = SectorSpec(phi1=1.5 * math.pi - 0.1, phi2=2 * math.pi + 0.1)
    assert count_sector(h, 1.0, sec) == 2


def test_empty_sector_counts_nothing(torus):
    h = enumerate_holonomies(torus, 5.0)
    assert count_sector(h, 5.0, SectorSpec(phi1=0.2, phi2=0.2)) == 0


def test_count_beyond_enumeration_radius(torus):
    h = enumerate_holonomies(torus, 2.0)
    with pytest.raises(RadiusExceedsEnumeration):
        count_sector(h, 3.0, SectorSpec.full_circle())


def test_ellipse_count(torus):
    g = a_t(math.log(2.0))
    h = enumerate_holonomies(torus, 2.0)
    assert count_ellipse(h, 1.0, g, SectorSpec.full_circle()) == 2
    with pytest.raises(RadiusExceedsEnumeration):
        count_ellipse(h, 1.5, g, SectorSpec.full_circle())


def test_ellipse_count_matches_translated_surface(l_origami):
    g = GroupElement(1.0, 1.0, 0.0, 1.0)
    h = enumerate_holonomies(l_origami, 20.0)
    moved = enumerate_holonomies(l_origami, 20.0).transform(g, 8.0)
    sec = SectorSpec(phi1=0.3, phi2=1.9)
    assert count_ellipse(h, 8.0, g, sec) == count_sector(moved, 8.0, sec)


def test_siegel_veech_transform_of_ball(torus):
    h = enumerate_holonomies(torus, 2.0)
    assert siegel_veech_transform(BallIndicator(2.0), h) == 8.0
    assert siegel_veech_transform(BallIndicator(0.5), h) == 0.0
    with pytest.raises(SupportExceedsEnumeration):
        siegel_veech_transform(BallIndicator(3.0), h)


def test_rotated_function_transform_matches_rotated_surface(l_origami):
    psi = AngularBump(0.3, 2.0, 3.0)
    h = enumerate_holonomies(l_origami, 3.0)
    rotated = h.transform(r_theta(0.7), 3.0)
    assert siegel_veech_transform(RotatedFunction(psi, 0.7), h) == pytest.approx(siegel_veech_transform(psi, rotated))


def test_scan_counts_need_sorted_grid(torus):
    with pytest.raises(InvalidParameter):
        scan_counts(torus, [5.0, 2.0], SectorSpec.full_circle())


def test_prefix_counts_are_monotone(l_origami):
    h = enumerate_holonomies(l_origami, 30.0)
    series = prefix_counts(h, np.linspace(1.0, 30.0, 30), SectorSpec(phi1=0.0, phi2=1.0))
    counts = [N for _, N in series]
    assert counts == sorted(counts)
    assert series[-1][1] == count_sector(h, 30.0, SectorSpec(phi1=0.0, phi2=1.0))
    with pytest.raises(RadiusExceedsEnumeration):
        prefix_counts(h, np.array([10.0, 40.0]), SectorSpec.full_circle())


def test_fit_needs_enough_points():
    with pytest.raises(InsufficientData):
        fit_growth([(1.0, 4.0), (2.0, 8.0), (3.0, 16.0)], SectorSpec.full_circle())
    narrow = [(float(T), T * T) for T in np.linspace(10.0, 20.0, 12)]
    with pytest.raises(InsufficientData):
        fit_growth(narrow, SectorSpec.full_circle())


def test_fit_recovers_synthetic_growth():
    T = np.geomspace(10.0, 1000.0, 40)
    N = 0.6 * math.pi * T ** 2 + 5.0 * T ** 0.8
    fit = fit_growth(zip(T, N), SectorSpec.full_circle(), refine=True)
    assert fit.c_hat == pytest.approx(0.6, rel=5e-3)
    assert fit.refined_c == pytest.approx(0.6, rel=1e-2)
    assert fit.refined_exponent == pytest.approx(0.8, rel=1e-2)


def test_fit_recovers_an_exponent_near_two():
    T = np.geomspace(10.0, 1000.0, 40)
    N = 0.6 * math.pi * T ** 2 + 5.0 * T ** 1.9
    fit = fit_growth(zip(T, N), SectorSpec.full_circle(), refine=True)
    assert fit.refined_c == pytest.approx(0.6, rel=1e-2)
    assert fit.refined_exponent == pytest.approx(1.9, rel=1e-2)


def test_error_exponent_is_the_raw_residual_slope():
    T = np.geomspace(10.0, 1000.0, 40)
    N = 0.6 * math.pi * T ** 2 + 40.0 * T ** 1.5 * (1.5 + np.sin(3.0 * np.log(T)))
    fit = fit_growth(zip(T, N), SectorSpec.full_circle())
    Ts, magnitude = np.array(fit.T), np.abs(np.array(fit.residuals))
    tail = Ts >= fit.tail_start
    raw = np.polyfit(np.log(Ts[tail]), np.log(magnitude[tail]), 1)[0]
    envelope = np.maximum.accumulate(magnitude)
    running = np.polyfit(np.log(Ts[tail]), np.log(envelope[tail]), 1)[0]
    assert fit.error_exponent == pytest.approx(raw)
    assert fit.envelope_exponent == pytest.approx(running)
    assert fit.error_exponent != pytest.approx(fit.envelope_exponent)


def test_exact_quadratic_has_zero_error_exponent():
    T = np.geomspace(10.0, 1000.0, 20)
    fit = fit_growth(zip(T, 3.0 * math.pi * T ** 2), SectorSpec.full_circle())
    assert fit.c_hat == pytest.approx(3.0)
    assert fit.error_exponent == 0.0


def test_torus_growth_constant(torus):
    grid = np.geomspace(20.0, 200.0, 40)
    fit = fit_growth(scan_counts(torus, grid, SectorSpec.full_circle()), SectorSpec.full_circle())
    assert fit.c_hat * math.pi == pytest.approx(math.pi * INVERSE_ZETA2, rel=0.02)
    assert fit.error_exponent <= 1.82


def test_ellipse_fit_keeps_the_growth_constant(torus):
    g = r_theta(0.7) @ a_t(0.5)
    h = enumerate_holonomies(torus, 200.0 * g.operator_norm())
    fit = ellipse_fit(h, g, np.geomspace(20.0, 200.0, 30), SectorSpec.full_circle())
    assert fit.c_hat == pytest.approx(INVERSE_ZETA2, rel=0.05)
    with pytest.raises(RadiusExceedsEnumeration):
        ellipse_fit(h.restrict(100.0), g, np.geomspace(20.0, 200.0, 30), SectorSpec.full_circle())


@pytest.mark.slow
def test_l_origami_growth_constant_in_a_sector(l_origami):
    sec = SectorSpec(phi1=0.2, phi2=1.4)
    grid = np.geomspace(30.0, 400.0, 30)
    fit = fit_growth(scan_counts(l_origami, grid, sec, threads=2), sec)
    assert fit.c_hat == pytest.approx(3.0 * INVERSE_ZETA2, rel=0.03)


def test_scan_rows_without_fit(torus):
    rows = scan_rows([(1.0, 4), (2.0, 8)], None, SectorSpec.full_circle())
    assert [row.N for row in rows] == [4, 8]
    assert all(math.isnan(row.predicted) for row in rows)


def test_interpolation_between_schedule_radii(torus):
    h = enumerate_holonomies(torus, 20.0)
    report = interpolation_check(h, 10.0, 2.0, 1.0, SectorSpec.full_circle())
    assert (report.n, report.T_lo, report.T_hi) == (3, 9.0, 16.0)
    assert report.holds
    assert report.ratio == pytest.approx((4.0 / 3.0) ** 4)


def test_boundbyell_probe_tracks_running_supremum(torus):
    rows = boundbyell_probe(torus, [GroupElement.identity(), a_t(1.0), a_t(2.0)], 3.0, 1.5)
    systoles = [row.ell for row in rows]
    assert systoles == pytest.approx([1.0, math.exp(-1.0), math.exp(-2.0)])
    running = [row.running_sup for row in rows]
    assert running == sorted(running)
    assert running[-1] == max(row.ratio for row in rows)
    with pytest.raises(InvalidParameter):
        boundbyell_probe(torus, [GroupElement.identity()], 3.0, 1.0)
