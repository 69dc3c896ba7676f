import math

import numpy as np
import pytest
from scipy import integrate, stats

from saddlecount.errors import InvalidParameter, ZeroMassPsi
from saddlecount.operations.averaging import circle_average, full_circle
from saddlecount.operations.flat_sampling import (
    TorusSample,
    expected_inverse_height,
    integrability_probe,
    lattice_bases,
    lattice_of,
    mc_siegel_veech,
    rejection_probability,
    sample_rows,
    sample_torus,
    sample_torus_batch,
)
from saddlecount.operations.planar_functions import (
    AngularBump,
    BallIndicator,
    RotatedFunction,
    ScaledFunction,
    ZeroFunction,
)
from saddlecount.operations.saddle_enum import enumerate_holonomies
from saddlecount.operations.surface_core import apply_group, lattice_basis, systole

SEED = 20240601


def _x_cdf(x):
    return (np.arcsin(x) + math.pi / 6) / (math.pi / 3)


def _brute_systole(t: float, beta: float, bound: int = 60) -> float:
    m, n = np.meshgrid(np.arange(-bound, bound + 1), np.arange(-bound, bound + 1), indexing="ij")
    keep = (m != 0) | (n != 0)
    m, n = m[keep], n[keep]
    cos, sin = math.cos(beta), math.sin(beta)
    x = math.exp(t) * (cos * m - sin * n)
    y = math.exp(-t) * (sin * m + cos * n)
    return float(np.min(np.hypot(x, y)))


def test_samples_lie_in_the_fundamental_domain():
    x, y, phi, attempts = sample_torus_batch(SEED, 5000)
    assert len(x) == len(y) == len(phi) == 5000
    assert np.all(np.abs(x) <= 0.5)
    assert np.all(x * x + y * y >= 1.0)
    assert np.all((phi >= 0.0) & (phi < math.pi))
    assert attempts >= 5000


def test_sampling_is_reproducible():
    first = sample_torus_batch(SEED, 3000)
    second = sample_torus_batch(SEED, 3000)
    other = sample_torus_batch(SEED + 1, 3000)
    for a, b in zip(first[:3], second[:3]):
        assert np.array_equal(a, b)
    assert first[3] == second[3]
    assert not np.array_equal(first[0], other[0])
    assert sample_torus(SEED, 10)[0] == TorusSample(float(first[0][0]), float(first[1][0]), float(first[2][0]))


def test_prefix_of_a_larger_draw_is_the_smaller_draw():
    small = sample_torus_batch(SEED, 100)
    large = sample_torus_batch(SEED, 1000)
    assert np.array_equal(small[0], large[0][:100])


def test_sample_size_must_be_positive():
    with pytest.raises(InvalidParameter):
        sample_torus_batch(SEED, 0)


def test_mean_inverse_height():
    _, y, _, _ = sample_torus_batch(SEED, 100_000)
    values = 1.0 / y
    error = values.std(ddof=1) / math.sqrt(len(values))
    assert abs(values.mean() - expected_inverse_height()) < 4 * error


def test_rejection_rate():
    n = 100_000
    _, _, _, attempts = sample_torus_batch(SEED, n)
    p = rejection_probability()
    observed = (attempts - n) / attempts
    assert abs(observed - p) < 4 * math.sqrt(p * (1 - p) / attempts)


def test_marginals_follow_the_hyperbolic_measure():
    x, y, phi, _ = sample_torus_batch(SEED, 20_000)
    assert stats.kstest(x, _x_cdf).pvalue > 1e-3
    tail = y[y >= 1.0]
    assert stats.kstest(tail, lambda v: 1.0 - 1.0 / v).pvalue > 1e-3
    assert stats.kstest(phi / math.pi, "uniform").pvalue > 1e-3


def test_lattice_bases_are_unimodular():
    x, y, phi, _ = sample_torus_batch(SEED, 500)
    bases = lattice_bases(x, y, phi)
    assert bases.shape == (500, 2, 2)
    assert np.allclose(np.linalg.det(bases), 1.0)


def test_lattice_of_a_single_sample():
    assert np.allclose(lattice_of(TorusSample(0.0, 1.0, 0.0)), np.eye(2))
    s = 1.0 / math.sqrt(2.0)
    assert np.allclose(lattice_of(TorusSample(0.5, 2.0, math.pi / 2)), [[0.0, -2.0 * s], [s, 0.5 * s]])


def test_sample_surface_is_the_same_torus():
    sample = TorusSample(0.2, 1.3, 0.7)
    s = sample.surface()
    assert np.allclose(lattice_basis(s), sample.basis())
    assert s.area == pytest.approx(1.0)
    assert [item.cone_angle_multiple for item in s.singularities] == [1]
    assert enumerate_holonomies(s, 3.0).total > 0
    assert sample_rows([sample])[0].y == 1.3


def test_monte_carlo_siegel_veech_constant():
    report = mc_siegel_veech(BallIndicator(1.0), 10_000, SEED)
    assert report.n == 10_000
    assert abs(report.estimate - 6.0 / math.pi ** 2) < 4 * report.std_error


def test_monte_carlo_is_scale_free_and_thread_independent():
    base = mc_siegel_veech(BallIndicator(1.0), 2000, SEED)
    scaled = mc_siegel_veech(ScaledFunction(BallIndicator(1.0), 2.5), 2000, SEED)
    threaded = mc_siegel_veech(BallIndicator(1.0), 2000, SEED, threads=3)
    assert scaled.estimate == pytest.approx(base.estimate, rel=1e-12)
    assert threaded.estimate == base.estimate


def test_monte_carlo_is_rotation_invariant():
    psi = AngularBump(0.3, 2.0, 1.5)
    base = mc_siegel_veech(psi, 2000, SEED)
    rotated = mc_siegel_veech(RotatedFunction(psi, 1.1), 2000, SEED)
    assert abs(rotated.estimate - base.estimate) < 4 * (base.std_error + rotated.std_error)
    assert abs(rotated.estimate - 6.0 / math.pi ** 2) < 4 * rotated.std_error


def test_zero_mass_psi_is_rejected():
    with pytest.raises(ZeroMassPsi):
        mc_siegel_veech(ZeroFunction(), 10, SEED)


def test_integrability_probe_on_the_square_torus(torus):
    rows = integrability_probe(1.5, [0.0, 1.0, 2.0], torus, max_nodes=2 ** 14)
    assert rows[0].value == pytest.approx(1.0)
    assert rows[1].value > 1.0
    assert [row.running_sup for row in rows] == [max(row.value for row in rows[: k + 1]) for k in range(3)]


def test_larger_exponent_grows_faster(torus):
    low = integrability_probe(1.5, [2.0], torus, max_nodes=2 ** 14)[0].value
    high = integrability_probe(1.9, [2.0], torus, max_nodes=2 ** 14)[0].value
    assert high > low


@pytest.mark.parametrize("t", [1.0, 2.0])
def test_integrability_probe_matches_direct_quadrature(torus, t):
    alpha = 1.5
    expected, _ = integrate.quad(lambda beta: _brute_systole(t, beta) ** (-alpha), 0.0, 2 * math.pi, limit=400)
    expected /= 2 * math.pi
    value = integrability_probe(alpha, [t], torus, max_nodes=2 ** 16)[0].value
    assert value == pytest.approx(expected, rel=1e-2)


def test_integrability_probe_rejects_alpha():
    with pytest.raises(InvalidParameter):
        integrability_probe(2.0, [0.0], None)


def test_integrability_on_the_l_origami(l_origami):
    rows = integrability_probe(1.5, [0.0, 1.0], l_origami, n_quad=16, max_nodes=16)
    assert rows[0].value == pytest.approx(1.0)
    assert rows[0].nodes == 16
    direct = circle_average(lambda g, s: systole(apply_group(g, s)) ** -1.5, l_origami, 1.0, full_circle(),
                            n_quad=16, max_nodes=16)
    assert rows[1].value == pytest.approx(direct.value)
    assert rows[1].value > 1.0
