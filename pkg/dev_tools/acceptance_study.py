# acceptance_study.py
import math
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List

import numpy as np
from scipy import integrate

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

import constants
from saddlecount.logs import configure_logging
from saddlecount.operations.averaging import derivative_commutation_check, sandwich_check
from saddlecount.operations.counting import count_sector, ellipse_fit, fit_growth, scan_counts
from saddlecount.operations.exponents import (
    build_ledger,
    eta1_sector,
    eta1_uniform,
    is_summable_sector,
    is_summable_uniform,
    kappa_of_sigma,
    lambda_prime_balance,
    solve_sigma,
    solve_sigma_uniform,
)
from saddlecount.operations.flat_sampling import count_oracle, integrability_probe, mc_siegel_veech
from saddlecount.operations.models import SectorSpec
from saddlecount.operations.planar_functions import AngularBump, BallIndicator, RadialBump
from saddlecount.operations.saddle_enum import enumerate_exact, enumerate_generic, enumerate_holonomies
from saddlecount.operations.surface_core import GroupElement, a_t, apply_group, build_surface, r_theta

TORUS = {"type": "square_tiled", "n": 1, "h": [1], "v": [1]}
L_ORIGAMI = {"type": "square_tiled", "n": 3, "h": [2, 1, 3], "v": [3, 2, 1]}


def _primitive_vectors(T: float) -> set:
    bound = int(T)
    return {(float(m), float(n)) for m in range(-bound, bound + 1) for n in range(-bound, bound + 1)
            if math.gcd(m, n) == 1 and m * m + n * n <= T * T}


def _brute_systole(t: float, beta: float, bound: int = 60) -> float:
    m, n = np.meshgrid(np.arange(-bound, bound + 1), np.arange(-bound, bound + 1), indexing="ij")
    keep = (m != 0) | (n != 0)
    m, n = m[keep], n[keep]
    x = math.exp(t) * (math.cos(beta) * m - math.sin(beta) * n)
    y = math.exp(-t) * (math.sin(beta) * m + math.cos(beta) * n)
    return float(np.min(np.hypot(x, y)))


def torus_exactness(threads: int) -> Dict[str, Any]:
    torus = build_surface(TORUS)
    h = enumerate_exact(torus, 50.0, threads)
    found = {(float(x), float(y)) for x, y in zip(h.x, h.y)}
    ok = found == _primitive_vectors(50.0) and len(found) == h.total and set(h.multiplicity) == {1}
    return {"passed": ok, "detail": f"{h.total} vectors"}


def engine_agreement(threads: int) -> Dict[str, Any]:
    l_origami = build_surface(L_ORIGAMI)
    exact = enumerate_exact(l_origami, 100.0, threads)
    generic = enumerate_generic(l_origami, 100.0, threads)
    ok = sorted(exact.keys(endpoints=False)) == sorted(generic.keys(endpoints=False))
    return {"passed": ok, "detail": f"exact {exact.total}, generic {generic.total}"}


def quadratic_growth(threads: int) -> Dict[str, Any]:
    torus = build_surface(TORUS)
    sector = SectorSpec.full_circle()
    fit = fit_growth(scan_counts(torus, np.geomspace(20.0, 200.0, 40), sector, threads=threads), sector)
    target = math.pi / constants.ZETA2
    ok = abs(fit.c_hat * math.pi - target) <= 0.02 * target and fit.error_exponent <= 1.82
    return {"passed": ok, "detail": f"c_hat*pi={fit.c_hat * math.pi:.5f}, exponent={fit.error_exponent:.3f}"}


def sector_proportionality(threads: int, seed: int) -> Dict[str, Any]:
    rng = np.random.default_rng(seed)
    h = enumerate_holonomies(build_surface(TORUS), 200.0, threads)
    full = count_sector(h, 200.0, SectorSpec.full_circle())
    worst = 0.0
    for _ in range(8):
        phi1 = float(rng.uniform(0.0, constants.TWO_PI))
        width = float(rng.uniform(0.3, constants.TWO_PI))
        sector = SectorSpec(phi1=phi1, phi2=phi1 + width)
        expected = width / constants.TWO_PI
        worst = max(worst, abs(count_sector(h, 200.0, sector) / full - expected) / expected)
    return {"passed": worst <= 0.03, "detail": f"worst relative error {worst:.4f}"}


def sandwich_grid(threads: int, seed: int) -> Dict[str, Any]:
    rng = np.random.default_rng(seed)
    surfaces = [build_surface(TORUS), build_surface(L_ORIGAMI)]
    violations, checks = 0, 0
    for k in range(100):
        t = float(rng.uniform(0.2, 3.0))
        theta = float(rng.uniform(0.05, 0.95))
        centre = float(rng.uniform(0.0, constants.TWO_PI))
        width = float(rng.uniform(0.2, constants.TWO_PI))
        sector = SectorSpec(phi1=centre - width / 2, phi2=centre + width / 2)
        report = sandwich_check(surfaces[k % 2], t, theta, sector, threads=threads)
        violations += not report.holds
        checks += 1
    return {"passed": violations == 0, "detail": f"{checks} checks, {violations} violations"}


def siegel_veech_mc(threads: int, seed: int) -> Dict[str, Any]:
    report = mc_siegel_veech(BallIndicator(1.0), 10_000, seed, threads)
    gap = abs(report.estimate - constants.TORUS_SV_CONSTANT)
    oracle = count_oracle(seed, 2000, threads=threads)
    oracle_ok = abs(oracle - constants.TORUS_SV_CONSTANT) <= 0.05 * constants.TORUS_SV_CONSTANT
    return {"passed": gap <= 3 * report.std_error and oracle_ok,
            "detail": f"{report.estimate:.5f} +- {report.std_error:.5f}, oracle {oracle:.5f}"}


def exponent_ledger() -> Dict[str, Any]:
    sector, uniform = build_ledger(1.0, 1.001, 1.999), build_ledger(1.0, 1.001, 1.999, uniform=True)
    ok = sector.sigma == 11.0 and math.isclose(sector.kappa_final, 1.0 / 11.0) and uniform.sigma == 17.0
    for lam in np.linspace(0.05, 1.0, 20):
        sigma = solve_sigma(lam)
        ok &= abs(kappa_of_sigma(sigma, lam) - lam / (2 * sigma)) <= 1e-12
        left, right = lambda_prime_balance(5.0, 0.1, lam)
        ok &= abs(left - right) <= 1e-12 * max(abs(left), 1.0)
    for alpha1 in (0.8, 1.0, 1.01, 1.5):
        sigma, sigma_u = solve_sigma(1.0), solve_sigma_uniform(1.0)
        ok &= is_summable_sector(alpha1, sigma) == (alpha1 > 1)
        ok &= is_summable_uniform(alpha1, sigma_u) == (alpha1 > 1)
        ok &= eta1_sector(alpha1, sigma) > 0 and eta1_uniform(alpha1, sigma_u) > 0
    return {"passed": bool(ok), "detail": f"sigma={sector.sigma}, kappa={sector.kappa_final:.6f}, "
                                          f"uniform sigma={uniform.sigma}"}


def commutation(threads: int, seed: int) -> Dict[str, Any]:
    rng = np.random.default_rng(seed)
    base = [build_surface(TORUS), build_surface(L_ORIGAMI)]
    surfaces = base + [apply_group(a_t(0.3), base[0]), apply_group(r_theta(0.4), base[1]),
                       apply_group(GroupElement(1.0, 2.0, 0.0, 1.0), base[1])]
    worst = 0.0
    for _ in range(10):
        if rng.random() < 0.8:
            psi = AngularBump(float(rng.uniform(0, constants.TWO_PI)), float(rng.uniform(0.5, 4.0)),
                              float(rng.uniform(1.5, 3.0)))
        else:
            psi = RadialBump(float(rng.uniform(1.5, 3.0)))
        for s in surfaces:
            _, exact, gap = derivative_commutation_check(psi, s, h_step=1e-5)
            worst = max(worst, gap / max(1.0, abs(exact)))
    return {"passed": worst <= 1e-6, "detail": f"worst gap {worst:.2e}"}


def integrability(threads: int) -> Dict[str, Any]:
    torus = build_surface(TORUS)
    rows = integrability_probe(1.5, [float(t) for t in range(9)], torus)
    last, peak = rows[-1].value, rows[-1].running_sup
    oracle = {}
    for t in (1.0, 2.0):
        value, _ = integrate.quad(lambda beta: _brute_systole(t, beta) ** -1.5, 0.0, constants.TWO_PI, limit=400)
        oracle[t] = value / constants.TWO_PI
    matched = all(abs(rows[int(t)].value - value) <= 0.01 * value for t, value in oracle.items())
    ok = math.isfinite(peak) and last >= 0.95 * peak and matched
    return {"passed": ok, "detail": f"last={last:.4f}, sup={peak:.4f}, oracle match={matched}"}


def ellipse_uniformity(threads: int) -> Dict[str, Any]:
    torus = build_surface(TORUS)
    translates = [GroupElement(1.0, 1.0, 0.0, 1.0), GroupElement(2.0, 1.0, 1.0, 1.0), a_t(math.log(3.0)),
                  r_theta(0.7) @ a_t(1.0), GroupElement(1.0, 0.0, 3.0, 1.0)]
    sector = SectorSpec.full_circle()
    grid = np.geomspace(20.0, 200.0, 30)
    fits = []
    for g in translates:
        h = enumerate_holonomies(torus, 200.0 * g.operator_norm(), threads)
        fits.append(ellipse_fit(h, g, grid, sector).c_hat)
    spread = (max(fits) - min(fits)) / min(fits)
    return {"passed": spread <= 0.03, "detail": f"c_hat spread {spread:.4f}"}


def run_acceptance_study(threads: int = 1, seed: int = constants.DEFAULT_SEED) -> List[Dict[str, Any]]:
    """Runs the ten acceptance checks and returns one summary row per check with its wall time."""
    checks: List[tuple[str, Callable[[], Dict[str, Any]]]] = [
        ("torus exactness", lambda: torus_exactness(threads)),
        ("engine agreement", lambda: engine_agreement(threads)),
        ("quadratic growth", lambda: quadratic_growth(threads)),
        ("sector proportionality", lambda: sector_proportionality(threads, seed)),
        ("sandwich", lambda: sandwich_grid(threads, seed)),
        ("siegel-veech monte carlo", lambda: siegel_veech_mc(threads, seed)),
        ("exponent ledger", exponent_ledger),
        ("commutation", lambda: commutation(threads, seed)),
        ("integrability", lambda: integrability(threads)),
        ("ellipse uniformity", lambda: ellipse_uniformity(threads)),
    ]
    summary = []
    for name, check in checks:
        started = time.perf_counter()
        result = check()
        summary.append({"check": name, **result, "seconds": round(time.perf_counter() - started, 2)})
    return summary


if __name__ == "__main__":
    configure_logging("WARNING")
    rows = run_acceptance_study(threads=constants.DEFAULT_THREADS)
    for row in rows:
        status = "PASS" if row["passed"] else "FAIL"
        print(f"{status}  {row['check']:<26} {row['seconds']:>8.2f}s  {row['detail']}")
    sys.exit(0 if all(row["passed"] for row in rows) else 1)
