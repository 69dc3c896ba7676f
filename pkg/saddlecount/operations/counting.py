"""
Sector and ellipse counts, Siegel-Veech transforms and growth fits.

Angles are measured from the positive x-axis. Sectors are half-open
[phi1, phi2) so adjacent sectors add up exactly; radii are closed (<= T).
"""
import logging
import math
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import curve_fit

from constants import TWO_PI
from saddlecount.errors import (
    InsufficientData,
    InvalidParameter,
    RadiusExceedsEnumeration,
    SupportExceedsEnumeration,
)
from saddlecount.operations.models import (
    ConfigurationFilter,
    GrowthFit,
    InterpolationReport,
    ProbeRow,
    ScanRow,
    SectorSpec,
)
from saddlecount.operations.planar_functions import PlanarFunction
from saddlecount.operations.saddle_enum import HolonomySet, enumerate_holonomies, filter_configuration
from saddlecount.operations.surface_core import GroupElement, TranslationSurface, apply_group, systole, wrap_angle
from saddlecount.operations.workers import run_chunked

logger = logging.getLogger("saddlecount.counting")

MIN_FIT_POINTS = 8
DEFAULT_TAIL_FRACTION = 0.5


def in_sector(angles: np.ndarray, sec: SectorSpec) -> np.ndarray:
    """Mask of angles (in [0, 2pi)) inside [phi1, phi2) taken modulo 2pi."""
    width = sec.width
    if width >= TWO_PI:
        return np.ones(np.shape(angles), dtype=bool)
    if width <= 0:
        return np.zeros(np.shape(angles), dtype=bool)
    lo, hi = wrap_angle(sec.phi1), wrap_angle(sec.phi2)
    if lo < hi:
        return (angles >= lo) & (angles < hi)
    if lo > hi:
        return (angles >= lo) | (angles < hi)
    full = width > math.pi
    return np.full(np.shape(angles), full, dtype=bool)


def count_sector(h: HolonomySet, T: float, sec: SectorSpec) -> int:
    if T > h.radius:
        raise RadiusExceedsEnumeration(f"count radius {T} exceeds enumeration radius {h.radius}")
    mask = (h.norms <= T) & in_sector(h.angles, sec)
    return int(h.multiplicity[mask].sum())


def count_ellipse(h: HolonomySet, T: float, g: GroupElement, sec: SectorSpec) -> int:
    """Number of v in h with g v in the sector of radius T, using V(gx) = gV(x)."""
    needed = T * g.operator_norm()
    if needed > h.radius * (1 + 1e-12):
        raise RadiusExceedsEnumeration(f"ellipse count needs radius {needed}, have {h.radius}")
    x, y = g.apply_arrays(h.x, h.y)
    angles = np.mod(np.arctan2(y, x), TWO_PI)
    angles = np.where(angles >= TWO_PI, 0.0, angles)
    mask = (np.hypot(x, y) <= T) & in_sector(angles, sec)
    return int(h.multiplicity[mask].sum())


def siegel_veech_transform(psi: PlanarFunction, h: HolonomySet) -> float:
    """psi-hat = sum of psi(v) over the multiset."""
    if psi.support_radius > h.radius * (1 + 1e-12):
        raise SupportExceedsEnumeration(
            f"psi is supported up to {psi.support_radius}, enumeration radius is {h.radius}"
        )
    if len(h) == 0:
        return 0.0
    return float(np.sum(psi(h.x, h.y) * h.multiplicity))


def scan_counts(s: TranslationSurface, T_grid: Sequence[float], sec: SectorSpec,
                cfg: ConfigurationFilter | None = None, threads: int = 1) -> list[tuple[float, int]]:
    """One enumeration at max(T_grid), then prefix counts per grid point."""
    grid = [float(T) for T in T_grid]
    if not grid:
        return []
    if any(later < earlier for earlier, later in zip(grid, grid[1:])):
        raise InvalidParameter("T grid must be sorted ascending")
    holonomies = enumerate_holonomies(s, grid[-1], threads)
    if cfg is not None:
        holonomies = filter_configuration(holonomies, cfg, threads)
    return prefix_counts(holonomies, grid, sec)


def prefix_counts(h: HolonomySet, grid: Sequence[float], sec: SectorSpec) -> list[tuple[float, int]]:
    grid = [float(T) for T in grid]
    if grid and grid[-1] > h.radius:
        raise RadiusExceedsEnumeration(f"grid reaches {grid[-1]}, enumeration radius is {h.radius}")
    mask = in_sector(h.angles, sec)
    norms = h.norms[mask]
    weights = h.multiplicity[mask]
    order = np.argsort(norms, kind="stable")
    norms, cumulative = norms[order], np.cumsum(weights[order])
    series = []
    for T in grid:
        index = int(np.searchsorted(norms, T, side="right"))
        series.append((T, int(cumulative[index - 1]) if index else 0))
    return series


def sector_area_factor(sec: SectorSpec) -> float:
    return min(sec.width, TWO_PI) / 2.0


def _slope(xs: np.ndarray, ys: np.ndarray) -> float:
    if len(xs) < 2 or np.ptp(xs) == 0:
        return float("nan")
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


def _growth_model(T, c, b, e, factor):
    return c * factor * T ** 2 + b * T ** e


def _refine(T: np.ndarray, N: np.ndarray, factor: float, c_start: float) -> tuple[float, float]:
    """Fits N = c*X + b*T^e; the starting exponent comes from a coarse linear scan."""
    best = None
    for e in np.linspace(0.05, 1.95, 39):
        design = np.column_stack([factor * T ** 2, T ** e])
        coeffs, *_ = np.linalg.lstsq(design, N, rcond=None)
        error = float(np.sum((design @ coeffs - N) ** 2))
        if best is None or error < best[0]:
            best = (error, coeffs[0], coeffs[1], e)
    _, c0, b0, e0 = best
    params, _ = curve_fit(lambda t, c, b, e: _growth_model(t, c, b, e, factor), T, N,
                          p0=[c0 if c0 > 0 else c_start, b0, e0], maxfev=20000)
    return float(params[0]), float(params[2])


def fit_growth(series: Iterable[tuple[float, float]], sec: SectorSpec,
               tail_fraction: float = DEFAULT_TAIL_FRACTION, refine: bool = False) -> GrowthFit:
    """
    c_hat = least-squares slope of N against X = ((phi2 - phi1)/2) T^2.
    The error exponent is the log-log slope of |N - c_hat X| against T over
    the largest `tail_fraction` of T values, zero residuals skipped. The same
    slope taken over the running maximum of |N - c_hat X| is reported as the
    envelope exponent.
    """
    points = sorted((float(T), float(N)) for T, N in series)
    if len(points) < MIN_FIT_POINTS:
        raise InsufficientData(f"need at least {MIN_FIT_POINTS} grid points, got {len(points)}")
    T = np.array([item[0] for item in points])
    N = np.array([item[1] for item in points])
    if T[0] <= 0 or T[-1] < 10 * T[0]:
        raise InsufficientData("grid must span at least one decade in T")
    if not 0 < tail_fraction <= 1:
        raise InvalidParameter(f"tail fraction must lie in (0, 1], got {tail_fraction}")

    factor = sector_area_factor(sec)
    X = factor * T ** 2
    c_hat = float(np.dot(X, N) / np.dot(X, X))
    residuals = N - c_hat * X

    tail_start = float(np.quantile(T, 1.0 - tail_fraction))
    tail = T >= tail_start
    magnitude = np.abs(residuals)
    envelope = np.maximum.accumulate(magnitude)
    floor = 1e-9 * np.maximum(N, 1.0)
    usable = tail & (magnitude > floor)
    envelope_ok = tail & (envelope > floor)
    exponent = _slope(np.log(T[usable]), np.log(magnitude[usable])) if usable.sum() >= 2 else 0.0
    envelope_exponent = 0.0
    if envelope_ok.sum() >= 2:
        envelope_exponent = _slope(np.log(T[envelope_ok]), np.log(envelope[envelope_ok]))

    refined_c = refined_e = None
    if refine:
        refined_c, refined_e = _refine(T, N, factor, c_hat)

    logger.info("[FIT] c_hat=%.6f error_exponent=%.4f tail from T=%.3f", c_hat, exponent, tail_start)
    return GrowthFit(c_hat=c_hat, error_exponent=float(exponent), envelope_exponent=float(envelope_exponent),
                     tail_start=tail_start, T=T.tolist(), residuals=residuals.tolist(), refined_c=refined_c,
                     refined_exponent=refined_e)


def scan_rows(series: Sequence[tuple[float, int]], fit: GrowthFit | None, sec: SectorSpec) -> list[ScanRow]:
    factor = sector_area_factor(sec)
    rows = []
    for T, N in series:
        predicted = fit.c_hat * factor * T * T if fit is not None else float("nan")
        rows.append(ScanRow(T=T, N=N, predicted=predicted, residual=N - predicted))
    return rows


def ellipse_fit(h: HolonomySet, g: GroupElement, T_grid: Sequence[float], sec: SectorSpec) -> GrowthFit:
    """Growth fit of count_ellipse(h, T, g, sec) over a grid."""
    series = [(T, count_ellipse(h, T, g, sec)) for T in T_grid]
    return fit_growth(series, sec)


def boundbyell_probe(s: TranslationSurface, translates: Sequence[GroupElement], R: float, alpha1: float,
                     threads: int = 1) -> list[ProbeRow]:
    """
    For each translate g: systole of g.s, |V(g.s) within R|, count * systole^alpha1 and the
    running supremum of that ratio.
    """
    if alpha1 <= 1:
        raise InvalidParameter(f"alpha1 must exceed 1, got {alpha1}")

    def measure(chunk: list[GroupElement]) -> list[tuple[float, int]]:
        out = []
        for g in chunk:
            moved = apply_group(g, s)
            out.append((systole(moved), enumerate_holonomies(moved, R).total))
        return out

    measured = run_chunked(measure, list(translates), threads)
    series, running = [], 0.0
    for ell, count in measured:
        ratio = count * ell ** alpha1
        running = max(running, ratio)
        series.append(ProbeRow(ell=ell, count=count, ratio=ratio, running_sup=running))
    return series


def interpolation_check(h: HolonomySet, T: float, sigma: float, lam: float, sec: SectorSpec) -> InterpolationReport:
    """
    Monotone interpolation between consecutive schedule radii T_n = n^(sigma/lam):
    for T_n < T <= T_(n+1), N(T_n) <= N(T) <= N(T_(n+1)).
    """
    from saddlecount.operations.exponents import interpolation_ratio, schedule_index

    if T <= 1:
        raise InvalidParameter(f"interpolation needs T > 1, got {T}")
    upper = schedule_index(T, sigma, lam)
    n = upper - 1
    exponent = sigma / lam
    T_lo, T_hi = float(n) ** exponent, float(upper) ** exponent
    return InterpolationReport(
        n=n, T_lo=T_lo, T=T, T_hi=T_hi,
        N_lo=count_sector(h, T_lo, sec), N=count_sector(h, T, sec), N_hi=count_sector(h, T_hi, sec),
        ratio=interpolation_ratio(n, sigma, lam),
    )
