"""
Circle and ellipse averages over K-orbits, the two-triangle sandwich, the
smoothed bumps psi_(+/-, delta) and the cusp cutoff.

The triangle machinery uses wedges symmetric about the positive y-axis; a
sector [phi1, phi2) is handled by measuring holonomy angles from its centre.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from constants import QUAD_MAX_NODES, QUAD_TOLERANCE, SANDWICH_SLACK, TWO_PI
from saddlecount.errors import EmptySample, InvalidParameter, RadiusExceedsEnumeration
from saddlecount.operations.counting import count_sector, siegel_veech_transform
from saddlecount.operations.models import SandwichReport, SectorSpec, SobolevEstimate
from saddlecount.operations.planar_functions import PlanarFunction, SmoothBump, TriangleIndicator, smoothstep, wrap_pi
from saddlecount.operations.saddle_enum import HolonomySet, enumerate_holonomies, torus_holonomies
from saddlecount.operations.surface_core import (
    GroupElement,
    PlanarVector,
    TranslationSurface,
    a_t,
    lattice_basis,
    lattice_systole,
    r_theta,
    systole,
)

logger = logging.getLogger("saddlecount.averaging")

SHORTEST_BLOCK = 2 ** 22

SurfaceFunctional = Callable[[GroupElement, TranslationSurface], float]


class QuadratureResult(NamedTuple):
    value: float
    nodes: int


# --- Densities on K = SO(2), parametrised by the rotation angle ---
@dataclass(frozen=True)
class IntervalIndicator:
    lo: float
    hi: float

    def __post_init__(self):
        if not 0 <= self.hi - self.lo <= TWO_PI + 1e-12:
            raise InvalidParameter(f"interval [{self.lo}, {self.hi}] must have length in [0, 2pi]")

    @property
    def support(self) -> tuple[float, float]:
        return self.lo, self.hi

    def mass(self) -> float:
        return (self.hi - self.lo) / TWO_PI

    def __call__(self, beta: np.ndarray) -> np.ndarray:
        offset = np.mod(np.asarray(beta) - self.lo, TWO_PI)
        return ((offset <= self.hi - self.lo) | (self.hi - self.lo >= TWO_PI)).astype(float)


@dataclass(frozen=True)
class SmoothedDensity:
    """Smoothstep profile: 1 within half_width - delta of the centre, 0 beyond half_width."""
    centre: float
    half_width: float
    delta: float

    def __post_init__(self):
        if not 0 < self.delta <= self.half_width <= math.pi:
            raise InvalidParameter("smoothed density needs 0 < delta <= half_width <= pi")

    @property
    def support(self) -> tuple[float, float]:
        return self.centre - self.half_width, self.centre + self.half_width

    def mass(self) -> float:
        return (2 * self.half_width - self.delta) / TWO_PI

    def __call__(self, beta: np.ndarray) -> np.ndarray:
        u = wrap_pi(np.asarray(beta) - self.centre)
        return smoothstep((self.half_width - np.abs(u)) / self.delta)


CircleDensity = IntervalIndicator | SmoothedDensity


def full_circle() -> IntervalIndicator:
    return IntervalIndicator(0.0, TWO_PI)


def theta_t(theta: float, t: float) -> float:
    """Half apex angle of a_{-t} W: tan(theta_t) = e^{-2t} tan(theta)."""
    if not 0 < theta < math.pi / 2:
        raise InvalidParameter(f"theta must lie in (0, pi/2), got {theta}")
    return math.atan(math.exp(-2.0 * t) * math.tan(theta))


# ---
# 1. QUADRATURE
# ---

def _midpoint(evaluate: Callable[[np.ndarray], np.ndarray], density: CircleDensity, n: int) -> float:
    lo, hi = density.support
    width = (hi - lo) / n
    nodes = lo + (np.arange(n) + 0.5) * width
    weights = density(nodes) * width / TWO_PI
    return float(np.sum(evaluate(nodes) * weights))


def adaptive_midpoint(evaluate: Callable[[np.ndarray], np.ndarray], density: CircleDensity, n_quad: int,
                      tolerance: float = QUAD_TOLERANCE, max_nodes: int = QUAD_MAX_NODES) -> QuadratureResult:
    """Midpoint rule on supp(density), doubling nodes until successive values agree."""
    if n_quad < 16:
        raise InvalidParameter(f"n_quad must be at least 16, got {n_quad}")
    n = n_quad
    previous = _midpoint(evaluate, density, n)
    while n * 2 <= max_nodes:
        n *= 2
        current = _midpoint(evaluate, density, n)
        if abs(current - previous) < tolerance:
            return QuadratureResult(current, n)
        previous = current
    logger.debug("[QUAD] node ceiling %d reached without meeting tolerance %.1e", n, tolerance)
    return QuadratureResult(previous, n)


def orbit_matrices(t: float, nodes: np.ndarray, g: GroupElement | None = None) -> np.ndarray:
    """a_t r_beta g for every beta in nodes, shape (n, 2, 2)."""
    cos, sin = np.cos(nodes), np.sin(nodes)
    rotations = np.empty((len(nodes), 2, 2))
    rotations[:, 0, 0], rotations[:, 0, 1] = cos, -sin
    rotations[:, 1, 0], rotations[:, 1, 1] = sin, cos
    tail = g.matrix if g is not None else np.eye(2)
    return np.einsum("ij,njk,kl->nil", a_t(t).matrix, rotations, tail)


def circle_average(f: SurfaceFunctional, s: TranslationSurface, t: float, density: CircleDensity,
                   n_quad: int = 64, max_nodes: int = QUAD_MAX_NODES) -> QuadratureResult:
    """Integral of f(a_t r_beta s) density(beta) dbeta / 2pi."""
    return ellipse_average(f, s, t, density, GroupElement.identity(), n_quad, max_nodes)


def ellipse_average(f: SurfaceFunctional, s: TranslationSurface, t: float, density: CircleDensity,
                    g: GroupElement, n_quad: int = 64, max_nodes: int = QUAD_MAX_NODES) -> QuadratureResult:
    """
    Integral of f(a_t r_beta g s) density(beta) dbeta / 2pi. Functionals with a
    `batch` method take all nodes of a pass at once.
    """
    stretch = a_t(t)
    batch = getattr(f, "batch", None)

    def evaluate(nodes: np.ndarray) -> np.ndarray:
        if batch is not None:
            return batch(orbit_matrices(t, nodes, g), s)
        return np.array([f(stretch @ r_theta(float(beta)) @ g, s) for beta in nodes])

    return adaptive_midpoint(evaluate, density, n_quad, max_nodes=max_nodes)


class HolonomyCache:
    """Keeps the last enumeration of a surface and reuses it for smaller radii."""

    def __init__(self, threads: int = 1):
        self.threads = threads
        self._cache: Optional[tuple[TranslationSurface, HolonomySet]] = None

    def holonomies(self, s: TranslationSurface, radius: float) -> HolonomySet:
        if self._cache is not None and self._cache[0] is s and self._cache[1].radius >= radius:
            return self._cache[1]
        found = enumerate_holonomies(s, radius, self.threads)
        self._cache = (s, found)
        return found


class SiegelVeechFunctional(HolonomyCache):
    """(g, s) -> psi-hat(g s), evaluated as sum of psi(g v) over V(s)."""

    def __init__(self, psi: PlanarFunction, threads: int = 1):
        super().__init__(threads)
        self.psi = psi

    def __call__(self, g: GroupElement, s: TranslationSurface) -> float:
        radius = self.psi.support_radius * g.inverse().operator_norm() * (1 + 1e-9)
        base = self.holonomies(s, radius)
        if len(base) == 0:
            return 0.0
        x, y = g.apply_arrays(base.x, base.y)
        return float(np.sum(self.psi(x, y) * base.multiplicity))


def shortest_images(matrices: np.ndarray, h: HolonomySet) -> np.ndarray:
    """min |g v| over v in h for every g of a (n, 2, 2) batch; h must be symmetric."""
    half = (h.y > 0) | ((h.y == 0) & (h.x > 0))
    x, y = h.x[half], h.y[half]
    if len(x) == 0:
        raise RadiusExceedsEnumeration(f"no holonomy within {h.radius}")
    out = np.empty(len(matrices))
    step = max(1, SHORTEST_BLOCK // len(x))
    for lo in range(0, len(matrices), step):
        block = matrices[lo:lo + step]
        gx = block[:, 0, 0, None] * x + block[:, 0, 1, None] * y
        gy = block[:, 1, 0, None] * x + block[:, 1, 1, None] * y
        out[lo:lo + step] = np.sqrt(np.min(gx * gx + gy * gy, axis=1))
    return out


class SystoleFunctional(HolonomyCache):
    """
    (g, s) -> systole(g s)^(-alpha). Tori reduce g times the lattice basis;
    other surfaces read min |g v| off one enumeration of V(s). A shortest
    connection of g s is g v with |v| <= |g^-1| systole(g s), and the short
    vectors of V(s) bound systole(g s) from above.
    """

    def __init__(self, alpha: float, threads: int = 1):
        super().__init__(threads)
        self.alpha = alpha

    def __call__(self, g: GroupElement, s: TranslationSurface) -> float:
        return float(self.batch(g.matrix[None, :, :], s)[0])

    def batch(self, matrices: np.ndarray, s: TranslationSurface) -> np.ndarray:
        matrices = np.asarray(matrices, dtype=float)
        basis = lattice_basis(s)
        if basis is not None:
            return lattice_systole(matrices @ basis) ** (-self.alpha)
        near_radius = 2.0 * systole(s)
        near = self.holonomies(s, near_radius)
        bound = float(shortest_images(matrices, near.restrict(near_radius)).max())
        # |g^-1| = |g| in SL(2, R)
        radius = float(np.linalg.norm(matrices, ord=2, axis=(1, 2)).max()) * bound * (1 + 1e-9)
        found = self.holonomies(s, radius)
        return shortest_images(matrices, found.restrict(radius)) ** (-self.alpha)


def constant_functional(value: float = 1.0) -> SurfaceFunctional:
    return lambda g, s: value


# ---
# 2. TRIANGLE SANDWICH
# ---

def _overlap(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    return np.maximum(0.0, np.minimum(b, d) - np.maximum(a, c))


def arc_masses(alpha: np.ndarray, rho: np.ndarray, theta_t_value: float, height: float,
               half_width: float) -> np.ndarray:
    """
    Per-vector (1/2pi) |{beta in [-L, L] : r_beta v in a_{-t} W}| for vectors at
    angle alpha from the vertical and length rho, where a_{-t} W is the triangle
    {|gamma| <= theta_t, rho cos(gamma) <= height}.
    """
    alpha = np.asarray(alpha, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if half_width <= 0:
        return np.zeros_like(alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        gamma0 = np.where(rho > height, np.arccos(np.clip(height / np.where(rho > 0, rho, 1.0), -1.0, 1.0)), 0.0)
    arc_top = np.full_like(alpha, theta_t_value)
    if half_width >= math.pi:
        total = 2.0 * np.maximum(arc_top - gamma0, 0.0)
    else:
        total = np.zeros_like(alpha)
        for shift in (-TWO_PI, 0.0, TWO_PI):
            a = alpha - half_width + shift
            b = alpha + half_width + shift
            total += _overlap(a, b, gamma0, arc_top) + _overlap(a, b, -arc_top, -gamma0)
    total = np.where(gamma0 < theta_t_value, total, 0.0)
    return total / TWO_PI


def arc_contribution(v: PlanarVector, t: float, theta: float, which: str, half_width: float) -> float:
    """Arc mass of one vector, angle measured from the positive y-axis."""
    if which not in ("W1", "W2"):
        raise InvalidParameter(f"triangle must be W1 or W2, got {which!r}")
    th = theta_t(theta, t)
    height = math.exp(t) * (math.cos(theta) if which == "W1" else 1.0)
    alpha = float(wrap_pi(math.atan2(v.y, v.x) - math.pi / 2))
    return float(arc_masses(np.array([alpha]), np.array([v.norm()]), th, height, half_width)[0])


def _sandwich_quadrature(h: HolonomySet, t: float, theta: float, th: float, centre: float,
                         half_width: float, which: str, n_quad: int) -> tuple[float, float]:
    """Midpoint rule over the rotation interval; returns (average, midpoint error bound)."""
    if half_width <= 0 or len(h) == 0:
        return 0.0, 0.0
    triangle = TriangleIndicator.w1(theta) if which == "W1" else TriangleIndicator.w2(theta)
    turn = r_theta(math.pi / 2 - centre)
    bx, by = turn.apply_arrays(h.x, h.y)
    stretch = a_t(t)
    density = IntervalIndicator(-min(half_width, math.pi), min(half_width, math.pi))

    def evaluate(nodes: np.ndarray) -> np.ndarray:
        values = []
        for beta in nodes:
            x, y = (stretch @ r_theta(float(beta))).apply_arrays(bx, by)
            values.append(float(np.sum(triangle(x, y) * h.multiplicity)))
        return np.array(values)

    value = _midpoint(evaluate, density, n_quad)
    step = 2 * min(half_width, math.pi) / n_quad
    return value, 4 * h.total * (step / 2) / TWO_PI


def sandwich_check(s: TranslationSurface, t: float, theta: float, sec: SectorSpec, n_quad: int = 256,
                   method: str = "exact", holonomies: Optional[HolonomySet] = None,
                   threads: int = 1) -> SandwichReport:
    """
    lower = (pi/theta_t) * average of the W1 transform over I_t^-,
    middle = N(e^t, s, phi1, phi2),
    upper = (pi/theta_t) * average of the W2 transform over I_t^+.
    """
    if not 0 < theta < 1:
        raise InvalidParameter(f"theta must lie in (0, 1), got {theta}")
    if method not in ("exact", "quadrature"):
        raise InvalidParameter(f"unknown sandwich method {method!r}")
    th = theta_t(theta, t)
    radius = math.exp(t) / math.cos(th)
    h = holonomies if holonomies is not None else enumerate_holonomies(s, radius, threads)
    if h.radius < radius * (1 - 1e-12):
        raise RadiusExceedsEnumeration(f"sandwich needs radius {radius}, have {h.radius}")

    middle = count_sector(h, math.exp(t), sec)
    half = sec.width / 2.0
    scale = math.pi / th
    lower_width, upper_width = half - th, half + th

    if method == "exact":
        alpha = wrap_pi(h.angles - sec.centre)
        weights = h.multiplicity
        lower = scale * float(np.sum(arc_masses(alpha, h.norms, th, math.exp(t) * math.cos(theta), lower_width) * weights))
        upper = scale * float(np.sum(arc_masses(alpha, h.norms, th, math.exp(t), upper_width) * weights))
        slack = SANDWICH_SLACK * max(1.0, middle)
    else:
        lower, lower_err = _sandwich_quadrature(h, t, theta, th, sec.centre, lower_width, "W1", n_quad)
        upper, upper_err = _sandwich_quadrature(h, t, theta, th, sec.centre, upper_width, "W2", n_quad)
        lower, upper = scale * lower, scale * upper
        slack = scale * max(lower_err, upper_err) + SANDWICH_SLACK * max(1.0, middle)

    report = SandwichReport(t=t, theta=theta, theta_t=th, lower=lower, middle=float(middle), upper=upper, slack=slack)
    if not report.holds:
        logger.warning("[SANDWICH] violation at t=%.4f theta=%.4f: %.6f <= %d <= %.6f", t, theta, lower, middle, upper)
    return report


# ---
# 3. SMOOTHING AND CUTOFF
# ---

def smooth_psi(b: SmoothBump, v: PlanarVector) -> float:
    return float(b(np.array([v.x]), np.array([v.y]))[0])


def psi_integral(b: SmoothBump) -> float:
    return b.integral()


def psi_difference_integral(theta: float, n_radial: int = 400, n_angular: int = 800) -> float:
    """Polar midpoint quadrature of psi_+ - psi_- over the plane, delta = theta^2."""
    upper, lower = SmoothBump(theta, "+"), SmoothBump(theta, "-")
    reach = theta + upper.delta
    total = 0.0
    for r0, r1 in ((0.0, math.cos(theta)), (math.cos(theta), 1.0 / math.cos(theta))):
        dr = (r1 - r0) / n_radial
        radii = r0 + (np.arange(n_radial) + 0.5) * dr
        dbeta = 2 * reach / n_angular
        betas = math.pi / 2 - reach + (np.arange(n_angular) + 0.5) * dbeta
        rr, bb = np.meshgrid(radii, betas, indexing="ij")
        x, y = rr * np.cos(bb), rr * np.sin(bb)
        total += float(np.sum((upper(x, y) - lower(x, y)) * rr) * dr * dbeta)
    return total


def psi_gap_constant(thetas: Sequence[float]) -> float:
    """Largest ratio of the integral of psi_+ - psi_- to delta over the given angles."""
    return max(psi_difference_integral(theta) / (theta * theta) for theta in thetas)


def cusp_decompose(psi: PlanarFunction, s: TranslationSurface, eps: float) -> tuple[float, float]:
    """(psi-hat (1 - chi_eps), psi-hat chi_eps) with chi_eps = 1 exactly when systole < eps."""
    if eps <= 0:
        raise InvalidParameter(f"cutoff must be positive, got {eps}")
    value = siegel_veech_transform(psi, enumerate_holonomies(s, psi.support_radius))
    if systole(s) < eps:
        return 0.0, value
    return value, 0.0


def derivative_commutation_check(psi: PlanarFunction, s: TranslationSurface, h_step: float = 1e-4,
                                 holonomies: Optional[HolonomySet] = None) -> tuple[float, float, float]:
    """
    Central difference (psi-hat(r_{-h} s) - psi-hat(r_h s)) / 2h against the
    transform of omega(psi); rotations keep V inside the same ball.
    """
    if not 1e-6 <= h_step <= 1e-3:
        raise InvalidParameter(f"h_step must lie in [1e-6, 1e-3], got {h_step}")
    if not psi.differentiable:
        raise InvalidParameter(f"{type(psi).__name__} has no closed-form rotation derivative")
    h = holonomies if holonomies is not None else enumerate_holonomies(s, psi.support_radius)
    if len(h) == 0:
        return 0.0, 0.0, 0.0
    weights = h.multiplicity
    xm, ym = r_theta(-h_step).apply_arrays(h.x, h.y)
    xp, yp = r_theta(h_step).apply_arrays(h.x, h.y)
    finite = float(np.sum((psi(xm, ym) - psi(xp, yp)) * weights)) / (2 * h_step)
    exact = float(np.sum(psi.omega(h.x, h.y) * weights))
    return finite, exact, abs(finite - exact)


def _sample_parts(sample, radius: float) -> tuple[HolonomySet, float]:
    if hasattr(sample, "basis"):
        basis = sample.basis()
        return torus_holonomies(basis, radius), float(lattice_systole(basis[None, :, :])[0])
    return enumerate_holonomies(sample, radius), systole(sample)


def sobolev_estimate(psi: PlanarFunction, samples: Sequence, eps: float) -> SobolevEstimate:
    """
    Monte Carlo estimate of S_K(f_main)^2 = |f_main|^2 + |omega f_main|^2 with
    f_main = psi-hat (1 - chi_eps) and omega f_main = (omega psi)-hat (1 - chi_eps).
    """
    if len(samples) == 0:
        raise EmptySample("sobolev estimate needs at least one sample")
    if eps <= 0:
        raise InvalidParameter(f"cutoff must be positive, got {eps}")
    norm_sq, deriv_sq = [], []
    for sample in samples:
        h, ell = _sample_parts(sample, psi.support_radius)
        if ell < eps or len(h) == 0:
            norm_sq.append(0.0)
            deriv_sq.append(0.0)
            continue
        value = float(np.sum(psi(h.x, h.y) * h.multiplicity))
        derivative = float(np.sum(psi.omega(h.x, h.y) * h.multiplicity))
        norm_sq.append(value * value)
        deriv_sq.append(derivative * derivative)
    norm_sq, deriv_sq = np.array(norm_sq), np.array(deriv_sq)
    total = norm_sq + deriv_sq
    n = len(total)
    std_error = float(np.std(total, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return SobolevEstimate(estimate=float(np.mean(total)), std_error=std_error, norm_term=float(np.mean(norm_sq)),
                           derivative_term=float(np.mean(deriv_sq)), n=n)
