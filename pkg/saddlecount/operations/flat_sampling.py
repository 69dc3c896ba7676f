"""
Flat measure on the torus locus: unit-covolume lattices sampled from the
modular fundamental domain (density proportional to dx dy / y^2) together
with a uniform rotation, plus the Monte Carlo checks built on them.
"""
import logging
import math
from typing import NamedTuple, Sequence

import numpy as np

from constants import FUNDAMENTAL_DOMAIN_Y0, QUAD_MAX_NODES
from saddlecount.errors import InvalidParameter, ZeroMassPsi
from saddlecount.logs import progress
from saddlecount.operations.averaging import SystoleFunctional, circle_average, full_circle
from saddlecount.operations.models import IntegrabilityRow, MonteCarloReport, SampleRow
from saddlecount.operations.planar_functions import PlanarFunction
from saddlecount.operations.saddle_enum import torus_holonomies
from saddlecount.operations.surface_core import TranslationSurface, build_surface
from saddlecount.operations.workers import run_chunked

logger = logging.getLogger("saddlecount.flat_sampling")

BLOCK_SIZE = 4096


class TorusSample(NamedTuple):
    x: float
    y: float
    phi: float

    def basis(self) -> np.ndarray:
        return lattice_of(self)

    def surface(self) -> TranslationSurface:
        """One parallelogram with opposite sides glued, spanned by the basis columns."""
        basis = self.basis()
        e1, e2 = basis[:, 0], basis[:, 1]
        corners = [(0.0, 0.0), tuple(e1), tuple(e1 + e2), tuple(e2)]
        return build_surface({
            "type": "polygons",
            "polygons": [[(float(x), float(y)) for x, y in corners]],
            "gluings": [[[0, 0], [0, 2]], [[0, 1], [0, 3]]],
        })


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def sample_torus_batch(seed: int, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """
    Rejection sampler drawing fixed blocks of candidates:
    x ~ U[-1/2, 1/2], y = (sqrt(3)/2)/(1 - u) (density ~ 1/y^2 on y >= sqrt(3)/2),
    rejecting x^2 + y^2 < 1; phi ~ U[0, pi). Returns (x, y, phi, attempts).
    """
    if n < 1:
        raise InvalidParameter(f"sample size must be at least 1, got {n}")
    rng = _generator(seed)
    xs, ys, phis = [], [], []
    accepted, attempts = 0, 0
    while accepted < n:
        x = rng.uniform(-0.5, 0.5, BLOCK_SIZE)
        y = FUNDAMENTAL_DOMAIN_Y0 / (1.0 - rng.random(BLOCK_SIZE))
        phi = rng.uniform(0.0, math.pi, BLOCK_SIZE)
        kept = np.flatnonzero(x * x + y * y >= 1.0)[: n - accepted]
        if accepted + len(kept) == n:
            attempts += int(kept[-1]) + 1
        else:
            attempts += BLOCK_SIZE
        xs.append(x[kept])
        ys.append(y[kept])
        phis.append(phi[kept])
        accepted += len(kept)
    return np.concatenate(xs), np.concatenate(ys), np.concatenate(phis), attempts


def sample_torus(seed: int, n: int) -> list[TorusSample]:
    x, y, phi, _ = sample_torus_batch(seed, n)
    return [TorusSample(float(a), float(b), float(c)) for a, b, c in zip(x, y, phi)]


def lattice_bases(x: np.ndarray, y: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """r_phi (1/sqrt(y)) [[1, x], [0, y]] for every sample, shape (N, 2, 2)."""
    x, y, phi = np.asarray(x, dtype=float), np.asarray(y, dtype=float), np.asarray(phi, dtype=float)
    scale = 1.0 / np.sqrt(y)
    cos, sin = np.cos(phi), np.sin(phi)
    upper = np.stack([scale, x * scale], axis=-1)
    lower = np.stack([np.zeros_like(y), y * scale], axis=-1)
    out = np.empty((len(x), 2, 2))
    out[:, 0, :] = cos[:, None] * upper - sin[:, None] * lower
    out[:, 1, :] = sin[:, None] * upper + cos[:, None] * lower
    return out


def lattice_of(sample: TorusSample) -> np.ndarray:
    return lattice_bases(np.array([sample.x]), np.array([sample.y]), np.array([sample.phi]))[0]


def sample_rows(samples: Sequence[TorusSample]) -> list[SampleRow]:
    return [SampleRow(x=item.x, y=item.y, phi=item.phi) for item in samples]


def expected_inverse_height() -> float:
    """Mean of 1/y under (3/pi) dx dy / y^2 on the fundamental domain."""
    return 3.0 * math.log(3.0) / (2.0 * math.pi)


def rejection_probability() -> float:
    return 1.0 - math.pi * math.sqrt(3.0) / 6.0


def _transform_values(psi: PlanarFunction, bases: np.ndarray) -> list[float]:
    return [float(np.sum(psi(h.x, h.y))) for h in (torus_holonomies(basis, psi.support_radius) for basis in bases)]


def mc_siegel_veech(psi: PlanarFunction, n: int, seed: int, threads: int = 1) -> MonteCarloReport:
    """Sample mean of psi-hat over the torus locus divided by the integral of psi."""
    mass = psi.integral()
    if mass == 0:
        raise ZeroMassPsi(f"{type(psi).__name__} integrates to zero")
    x, y, phi, _ = sample_torus_batch(seed, n)
    bases = lattice_bases(x, y, phi)
    values = np.array(run_chunked(lambda chunk: _transform_values(psi, chunk), list(bases), threads)) / mass
    std_error = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    estimate = float(np.mean(values))
    logger.info("[MC] n=%d seed=%d estimate=%.6f +- %.6f", n, seed, estimate, std_error)
    return MonteCarloReport(estimate=estimate, std_error=std_error, n=n, seed=seed)


def count_oracle(seed: int, n: int, radius: float = 20.0, threads: int = 1) -> float:
    """Average of |V cap B(0, R)| / (pi R^2) over the same samples, an independent check on 1/zeta(2)."""
    x, y, phi, _ = sample_torus_batch(seed, n)
    bases = lattice_bases(x, y, phi)
    counts = run_chunked(lambda chunk: [len(torus_holonomies(basis, radius)) for basis in chunk], list(bases), threads)
    return float(np.mean(counts)) / (math.pi * radius * radius)


def integrability_probe(alpha2: float, t_grid: Sequence[float], s: TranslationSurface, n_quad: int = 256,
                        max_nodes: int = QUAD_MAX_NODES, threads: int = 1) -> list[IntegrabilityRow]:
    """Circle averages of systole^(-alpha2) along a_t, with their running supremum."""
    if not 1 <= alpha2 < 2:
        raise InvalidParameter(f"alpha2 must lie in [1, 2), got {alpha2}")
    functional = SystoleFunctional(alpha2, threads)
    rows, running, capped = [], 0.0, 0
    for t in t_grid:
        value, nodes = circle_average(functional, s, float(t), full_circle(), n_quad, max_nodes)
        running = max(running, value)
        capped += nodes * 2 > max_nodes
        rows.append(IntegrabilityRow(t=float(t), value=value, running_sup=running, nodes=nodes))
        progress(logger, "[INTEGRABILITY] t=%.3f value=%.6f nodes=%d", t, value, nodes)
    if capped:
        logger.info("[INTEGRABILITY] %d of %d averages stopped at the %d node ceiling", capped, len(rows), max_nodes)
    return rows
