import sys
from math import gcd
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT))

from saddlecount.operations.surface_core import GroupElement, apply_group, build_surface  # noqa: E402
from saddlecount.storage.surfaces import load_surface  # noqa: E402

SURFACES = ROOT / "surfaces"


def primitive_vectors(T: float) -> set[tuple[float, float]]:
    """Brute-force primitive integer vectors of norm <= T."""
    bound = int(T)
    return {(float(m), float(n)) for m in range(-bound, bound + 1) for n in range(-bound, bound + 1)
            if gcd(m, n) == 1 and m * m + n * n <= T * T}


@pytest.fixture
def surfaces_dir() -> Path:
    return SURFACES


@pytest.fixture
def torus():
    return build_surface({"type": "square_tiled", "n": 1, "h": [1], "v": [1]})


@pytest.fixture
def l_origami():
    return build_surface({"type": "square_tiled", "n": 3, "h": [2, 1, 3], "v": [3, 2, 1]})


@pytest.fixture
def sheared_torus(torus):
    return apply_group(GroupElement(1.0, 1.0, 0.0, 1.0), torus)


@pytest.fixture
def hexagon_torus():
    return load_surface(SURFACES / "hexagon_torus.json")
