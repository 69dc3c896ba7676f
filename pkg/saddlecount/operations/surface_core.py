"""
Translation surfaces: square-tiled (origami) and glued-polygon forms, the
SL(2,R) action on them and the systole function.

Conventions
-----------
* Square-tiled permutations are stored 0-indexed: h[i] is the square to the
  right of square i, v[i] the square above it. Documents use 1-indexed lists.
* Every corner of a square, and every polygon vertex, is a singularity; cone
  angle 2*pi*m with m = 1 kept as a marked point.
* A singularity of cone angle 2*pi*m has m sheets. On a square-tiled surface
  sheet j starts at the east ray of the j-th square of the vertex cycle of
  c = v h v^-1 h^-1 (each square standing for its bottom-left corner), cycles
  starting at their smallest square. On a polygon surface sheet 0 starts at
  the outgoing edge of the corner with the lowest (vertex index, polygon
  index); the two rules agree on converted origamis.
"""
import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import NamedTuple, Optional, Sequence

import numpy as np

from constants import DET_TOLERANCE, EDGE_TOLERANCE, TWO_PI
from saddlecount.errors import DisconnectedSurface, InvalidParameter, MalformedSpec, NonMatchingEdge
from saddlecount.operations.models import SquareTiledSpec, parse_surface_spec


def wrap_angle(angle: float) -> float:
    """Reduces an angle to [0, 2*pi)."""
    value = angle % TWO_PI
    return 0.0 if value >= TWO_PI else value


def wrap_angles(angles: np.ndarray) -> np.ndarray:
    values = np.mod(angles, TWO_PI)
    return np.where(values >= TWO_PI, 0.0, values)


def ccw_angle(ux: float, uy: float, wx: float, wy: float) -> float:
    """Counterclockwise angle from u to w, in [0, 2*pi)."""
    return wrap_angle(math.atan2(ux * wy - uy * wx, ux * wx + uy * wy))


class PlanarVector(NamedTuple):
    x: float
    y: float

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def angle(self) -> float:
        return wrap_angle(math.atan2(self.y, self.x))

    def __neg__(self) -> "PlanarVector":
        return PlanarVector(-self.x, -self.y)


@dataclass(frozen=True)
class GroupElement:
    """2x2 real matrix [[a, b], [c, d]] of determinant one."""
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        entries = (self.a, self.b, self.c, self.d)
        if not all(math.isfinite(item) for item in entries):
            raise InvalidParameter(f"group element has non-finite entries {entries}")
        det = self.a * self.d - self.b * self.c
        if self.is_integral():
            if det != 1.0:
                raise InvalidParameter(f"integer matrix has determinant {det}, expected 1")
            return
        scale = max(1.0, abs(self.a * self.d) + abs(self.b * self.c))
        if abs(det - 1.0) > DET_TOLERANCE * scale:
            raise InvalidParameter(f"matrix determinant {det!r} differs from 1")

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[float]]) -> "GroupElement":
        (a, b), (c, d) = matrix
        return cls(float(a), float(b), float(c), float(d))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def operator_norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))

    def is_integral(self) -> bool:
        return all(float(item).is_integer() for item in (self.a, self.b, self.c, self.d))

    def apply(self, v: PlanarVector) -> PlanarVector:
        return PlanarVector(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)

    def apply_arrays(self, xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.a * xs + self.b * ys, self.c * xs + self.d * ys


def a_t(t: float) -> GroupElement:
    return GroupElement(math.exp(t), 0.0, 0.0, math.exp(-t))


def r_theta(theta: float) -> GroupElement:
    cos, sin = math.cos(theta), math.sin(theta)
    return GroupElement(cos, -sin, sin, cos)


class Singularity(NamedTuple):
    id: int
    cone_angle_multiple: int


@dataclass(frozen=True)
class SquareTiled:
    n: int
    h: tuple[int, ...]
    v: tuple[int, ...]
    frame: GroupElement = field(default_factory=GroupElement.identity)


@dataclass(frozen=True)
class PolygonGlued:
    polygons: tuple[tuple[tuple[float, float], ...], ...]
    gluings: tuple[tuple[tuple[int, int], tuple[int, int]], ...]

    @cached_property
    def partner(self) -> dict[tuple[int, int], tuple[int, int]]:
        table = {}
        for first, second in self.gluings:
            table[first] = second
            table[second] = first
        return table

    def edge(self, polygon: int, index: int) -> tuple[float, float]:
        vertices = self.polygons[polygon]
        x0, y0 = vertices[index]
        x1, y1 = vertices[(index + 1) % len(vertices)]
        return x1 - x0, y1 - y0


@dataclass(frozen=True, eq=False)
class TranslationSurface:
    representation: SquareTiled | PolygonGlued
    singularities: tuple[Singularity, ...]
    area: float
    # square-tiled: per singularity, the squares whose bottom-left corner it is, in sheet order
    vertex_cycles: tuple[tuple[int, ...], ...] = ()
    # polygons: per polygon per vertex, (singularity id, absolute angle of the outgoing edge)
    corners: tuple[tuple[tuple[int, float], ...], ...] = ()

    @property
    def is_square_tiled(self) -> bool:
        return isinstance(self.representation, SquareTiled)

    @property
    def genus(self) -> int:
        return genus(self)

    @cached_property
    def polygon_form(self) -> "TranslationSurface":
        return to_polygons(self)

    @cached_property
    def fingerprint(self) -> str:
        rep = self.representation
        if isinstance(rep, SquareTiled):
            payload = {"h": rep.h, "v": rep.v, "frame": [rep.frame.a, rep.frame.b, rep.frame.c, rep.frame.d]}
        else:
            payload = {"polygons": [[[repr(x), repr(y)] for x, y in poly] for poly in rep.polygons],
                       "gluings": rep.gluings}
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


# ---
# 1. BUILDING
# ---

def build_surface(spec: object) -> TranslationSurface:
    """
    Builds a surface from a SurfaceSpec document (dict or parsed model).
    Raises MalformedSpec, NonMatchingEdge or DisconnectedSurface.
    """
    document = parse_surface_spec(spec)
    if isinstance(document, SquareTiledSpec):
        h = _read_permutation(document.h, document.n, "h")
        v = _read_permutation(document.v, document.n, "v")
        return square_tiled(h, v)
    return _build_polygons(
        [[(float(x), float(y)) for x, y in poly] for poly in document.polygons],
        [((int(p), int(e)), (int(q), int(f))) for (p, e), (q, f) in document.gluings],
    )


def _read_permutation(values: list[int], n: int, name: str) -> tuple[int, ...]:
    if len(values) != n or sorted(values) != list(range(1, n + 1)):
        raise MalformedSpec(f"{name} is not a permutation of 1..{n}: {values}")
    return tuple(item - 1 for item in values)


def square_tiled(h: Sequence[int], v: Sequence[int], frame: GroupElement | None = None) -> TranslationSurface:
    """Origami from 0-indexed permutations; `frame` is an integer SL2(Z) element."""
    n = len(h)
    if n == 0 or len(v) != n or sorted(h) != list(range(n)) or sorted(v) != list(range(n)):
        raise MalformedSpec("h and v must be permutations of the same set of squares")
    h, v = tuple(int(item) for item in h), tuple(int(item) for item in v)
    if not _is_transitive(n, (h, v)):
        raise DisconnectedSurface("the group generated by h and v is not transitive")

    cycles = vertex_cycles(h, v)
    singularities = tuple(Singularity(sid, len(cycle)) for sid, cycle in enumerate(cycles))
    representation = SquareTiled(n=n, h=h, v=v, frame=frame or GroupElement.identity())
    return TranslationSurface(representation, singularities, float(n), vertex_cycles=cycles)


def vertex_cycles(h: Sequence[int], v: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """Cycles of c = v h v^-1 h^-1 on squares, each starting at its smallest square."""
    n = len(h)
    hinv, vinv = _inverse(h), _inverse(v)
    seen = [False] * n
    cycles = []
    for start in range(n):
        if seen[start]:
            continue
        cycle = []
        square = start
        while not seen[square]:
            seen[square] = True
            cycle.append(square)
            square = v[h[vinv[hinv[square]]]]
        cycles.append(tuple(cycle))
    return tuple(cycles)


def _inverse(perm: Sequence[int]) -> list[int]:
    inverse = [0] * len(perm)
    for i, image in enumerate(perm):
        inverse[image] = i
    return inverse


def _is_transitive(n: int, generators: Sequence[Sequence[int]]) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        item = stack.pop()
        for gen in generators:
            image = gen[item]
            if image not in seen:
                seen.add(image)
                stack.append(image)
    return len(seen) == n


def _signed_area(vertices: Sequence[tuple[float, float]]) -> float:
    total = 0.0
    for i, (x0, y0) in enumerate(vertices):
        x1, y1 = vertices[(i + 1) % len(vertices)]
        total += x0 * y1 - x1 * y0
    return 0.5 * total


def _build_polygons(polygons: list[list[tuple[float, float]]],
                    gluings: list[tuple[tuple[int, int], tuple[int, int]]]) -> TranslationSurface:
    area = 0.0
    for index, poly in enumerate(polygons):
        if len(poly) < 3:
            raise MalformedSpec(f"polygon {index} has fewer than 3 vertices")
        if not all(math.isfinite(x) and math.isfinite(y) for x, y in poly):
            raise MalformedSpec(f"polygon {index} has non-finite coordinates")
        signed = _signed_area(poly)
        if signed <= EDGE_TOLERANCE:
            raise MalformedSpec(f"polygon {index} is degenerate or not counterclockwise")
        area += signed

    representation = PolygonGlued(
        polygons=tuple(tuple(poly) for poly in polygons),
        gluings=tuple((tuple(first), tuple(second)) for first, second in gluings),
    )
    _check_gluings(representation)
    corners, singularities = _vertex_classes(representation)
    return TranslationSurface(representation, singularities, area, corners=corners)


def _check_gluings(rep: PolygonGlued) -> None:
    used: set[tuple[int, int]] = set()
    for first, second in rep.gluings:
        for polygon, index in (first, second):
            if not (0 <= polygon < len(rep.polygons)) or not (0 <= index < len(rep.polygons[polygon])):
                raise MalformedSpec(f"gluing references missing edge ({polygon}, {index})")
            if (polygon, index) in used:
                raise MalformedSpec(f"edge ({polygon}, {index}) is glued more than once")
            used.add((polygon, index))
        ex, ey = rep.edge(*first)
        fx, fy = rep.edge(*second)
        length = max(1.0, math.hypot(ex, ey))
        if math.hypot(ex + fx, ey + fy) > EDGE_TOLERANCE * length:
            raise NonMatchingEdge(
                f"edges {first} and {second} are not parallel, equal-length and opposite"
            )
    total = sum(len(poly) for poly in rep.polygons)
    if len(used) != total:
        missing = next((p, e) for p, poly in enumerate(rep.polygons) for e in range(len(poly))
                       if (p, e) not in used)
        raise MalformedSpec(f"edge {missing} is not glued")

    parent = list(range(len(rep.polygons)))

    def find(item: int) -> int:
        while parent[item] != item:
            parent[item] = parent[parent[item]]
            item = parent[item]
        return item

    for (p, _), (q, _) in rep.gluings:
        parent[find(p)] = find(q)
    if len({find(p) for p in range(len(rep.polygons))}) != 1:
        raise DisconnectedSurface("polygons do not form a connected surface")


def _corner_angle(rep: PolygonGlued, polygon: int, index: int) -> float:
    """Interior angle at vertex `index`: from the outgoing edge ccw to the reversed incoming edge."""
    n = len(rep.polygons[polygon])
    ox, oy = rep.edge(polygon, index)
    ix, iy = rep.edge(polygon, (index - 1) % n)
    return ccw_angle(ox, oy, -ix, -iy)


def _vertex_classes(rep: PolygonGlued):
    """
    Walks around every vertex counterclockwise. The corner after (p, k) is the
    corner at the start of the edge glued to (p, k-1).
    """
    keys = sorted(((k, p) for p, poly in enumerate(rep.polygons) for k in range(len(poly))))
    label: dict[tuple[int, int], tuple[int, float]] = {}
    singularities = []
    for k, p in keys:
        if (p, k) in label:
            continue
        sid = len(singularities)
        corner = (p, k)
        absolute = 0.0
        while corner not in label:
            label[corner] = (sid, absolute)
            absolute += _corner_angle(rep, *corner)
            polygon, index = corner
            incoming = (polygon, (index - 1) % len(rep.polygons[polygon]))
            corner = rep.partner[incoming]
        if corner != (p, k):
            raise MalformedSpec(f"vertex walk from corner {(p, k)} does not close up")
        multiple = round(absolute / TWO_PI)
        if multiple < 1 or abs(absolute - TWO_PI * multiple) > 1e-6 * max(1.0, absolute):
            raise MalformedSpec(f"cone angle {absolute!r} at singularity {sid} is not a multiple of 2*pi")
        singularities.append(Singularity(sid, multiple))

    corners = tuple(
        tuple(label[(p, k)] for k in range(len(poly))) for p, poly in enumerate(rep.polygons)
    )
    singularities = tuple(singularities)

    n_edges = sum(len(poly) for poly in rep.polygons) // 2
    euler = len(singularities) - n_edges + len(rep.polygons)
    if sum(item.cone_angle_multiple - 1 for item in singularities) != -euler:
        raise MalformedSpec("cone angles violate Gauss-Bonnet")
    return corners, singularities


def genus(s: TranslationSurface) -> int:
    excess = sum(item.cone_angle_multiple - 1 for item in s.singularities)
    return excess // 2 + 1


# ---
# 2. GROUP ACTION
# ---

def to_polygons(s: TranslationSurface) -> TranslationSurface:
    """Explicit polygon form. Square i becomes polygon i with edges bottom, right, top, left."""
    rep = s.representation
    if isinstance(rep, PolygonGlued):
        return s
    frame = rep.frame
    unit = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    square = [tuple(frame.apply(PlanarVector(x, y))) for x, y in unit]
    polygons = [list(square) for _ in range(rep.n)]
    gluings = []
    for i in range(rep.n):
        gluings.append(((i, 1), (rep.h[i], 3)))
        gluings.append(((i, 2), (rep.v[i], 0)))
    return _build_polygons(polygons, gluings)


def apply_group(g: GroupElement, s: TranslationSurface) -> TranslationSurface:
    """
    g.s. Integer g on a square-tiled surface only updates its frame;
    anything else goes through the polygon form.
    """
    rep = s.representation
    if isinstance(rep, SquareTiled) and g.is_integral() and rep.frame.is_integral():
        return replace(s, representation=replace(rep, frame=g @ rep.frame))
    polygons = s.polygon_form.representation
    mapped = [[tuple(g.apply(PlanarVector(x, y))) for x, y in poly] for poly in polygons.polygons]
    return _build_polygons(mapped, list(polygons.gluings))


def lattice_basis(s: TranslationSurface) -> Optional[np.ndarray]:
    """Columns spanning the period lattice of a one-cell torus, else None."""
    rep = s.representation
    if isinstance(rep, SquareTiled):
        return rep.frame.matrix if rep.n == 1 else None
    if len(rep.polygons) != 1 or len(rep.polygons[0]) != 4:
        return None
    if rep.partner.get((0, 0)) != (0, 2) or rep.partner.get((0, 1)) != (0, 3):
        return None
    e0, e1 = rep.edge(0, 0), rep.edge(0, 1)
    return np.array([[e0[0], e1[0]], [e0[1], e1[1]]], dtype=float)


def lattice_systole(bases: np.ndarray, max_iter: int = 500) -> np.ndarray:
    """
    Shortest nonzero vector length for a batch of lattices, shape (N, 2, 2)
    with basis vectors as columns, by vectorised Gauss-Lagrange reduction.
    """
    bases = np.asarray(bases, dtype=float)
    u = bases[:, :, 0].copy()
    w = bases[:, :, 1].copy()
    for _ in range(max_iter):
        nu = np.einsum("ij,ij->i", u, u)
        nw = np.einsum("ij,ij->i", w, w)
        swap = nw < nu
        if swap.any():
            held = u[swap].copy()
            u[swap] = w[swap]
            w[swap] = held
            nu = np.einsum("ij,ij->i", u, u)
        mu = np.rint(np.einsum("ij,ij->i", u, w) / nu)
        if not mu.any():
            break
        w -= mu[:, None] * u
    return np.sqrt(np.einsum("ij,ij->i", u, u))


def systole(s: TranslationSurface, hint_radius: float = 1.0) -> float:
    """
    Length of a shortest saddle connection. Enumerates within hint_radius and
    doubles the radius until something is found.
    """
    basis = lattice_basis(s)
    if basis is not None:
        return float(lattice_systole(basis[None, :, :])[0])

    from saddlecount.operations.saddle_enum import enumerate_holonomies

    radius = hint_radius if hint_radius > 0 else 1.0
    while True:
        found = enumerate_holonomies(s, radius)
        if len(found):
            return float(found.norms.min())
        radius *= 2.0
