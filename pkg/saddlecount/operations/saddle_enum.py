"""
Saddle connection and cylinder enumeration.

Two engines produce the same multiset on square-tiled input:

* `enumerate_exact` walks the Stern-Brocot tree of primitive directions and
  moves every sheet through the square complex at once with permutation
  arrays. The crossing word of direction (P, Q) is read off the Christoffel
  word, which factors along the tree.
* `enumerate_generic` develops triangles outwards from every triangle corner
  keeping a visibility wedge, and works on any glued-polygon surface.
"""
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np

from constants import TWO_PI, WEDGE_TOLERANCE
from saddlecount.errors import InvalidParameter, MalformedSpec, RadiusExceedsEnumeration, ToleranceBreakdown, UnknownSingularity
from saddlecount.logs import progress
from saddlecount.operations.models import ConfigurationFilter, HolonomyRow
from saddlecount.operations.surface_core import (
    GroupElement,
    PolygonGlued,
    SquareTiled,
    TranslationSurface,
    ccw_angle,
    lattice_basis,
    wrap_angles,
)
from saddlecount.operations.workers import run_chunked

logger = logging.getLogger("saddlecount.saddle_enum")

SHEET_EPSILON = 1e-9


@dataclass(frozen=True, eq=False)
class HolonomySet:
    """
    Multiset of holonomies of length at most `radius`. Cylinder sets use -1 for
    start, end and separatrix.
    """
    x: np.ndarray
    y: np.ndarray
    start: np.ndarray
    end: np.ndarray
    separatrix: np.ndarray
    multiplicity: np.ndarray
    radius: float
    surface: Optional[TranslationSurface] = None
    kind: str = "saddle"
    n_singularities: int = 0

    @classmethod
    def build(cls, rows: dict[str, np.ndarray], radius: float, surface: Optional[TranslationSurface],
              kind: str = "saddle") -> "HolonomySet":
        x = np.asarray(rows.get("x", []), dtype=float)
        size = len(x)
        column = lambda name, fill: np.asarray(rows.get(name, np.full(size, fill)), dtype=np.int64)
        y = np.asarray(rows.get("y", []), dtype=float)
        start = column("start", -1)
        end = column("end", -1)
        separatrix = column("separatrix", -1)
        multiplicity = column("multiplicity", 1)
        order = np.lexsort((separatrix, end, start, wrap_angles(np.arctan2(y, x)), np.hypot(x, y)))
        n_sing = len(surface.singularities) if surface is not None else 0
        return cls(x[order], y[order], start[order], end[order], separatrix[order], multiplicity[order],
                   float(radius), surface, kind, n_sing)

    def __len__(self) -> int:
        return len(self.x)

    @property
    def total(self) -> int:
        return int(self.multiplicity.sum())

    @property
    def fingerprint(self) -> str:
        return self.surface.fingerprint if self.surface is not None else ""

    @cached_property
    def norms(self) -> np.ndarray:
        return np.hypot(self.x, self.y)

    @cached_property
    def angles(self) -> np.ndarray:
        return wrap_angles(np.arctan2(self.y, self.x))

    def _subset(self, mask: np.ndarray, radius: float | None = None) -> "HolonomySet":
        return HolonomySet(self.x[mask], self.y[mask], self.start[mask], self.end[mask], self.separatrix[mask],
                           self.multiplicity[mask], self.radius if radius is None else radius, self.surface,
                           self.kind, self.n_singularities)

    def restrict(self, T: float) -> "HolonomySet":
        if T > self.radius:
            raise RadiusExceedsEnumeration(f"radius {T} exceeds enumeration radius {self.radius}")
        return self._subset(self.norms <= T, radius=T)

    def transform(self, g: GroupElement, radius: float, surface: Optional[TranslationSurface] = None) -> "HolonomySet":
        """g.V restricted to `radius`, which must be covered: radius * |g^-1| <= self.radius."""
        needed = radius * g.inverse().operator_norm()
        if needed > self.radius * (1 + 1e-12):
            raise RadiusExceedsEnumeration(f"transform needs radius {needed}, have {self.radius}")
        x, y = g.apply_arrays(self.x, self.y)
        keep = np.hypot(x, y) <= radius
        rows = {"x": x[keep], "y": y[keep], "start": self.start[keep], "end": self.end[keep],
                "separatrix": self.separatrix[keep], "multiplicity": self.multiplicity[keep]}
        return HolonomySet.build(rows, radius, surface if surface is not None else self.surface, self.kind)

    def is_symmetric(self, decimals: int = 9) -> bool:
        forward = sorted(self.keys(decimals, endpoints=False))
        backward = sorted((-x + 0.0, -y + 0.0, m) for x, y, m in forward)
        return forward == backward

    def keys(self, decimals: int = 9, endpoints: bool = True) -> list[tuple]:
        """Hashable rows for multiset comparisons."""
        xs = np.round(self.x, decimals) + 0.0
        ys = np.round(self.y, decimals) + 0.0
        if not endpoints:
            return [(float(a), float(b), int(m)) for a, b, m in zip(xs, ys, self.multiplicity)]
        return [(float(a), float(b), int(s), int(e), int(k), int(m))
                for a, b, s, e, k, m in zip(xs, ys, self.start, self.end, self.separatrix, self.multiplicity)]

    def rows(self) -> list[HolonomyRow]:
        return [HolonomyRow(norm=float(n), x=float(a), y=float(b), start=int(s), end=int(e), separatrix=int(k),
                            multiplicity=int(m))
                for n, a, b, s, e, k, m in zip(self.norms, self.x, self.y, self.start, self.end,
                                               self.separatrix, self.multiplicity)]


# ---
# 1. EXACT ENGINE (square-tiled)
# ---

class _Node(NamedTuple):
    """Stern-Brocot node between a smaller-slope parent L and a larger-slope parent R."""
    sign: int  # +1 north-east quadrant, -1 north-west quadrant
    lp: int
    lq: int
    f_left: np.ndarray
    rp: int
    rq: int
    f_right: np.ndarray

    @property
    def p(self) -> int:
        return self.lp + self.rp

    @property
    def q(self) -> int:
        return self.lq + self.rq

    def within(self, T: float) -> bool:
        return self.p * self.p + self.q * self.q <= T * T


@dataclass
class _Origami:
    h: np.ndarray
    v: np.ndarray
    hinv: np.ndarray = field(init=False)
    vinv: np.ndarray = field(init=False)

    def __post_init__(self):
        self.hinv = np.argsort(self.h)
        self.vinv = np.argsort(self.v)

    def roots(self) -> list[_Node]:
        return [_Node(1, 1, 0, self.h, 0, 1, self.v), _Node(-1, 1, 0, self.hinv, 0, 1, self.v)]

    def end_squares(self, node: _Node) -> np.ndarray:
        """NE square of the sheet where each sheet's separatrix in this direction lands."""
        word = node.f_right[node.f_left]
        if node.sign > 0:
            last = self.vinv[word[self.hinv]]
            return self.h[self.v[last]]
        crossing = self.vinv[word[self.h]]
        last = crossing[self.hinv]
        return self.h[self.v[self.hinv[last]]]


def _expand(node: _Node) -> tuple[_Node, _Node]:
    word = node.f_right[node.f_left]
    left = _Node(node.sign, node.lp, node.lq, node.f_left, node.p, node.q, word)
    right = _Node(node.sign, node.p, node.q, word, node.rp, node.rq, node.f_right)
    return left, right


def _direction_tasks(origami: _Origami, T: float, threads: int) -> list[tuple[_Node, bool]]:
    """(node, whole_subtree) tasks covering the tree once; split so every thread gets work."""
    tasks = [(node, True) for node in origami.roots()]
    while len(tasks) < 4 * max(threads, 1):
        grown = []
        for node, subtree in tasks:
            if subtree and node.within(T):
                grown.append((node, False))
                grown.extend((child, True) for child in _expand(node))
            else:
                grown.append((node, subtree))
        if len(grown) == len(tasks):
            break
        tasks = grown
    return tasks


def _walk_directions(origami: _Origami, tasks: list[tuple[_Node, bool]], T: float) -> list[tuple[int, int, np.ndarray]]:
    found = []
    for root, subtree in tasks:
        stack = [root]
        while stack:
            node = stack.pop()
            if not node.within(T):
                continue
            found.append((node.sign * node.p, node.q, origami.end_squares(node)))
            if subtree:
                stack.extend(_expand(node))
    return found


def exact_directions(s: TranslationSurface, T: float, threads: int = 1) -> list[tuple[int, int, np.ndarray]]:
    """
    Every primitive direction (p, q) with q > 0 or (p, q) = (1, 0) and norm <= T,
    with the map start sheet -> end sheet (both as NE squares).
    """
    rep = s.representation
    origami = _Origami(np.array(rep.h, dtype=np.int64), np.array(rep.v, dtype=np.int64))
    found = []
    if T >= 1:
        found.append((1, 0, origami.h.copy()))
        found.append((0, 1, origami.h[origami.v[origami.hinv]]))
    tasks = _direction_tasks(origami, T, threads)
    found.extend(run_chunked(lambda chunk: _walk_directions(origami, chunk, T), tasks, threads))
    found.sort(key=lambda item: (item[0] * item[0] + item[1] * item[1], item[0], item[1]))
    return found


def _require_square_tiled(s: TranslationSurface, T: float) -> SquareTiled:
    if not isinstance(s.representation, SquareTiled):
        raise InvalidParameter("the exact engine needs a square-tiled surface")
    if T < 0 or not math.isfinite(T):
        raise InvalidParameter(f"radius must be finite and non-negative, got {T}")
    return s.representation


def _base_radius(frame: GroupElement, T: float) -> float:
    if frame == GroupElement.identity():
        return T
    return T * frame.inverse().operator_norm() * (1 + 1e-9)


def enumerate_exact(s: TranslationSurface, T: float, threads: int = 1) -> HolonomySet:
    """
    Saddle connections of length <= T on a square-tiled surface. Every corner is
    a singularity, so each sheet's separatrix in primitive direction d lands
    after exactly one step of holonomy d.
    """
    rep = _require_square_tiled(s, T)
    base_T = _base_radius(rep.frame, T)
    n = rep.n
    sid = np.empty(n, dtype=np.int64)
    pos = np.empty(n, dtype=np.int64)
    for singularity, cycle in enumerate(s.vertex_cycles):
        for position, square in enumerate(cycle):
            sid[square] = singularity
            pos[square] = position
    squares = np.arange(n)

    columns = {name: [] for name in ("x", "y", "start", "end", "separatrix")}
    directions = exact_directions(s, base_T, threads)
    for p, q, ends in directions:
        for sign, first, second in ((1, squares, ends), (-1, ends, squares)):
            columns["x"].append(np.full(n, sign * p, dtype=float))
            columns["y"].append(np.full(n, sign * q, dtype=float))
            columns["start"].append(sid[first])
            columns["end"].append(sid[second])
            columns["separatrix"].append(pos[first])
    rows = {name: np.concatenate(parts) if parts else np.array([]) for name, parts in columns.items()}
    progress(logger, "[ENUM EXACT] %d directions, %d connections within %.3f", len(directions), len(rows["x"]), base_T)

    base = HolonomySet.build(rows, base_T, s)
    if base_T == T:
        return base
    return base.transform(rep.frame, T, surface=s)


def cylinders(s: TranslationSurface, T: float, threads: int = 1) -> HolonomySet:
    """
    Waist holonomies of maximal cylinders. In direction d the start->end sheet
    map is a permutation; each cycle of length k is the bottom boundary of one
    cylinder, whose waist is k*d.
    """
    rep = _require_square_tiled(s, T)
    base_T = _base_radius(rep.frame, T)
    xs, ys = [], []
    for p, q, ends in exact_directions(s, base_T, threads):
        norm = math.hypot(p, q)
        for length in _cycle_lengths(ends):
            if length * norm <= base_T:
                xs.extend((length * p, -length * p))
                ys.extend((length * q, -length * q))
    base = HolonomySet.build({"x": xs, "y": ys}, base_T, s, kind="cylinder")
    if base_T == T:
        return base
    return base.transform(rep.frame, T, surface=s)


def _cycle_lengths(perm: np.ndarray) -> list[int]:
    seen = np.zeros(len(perm), dtype=bool)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        item = start
        while not seen[item]:
            seen[item] = True
            item = int(perm[item])
            length += 1
        lengths.append(length)
    return lengths


# ---
# 2. GENERIC ENGINE (glued polygons)
# ---

@dataclass
class _Mesh:
    points: list[tuple[tuple[float, float], ...]]
    glue: dict[tuple[int, int], tuple[int, int]]
    corner: list[tuple[tuple[int, float], ...]]

    def edge(self, t: int, k: int) -> tuple[float, float]:
        (x0, y0), (x1, y1) = self.points[t][k], self.points[t][(k + 1) % 3]
        return x1 - x0, y1 - y0


def _cross(ax: float, ay: float, bx: float, by: float) -> float:
    return ax * by - ay * bx


def _ear_clip(vertices: tuple[tuple[float, float], ...]) -> list[tuple[int, int, int]]:
    remaining = list(range(len(vertices)))
    triangles = []
    while len(remaining) > 3:
        for i in range(len(remaining)):
            a, b, c = remaining[i - 1], remaining[i], remaining[(i + 1) % len(remaining)]
            (ax, ay), (bx, by), (cx, cy) = vertices[a], vertices[b], vertices[c]
            if _cross(bx - ax, by - ay, cx - bx, cy - by) <= 0:
                continue
            blocked = False
            for other in remaining:
                if other in (a, b, c):
                    continue
                px, py = vertices[other]
                if (_cross(bx - ax, by - ay, px - ax, py - ay) >= 0 and _cross(cx - bx, cy - by, px - bx, py - by) >= 0
                        and _cross(ax - cx, ay - cy, px - cx, py - cy) >= 0):
                    blocked = True
                    break
            if not blocked:
                triangles.append((a, b, c))
                remaining.pop(i)
                break
        else:
            raise MalformedSpec("polygon could not be triangulated")
    triangles.append(tuple(remaining))
    return triangles


def triangulate(s: TranslationSurface) -> _Mesh:
    rep: PolygonGlued = s.polygon_form.representation
    corners = s.polygon_form.corners
    points, corner_info = [], []
    owner: dict[tuple[int, int, int], tuple[int, int]] = {}
    for p, vertices in enumerate(rep.polygons):
        for a, b, c in _ear_clip(vertices):
            t = len(points)
            points.append((vertices[a], vertices[b], vertices[c]))
            info = []
            for k, (this, nxt) in enumerate(((a, b), (b, c), (c, a))):
                owner[(p, this, nxt)] = (t, k)
                sid, absolute = corners[p][this]
                ox, oy = rep.edge(p, this)
                tx, ty = vertices[nxt][0] - vertices[this][0], vertices[nxt][1] - vertices[this][1]
                info.append((sid, absolute + ccw_angle(ox, oy, tx, ty)))
            corner_info.append(tuple(info))
    glue = {}
    for (p, this, nxt), (t, k) in owner.items():
        size = len(rep.polygons[p])
        if nxt == (this + 1) % size:
            q, f = rep.partner[(p, this)]
            other = (q, f, (f + 1) % len(rep.polygons[q]))
        else:
            other = (p, nxt, this)
        glue[(t, k)] = owner[other]
    return _Mesh(points, glue, corner_info)


def _side(ax: float, ay: float, bx: float, by: float) -> int:
    """Sign of cross(a, b) with relative collinearity tolerance."""
    value = _cross(ax, ay, bx, by)
    if abs(value) <= WEDGE_TOLERANCE * math.hypot(ax, ay) * math.hypot(bx, by):
        return 0
    return 1 if value > 0 else -1


def _ray_param(ax: float, ay: float, rx: float, ry: float, dx: float, dy: float) -> float:
    den = _cross(ax, ay, dx, dy)
    if den == 0:
        return 0.0
    return -_cross(ax, ay, rx, ry) / den


def _window_distance(rx, ry, lx, ly, lox, loy, hix, hiy) -> float:
    """Distance from the origin to the part of segment R-L seen inside the wedge (lo, hi)."""
    dx, dy = lx - rx, ly - ry
    s_lo = _ray_param(lox, loy, rx, ry, dx, dy)
    s_hi = _ray_param(hix, hiy, rx, ry, dx, dy)
    first = min(max(min(s_lo, s_hi), 0.0), 1.0)
    last = min(max(max(s_lo, s_hi), 0.0), 1.0)
    length2 = dx * dx + dy * dy
    nearest = -(rx * dx + ry * dy) / length2 if length2 > 0 else 0.0
    nearest = min(max(nearest, first), last)
    return math.hypot(rx + nearest * dx, ry + nearest * dy)


def _sheet(absolute: float) -> int:
    return int(math.floor(absolute / TWO_PI + SHEET_EPSILON))


def _develop_corner(mesh: _Mesh, t0: int, k0: int, T: float, out: dict[str, list]) -> None:
    sid, theta0 = mesh.corner[t0][k0]
    ekx, eky = mesh.edge(t0, k0)

    def emit(wx: float, wy: float, end: int) -> None:
        out["x"].append(wx)
        out["y"].append(wy)
        out["start"].append(sid)
        out["end"].append(end)
        out["separatrix"].append(_sheet(theta0 + ccw_angle(ekx, eky, wx, wy)))

    if math.hypot(ekx, eky) <= T:
        emit(ekx, eky, mesh.corner[t0][(k0 + 1) % 3][0])

    origin = mesh.points[t0][k0]
    rx, ry = ekx, eky
    far = mesh.points[t0][(k0 + 2) % 3]
    lx, ly = far[0] - origin[0], far[1] - origin[1]
    queue = deque([(t0, (k0 + 1) % 3, rx, ry, lx, ly, rx, ry, lx, ly)])
    while queue:
        t, i, rx, ry, lx, ly, lox, loy, hix, hiy = queue.popleft()
        if _window_distance(rx, ry, lx, ly, lox, loy, hix, hiy) > T:
            continue
        t2, j = mesh.glue[(t, i)]
        ex, ey = mesh.edge(t2, (j + 1) % 3)
        wx, wy = rx + ex, ry + ey
        low = _side(lox, loy, wx, wy)
        high = _side(wx, wy, hix, hiy)
        if low > 0 and high > 0:
            if math.hypot(wx, wy) <= T:
                emit(wx, wy, mesh.corner[t2][(j + 2) % 3][0])
            queue.append((t2, (j + 1) % 3, rx, ry, wx, wy, lox, loy, wx, wy))
            queue.append((t2, (j + 2) % 3, wx, wy, lx, ly, wx, wy, hix, hiy))
            continue
        if low <= 0:
            if low == 0:
                _check_blocked(lox, loy, wx, wy)
            queue.append((t2, (j + 2) % 3, wx, wy, lx, ly, lox, loy, hix, hiy))
        else:
            if high == 0:
                _check_blocked(hix, hiy, wx, wy)
            queue.append((t2, (j + 1) % 3, rx, ry, wx, wy, lox, loy, hix, hiy))


def _check_blocked(bx: float, by: float, wx: float, wy: float) -> None:
    """A vertex snapped onto a wedge ray must lie behind the vertex that defines the ray."""
    if math.hypot(wx, wy) < math.hypot(bx, by) * (1 - 1e-9):
        raise ToleranceBreakdown(
            f"vertex ({wx!r}, {wy!r}) is collinear within tolerance with nearer boundary ({bx!r}, {by!r})"
        )


def _develop_chunk(mesh: _Mesh, chunk: list[tuple[int, int]], T: float) -> list[dict[str, list]]:
    out = {name: [] for name in ("x", "y", "start", "end", "separatrix")}
    for t, k in chunk:
        _develop_corner(mesh, t, k, T, out)
    return [out]


def enumerate_generic(s: TranslationSurface, T: float, threads: int = 1) -> HolonomySet:
    """Saddle connections of length <= T by breadth-first triangle development."""
    if T < 0 or not math.isfinite(T):
        raise InvalidParameter(f"radius must be finite and non-negative, got {T}")
    mesh = triangulate(s)
    corners = [(t, k) for t in range(len(mesh.points)) for k in range(3)]
    parts = run_chunked(lambda chunk: _develop_chunk(mesh, chunk, T), corners, threads)
    rows = {name: [value for part in parts for value in part[name]] for name in ("x", "y", "start", "end", "separatrix")}
    progress(logger, "[ENUM GENERIC] %d corners, %d connections within %.3f", len(corners), len(rows["x"]), T)
    return HolonomySet.build(rows, T, s)


# ---
# 3. TORUS LATTICES AND DISPATCH
# ---

def torus_holonomies(basis: np.ndarray, T: float, surface: Optional[TranslationSurface] = None) -> HolonomySet:
    """Primitive vectors of norm <= T of the lattice spanned by the columns of `basis`."""
    basis = np.asarray(basis, dtype=float)
    if T < 0:
        raise InvalidParameter(f"radius must be non-negative, got {T}")
    inverse = np.linalg.inv(basis)
    bounds = np.floor(np.hypot(inverse[:, 0], inverse[:, 1]) * T + 1e-9).astype(np.int64)
    m = np.arange(-bounds[0], bounds[0] + 1)
    n = np.arange(-bounds[1], bounds[1] + 1)
    mm, nn = np.meshgrid(m, n, indexing="ij")
    mm, nn = mm.ravel(), nn.ravel()
    keep = np.gcd(mm, nn) == 1
    mm, nn = mm[keep], nn[keep]
    x = basis[0, 0] * mm + basis[0, 1] * nn
    y = basis[1, 0] * mm + basis[1, 1] * nn
    inside = np.hypot(x, y) <= T
    size = int(inside.sum())
    zeros = np.zeros(size, dtype=np.int64)
    return HolonomySet.build({"x": x[inside], "y": y[inside], "start": zeros, "end": zeros, "separatrix": zeros},
                             T, surface)


def enumerate_holonomies(s: TranslationSurface, T: float, threads: int = 1) -> HolonomySet:
    """Exact engine for origamis, lattice enumeration for one-cell tori, development otherwise."""
    if s.is_square_tiled:
        return enumerate_exact(s, T, threads)
    basis = lattice_basis(s)
    if basis is not None:
        return torus_holonomies(basis, T, surface=s)
    return enumerate_generic(s, T, threads)


# ---
# 4. CONFIGURATIONS
# ---

def filter_configuration(h: HolonomySet, c: ConfigurationFilter, threads: int = 1) -> HolonomySet:
    for item in c.singularities:
        if item >= h.n_singularities:
            raise UnknownSingularity(f"singularity {item} does not exist (surface has {h.n_singularities})")

    if c.kind == "cylinders":
        if h.surface is None:
            raise InvalidParameter("cylinder configuration needs the surface of the holonomy set")
        selected = cylinders(h.surface, h.radius, threads)
    elif c.kind == "loop":
        (i,) = c.singularities
        selected = h._subset((h.start == i) & (h.end == i))
    elif c.kind == "pair":
        i, j = c.singularities
        selected = h._subset(((h.start == i) & (h.end == j)) | ((h.start == j) & (h.end == i)))
    else:
        selected = h

    if c.with_multiplicity or len(selected) == 0:
        return selected
    return _collapse(selected)


def _collapse(h: HolonomySet) -> HolonomySet:
    keys = np.stack([np.round(h.x, 9) + 0.0, np.round(h.y, 9) + 0.0], axis=1)
    _, first = np.unique(keys, axis=0, return_index=True)
    first = np.sort(first)
    size = len(first)
    rows = {"x": h.x[first], "y": h.y[first], "start": np.full(size, -1), "end": np.full(size, -1),
            "separatrix": np.full(size, -1), "multiplicity": np.ones(size, dtype=np.int64)}
    return HolonomySet.build(rows, h.radius, h.surface, h.kind)
