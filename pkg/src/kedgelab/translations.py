"""Range spaces induced by translates of a fixed open convex body.

For a body C (open disk, open ellipse, or open unit square, each centered at
the origin) and a finite planar point set S, this module counts:

  * T_C-k-edges: ordered pairs (p, q) whose canonical boundary translation
    x + C passes through p and q with exactly k points of S strictly inside,
  * T_C-k-sets: distinct subsets of S of size k cut out by translates that
    keep S off the boundary,

plus the supporting machinery: exact two-point boundary translations with
coordinates in a quadratic extension, a relative general-position
certificate, constructions that force many halving-size subsets, growth and
shattering checks on the induced set system, and a Monte Carlo scaling
experiment for the expected number of translation k-edges of random sets.

Strictly convex bodies (disk, ellipse) support the pair/edge machinery; the
square supports only subset enumeration, which for axis-aligned squares is
an exact line-arrangement sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .geom import Point2, PointSet, to_fraction
from .quadratic import Exact, Quad, exact_sign


class TcError(Exception):
    """Base error for translation range-system operations."""


class StrictConvexityRequired(TcError):
    """Operation needs a strictly convex body; the square does not qualify."""


class NotInV(TcError):
    """No translate of the body has both points on its boundary."""


class NotGeneralPositionRelativeToC(TcError):
    """Three points on one translated boundary (or a forbidden antipodal pair)."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class BadN(TcError):
    """Construction size constraint violated."""


class ScaleExceeded(TcError):
    """Instance too large for the exact enumeration requested."""


class BodyNotContained(TcError):
    """Sampling window does not contain the required dilate of the body."""


class OffsetTooLarge(TcError):
    """Center offset exceeds the diameter; the two translates are disjoint."""


# ---------------------------------------------------------------------------
# bodies


@dataclass(frozen=True)
class Disk:
    """Open disk of the given radius, centered at the origin."""

    radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "radius", to_fraction(self.radius))
        if self.radius <= 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class Ellipse:
    """Open ellipse M * (unit disk) for an invertible rational matrix M."""

    m11: Fraction
    m12: Fraction
    m21: Fraction
    m22: Fraction

    def __post_init__(self):
        for name in ("m11", "m12", "m21", "m22"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if self.det() == 0:
            raise ValueError("matrix must be invertible")

    def det(self) -> Fraction:
        return self.m11 * self.m22 - self.m12 * self.m21

    def apply(self, x, y) -> tuple:
        return (self.m11 * x + self.m12 * y, self.m21 * x + self.m22 * y)

    def apply_inverse(self, x, y) -> tuple:
        d = self.det()
        return ((self.m22 * x - self.m12 * y) / d, (self.m11 * y - self.m21 * x) / d)


@dataclass(frozen=True)
class OpenUnitSquare:
    """Open axis-aligned square of side 1, centered at the origin."""


Body = Union[Disk, Ellipse, OpenUnitSquare]


def is_strictly_convex(body: Body) -> bool:
    return isinstance(body, (Disk, Ellipse))


def _require_strictly_convex(body: Body, op: str) -> None:
    if not is_strictly_convex(body):
        raise StrictConvexityRequired(f"{op} needs a strictly convex body")


# ---------------------------------------------------------------------------
# membership


class Containment(Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class TranslationWitness:
    """A translation vector x; the realized range is x + C.

    Coordinates are exact: plain rationals, or elements a + b*sqrt(d) of a
    quadratic extension when the witness comes from a two-point boundary
    condition.
    """

    x: Exact
    y: Exact

    def as_floats(self) -> Tuple[float, float]:
        return (float(self.x), float(self.y))

    def is_rational(self) -> bool:
        return not (isinstance(self.x, Quad) and self.x.b != 0) and not (
            isinstance(self.y, Quad) and self.y.b != 0
        )


def contains(body: Body, witness: TranslationWitness, point: Point2) -> Containment:
    """Exact trichotomy for point vs. the open translate witness + body."""
    dx = point.x - witness.x
    dy = point.y - witness.y
    if isinstance(body, Disk):
        q = dx * dx + dy * dy - body.radius * body.radius
        s = exact_sign(q)
    elif isinstance(body, Ellipse):
        ux, uy = body.apply_inverse(dx, dy)
        s = exact_sign(ux * ux + uy * uy - 1)
    elif isinstance(body, OpenUnitSquare):
        half = Fraction(1, 2)
        sx = (exact_sign(dx + half), exact_sign(half - dx))
        sy = (exact_sign(dy + half), exact_sign(half - dy))
        if min(sx + sy) < 0:
            s = 1
        elif min(sx + sy) == 0:
            s = 0
        else:
            s = -1
    else:
        raise TypeError(f"unknown body {body!r}")
    if s < 0:
        return Containment.INSIDE
    if s == 0:
        return Containment.BOUNDARY
    return Containment.OUTSIDE


# ---------------------------------------------------------------------------
# two-point boundary translations


def _disk_two_point(rho: Fraction, p: Point2, q: Point2) -> Tuple[TranslationWitness, ...]:
    dx, dy = q.x - p.x, q.y - p.y
    d2 = dx * dx + dy * dy
    rr = rho * rho
    if d2 > 4 * rr:
        return ()
    mx, my = (p.x + q.x) / 2, (p.y + q.y) / 2
    if d2 == 4 * rr:
        return (TranslationWitness(mx, my),)
    # centers mid +/- h*(-dy, dx) with h^2 = rr/d2 - 1/4 > 0
    big_d = rr / d2 - Fraction(1, 4)
    w1 = TranslationWitness(Quad(mx, -dy, big_d), Quad(my, dx, big_d))
    w2 = TranslationWitness(Quad(mx, dy, big_d), Quad(my, -dx, big_d))
    return (w1, w2)


def two_point_translations(body: Body, p: Point2, q: Point2) -> Tuple[TranslationWitness, ...]:
    """All translations x with p and q both on the boundary of x + C.

    Returns 0, 1 (diametral pair: unique tangent translate), or 2 witnesses,
    in a fixed deterministic order.  Each witness is rechecked exactly: both
    points must classify as BOUNDARY.
    """
    _require_strictly_convex(body, "two_point_translations")
    if p == q:
        raise ValueError("points must be distinct")
    if isinstance(body, Disk):
        out = _disk_two_point(body.radius, p, q)
    else:
        pu = Point2(*body.apply_inverse(p.x, p.y))
        qu = Point2(*body.apply_inverse(q.x, q.y))
        inner = _disk_two_point(Fraction(1), pu, qu)
        out = tuple(
            TranslationWitness(*body.apply(w.x, w.y)) for w in inner
        )
    for w in out:
        for s in (p, q):
            if contains(body, w, s) is not Containment.BOUNDARY:
                raise TcError("two-point witness failed exact boundary recheck")
    return out


def _side_of_pair(p: Point2, q: Point2, x, y) -> int:
    """Sign of the (p,q)-halfplane functional at (x, y).

    Positive side is the clockwise side of the ray p -> q:
    -(q-p).x * (r-p).y + (q-p).y * (r-p).x > 0.
    """
    return exact_sign(-(q.x - p.x) * (y - p.y) + (q.y - p.y) * (x - p.x))


def canonical_translation(body: Body, p: Point2, q: Point2) -> TranslationWitness:
    """The canonical boundary translation through the ordered pair (p, q).

    Of the (at most two) translates with p, q on the boundary, pick the one
    whose center lies strictly on the positive side of the oriented line
    through (p, q); for a centrally symmetric body that is the translate
    covering more than half its area on that side.  A diametral pair has one
    tangent translate, returned for both orderings.
    """
    ws = two_point_translations(body, p, q)
    if not ws:
        raise NotInV(f"no translate of the body reaches both {p!r} and {q!r}")
    if len(ws) == 1:
        return ws[0]
    signs = [_side_of_pair(p, q, w.x, w.y) for w in ws]
    if sorted(signs) != [-1, 1]:
        raise TcError("witness centers not strictly separated by the pair line")
    return ws[signs.index(1)]


# ---------------------------------------------------------------------------
# relative general position


@dataclass(frozen=True)
class RelativePositionReport:
    ok: bool
    triple: Optional[Tuple[int, int, int]]
    antipodal_pair: Optional[Tuple[int, int]]


def _as_point_list(s) -> List[Point2]:
    if isinstance(s, PointSet):
        return list(s.points)
    return [p if isinstance(p, Point2) else Point2(*p) for p in s]


def certify_relative_position(body: Body, s, *, antipodal: bool = False) -> RelativePositionReport:
    """Certify no three points lie on one translated boundary (exact).

    For the disk this is a circumradius test: a noncollinear triple lies on a
    common translate iff its circumradius equals the body radius, i.e.
    d1*d2*d3 == 4*rho^2*cross^2 over squared side lengths.  Ellipses reduce
    to the disk by the inverse linear map.  With antipodal=True, also reject
    pairs at distance exactly the diameter (their translate is unique and
    tangent, which breaks the two-translate pairing the edge counts rely on).
    """
    _require_strictly_convex(body, "certify_relative_position")
    pts = _as_point_list(s)
    if isinstance(body, Disk):
        rr = body.radius * body.radius
        work = pts
    else:
        rr = Fraction(1)
        work = [Point2(*body.apply_inverse(p.x, p.y)) for p in pts]
    n = len(work)
    if antipodal:
        for i in range(n):
            for j in range(i + 1, n):
                dx = work[j].x - work[i].x
                dy = work[j].y - work[i].y
                if dx * dx + dy * dy == 4 * rr:
                    return RelativePositionReport(False, None, (i, j))
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                a, b, c = work[i], work[j], work[k]
                cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
                if cross == 0:
                    continue  # collinear triples never share a circle
                d1 = (b.x - a.x) ** 2 + (b.y - a.y) ** 2
                d2 = (c.x - b.x) ** 2 + (c.y - b.y) ** 2
                d3 = (a.x - c.x) ** 2 + (a.y - c.y) ** 2
                if d1 * d2 * d3 == 4 * rr * cross * cross:
                    return RelativePositionReport(False, (i, j, k), None)
    return RelativePositionReport(True, None, None)


# ---------------------------------------------------------------------------
# k-edges


def tc_k_edge_levels(body: Body, s, *, antipodal_check: bool = True) -> Dict[Tuple[int, int], int]:
    """Level of every ordered pair in V: the number of points strictly inside
    the canonical translate through the pair.  Exact.

    V is the set of ordered pairs (i, j) admitting a boundary translate.  The
    relative general-position certificate runs first so that no third point
    can sit exactly on a canonical boundary; with antipodal_check=False,
    diametral pairs are admitted (their unique tangent translate is used),
    which constructions with deliberate diametral pairs need.
    """
    _require_strictly_convex(body, "tc_k_edge_levels")
    pts = _as_point_list(s)
    rep = certify_relative_position(body, pts, antipodal=antipodal_check)
    if not rep.ok:
        kind = "triple" if rep.triple else "antipodal pair"
        raise NotGeneralPositionRelativeToC(
            f"{kind} on a common translated boundary", rep.triple or rep.antipodal_pair
        )
    levels: Dict[Tuple[int, int], int] = {}
    n = len(pts)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            try:
                w = canonical_translation(body, pts[i], pts[j])
            except NotInV:
                continue
            level = 0
            for m in range(n):
                if m == i or m == j:
                    continue
                c = contains(body, w, pts[m])
                if c is Containment.BOUNDARY:
                    raise NotGeneralPositionRelativeToC(
                        "third point on a canonical boundary", (i, j, m)
                    )
                if c is Containment.INSIDE:
                    level += 1
            levels[(i, j)] = level
    return levels


def tc_k_edges(body: Body, s, k: int, *, antipodal_check: bool = True,
               levels: Optional[Dict[Tuple[int, int], int]] = None
               ) -> Tuple[int, Tuple[Tuple[int, int], ...]]:
    """Count ordered pairs whose canonical translate holds exactly k points.

    Returns (e_k, pairs).  Summing e_k over all k gives |V|.
    """
    if levels is None:
        levels = tc_k_edge_levels(body, s, antipodal_check=antipodal_check)
    pairs = tuple(sorted(pq for pq, lv in levels.items() if lv == k))
    return len(pairs), pairs


# ---------------------------------------------------------------------------
# induced subsets: candidate enumeration


@dataclass(frozen=True)
class InducedSubset:
    ids: Tuple[int, ...]
    witness: TranslationWitness
    boundary_free: bool


@dataclass(frozen=True)
class InducedFamily:
    entries: Tuple[InducedSubset, ...]
    ground_size: int

    def subsets(self) -> FrozenSet[FrozenSet[int]]:
        return frozenset(frozenset(e.ids) for e in self.entries)

    def of_size(self, k: int) -> Tuple[InducedSubset, ...]:
        return tuple(e for e in self.entries if len(e.ids) == k)

    def __len__(self):
        return len(self.entries)


_SEED_DEN = 1 << 40  # dyadic rounding grid for float-placed seeds


def _seed_fraction(v: float) -> Fraction:
    return Fraction(round(v * _SEED_DEN), _SEED_DEN)


def _disk_seed_positions(pts: List[Point2], rho: Fraction) -> List[Tuple[float, float]]:
    """Float seed positions meeting every face of the arrangement of the
    radius-rho circles around the points (the translation-space picture:
    x + C contains s iff x lies in the circle of radius rho around s).

    Every 2-face of a circle arrangement is incident to at least one whole
    arrangement edge, and each edge is an arc between consecutive
    intersection points on one circle; seeding both sides of every arc
    midpoint (at a radius below the local clearance) therefore reaches every
    face, with intersection-free circles handled by compass seeds and the
    unbounded face by a far seed.  Vertex sector seeds are added as well for
    robustness near short arcs.  Pair classification (disjoint / tangent /
    crossing) is exact; only seed placement uses floats, and each seed is
    later classified exactly, so stray placement can never corrupt a subset,
    only miss a face.
    """
    rho_f = float(rho)
    cs = [(float(p.x), float(p.y)) for p in pts]
    n = len(cs)
    hi = max(max(abs(x), abs(y)) for x, y in cs)
    seeds: List[Tuple[float, float]] = [(hi + 3.0 * rho_f + 1.0, hi + 3.0 * rho_f + 1.0)]

    rr4 = 4 * rho * rho
    on_circle: List[List[Tuple[float, float]]] = [[] for _ in range(n)]
    vertices: List[Tuple[float, float, int, int, bool]] = []
    for i in range(n):
        for j in range(i + 1, n):
            dx = pts[j].x - pts[i].x
            dy = pts[j].y - pts[i].y
            d2 = dx * dx + dy * dy
            if d2 > rr4:
                continue
            mxf = (cs[i][0] + cs[j][0]) / 2.0
            myf = (cs[i][1] + cs[j][1]) / 2.0
            if d2 == rr4:
                z = (mxf, myf)
                on_circle[i].append(z)
                on_circle[j].append(z)
                vertices.append((z[0], z[1], i, j, True))
                continue
            d2f = float(d2)
            h = math.sqrt(max(float(rho * rho) / d2f - 0.25, 0.0))
            ox, oy = -float(dy) * h, float(dx) * h
            for sgn in (1.0, -1.0):
                z = (mxf + sgn * ox, myf + sgn * oy)
                on_circle[i].append(z)
                on_circle[j].append(z)
                vertices.append((z[0], z[1], i, j, False))

    def clearance(x: float, y: float, skip: Tuple[int, ...]) -> float:
        best = rho_f
        for m in range(n):
            if m in skip:
                continue
            dm = math.hypot(x - cs[m][0], y - cs[m][1])
            best = min(best, abs(dm - rho_f))
        return best

    for i in range(n):
        cx, cy = cs[i]
        if on_circle[i]:
            angles = sorted(math.atan2(zy - cy, zx - cx) for zx, zy in on_circle[i])
            mids = []
            for a, b in zip(angles, angles[1:] + [angles[0] + 2 * math.pi]):
                mids.append((a + b) / 2.0)
        else:
            mids = [k * math.pi / 4.0 for k in range(8)]
        for theta in mids:
            ux, uy = math.cos(theta), math.sin(theta)
            zx, zy = cx + rho_f * ux, cy + rho_f * uy
            r = clearance(zx, zy, (i,)) / 2.0
            if r <= 1e-12:
                continue
            seeds.append((zx + r * ux, zy + r * uy))
            seeds.append((zx - r * ux, zy - r * uy))

    for zx, zy, i, j, tangent in vertices:
        delta = clearance(zx, zy, (i, j))
        u1 = ((zx - cs[i][0]) / rho_f, (zy - cs[i][1]) / rho_f)
        u2 = ((zx - cs[j][0]) / rho_f, (zy - cs[j][1]) / rho_f)
        if tangent:
            tx, ty = -u1[1], u1[0]
            r = min(delta, rho_f / 2.0) / 4.0
            if r <= 1e-12:
                continue
            for vx, vy in ((u1[0], u1[1]), (-u1[0], -u1[1]), (tx, ty), (-tx, -ty)):
                seeds.append((zx + r * vx, zy + r * vy))
            continue
        for s1 in (1.0, -1.0):
            for s2 in (1.0, -1.0):
                vx, vy = s1 * u1[0] + s2 * u2[0], s1 * u1[1] + s2 * u2[1]
                ln = math.hypot(vx, vy)
                if ln < 1e-9:
                    continue
                vx, vy = vx / ln, vy / ln
                a1 = abs(vx * u1[0] + vy * u1[1])
                a2 = abs(vx * u2[0] + vy * u2[1])
                if min(a1, a2) < 1e-9:
                    continue
                r = min(delta, rho_f * a1, rho_f * a2) / 4.0
                if r <= 1e-12:
                    continue
                seeds.append((zx + r * vx, zy + r * vy))
    return seeds


def _square_seed_witnesses(pts: List[Point2]) -> List[TranslationWitness]:
    """Exact cell representatives for the axis-aligned square body.

    Translation space is an arrangement of axis-parallel lines x = s.x +/- 1/2
    and y = s.y +/- 1/2; midpoints of consecutive cut values (plus outer
    sentinels) hit every cell, so the enumeration is complete and rational.
    """
    half = Fraction(1, 2)

    def reps(vals: List[Fraction]) -> List[Fraction]:
        cuts = sorted(set(vals))
        out = [cuts[0] - 1]
        for a, b in zip(cuts, cuts[1:]):
            out.append((a + b) / 2)
        out.append(cuts[-1] + 1)
        return out

    xs = reps([p.x - half for p in pts] + [p.x + half for p in pts])
    ys = reps([p.y - half for p in pts] + [p.y + half for p in pts])
    return [TranslationWitness(x, y) for x in xs for y in ys]


def induced_family(body: Body, s, *, extra_seeds: Iterable[TranslationWitness] = ()) -> InducedFamily:
    """All distinct subsets of S induced by translates of the body, each with
    a boundary-free exact witness.

    Candidate translations come from the arrangement structure in
    translation space (see the seed helpers); every candidate is then
    classified against every point with exact rational arithmetic, so listed
    subsets are correct by construction.  Ellipses are handled by mapping the
    instance through the inverse matrix and mapping witnesses back.
    """
    pts = _as_point_list(s)
    if not pts:
        raise ValueError("point set must be nonempty")
    if isinstance(body, Ellipse):
        inner_pts = [Point2(*body.apply_inverse(p.x, p.y)) for p in pts]
        inner = induced_family(Disk(Fraction(1)), inner_pts, extra_seeds=())
        entries = []
        for e in inner.entries:
            wx, wy = body.apply(e.witness.x, e.witness.y)
            entries.append(InducedSubset(e.ids, TranslationWitness(wx, wy), e.boundary_free))
        return InducedFamily(tuple(entries), inner.ground_size)

    if isinstance(body, Disk):
        witnesses = [
            TranslationWitness(_seed_fraction(x), _seed_fraction(y))
            for x, y in _disk_seed_positions(pts, body.radius)
        ]
    elif isinstance(body, OpenUnitSquare):
        witnesses = _square_seed_witnesses(pts)
    else:
        raise TypeError(f"unknown body {body!r}")
    witnesses.extend(extra_seeds)

    found: Dict[Tuple[int, ...], TranslationWitness] = {}
    for w in witnesses:
        ids = []
        clean = True
        for idx, p in enumerate(pts):
            c = contains(body, w, p)
            if c is Containment.BOUNDARY:
                clean = False
                break
            if c is Containment.INSIDE:
                ids.append(idx)
        if not clean:
            continue
        key = tuple(ids)
        if key not in found:
            found[key] = w
    entries = tuple(
        InducedSubset(ids, found[ids], True)
        for ids in sorted(found, key=lambda t: (len(t), t))
    )
    return InducedFamily(entries, len(pts))


def induced_family_grid(body: Body, s, *, spacing: Optional[float] = None,
                        cell_cap: int = 6_000_000) -> FrozenSet[FrozenSet[int]]:
    """Independent brute-force oracle: scan a uniform float grid of
    translations and collect the induced subsets.

    Default spacing is a fifth of the smallest positive pairwise distance
    gap (distances and their offsets from the critical value), a proxy for
    the smallest face width.  Raises ScaleExceeded when the grid would
    exceed cell_cap cells.  Grid points are jittered off rational positions
    so boundary coincidences do not occur in practice; this is a sampling
    oracle, not an exact method.
    """
    pts = _as_point_list(s)
    if isinstance(body, Ellipse):
        inner_pts = [Point2(*body.apply_inverse(p.x, p.y)) for p in pts]
        return induced_family_grid(Disk(Fraction(1)), inner_pts,
                                   spacing=spacing, cell_cap=cell_cap)
    xs = np.array([float(p.x) for p in pts])
    ys = np.array([float(p.y) for p in pts])
    n = len(pts)
    if n > 32:
        raise ScaleExceeded("grid oracle supports at most 32 points")
    if isinstance(body, Disk):
        reach = float(body.radius)
    else:
        reach = 0.5
    if spacing is None:
        gaps = []
        if isinstance(body, Disk):
            for i in range(n):
                for j in range(i + 1, n):
                    d = math.hypot(xs[i] - xs[j], ys[i] - ys[j])
                    gaps.append(d)
                    gaps.append(abs(d - 2.0 * reach))
        else:
            # cell widths of the line arrangement: gaps between cut values
            for vals in (xs, ys):
                cuts = sorted(set(np.concatenate([vals - 0.5, vals + 0.5]).tolist()))
                gaps.extend(b - a for a, b in zip(cuts, cuts[1:]))
        gaps = [g for g in gaps if g > 0] or [reach]
        spacing = min(min(gaps) / 5.0, reach / 5.0)
    pad = 2.5 * spacing
    x_lo, x_hi = xs.min() - reach - pad, xs.max() + reach + pad
    y_lo, y_hi = ys.min() - reach - pad, ys.max() + reach + pad
    nx = int((x_hi - x_lo) / spacing) + 1
    ny = int((y_hi - y_lo) / spacing) + 1
    if nx * ny > cell_cap:
        raise ScaleExceeded(f"grid needs {nx * ny} cells, cap {cell_cap}")
    gx = x_lo + spacing * (0.2937461 + np.arange(nx))
    gy = y_lo + spacing * (0.4162053 + np.arange(ny))
    subsets = set()
    rr = reach * reach
    chunk = max(1, cell_cap // max(ny, 1) // 8)
    for start in range(0, nx, chunk):
        cx = gx[start:start + chunk][:, None]
        cy = gy[None, :]
        bits = np.zeros((cx.shape[0], ny), dtype=np.uint64)
        for i in range(n):
            if isinstance(body, Disk):
                inside = (xs[i] - cx) ** 2 + (ys[i] - cy) ** 2 < rr
            else:
                inside = (np.abs(xs[i] - cx) < 0.5) & (np.abs(ys[i] - cy) < 0.5)
            bits |= inside.astype(np.uint64) << np.uint64(i)
        subsets.update(np.unique(bits).tolist())
    out = set()
    for mask in subsets:
        mask = int(mask)
        out.add(frozenset(i for i in range(n) if mask >> i & 1))
    return frozenset(out)


def tc_k_sets(body: Body, s, k: int, *, max_n: int = 16,
              family: Optional[InducedFamily] = None) -> Tuple[int, InducedFamily]:
    """a_k: the number of distinct k-point subsets induced by boundary-free
    translates, together with witnesses.  Exact; intended for small n."""
    pts = _as_point_list(s)
    if len(pts) > max_n:
        raise ScaleExceeded(f"{len(pts)} points exceeds exact enumeration cap {max_n}")
    if not 0 <= k <= len(pts):
        raise ValueError(f"k={k} out of range for n={len(pts)}")
    fam = family if family is not None else induced_family(body, pts)
    entries = fam.of_size(k)
    return len(entries), InducedFamily(entries, fam.ground_size)


# ---------------------------------------------------------------------------
# subset/edge inequality, growth, shattering


@dataclass(frozen=True)
class SubsetEdgeReport:
    k: int
    a_k: int
    e_counts: Tuple[int, int, int]  # e_{k-2}, e_{k-1}, e_k
    holds: bool


def check_subset_edge_inequality(body: Body, s, k: int, *,
                                 antipodal_check: bool = True,
                                 family: Optional[InducedFamily] = None,
                                 levels: Optional[Dict[Tuple[int, int], int]] = None
                                 ) -> SubsetEdgeReport:
    """Exact check of a_k <= 4 * (e_{k-2} + e_{k-1} + e_k) for k >= 2: every
    induced k-subset is charged to a nearby-level edge, at most four times."""
    if k < 2:
        raise ValueError("the subset/edge inequality needs k >= 2")
    a_k, _ = tc_k_sets(body, s, k, family=family)
    if levels is None:
        levels = tc_k_edge_levels(body, s, antipodal_check=antipodal_check)
    es = tuple(sum(1 for lv in levels.values() if lv == kk) for kk in (k - 2, k - 1, k))
    return SubsetEdgeReport(k, a_k, es, a_k <= 4 * sum(es))


def growth_count(body: Body, s, *, max_n: int = 12) -> int:
    """Number of distinct subsets of S induced by translates of the body.

    Open bodies make on-boundary translations redundant: sliding off the
    boundary toward the outside keeps the same strict-interior subset, so
    counting boundary-free cells counts all induced subsets.
    """
    pts = _as_point_list(s)
    if len(pts) > max_n:
        raise ScaleExceeded(f"{len(pts)} points exceeds growth enumeration cap {max_n}")
    return len(induced_family(body, pts))


@dataclass(frozen=True)
class ShatterReport:
    shattered: bool
    found: int
    missing: Tuple[Tuple[int, ...], ...]


def vc_shatter_check(body: Body, q) -> ShatterReport:
    """Is every subset of Q (|Q| <= 4) induced by some translate?"""
    pts = _as_point_list(q)
    n = len(pts)
    if n > 4:
        raise ValueError("shatter check is limited to at most 4 points")
    fam = induced_family(body, pts)
    have = fam.subsets()
    missing = []
    for mask in range(1 << n):
        sub = frozenset(i for i in range(n) if mask >> i & 1)
        if sub not in have:
            missing.append(tuple(sorted(sub)))
    missing.sort(key=lambda t: (len(t), t))
    return ShatterReport(not missing, len(have), tuple(missing))


# ---------------------------------------------------------------------------
# lens area bound


@dataclass(frozen=True)
class LensReport:
    offset: float
    radius: float
    area: float
    bound: float
    holds: bool


def lens_area_bound(offset, radius=1) -> LensReport:
    """Area of the intersection of two radius-rho disks whose centers are
    d apart, against the linear bound (1 - d/2) * pi * rho^2.

    The overlap of translates decays at rate 2*width/area per unit offset,
    which for a disk is 4/(pi*rho); the linear bound above therefore holds
    for all d in (0, 1] exactly when rho <= 4/pi, unit radius included.
    Larger disks lose area too slowly and the flag honestly reports False.
    """
    d = float(offset)
    rho = float(radius)
    if d < 0 or rho <= 0:
        raise ValueError("need offset >= 0 and radius > 0")
    if d > 2 * rho:
        raise OffsetTooLarge(f"offset {d} exceeds diameter {2 * rho}")
    area = 2 * rho * rho * math.acos(d / (2 * rho)) - (d / 2) * math.sqrt(4 * rho * rho - d * d)
    bound = (1 - d / 2) * math.pi * rho * rho
    return LensReport(d, rho, area, bound, area <= bound + 1e-12)


# ---------------------------------------------------------------------------
# constructions


def cross_construction_square(n: int) -> PointSet:
    """n points on the coordinate axes, scaled so that many translates of
    the open unit square cut out subsets of size about n/2: (4/n) * (the
    nonzero integer points on the axes with coordinates up to n/4)."""
    if n % 4 != 0 or n < 4:
        raise BadN("n must be a positive multiple of 4")
    lam = Fraction(4, n)
    arm = n // 4
    pts = []
    for i in range(1, arm + 1):
        pts.extend([(lam * i, Fraction(0)), (-lam * i, Fraction(0)),
                    (Fraction(0), lam * i), (Fraction(0), -lam * i)])
    return PointSet(pts, meta={"construction": "axis_cross_square", "scale": str(lam)})


def _c2_arm_params(rho: Fraction, n: int, t) -> Tuple[Fraction, Fraction]:
    m = n // 4
    if t == "auto":
        # Keep the sag of the circular boundary below half the grid step so
        # each grid translation separates consecutive arm points: with
        # curvature coefficient alpha = 1/(2 rho) and step eps = 2t/(m-1),
        # sag <= alpha t^2 < eps/2 forces t < (m-1)/(2 alpha m^2) (with a
        # safety factor from using m^2 rather than (m-1)m).
        alpha = Fraction(1) / (2 * rho)
        t_val = min(rho / 2, Fraction(m - 1, 1) / (2 * alpha * m * m))
    else:
        t_val = to_fraction(t)
        if not 0 < t_val <= rho / 2:
            raise ValueError("segment half-length must lie in (0, rho/2]")
    eps = 2 * t_val / (m - 1)
    return t_val, eps


def cross_construction_c2(body: Body, n: int, t="auto") -> PointSet:
    """n points in four arms along the axis directions of a strictly convex
    body, spaced so that a grid of about n^2/16 translations realizes
    pairwise distinct subsets of size n/2.

    For the disk the four arms sit on the coordinate axes through the
    boundary points (+-rho, 0), (0, +-rho), each carrying n/4 points with
    half-integer offsets (in grid-step units) in [-t, t].
    """
    _require_strictly_convex(body, "cross_construction_c2")
    if n % 8 != 0 or n < 8:
        raise BadN("n must be a positive multiple of 8")
    m = n // 4
    if isinstance(body, Disk):
        rho = body.radius
        t_val, eps = _c2_arm_params(rho, n, t)
        pts = []
        for ux, uy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            for i in range(m):
                off = -t_val + 2 * t_val * Fraction(i, m - 1)
                pts.append((rho * ux + off * ux, rho * uy + off * uy))
        return PointSet(pts, meta={"construction": "axis_cross_curved",
                                   "t": str(t_val), "epsilon": str(eps)})
    # Ellipse: map the unit-disk construction through M.  The images of the
    # disk arms are arms along the axis-support directions of the ellipse;
    # separation quality is inherited from the disk instance because M is a
    # fixed bijection on translation space.
    inner = cross_construction_c2(Disk(Fraction(1)), n, t)
    pts = [body.apply(p.x, p.y) for p in inner]
    meta = dict(inner.meta)
    meta["construction"] = "axis_cross_curved_mapped"
    return PointSet(pts, meta=meta)


# ---------------------------------------------------------------------------
# scaling experiment (float fast path)


@dataclass(frozen=True)
class ScalingRow:
    n: int
    trials: int
    argmax_k: int
    max_mean: float
    pairs_mean: float
    argmax_drift: float  # |argmax_k - p*n|


@dataclass(frozen=True)
class ScalingReport:
    rows: Tuple[ScalingRow, ...]
    slope: float
    intercept: float
    point_fraction: float  # p = area(C) / area(A)


def tc_scaling_trial_seeds(seed: int, n: int, trials: int) -> List[int]:
    """Per-trial seeds for one n of the scaling experiment.  Both the serial
    runner and any parallel driver derive seeds here, so results match."""
    master = np.random.default_rng([seed, n])
    return [int(v) for v in master.integers(0, 2 ** 62, size=trials)]


def tc_scaling_trial(n: int, rho: float, side: float, trial_seed: int) -> np.ndarray:
    """One random instance: n uniform points in the side x side window;
    returns the histogram over k of ordered-pair canonical-translate levels.

    Float arithmetic throughout: exact ties are measure-zero for continuous
    samples, and the Monte Carlo scaling statistic tolerates per-instance
    noise.
    """
    rng = np.random.default_rng(trial_seed)
    pts = rng.uniform(-side / 2.0, side / 2.0, size=(n, 2))
    dx = pts[None, :, 0] - pts[:, None, 0]
    dy = pts[None, :, 1] - pts[:, None, 1]
    d2 = dx * dx + dy * dy
    rr = rho * rho
    mask = (d2 < 4.0 * rr) & ~np.eye(n, dtype=bool)
    ii, jj = np.nonzero(mask)
    if len(ii) == 0:
        return np.zeros(n - 1, dtype=np.int64)
    pdx = pts[jj, 0] - pts[ii, 0]
    pdy = pts[jj, 1] - pts[ii, 1]
    pd2 = pdx * pdx + pdy * pdy
    h = np.sqrt(np.maximum(rr / pd2 - 0.25, 0.0))
    cx = (pts[ii, 0] + pts[jj, 0]) / 2.0 + h * pdy
    cy = (pts[ii, 1] + pts[jj, 1]) / 2.0 - h * pdx
    dist2 = (pts[None, :, 0] - cx[:, None]) ** 2 + (pts[None, :, 1] - cy[:, None]) ** 2
    inside = dist2 < rr
    rows = np.arange(len(ii))
    inside[rows, ii] = False
    inside[rows, jj] = False
    counts = inside.sum(axis=1)
    return np.bincount(counts, minlength=n - 1).astype(np.int64)


def tc_scaling_experiment(*, rho=1.0, side=4.0, ns: Sequence[int] = (16, 24, 32, 48, 64),
                          trials: int = 200, seed: int = 0,
                          trial_histograms: Optional[dict] = None) -> ScalingReport:
    """Monte Carlo growth of the largest per-level mean count of translation
    k-edges, with a log-log slope fit across the n grid.

    trial_histograms, when given, maps n -> iterable of per-trial histograms
    (so a parallel driver can precompute tc_scaling_trial results); otherwise
    trials run serially with per-trial seeds drawn once from a master rng.
    """
    rho = float(rho)
    side = float(side)
    if side < 4.0 * rho:
        raise BodyNotContained("window must contain the doubled body: side >= 4*rho")
    p = math.pi * rho * rho / (side * side)
    rows = []
    for n in ns:
        if trial_histograms is not None:
            hists = list(trial_histograms[n])
        else:
            hists = [tc_scaling_trial(n, rho, side, ts)
                     for ts in tc_scaling_trial_seeds(seed, n, trials)]
        acc = np.zeros(n - 1, dtype=np.float64)
        for hst in hists:
            acc[: len(hst)] += hst
        means = acc / len(hists)
        argmax_k = int(np.argmax(means))
        rows.append(ScalingRow(n, len(hists), argmax_k, float(means[argmax_k]),
                               float(means.sum()), abs(argmax_k - p * n)))
    xs = np.log([r.n for r in rows])
    ys = np.log([max(r.max_mean, 1e-300) for r in rows])
    slope, intercept = np.polyfit(xs, ys, 1)
    return ScalingReport(tuple(rows), float(slope), float(intercept), p)


# ---------------------------------------------------------------------------
# serialization


def body_to_json(body: Body) -> dict:
    if isinstance(body, Disk):
        return {"variant": "disk", "radius": str(body.radius)}
    if isinstance(body, Ellipse):
        return {"variant": "ellipse",
                "matrix": [[str(body.m11), str(body.m12)], [str(body.m21), str(body.m22)]]}
    if isinstance(body, OpenUnitSquare):
        return {"variant": "square"}
    raise TypeError(f"unknown body {body!r}")


def body_from_json(data: dict) -> Body:
    variant = data.get("variant")
    if variant == "disk":
        return Disk(Fraction(data["radius"]))
    if variant == "ellipse":
        (a, b), (c, d) = data["matrix"]
        return Ellipse(Fraction(a), Fraction(b), Fraction(c), Fraction(d))
    if variant == "square":
        return OpenUnitSquare()
    raise ValueError(f"unknown body variant {variant!r}")


def _exact_str(v) -> str:
    if isinstance(v, Quad):
        if v.b == 0:
            return str(v.a)
        raise ValueError("cannot serialize an irrational coordinate as a rational")
    return str(to_fraction(v))


def family_to_csv(family: InducedFamily) -> str:
    lines = ["subset_id,k,witness_x,witness_y,boundary_free"]
    for e in family.entries:
        sid = "+".join(map(str, e.ids)) if e.ids else "-"
        lines.append(",".join([
            sid, str(len(e.ids)), _exact_str(e.witness.x), _exact_str(e.witness.y),
            "1" if e.boundary_free else "0",
        ]))
    return "\n".join(lines) + "\n"
