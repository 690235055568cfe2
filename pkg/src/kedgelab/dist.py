"""Planar sampling distributions with exact or high-precision halfplane measures.

Every closed-form variant assigns measure zero to every line, so halfplane
measures are insensitive to the open/closed boundary distinction.  Sampled
points are converted to the exact dyadic rationals their float representation
already denotes (53-bit mantissa), recorded in the point-set metadata.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Tuple, Union

import numpy as np

from .geom import Point2, PointSet, to_fraction


class DistError(Exception):
    pass


class MeasureUnavailable(DistError):
    """The variant has no closed-form halfplane measure."""


class OnPartitionLine(DistError):
    """A query point lies exactly on a partition line."""


Rat = Fraction


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _angle_half(d) -> int:
    # 0 for direction angles in [0, pi), 1 for [pi, 2pi)
    if d[1] > 0 or (d[1] == 0 and d[0] > 0):
        return 0
    return 1


def _angle_less(d1, d2) -> bool:
    h1, h2 = _angle_half(d1), _angle_half(d2)
    if h1 != h2:
        return h1 < h2
    return d1[0] * d2[1] - d1[1] * d2[0] > 0


@dataclass(frozen=True)
class UniformPolygon:
    """Uniform distribution on a strictly convex polygon, vertices CCW."""

    vertices: Tuple[Tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        verts = tuple((to_fraction(x), to_fraction(y)) for (x, y) in self.vertices)
        object.__setattr__(self, "vertices", verts)
        m = len(verts)
        if m < 3:
            raise ValueError("polygon needs at least 3 vertices")
        if len(set(verts)) != m:
            raise ValueError("polygon vertices must be distinct")
        dirs = [(verts[(i + 1) % m][0] - verts[i][0],
                 verts[(i + 1) % m][1] - verts[i][1]) for i in range(m)]
        for i in range(m):
            if _cross(verts[i], verts[(i + 1) % m], verts[(i + 2) % m]) <= 0:
                raise ValueError("vertices must make strict left turns (strictly convex, CCW)")
        # one angular wrap <=> winding number 1 <=> simple
        wraps = sum(1 for i in range(m) if not _angle_less(dirs[i], dirs[(i + 1) % m]))
        if wraps != 1:
            raise ValueError("vertex cycle winds more than once")

    def area(self) -> Fraction:
        v = self.vertices
        m = len(v)
        tot = Fraction(0)
        for i in range(m):
            tot += v[i][0] * v[(i + 1) % m][1] - v[(i + 1) % m][0] * v[i][1]
        return tot / 2


@dataclass(frozen=True)
class UniformDisk:
    center: Tuple[Fraction, Fraction]
    radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "center",
                           (to_fraction(self.center[0]), to_fraction(self.center[1])))
        object.__setattr__(self, "radius", to_fraction(self.radius))
        if self.radius <= 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class Gaussian2D:
    """Isotropic normal with standard deviation sigma per axis."""

    mean: Tuple[Fraction, Fraction]
    sigma: Fraction

    def __post_init__(self):
        object.__setattr__(self, "mean",
                           (to_fraction(self.mean[0]), to_fraction(self.mean[1])))
        object.__setattr__(self, "sigma", to_fraction(self.sigma))
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class Mixture:
    components: Tuple[Tuple[float, "DistributionSpec"], ...]

    def __post_init__(self):
        comps = tuple((float(w), c) for (w, c) in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("mixture needs at least one component")
        if any(w <= 0 for w, _ in comps):
            raise ValueError("mixture weights must be positive")
        if abs(sum(w for w, _ in comps) - 1.0) > 1e-9:
            raise ValueError("mixture weights must sum to 1")


@dataclass(frozen=True)
class SamplerOnly:
    """Opaque sampler: draw(rng, n) -> (n, 2) float array.  No measures."""

    draw: Callable
    name: str = "sampler_only"


DistributionSpec = Union[UniformPolygon, UniformDisk, Gaussian2D, Mixture, SamplerOnly]


class OrientedLine:
    """Line a . x = b with positive side {x : a . x > b}.

    Coefficients are held exactly (floats convert to the dyadic rationals they
    are), so polygon clipping is exact; norm-dependent measures use floats.
    """

    __slots__ = ("ax", "ay", "b")

    def __init__(self, ax, ay, b):
        self.ax = to_fraction(ax)
        self.ay = to_fraction(ay)
        self.b = to_fraction(b)
        if self.ax == 0 and self.ay == 0:
            raise ValueError("zero normal")

    @classmethod
    def through_points(cls, p: Point2, q: Point2) -> "OrientedLine":
        """Line through two points, positive side above (normal y-component > 0)."""
        if p.x == q.x:
            raise ValueError("vertical pair has no 'above' side")
        ax = p.y - q.y
        ay = q.x - p.x
        b = ax * p.x + ay * p.y
        if ay < 0:
            ax, ay, b = -ax, -ay, -b
        return cls(ax, ay, b)

    @classmethod
    def vertical_left_of(cls, t) -> "OrientedLine":
        """Vertical line at x = t, positive side {x < t}."""
        t = to_fraction(t)
        return cls(-1, 0, -t)

    def reversed(self) -> "OrientedLine":
        return OrientedLine(-self.ax, -self.ay, -self.b)

    def side(self, x, y) -> int:
        v = self.ax * to_fraction(x) + self.ay * to_fraction(y) - self.b
        return (v > 0) - (v < 0)

    def __repr__(self):
        return f"OrientedLine({self.ax}, {self.ay}, {self.b})"


# ---------------------------------------------------------------------------
# sampling


def _draw_one(spec: DistributionSpec, rng: np.random.Generator) -> Tuple[float, float]:
    if isinstance(spec, UniformPolygon):
        v = spec.vertices
        m = len(v)
        areas = []
        for i in range(1, m - 1):
            areas.append(float(_cross(v[0], v[i], v[i + 1])) / 2.0)
        tot = sum(areas)
        t = rng.random() * tot
        idx = 0
        acc = areas[0]
        while acc < t and idx < len(areas) - 1:
            idx += 1
            acc += areas[idx]
        a, b, c = v[0], v[idx + 1], v[idx + 2]
        u, w = rng.random(), rng.random()
        if u + w > 1.0:
            u, w = 1.0 - u, 1.0 - w
        x = float(a[0]) + u * float(b[0] - a[0]) + w * float(c[0] - a[0])
        y = float(a[1]) + u * float(b[1] - a[1]) + w * float(c[1] - a[1])
        return (x, y)
    if isinstance(spec, UniformDisk):
        r = float(spec.radius) * math.sqrt(rng.random())
        th = 2.0 * math.pi * rng.random()
        return (float(spec.center[0]) + r * math.cos(th),
                float(spec.center[1]) + r * math.sin(th))
    if isinstance(spec, Gaussian2D):
        x, y = rng.normal(size=2)
        s = float(spec.sigma)
        return (float(spec.mean[0]) + s * x, float(spec.mean[1]) + s * y)
    if isinstance(spec, Mixture):
        t = rng.random()
        acc = 0.0
        for i, (w, comp) in enumerate(spec.components):
            acc += w
            if t < acc or i == len(spec.components) - 1:
                return _draw_one(comp, rng)
    raise DistError(f"cannot draw from {spec!r}")


def sample(spec: DistributionSpec, n: int, seed: int) -> PointSet:
    """Draw n points; deterministic in (spec, n, seed).

    Coordinates are dyadic rationals (exact float conversion).  Duplicate
    draws (probability zero up to float collisions) are redrawn from the same
    stream so the result always satisfies the distinctness invariant.
    """
    rng = np.random.default_rng(seed)
    pts = []
    seen = set()
    guard = 0
    while len(pts) < n:
        if isinstance(spec, SamplerOnly):
            arr = np.asarray(spec.draw(rng, n - len(pts)), dtype=float)
            cand = [(float(a), float(b)) for a, b in arr]
        else:
            cand = [_draw_one(spec, rng)]
        for (x, y) in cand:
            if (x, y) not in seen and len(pts) < n:
                seen.add((x, y))
                pts.append(Point2(x, y))
        guard += 1
        if guard > 10 * n + 100:
            raise DistError("sampler keeps returning duplicate points")
    return PointSet(pts, meta={"rationalization": "dyadic53", "seed": seed,
                               "spec": spec_id(spec)})


# ---------------------------------------------------------------------------
# halfplane measures


def _polygon_halfplane_fraction(spec: UniformPolygon, line: OrientedLine) -> Fraction:
    """Exact area fraction of the polygon on the positive side (convex clip)."""
    v = spec.vertices
    m = len(v)
    signs = [line.ax * x + line.ay * y - line.b for (x, y) in v]
    out = []
    for i in range(m):
        j = (i + 1) % m
        si, sj = signs[i], signs[j]
        if si >= 0:
            out.append(v[i])
        if (si > 0 and sj < 0) or (si < 0 and sj > 0):
            t = si / (si - sj)
            out.append((v[i][0] + t * (v[j][0] - v[i][0]),
                        v[i][1] + t * (v[j][1] - v[i][1])))
    if len(out) < 3:
        return Fraction(0)
    area2 = Fraction(0)
    for i in range(len(out)):
        j = (i + 1) % len(out)
        area2 += out[i][0] * out[j][1] - out[j][0] * out[i][1]
    return (area2 / 2) / spec.area()


def halfplane_measure(spec: DistributionSpec, line: OrientedLine):
    """Probability mass on the positive side of the line.

    Exact Fraction for polygons; float elsewhere (disk cap via arccos,
    Gaussian tail via the complementary error function, which carries
    relative error well below 1e-10).
    """
    if isinstance(spec, UniformPolygon):
        return _polygon_halfplane_fraction(spec, line)
    if isinstance(spec, UniformDisk):
        anorm = math.hypot(float(line.ax), float(line.ay))
        # normalized signed threshold: +1 -> line tangent with disk fully negative
        t = (float(line.b) - (float(line.ax) * float(spec.center[0])
                              + float(line.ay) * float(spec.center[1]))) / (anorm * float(spec.radius))
        if t >= 1.0:
            return 0.0
        if t <= -1.0:
            return 1.0
        return (math.acos(t) - t * math.sqrt(1.0 - t * t)) / math.pi
    if isinstance(spec, Gaussian2D):
        anorm = math.hypot(float(line.ax), float(line.ay))
        z = (float(line.b) - (float(line.ax) * float(spec.mean[0])
                              + float(line.ay) * float(spec.mean[1]))) / (anorm * float(spec.sigma))
        return 0.5 * math.erfc(z / math.sqrt(2.0))
    if isinstance(spec, Mixture):
        return sum(w * float(halfplane_measure(c, line)) for w, c in spec.components)
    raise MeasureUnavailable(f"no halfplane measure for {spec_id(spec)}")


def marginal_x_cdf(spec: DistributionSpec, t: float) -> float:
    return float(halfplane_measure(spec, OrientedLine.vertical_left_of(t)))


def _x_support(spec: DistributionSpec) -> Tuple[float, float]:
    if isinstance(spec, UniformPolygon):
        xs = [float(x) for (x, _) in spec.vertices]
        return min(xs), max(xs)
    if isinstance(spec, UniformDisk):
        return (float(spec.center[0] - spec.radius), float(spec.center[0] + spec.radius))
    if isinstance(spec, Gaussian2D):
        m, s = float(spec.mean[0]), float(spec.sigma)
        return (m - 40.0 * s, m + 40.0 * s)
    if isinstance(spec, Mixture):
        spans = [_x_support(c) for _, c in spec.components]
        return (min(a for a, _ in spans), max(b for _, b in spans))
    raise MeasureUnavailable(f"no support bracket for {spec_id(spec)}")


def equiprob_vertical_lines(spec: DistributionSpec, m: int,
                            tol: float = 5e-13, max_iter: int = 200) -> list:
    """m vertical lines splitting the x-marginal into m+1 equal-mass slabs.

    Bisection on the marginal CDF; each line's CDF value lands within tol of
    its target so adjacent slab masses are within 2*tol of 1/(m+1).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    lo0, hi0 = _x_support(spec)
    lines = []
    for i in range(1, m + 1):
        target = i / (m + 1)
        lo, hi = lo0, hi0
        x = 0.5 * (lo + hi)
        for _ in range(max_iter):
            x = 0.5 * (lo + hi)
            f = marginal_x_cdf(spec, x)
            if abs(f - target) <= tol:
                break
            if f < target:
                lo = x
            else:
                hi = x
        lines.append(x)
    return lines


def cell_index(lines: Sequence[float], p: Point2) -> int:
    """Which of the m+1 vertical slabs holds p (0 = leftmost).

    Exact comparison of the rational x-coordinate against each line; an exact
    hit raises OnPartitionLine.
    """
    idx = 0
    for t in lines:
        ft = to_fraction(t)
        if p.x == ft:
            raise OnPartitionLine(f"point x={p.x} lies on partition line {t}")
        if p.x > ft:
            idx += 1
    return idx


# ---------------------------------------------------------------------------
# JSON interchange


def _rat_str(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def spec_to_json(spec: DistributionSpec) -> dict:
    if isinstance(spec, UniformPolygon):
        return {"variant": "uniform_polygon",
                "vertices": [[_rat_str(x), _rat_str(y)] for (x, y) in spec.vertices]}
    if isinstance(spec, UniformDisk):
        return {"variant": "uniform_disk",
                "center": [_rat_str(spec.center[0]), _rat_str(spec.center[1])],
                "radius": _rat_str(spec.radius)}
    if isinstance(spec, Gaussian2D):
        return {"variant": "gaussian",
                "mean": [_rat_str(spec.mean[0]), _rat_str(spec.mean[1])],
                "sigma": _rat_str(spec.sigma)}
    if isinstance(spec, Mixture):
        return {"variant": "mixture",
                "components": [{"weight": w, "spec": spec_to_json(c)}
                               for (w, c) in spec.components]}
    raise DistError(f"{spec_id(spec)} is not JSON-serializable")


def spec_from_json(obj: dict) -> DistributionSpec:
    if not isinstance(obj, dict) or "variant" not in obj:
        raise DistError("distribution spec must be an object with a 'variant' key")
    v = obj["variant"]
    if v == "uniform_polygon":
        return UniformPolygon(tuple((to_fraction(x), to_fraction(y))
                                    for x, y in obj["vertices"]))
    if v == "uniform_disk":
        return UniformDisk((to_fraction(obj["center"][0]), to_fraction(obj["center"][1])),
                           to_fraction(obj["radius"]))
    if v == "gaussian":
        return Gaussian2D((to_fraction(obj["mean"][0]), to_fraction(obj["mean"][1])),
                          to_fraction(obj["sigma"]))
    if v == "mixture":
        return Mixture(tuple((float(c["weight"]), spec_from_json(c["spec"]))
                             for c in obj["components"]))
    raise DistError(f"unknown distribution variant {v!r}")


def spec_id(spec: DistributionSpec) -> str:
    if isinstance(spec, UniformPolygon):
        return f"uniform_polygon[{len(spec.vertices)}]"
    if isinstance(spec, UniformDisk):
        return f"uniform_disk[r={_rat_str(spec.radius)}]"
    if isinstance(spec, Gaussian2D):
        return f"gaussian[sigma={_rat_str(spec.sigma)}]"
    if isinstance(spec, Mixture):
        return "mixture[" + ",".join(spec_id(c) for _, c in spec.components) + "]"
    if isinstance(spec, SamplerOnly):
        return f"sampler_only[{spec.name}]"
    return type(spec).__name__


def unit_square() -> UniformPolygon:
    return UniformPolygon(((Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)),
                           (Fraction(1), Fraction(1)), (Fraction(0), Fraction(1))))
