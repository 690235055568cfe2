"""Distribution variants: sampling determinism, exact and closed-form
halfplane measures, equal-mass vertical partitions, and slab lookup."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from kedgelab.dist import (
    Gaussian2D,
    MeasureUnavailable,
    Mixture,
    OnPartitionLine,
    OrientedLine,
    SamplerOnly,
    UniformDisk,
    UniformPolygon,
    cell_index,
    equiprob_vertical_lines,
    halfplane_measure,
    marginal_x_cdf,
    sample,
    spec_from_json,
    spec_id,
    spec_to_json,
    unit_square,
)
from kedgelab.geom import Point2


SQ = unit_square()


class TestPolygonValidation:
    def test_unit_square_ok(self):
        assert SQ.area() == 1

    def test_clockwise_rejected(self):
        with pytest.raises(ValueError):
            UniformPolygon(((0, 0), (0, 1), (1, 1), (1, 0)))

    def test_collinear_vertex_rejected(self):
        with pytest.raises(ValueError):
            UniformPolygon(((0, 0), (1, 0), (2, 0), (1, 1)))

    def test_reflex_rejected(self):
        with pytest.raises(ValueError):
            UniformPolygon(((0, 0), (2, 0), (1, Fraction(1, 2)), (2, 2), (0, 2)))

    def test_star_winding_rejected(self):
        # pentagram: every turn is a left turn but the cycle winds twice
        pts = []
        for i in range(5):
            th = math.pi / 2 + 2 * math.pi * (2 * i) / 5
            pts.append((Fraction(round(math.cos(th) * 10**6), 10**6),
                        Fraction(round(math.sin(th) * 10**6), 10**6)))
        with pytest.raises(ValueError):
            UniformPolygon(tuple(pts))

    def test_duplicate_vertex_rejected(self):
        with pytest.raises(ValueError):
            UniformPolygon(((0, 0), (1, 0), (1, 0), (0, 1)))

    def test_disk_bad_radius(self):
        with pytest.raises(ValueError):
            UniformDisk((0, 0), 0)

    def test_mixture_weights(self):
        with pytest.raises(ValueError):
            Mixture(((0.5, SQ), (0.4, SQ)))


class TestHalfplaneMeasure:
    def test_unit_square_vertical_half(self):
        line = OrientedLine.vertical_left_of(Fraction(1, 2))
        assert halfplane_measure(SQ, line) == Fraction(1, 2)

    def test_unit_square_diagonal(self):
        # above the main diagonal: exactly half
        line = OrientedLine.through_points(Point2(0, 0), Point2(1, 1))
        assert halfplane_measure(SQ, line) == Fraction(1, 2)

    def test_unit_square_corner_cut(self):
        # above the line through (1/2, 0) and (1, 1/2): triangle of area 1/8
        line = OrientedLine.through_points(Point2(Fraction(1, 2), 0),
                                           Point2(1, Fraction(1, 2)))
        below = halfplane_measure(SQ, line.reversed())
        assert below == Fraction(1, 8)
        assert halfplane_measure(SQ, line) == Fraction(7, 8)

    def test_line_missing_polygon(self):
        line = OrientedLine.vertical_left_of(-5)
        assert halfplane_measure(SQ, line) == 0
        assert halfplane_measure(SQ, line.reversed()) == 1

    def test_complement_exact_polygon(self):
        tri = UniformPolygon(((0, 0), (3, 1), (1, 2)))
        line = OrientedLine(Fraction(2, 7), Fraction(-3, 5), Fraction(1, 5))
        m = halfplane_measure(tri, line)
        assert m + halfplane_measure(tri, line.reversed()) == 1
        assert 0 < m < 1

    def test_disk_center_line_half(self):
        d = UniformDisk((2, 1), 3)
        line = OrientedLine.through_points(Point2(0, 1), Point2(5, 1))
        assert halfplane_measure(d, line) == pytest.approx(0.5, abs=1e-15)

    def test_disk_tangent_and_beyond(self):
        d = UniformDisk((0, 0), 1)
        assert halfplane_measure(d, OrientedLine.vertical_left_of(-1)) == 0.0
        assert halfplane_measure(d, OrientedLine.vertical_left_of(2)) == 1.0

    def test_disk_quarter_cap_against_quadrature(self):
        # mass of {x < -1/2} in the unit disk, via the closed form vs a
        # midpoint quadrature of the chord-length integral
        d = UniformDisk((0, 0), 1)
        got = halfplane_measure(d, OrientedLine.vertical_left_of(Fraction(-1, 2)))
        n = 200000
        acc = 0.0
        for i in range(n):
            x = -1.0 + 0.5 * (i + 0.5) / n
            acc += 2.0 * math.sqrt(max(0.0, 1.0 - x * x)) * (0.5 / n)
        assert got == pytest.approx(acc / math.pi, abs=1e-8)

    def test_gaussian_mean_line(self):
        g = Gaussian2D((1, 2), 3)
        line = OrientedLine.vertical_left_of(1)
        assert halfplane_measure(g, line) == pytest.approx(0.5, abs=1e-15)

    def test_gaussian_one_sigma(self):
        g = Gaussian2D((0, 0), 1)
        m = halfplane_measure(g, OrientedLine.vertical_left_of(1))
        assert m == pytest.approx(0.5 * (1 + math.erf(1 / math.sqrt(2))), abs=1e-14)

    def test_mixture_measure(self):
        mix = Mixture(((0.5, SQ), (0.5, UniformDisk((0, 0), 1))))
        line = OrientedLine.vertical_left_of(0)
        assert halfplane_measure(mix, line) == pytest.approx(0.25, abs=1e-15)

    def test_sampler_only_unavailable(self):
        so = SamplerOnly(lambda rng, n: rng.random((n, 2)), name="opaque")
        with pytest.raises(MeasureUnavailable):
            halfplane_measure(so, OrientedLine.vertical_left_of(0))


class TestSampling:
    def test_deterministic(self):
        a = sample(SQ, 40, seed=7)
        b = sample(SQ, 40, seed=7)
        assert [(p.x, p.y) for p in a] == [(q.x, q.y) for q in b]
        c = sample(SQ, 40, seed=8)
        assert [(p.x, p.y) for p in a] != [(q.x, q.y) for q in c]

    def test_polygon_support(self):
        s = sample(SQ, 300, seed=3)
        for p in s:
            assert 0 <= p.x <= 1 and 0 <= p.y <= 1
        assert s.meta["rationalization"] == "dyadic53"

    def test_triangle_mean_close_to_centroid(self):
        tri = UniformPolygon(((0, 0), (3, 0), (0, 3)))
        s = sample(tri, 4000, seed=11)
        mx = sum(float(p.x) for p in s) / len(s)
        my = sum(float(p.y) for p in s) / len(s)
        # centroid (1,1); sd per coordinate is well under 0.8, so 3 sigma ~ 0.04
        assert abs(mx - 1.0) < 0.05 and abs(my - 1.0) < 0.05

    def test_disk_support_and_mean(self):
        d = UniformDisk((5, -2), Fraction(3, 2))
        s = sample(d, 3000, seed=5)
        for p in s:
            assert (float(p.x) - 5) ** 2 + (float(p.y) + 2) ** 2 <= 1.5**2 + 1e-9
        mx = sum(float(p.x) for p in s) / len(s)
        assert abs(mx - 5.0) < 0.1

    def test_gaussian_moments(self):
        g = Gaussian2D((0, 0), 2)
        s = sample(g, 5000, seed=9)
        xs = np.array([float(p.x) for p in s])
        assert abs(xs.mean()) < 3 * 2 / math.sqrt(5000) * 1.5
        assert abs(xs.std() - 2.0) < 0.1

    def test_mixture_draws_from_both(self):
        far = Mixture(((0.5, UniformDisk((-100, 0), 1)),
                       (0.5, UniformDisk((100, 0), 1))))
        s = sample(far, 400, seed=2)
        left = sum(1 for p in s if p.x < 0)
        assert 120 < left < 280

    def test_sampler_only_draws(self):
        so = SamplerOnly(lambda rng, n: rng.random((n, 2)) + 10.0, name="shifted")
        s = sample(so, 50, seed=4)
        assert all(10 <= p.x <= 11 for p in s)

    def test_empirical_halfplane_mass_matches_measure(self):
        # one stochastic consistency check tying sample() to halfplane_measure()
        tri = UniformPolygon(((0, 0), (4, 0), (0, 4)))
        line = OrientedLine.through_points(Point2(0, 1), Point2(1, 0))
        m = float(halfplane_measure(tri, line))
        s = sample(tri, 6000, seed=13)
        emp = sum(1 for p in s if line.side(p.x, p.y) > 0) / len(s)
        assert abs(emp - m) < 4 * math.sqrt(m * (1 - m) / 6000)


class TestEquiprobLines:
    def test_unit_square_quartiles(self):
        lines = equiprob_vertical_lines(SQ, 3)
        assert len(lines) == 3
        for got, want in zip(lines, (0.25, 0.5, 0.75)):
            assert got == pytest.approx(want, abs=1e-9)

    def test_slab_masses_equal(self):
        specs = [
            UniformPolygon(((0, 0), (3, 1), (2, 4), (-1, 2))),
            UniformDisk((1, 1), 2),
            Gaussian2D((0, 0), 1),
            Mixture(((0.3, UniformDisk((0, 0), 1)), (0.7, Gaussian2D((4, 0), 2)))),
        ]
        for spec in specs:
            m = 4
            lines = equiprob_vertical_lines(spec, m)
            assert lines == sorted(lines)
            cuts = [0.0] + [marginal_x_cdf(spec, x) for x in lines] + [1.0]
            for lo, hi in zip(cuts, cuts[1:]):
                assert abs((hi - lo) - 1 / (m + 1)) < 1e-12

    def test_sampler_only_rejected(self):
        so = SamplerOnly(lambda rng, n: rng.random((n, 2)), name="opaque")
        with pytest.raises(MeasureUnavailable):
            equiprob_vertical_lines(so, 2)


class TestCellIndex:
    def test_basic(self):
        lines = [0.25, 0.5, 0.75]
        assert cell_index(lines, Point2(Fraction(1, 10), 0)) == 0
        assert cell_index(lines, Point2(Fraction(3, 10), 0)) == 1
        assert cell_index(lines, Point2(Fraction(6, 10), 0)) == 2
        assert cell_index(lines, Point2(Fraction(9, 10), 0)) == 3

    def test_exact_hit_raises(self):
        lines = [0.25, 0.5, 0.75]
        with pytest.raises(OnPartitionLine):
            cell_index(lines, Point2(Fraction(1, 2), 7))

    def test_counts_by_cell_roughly_uniform(self):
        lines = equiprob_vertical_lines(SQ, 3)
        s = sample(SQ, 2000, seed=21)
        counts = [0, 0, 0, 0]
        for p in s:
            counts[cell_index(lines, p)] += 1
        for c in counts:
            assert 380 < c < 620


class TestJson:
    def test_roundtrip_all_variants(self):
        specs = [
            SQ,
            UniformDisk((Fraction(1, 3), -2), Fraction(7, 2)),
            Gaussian2D((0, Fraction(1, 4)), Fraction(3, 2)),
            Mixture(((0.25, UniformDisk((0, 0), 1)), (0.75, SQ))),
        ]
        for spec in specs:
            blob = json.dumps(spec_to_json(spec))
            back = spec_from_json(json.loads(blob))
            assert spec_to_json(back) == spec_to_json(spec)
            assert spec_id(back) == spec_id(spec)

    def test_bad_variant(self):
        with pytest.raises(Exception):
            spec_from_json({"variant": "nope"})

    def test_rational_strings_survive(self):
        blob = spec_to_json(UniformDisk((Fraction(1, 3), 0), Fraction(5, 7)))
        assert blob["radius"] == "5/7"
        back = spec_from_json(blob)
        assert back.radius == Fraction(5, 7)


class TestOrientedLine:
    def test_through_points_above(self):
        line = OrientedLine.through_points(Point2(0, 0), Point2(2, 1))
        assert line.side(0, 5) > 0
        assert line.side(0, -5) < 0
        assert line.side(2, 1) == 0

    def test_through_points_order_invariant_side(self):
        a, b = Point2(3, -1), Point2(-2, 4)
        l1 = OrientedLine.through_points(a, b)
        l2 = OrientedLine.through_points(b, a)
        assert l1.side(0, 100) > 0 and l2.side(0, 100) > 0

    def test_vertical_pair_rejected(self):
        with pytest.raises(ValueError):
            OrientedLine.through_points(Point2(1, 0), Point2(1, 5))

    def test_zero_normal_rejected(self):
        with pytest.raises(ValueError):
            OrientedLine(0, 0, 1)
