import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eccpie.geometry import (
    TWO_PI,
    EccentricSector,
    GeometryError,
    Orientation,
    Point2,
    boundary_point,
    central_angle,
    pizza_check,
    ray_extent,
    sector_area_decomposed,
    sector_area_integral,
    segment_area,
    signed_triangle_area,
    sweep_angle,
    triangle_area,
)
from eccpie.solvers.piecut import REFERENCE_SOLUTION

coord = st.floats(-5, 5, allow_nan=False)
point = st.tuples(coord, coord)


@st.composite
def interior(draw, rmax=0.95):
    r = draw(st.floats(0.0, rmax))
    t = draw(st.floats(0.0, TWO_PI))
    return Point2(r * math.cos(t), r * math.sin(t))


def test_triangle_examples():
    assert triangle_area((0, 0), (1, 0), (0, 1)) == 0.5
    assert triangle_area((0, 0), (1, 0), (2, 0)) == 0.0


def test_triangle_on_reference_cutter_points():
    v = REFERENCE_SOLUTION
    p1, p2, p0 = (v["x1"], v["y1"]), (v["x2"], v["y2"]), (v["x0"], 0.0)
    m = np.array([[p0[0], p0[1], 1], [p1[0], p1[1], 1], [p2[0], p2[1], 1]])
    expected = 0.5 * abs(np.linalg.det(m))
    assert triangle_area(p1, p2, p0) == pytest.approx(expected, abs=1e-14)


@given(point, point, point)
def test_triangle_order_invariant_and_signed_flips(a, b, c):
    area = triangle_area(a, b, c)
    assert area >= 0
    scale = 1 + max(map(abs, (*a, *b, *c))) ** 2
    for perm in [(b, c, a), (c, a, b), (b, a, c), (a, c, b)]:
        assert triangle_area(*perm) == pytest.approx(area, abs=1e-12 * scale)
    assert signed_triangle_area(b, a, c) == pytest.approx(-signed_triangle_area(a, b, c), abs=1e-12 * scale)


def test_signed_area_positive_for_ccw():
    assert signed_triangle_area((0, 0), (1, 0), (0, 1)) == 0.5
    assert signed_triangle_area((0, 0), (0, 1), (1, 0)) == -0.5


def test_central_angle():
    assert central_angle((1, 0), (0, 1)) == pytest.approx(math.pi / 2, abs=1e-15)
    assert central_angle((1, 0), (-1, 0)) == pytest.approx(math.pi)
    assert central_angle((1, 0), (1, 0)) == 0.0
    with pytest.raises(GeometryError):
        central_angle((0.5, 0), (1, 0))


def test_segment_area():
    assert segment_area(math.pi) == pytest.approx(math.pi / 2)
    assert segment_area(math.pi / 2) == pytest.approx((math.pi / 2 - 1) / 2)
    for bad in (0.0, -1.0, TWO_PI, 7.0):
        with pytest.raises(GeometryError):
            segment_area(bad)


def test_ray_extent_and_boundary_point():
    assert ray_extent((0, 0), 1.234) == pytest.approx(1.0)
    assert ray_extent((0.5, 0), 0.0) == pytest.approx(0.5)
    assert ray_extent((0.5, 0), math.pi) == pytest.approx(1.5)
    p = boundary_point((0.3, -0.7), 2.0)
    assert math.hypot(*p) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(GeometryError):
        ray_extent((1.0, 0.0), 0.0)


def test_ray_extent_near_rim_keeps_precision():
    # apex 1e-9 from the rim looking outward: extent ~1e-9, not a cancellation residue
    apex = (1 - 1e-9, 0.0)
    assert ray_extent(apex, 0.0) == pytest.approx(1e-9, rel=1e-6)


def test_sweep_angle():
    ccw, cw = Orientation.COUNTERCLOCKWISE, Orientation.CLOCKWISE
    assert sweep_angle(0.0, 1.0, ccw) == 1.0
    assert sweep_angle(0.0, 1.0, cw) == pytest.approx(TWO_PI - 1.0)
    assert sweep_angle(0.0, TWO_PI, ccw) == TWO_PI
    assert sweep_angle(0.0, -TWO_PI, cw) == TWO_PI


def test_sector_invariants():
    with pytest.raises(GeometryError):
        EccentricSector((1.0, 0.0), 0.0, 1.0)
    with pytest.raises(GeometryError):
        EccentricSector((0.0, 0.0), 1.0, 1.0)
    with pytest.raises(GeometryError):
        EccentricSector((float("nan"), 0.0), 0.0, 1.0)


def test_centered_sector_is_classical():
    for w in (0.1, 1.0, math.pi, 5.0):
        s = EccentricSector((0, 0), 0.3, 0.3 + w)
        assert sector_area_decomposed(s) == pytest.approx(w / 2, abs=1e-14)


def test_half_disc_with_offset_apex():
    # any chord through the apex along a diameter splits the disc in half
    s = EccentricSector((0.4, 0.0), 0.0, math.pi)
    assert sector_area_decomposed(s) == pytest.approx(math.pi / 2, abs=1e-14)


def test_full_turn():
    s = EccentricSector((0.2, 0.3), 1.0, 1.0 + TWO_PI)
    assert s.is_full
    assert sector_area_decomposed(s) == math.pi


@settings(max_examples=200, deadline=None)
@given(interior(), st.floats(-10, 10), st.floats(1e-3, TWO_PI - 1e-3), st.sampled_from(list(Orientation)))
def test_decomposed_matches_integral(apex, phi, w, orientation):
    s = EccentricSector(apex, phi, phi + orientation.sign * w, orientation)
    assert sector_area_decomposed(s) == pytest.approx(sector_area_integral(s), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(interior(), st.floats(0, TWO_PI), st.floats(1e-2, TWO_PI - 1e-2))
def test_orientations_complement(apex, phi, w):
    ccw = sector_area_decomposed(EccentricSector(apex, phi, phi + w))
    cw = sector_area_decomposed(EccentricSector(apex, phi, phi + w, Orientation.CLOCKWISE))
    assert ccw + cw == pytest.approx(math.pi, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(interior(), st.lists(st.floats(0.05, 1.0), min_size=2, max_size=7), st.floats(0, TWO_PI))
def test_partition_sums_to_pi(apex, weights, phi0):
    total = sum(weights)
    angles = [phi0]
    for w in weights:
        angles.append(angles[-1] + TWO_PI * w / total)
    area = sum(sector_area_decomposed(EccentricSector(apex, a, b)) for a, b in zip(angles, angles[1:]))
    assert area == pytest.approx(math.pi, abs=1e-12)


def test_tiny_sweep_tracks_integral():
    s = EccentricSector((0.6, -0.2), 0.7, 0.7 + 1e-6)
    assert sector_area_decomposed(s) == pytest.approx(sector_area_integral(s), rel=1e-6)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_pizza_examples(n):
    for apex in [(0, 0), (0.3, 0.2), (-0.7, 0.1), (0.0, -0.95)]:
        even, odd = pizza_check(apex, n, 0.37)
        assert even == pytest.approx(math.pi / 2, abs=1e-12)
        assert odd == pytest.approx(math.pi / 2, abs=1e-12)


def test_pizza_rejects_bad_line_counts():
    for n in (2, 3, 5):
        with pytest.raises(GeometryError):
            pizza_check((0.1, 0.1), n)


def test_pizza_two_lines_off_center_are_unequal():
    # with only two perpendicular lines the alternating sums differ off center
    apex = Point2(0.4, 0.3)
    sums = [0.0, 0.0]
    for k in range(4):
        sums[k % 2] += sector_area_decomposed(EccentricSector(apex, k * math.pi / 2, (k + 1) * math.pi / 2))
    assert abs(sums[0] - sums[1]) > 1e-3
