"""Tests for distance fields, ball extraction, and quadrature.

Closed-form targets: the plane disk (area pi t^2, length 2 pi t), the
geodesic disk of the totally geodesic H^2 (area 2 pi (cosh t - 1), length
2 pi sinh t), and the Euclidean chord ball on the unit sphere, which is a
cap of height t^2 / 2 with area pi t^2 and boundary circle of intrinsic
radius 2 asin(t / 2).
"""

import numpy as np
import pytest

from extballs.catalog import make
from extballs.catalog.charts import plane_chart, sphere_cap_chart
from extballs.domains import (GridSpec, build_field, coarea_integral,
                              critical_scan, ends_count, extract_ball,
                              project_to_level, region_integral)
from extballs.errors import (ConfigError, CriticalRadius, DomainTooSmall,
                             PoleOffModel)


@pytest.fixture(scope="module")
def plane_field():
    return build_field(make("plane", t_max=8.0), 8.0)


@pytest.fixture(scope="module")
def catenoid_field():
    return build_field(make("catenoid", t_max=8.0), 8.0)


@pytest.fixture(scope="module")
def h2_field():
    return build_field(make("h2_in_h3", t_max=8.0), 8.0)


def test_grid_spec_minimum():
    with pytest.raises(ConfigError):
        GridSpec(n_u=32)


def test_domain_too_small_guard():
    with pytest.raises(DomainTooSmall):
        build_field(plane_chart(halfwidth=2.0), 8.0)


def test_pole_off_model():
    surf = make("h2_in_h3", t_max=4.0)
    with pytest.raises(PoleOffModel):
        build_field(surf, 4.0, pole=np.array([1.0, 0.0, 0.0, 0.5]))


def test_bad_t_max():
    with pytest.raises(ConfigError):
        build_field(plane_chart(), -1.0)


def test_plane_disk_closed_forms(plane_field):
    ball = extract_ball(plane_field, 1.0)
    assert ball.n_components == 1
    assert abs(ball.area - np.pi) / np.pi < 1e-6
    assert abs(ball.boundary_length - 2 * np.pi) / (2 * np.pi) < 1e-6
    assert len(ball.samples) >= 200
    # The quadrature itself is far sharper than the contract asks.
    assert abs(ball.area - np.pi) / np.pi < 1e-9


def test_plane_coarea(plane_field):
    ball = extract_ball(plane_field, 2.0)
    co = coarea_integral(ball)
    assert abs(co - 4 * np.pi) / (4 * np.pi) < 1e-6


def test_plane_curvature_channels(plane_field):
    out = region_integral(plane_field, 3.0, ("one", "normBsq", "K"))
    assert abs(out["one"] - 9 * np.pi) / (9 * np.pi) < 1e-9
    assert abs(out["normBsq"]) < 1e-10
    assert abs(out["K"]) < 1e-10


def test_h2_disk_closed_forms(h2_field):
    ball = extract_ball(h2_field, 1.0)
    area = 2 * np.pi * (np.cosh(1.0) - 1.0)
    length = 2 * np.pi * np.sinh(1.0)
    assert abs(ball.area - area) / area < 1e-6
    assert abs(ball.boundary_length - length) / length < 1e-6
    # Gauss curvature -1: the K channel integrates to minus the area.
    assert abs(ball.integrals["K"] + ball.area) / area < 1e-8


def test_h2_large_disk(h2_field):
    ball = extract_ball(h2_field, 8.0)
    area = 2 * np.pi * (np.cosh(8.0) - 1.0)
    length = 2 * np.pi * np.sinh(8.0)
    assert abs(ball.area - area) / area < 1e-8
    assert abs(ball.boundary_length - length) / length < 1e-7


def test_sphere_chord_ball():
    field = build_field(make("sphere_control", t_max=1.5), 1.5)
    ball = extract_ball(field, 1.0)
    # Chord ball {|x - p| < t} on the unit sphere: cap of height t^2 / 2.
    assert abs(ball.area - np.pi) / np.pi < 1e-9
    length = 2 * np.pi * np.sin(2 * np.arcsin(0.5))
    assert abs(ball.boundary_length - length) / length < 1e-9
    # K = 1 everywhere, so the K channel reproduces the area.
    assert abs(ball.integrals["K"] - ball.area) < 1e-9


def test_catenoid_two_ends(catenoid_field):
    ball = extract_ball(catenoid_field, 5.0)
    assert ball.n_components == 2
    assert sorted(abs(w) for w in ball.windings) == [1, 1]
    assert ends_count(catenoid_field, 5.0) == 2


def test_enneper_single_end():
    field = build_field(make("enneper", t_max=6.0), 6.0)
    assert ends_count(field, 5.0) == 1


def test_catenoid_coarea_consistency(catenoid_field):
    ball = extract_ball(catenoid_field, 3.0)
    co = coarea_integral(ball)
    d = 1e-3
    dA = (extract_ball(catenoid_field, 3.0 + d).area
          - extract_ball(catenoid_field, 3.0 - d).area) / (2 * d)
    assert abs(co - dA) / abs(dA) < 1e-3


def test_catenoid_area_monotone(catenoid_field):
    areas = [extract_ball(catenoid_field, t).area
             for t in (1.0, 2.5, 4.0, 6.0, 8.0)]
    assert all(b > a for a, b in zip(areas, areas[1:]))


def test_catenoid_ends_stable_beyond_r0(catenoid_field):
    scan = critical_scan(catenoid_field, 0.1, 8.0)
    counts = {ends_count(catenoid_field, t)
              for t in np.linspace(scan["R0"] + 0.3, 8.0, 6)}
    assert counts == {2}


def test_catenoid_critical_scan(catenoid_field):
    scan = critical_scan(catenoid_field, 0.1, 8.0)
    # The antipodal waist point is a saddle of r at straight-line
    # distance 2 from the pole (1, 0, 0).
    assert any(abs(v - 2.0) < 0.01 for v in scan["critical_values"])
    assert scan["min_grad"] < 0.05
    assert 1.9 < scan["R0"] < 2.3
    clean = critical_scan(catenoid_field, 3.0, 8.0)
    assert clean["critical_values"] == []
    assert clean["min_grad"] > 0.5


def test_plane_critical_scan(plane_field):
    scan = critical_scan(plane_field, 0.5, 8.0)
    assert scan["critical_values"] == []
    assert scan["min_grad"] > 1.0 - 1e-12
    assert scan["R0"] == 0.5


def test_boundary_sample_invariants(catenoid_field):
    ball = extract_ball(catenoid_field, 4.0)
    s = ball.samples
    fb = s.frame
    assert np.all(np.abs(fb.metric_dot(s.e, s.nu)) < 1e-9)
    assert np.all(np.abs(fb.metric_dot(s.e, s.e) - 1.0) < 1e-9)
    assert np.all(np.abs(fb.metric_dot(s.nu, s.nu) - 1.0) < 1e-9)
    assert np.all(np.abs(fb.r - 4.0) < 1e-8)
    one = s[0]
    assert one.weight > 0.0
    assert one.uv.shape == (2,)


def test_boundary_orientation_positive(plane_field):
    ball = extract_ball(plane_field, 2.0)
    pts = ball.boundary[0]
    x, y = pts[:, 0], pts[:, 1]
    area2 = np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))
    assert area2 > 0.0


def test_project_to_level(plane_field):
    rng = np.random.default_rng(11)
    ang = rng.uniform(0.0, 2 * np.pi, 40)
    pts = np.stack([2.03 * np.cos(ang), 1.97 * np.sin(ang)], axis=-1)
    out = project_to_level(plane_field, 2.0, pts)
    r = np.hypot(out[:, 0], out[:, 1])
    assert np.max(np.abs(r - 2.0)) < 1e-12


def test_empty_ball_off_surface_pole():
    field = build_field(sphere_cap_chart(), 0.5,
                        pole=np.array([0.0, 0.0, 2.0]))
    ball = extract_ball(field, 0.5)
    assert ball.area == 0.0
    assert ball.n_components == 0
    assert coarea_integral(ball) == 0.0


def test_radius_bounds(plane_field):
    with pytest.raises(ConfigError):
        extract_ball(plane_field, 9.0)
    with pytest.raises(ConfigError):
        extract_ball(plane_field, 0.0)
    with pytest.raises(ConfigError):
        ends_count(plane_field, -1.0)


def test_coarea_critical_rail(plane_field):
    ball = extract_ball(plane_field, 1.0)
    ball.samples.frame.normGradPr = (
        ball.samples.frame.normGradPr * 1e-9)
    with pytest.raises(CriticalRadius):
        coarea_integral(ball)


def test_samples_augmented_to_minimum(catenoid_field):
    ball = extract_ball(catenoid_field, 5.0, min_samples=600)
    assert len(ball.samples) >= 600
    assert abs(np.sum(ball.samples.weight)
               - ball.boundary_length) < 1e-9 * ball.boundary_length
