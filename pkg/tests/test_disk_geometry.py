from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import dblquad

from bicgrad.disk_geometry import (
    ConformalField,
    area_bound_audit,
    blowup_area,
    blowup_field,
    blowup_remainder,
    blowup_T,
    conformal_distance,
    geodesic_ball,
)
from bicgrad.errors import ResolutionWarning
from bicgrad.measure import Rectangle, SignedMeasure

SQUARE = Rectangle(-1.0, 1.0, -1.0, 1.0)


def flat(n: int = 201, domain: str = "rectangle", c: float = 0.0) -> ConformalField:
    return ConformalField.constant(c, SQUARE, n, domain)  # type: ignore[arg-type]


def test_straight_distance_on_flat_grid() -> None:
    f = flat()
    assert conformal_distance(f, (-0.5, 0.0), (0.5, 0.0)) == pytest.approx(1.0, rel=1e-12)


def test_distance_scales_with_constant_factor() -> None:
    f0, f1 = flat(101), flat(101, c=math.log(3.0))
    d0 = conformal_distance(f0, (-0.4, -0.3), (0.5, 0.2))
    d1 = conformal_distance(f1, (-0.4, -0.3), (0.5, 0.2))
    assert d1 == pytest.approx(3.0 * d0, rel=1e-12)


def test_grid_distance_overestimates_euclidean_only_slightly() -> None:
    f = flat()
    d = conformal_distance(f, (0.0, 0.0), (0.6, 0.3))
    exact = math.hypot(0.6, 0.3)
    assert d == pytest.approx(exact, rel=1e-12)


def test_worst_direction_stays_within_two_percent() -> None:
    # halfway between the (1, 0) and (3, 1) moves
    f = flat(401)
    d = conformal_distance(f, (0.0, 0.0), (0.8, 0.13))
    exact = math.hypot(0.8, 0.13)
    assert 1.01 * exact <= d <= 1.02 * exact


@pytest.mark.parametrize("n, r", [(201, 0.5), (201, 0.3), (301, 0.3)])
def test_flat_ball_ratio_is_close_to_one(n: int, r: float) -> None:
    report = geodesic_ball(flat(n), (0.0, 0.0), r)
    assert not report.clipped
    assert report.ratio == pytest.approx(1.0, abs=0.03)


def test_constant_factor_ball_is_a_smaller_euclidean_ball() -> None:
    report = geodesic_ball(flat(c=math.log(2.0)), (0.0, 0.0), 0.6)
    assert not report.clipped
    assert report.ratio == pytest.approx(1.0, abs=0.03)


def wavy(n: int = 81, domain: str = "rectangle", shift: float = 0.0) -> ConformalField:
    def u(p: np.ndarray) -> np.ndarray:
        x, y = p[..., 0], p[..., 1]
        return 0.3 * np.sin(3.0 * x) - 0.8 * (x * x + y * y) + shift * (1.0 + x * x)

    return ConformalField.from_function(u, SQUARE, n, domain)  # type: ignore[arg-type]


def test_grid_distance_is_symmetric() -> None:
    f = wavy()
    pts = [(-0.6, 0.2), (0.5, -0.5), (0.1, 0.7)]
    for x in pts:
        for y in pts:
            assert conformal_distance(f, x, y) == pytest.approx(
                conformal_distance(f, y, x), rel=1e-12
            )


def test_grid_distance_satisfies_the_triangle_inequality() -> None:
    f = wavy()
    x, y = (-0.6, 0.2), (0.5, -0.5)
    dx, dy = f.distances_from(x), f.distances_from(y)
    j, i = f.snap(y)
    assert np.all(dx <= dx[j, i] + dy + 1e-12)


def test_larger_factor_gives_larger_distances() -> None:
    f1, f2 = wavy(), wavy(shift=0.2)
    assert np.all(f1.u <= f2.u)
    x = (0.3, -0.2)
    d1, d2 = f1.distances_from(x), f2.distances_from(x)
    assert np.all(d1 <= d2 + 1e-12)
    r = 0.5
    assert np.all(d1[d2 <= r] <= r)


def test_ball_of_a_subdomain_sits_inside_the_full_ball() -> None:
    full, sub = wavy(), wavy(domain="disk")
    x, r = (0.4, 0.4), 0.6
    d_full, d_sub = full.distances_from(x), sub.distances_from(x)
    inside_sub = d_sub <= r
    assert np.any(inside_sub)
    assert np.all(d_full[inside_sub] <= r)
    assert np.all(d_full <= d_sub + 1e-12)


def test_ball_reaching_the_rim_is_clipped() -> None:
    report = geodesic_ball(flat(101), (0.8, 0.0), 0.5)
    assert report.clipped
    assert report.ratio is None


def test_disk_domain_excludes_corners() -> None:
    f = flat(51, domain="disk")
    assert not f.active[0, 0]
    assert f.active[25, 25]
    assert not f.contains((0.9, 0.9))
    with pytest.raises(ValueError, match="outside"):
        f.snap((0.9, 0.9))


def test_field_rejects_non_finite_samples() -> None:
    u = np.zeros((4, 4))
    u[1, 2] = np.nan
    with pytest.raises(ValueError, match="finite"):
        ConformalField(u=u, h=0.1)


def test_from_measure_needs_square_bounds() -> None:
    with pytest.raises(ValueError, match="square"):
        ConformalField.from_measure(SignedMeasure.dirac(), Rectangle(-1.0, 1.0, 0.0, 1.0), 11)


def test_csv_round_trip(tmp_path: Path) -> None:
    f = ConformalField.from_function(lambda p: 0.3 * p[..., 0] - p[..., 1] ** 2, SQUARE, 9)
    path = tmp_path / "field.csv"
    f.write_csv(path)
    g = ConformalField.read_csv(path)
    np.testing.assert_array_equal(g.u, f.u)
    assert g.h == f.h
    assert g.origin == f.origin


def test_csv_without_origin_is_centred(tmp_path: Path) -> None:
    path = tmp_path / "field.csv"
    path.write_text("nx,ny,h\n3,2,0.5\n0,0,0\n0.1,0.2,0.3\n", encoding="utf-8")
    g = ConformalField.read_csv(path)
    assert g.shape == (2, 3)
    assert g.origin == (-0.5, -0.25)
    assert g.u[1, 2] == pytest.approx(0.3)


def test_csv_errors(tmp_path: Path) -> None:
    with pytest.raises(FileNotFoundError):
        ConformalField.read_csv(tmp_path / "missing.csv")
    bad = tmp_path / "bad.csv"
    bad.write_text("nx,ny,h\n2,2,0.5\n0,0\n", encoding="utf-8")
    with pytest.raises(ValueError, match="expected 4 values"):
        ConformalField.read_csv(bad)


def test_cone_point_ball_ratio() -> None:
    # u = I_μ with μ = -(π/2)δ_0 is the cone metric |x|^{1/2}|dx|², angle 5π/2
    mu = SignedMeasure.dirac(weight=-0.5 * math.pi)
    f = ConformalField.from_measure(mu, SQUARE, 201, domain="disk")
    report = area_bound_audit(f, mu, [((0.0, 0.0), 0.5)], margin=0.05)
    assert report.bound == pytest.approx(1.25)
    assert report.worst_ratio is not None
    assert 1.15 <= report.worst_ratio <= 1.28
    assert report.passed


def test_area_audit_on_flat_metric() -> None:
    samples = [((0.0, 0.0), 0.4), ((0.2, -0.1), 0.3), ((0.95, 0.0), 0.3)]
    report = area_bound_audit(flat(), SignedMeasure.zero(), samples)
    assert report.bound == 1.0
    assert report.checked == 2
    assert report.clipped == 1
    assert report.passed


def test_area_audit_all_clipped_is_inconclusive() -> None:
    report = area_bound_audit(flat(41), SignedMeasure.zero(), [((0.0, 0.0), 1.5)])
    assert report.worst_ratio is None
    assert report.passed is None


def test_area_audit_warns_on_coarse_radius() -> None:
    with pytest.warns(ResolutionWarning):
        area_bound_audit(flat(41), SignedMeasure.zero(), [((0.0, 0.0), 0.2)])


def test_blowup_T_solves_its_defining_equation() -> None:
    theta = np.array([-1.2, 0.0, 0.7])
    T = np.asarray(blowup_T(theta, 10.0))
    np.testing.assert_allclose(np.exp(T * np.cos(theta)), 1.0 + 10.0 * np.cos(theta))
    assert blowup_T(0.0, 10.0) == pytest.approx(math.log(11.0))
    with pytest.raises(ValueError):
        blowup_T(0.5 * math.pi, 10.0)


def test_blowup_closed_form_matches_quadrature() -> None:
    area = blowup_area(10.0, 0.1, samples=4096, radial=1024)
    assert area.relative_gap <= 0.005
    lo, hi = -0.5 * math.pi + 0.1, 0.5 * math.pi - 0.1
    exact, _ = dblquad(
        lambda r, t: math.exp(2.0 * r * math.cos(t)) * r,
        lo,
        hi,
        0.0,
        lambda t: float(blowup_T(t, 10.0)),
        epsrel=1e-10,
    )
    assert area.closed == pytest.approx(exact, rel=1e-5)


def test_blowup_ratio_increases() -> None:
    ratios = [blowup_area(R, 0.1, samples=1024, radial=1).ratio for R in (10.0, 100.0, 1000.0)]
    assert ratios[0] < ratios[1] < ratios[2]


def test_blowup_remainder_is_order_R_log_R() -> None:
    kappas = [abs(blowup_remainder(R, 0.1, samples=2048)) for R in (1e2, 1e3, 1e4)]
    assert max(kappas) / min(kappas) < 2.0


def test_blowup_field_is_the_linear_factor() -> None:
    f = blowup_field(SQUARE, 5)
    np.testing.assert_allclose(f.u, f.nodes()[..., 0])
