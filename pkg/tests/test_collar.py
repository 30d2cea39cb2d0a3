from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import quad

from bicgrad.collar import (
    CASE1_BOUND,
    CASE2_BOUND,
    MAX_COLLAR_LENGTH,
    RATIO_CONSTANT,
    CylinderField,
    TopologyData,
    annulus_estimate_audit,
    asymptotic_residuals,
    collar_ball_analysis,
    collar_conformal_factor,
    collar_count_bound,
    collar_distance,
    collar_distance_closed_form,
    collar_from_length,
    collar_strip_gradient_audit,
    covering_count_bound,
    cylinder_to_fermi,
    disk_chart_curvature,
    disk_chart_factor,
    disk_chart_radial_distance,
    fermi_to_cylinder,
    global_gradient_factor,
    hyperbolic_ball_area,
    injectivity_radius_at,
    injectivity_radius_ceiling,
    injectivity_radius_profile,
    is_admissible_pair,
    near_boundary_sample,
    random_ratio_samples,
    ratio_bound_audit,
    solve_cylinder_potential,
    strip_nodes,
    thick_part_bound,
)


@pytest.mark.parametrize("ell", [0.0, -0.1, MAX_COLLAR_LENGTH, 3.0])
def test_collar_length_range(ell: float) -> None:
    with pytest.raises(ValueError, match="collar length"):
        collar_from_length(ell)


def test_collar_parameters() -> None:
    params = collar_from_length(0.1)
    assert params.lam == pytest.approx(0.1 / (2.0 * math.pi))
    assert math.sinh(params.w) * math.sinh(0.05) == pytest.approx(1.0)
    # the cylinder end maps to the Fermi end
    assert params.lam * params.T < 0.5 * math.pi
    assert fermi_to_cylinder(params, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert math.asinh(math.tan(params.lam * params.T)) == pytest.approx(params.w, rel=1e-12)


def test_fermi_round_trip() -> None:
    params = collar_from_length(0.01)
    rho = np.array([-2.0, -0.3, 0.0, 0.7, 0.99 * params.w])
    t = fermi_to_cylinder(params, rho)
    np.testing.assert_allclose(cylinder_to_fermi(params, t), rho, atol=1e-10)
    with pytest.raises(ValueError):
        fermi_to_cylinder(params, params.w)
    with pytest.raises(ValueError):
        cylinder_to_fermi(params, params.T)


def test_distance_matches_quadrature() -> None:
    params = collar_from_length(0.01)
    for t1, t2 in [(-3.0, 4.0), (params.T - 5.0, params.T - 1.0), (0.0, 900.0)]:
        exact, _ = quad(
            lambda s: float(collar_conformal_factor(params, s)), t1, t2, epsabs=0, epsrel=1e-12
        )
        assert collar_distance(params, t1, t2) == pytest.approx(exact, rel=1e-8)


def test_distance_is_additive_and_symmetric() -> None:
    params = collar_from_length(0.1)
    assert collar_distance(params, -2.0, 5.0) == pytest.approx(
        collar_distance(params, -2.0, 1.0) + collar_distance(params, 1.0, 5.0)
    )
    assert collar_distance(params, -4.0, -1.0) == pytest.approx(collar_distance(params, 1.0, 4.0))
    assert collar_distance(params, 2.0, 2.0) == 0.0
    with pytest.raises(ValueError):
        collar_distance(params, 3.0, 2.0)


def test_distance_to_the_collar_ends() -> None:
    params = collar_from_length(0.1)
    assert collar_distance(params, 0.0, params.T) == pytest.approx(params.w, rel=1e-12)
    assert collar_distance(params, -params.T, params.T) == pytest.approx(2.0 * params.w)


@pytest.mark.parametrize("t", [0.0, 0.5, 2.0, 100.0])
def test_closed_form_distance(t: float) -> None:
    params = collar_from_length(0.01)
    assert collar_distance_closed_form(params, t) == pytest.approx(
        collar_distance(params, params.T - t, params.T), rel=1e-9, abs=1e-14
    )


def test_injectivity_radius_at_the_core_is_half_the_length() -> None:
    for ell in (0.5, 0.01):
        params = collar_from_length(ell)
        assert injectivity_radius_at(params, 0.0) == pytest.approx(0.5 * ell, rel=1e-9)


def test_injectivity_radius_shrinks_towards_the_core() -> None:
    params = collar_from_length(0.1)
    ts = np.linspace(0.0, params.T, 50)
    radii = [injectivity_radius_profile(params, float(t)) for t in ts]
    assert all(b < a for a, b in zip(radii, radii[1:]))
    # collar boundary: sinh(inj) = cosh(ℓ/2)
    assert math.sinh(radii[0]) == pytest.approx(math.cosh(0.05))


@pytest.mark.parametrize("ell", [0.1, 0.01, 0.001])
def test_small_length_residuals_are_order_ell(ell: float) -> None:
    params = collar_from_length(ell)
    for t in (0.5, 1.0, 2.0):
        res = asymptotic_residuals(params, t)
        assert set(res.as_dict()) == {"w", "T", "distance", "sinh_radius"}
        for value in res.as_dict().values():
            assert abs(value) / ell <= 10.0


def test_residuals_shrink_with_ell() -> None:
    coarse = asymptotic_residuals(collar_from_length(0.1), 1.0).as_dict()
    fine = asymptotic_residuals(collar_from_length(0.001), 1.0).as_dict()
    for key in coarse:
        assert abs(fine[key]) < abs(coarse[key])


def test_admissible_pairs() -> None:
    params = collar_from_length(0.01)
    assert is_admissible_pair(params, 0.0, 1.9)
    assert not is_admissible_pair(params, 0.0, 2.0)
    assert not is_admissible_pair(params, params.T - 0.5, params.T - 0.6)


def test_ratio_audit_on_random_pairs() -> None:
    params = collar_from_length(0.001)
    samples = random_ratio_samples(params, 2000, np.random.default_rng(0))
    assert len(samples) == 2000
    report = ratio_bound_audit(params, samples + [(0.0, 3.0)])
    assert report.evaluated == 2000
    assert report.flagged == ((0.0, 3.0),)
    assert report.passed
    assert report.bound == pytest.approx(RATIO_CONSTANT)


def test_ratio_audit_near_the_collar_end() -> None:
    params = collar_from_length(0.0001)
    t1, t2 = near_boundary_sample(params)
    assert is_admissible_pair(params, t1, t2)
    report = ratio_bound_audit(params, [(t1, t2)])
    assert report.passed
    # the steepest pair lands well inside (e^-2, e^2)
    assert 1.0 / 3.5 < report.min_ratio < 1.0


def test_ratio_audit_without_admissible_pairs() -> None:
    params = collar_from_length(0.1)
    report = ratio_bound_audit(params, [(0.0, 5.0)])
    assert report.evaluated == 0
    assert report.passed is None


def test_hyperbolic_ball_area_and_ceiling() -> None:
    assert hyperbolic_ball_area(1.0) == pytest.approx(2.0 * math.pi * (math.cosh(1.0) - 1.0))
    topo = TopologyData(genus=2)
    assert topo.chi == -2
    assert topo.area == pytest.approx(4.0 * math.pi)
    ceiling = injectivity_radius_ceiling(topo)
    assert hyperbolic_ball_area(ceiling) == pytest.approx(topo.area)
    with pytest.raises(ValueError, match="genus"):
        TopologyData(genus=1)


@pytest.mark.parametrize("r", [0.5, 1.0, 1.5])
def test_disk_chart_is_hyperbolic(r: float) -> None:
    assert disk_chart_curvature(r) < 1e-6


def test_disk_chart_radial_distance() -> None:
    r = 1.0
    exact, _ = quad(lambda x: float(disk_chart_factor(r, (x, 0.0))), 0.0, 1.0, epsrel=1e-12)
    assert disk_chart_radial_distance(r) == pytest.approx(exact, rel=1e-10)
    # the chart covers the geodesic ball of radius r
    assert disk_chart_radial_distance(r) >= r
    with pytest.raises(ValueError):
        disk_chart_radial_distance(2.0)


def test_counting_bounds() -> None:
    topo = TopologyData(genus=2)
    assert covering_count_bound(topo, 1.0) == 400
    assert collar_count_bound(topo) == 3
    assert collar_count_bound(TopologyData(genus=3)) == 6
    assert thick_part_bound(topo, 1.0, 1.5) == pytest.approx(400 * 0.5**0.5)
    assert global_gradient_factor(topo, 0.5, 1.0) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        covering_count_bound(topo, 0.0)


@pytest.mark.parametrize(
    "a, p, expected",
    [(0.0, 1.0, 1.0), (0.25, 1.0, 0.75), (0.0625, 1.0, 0.9375), (0.0, 1.5, 1.0 / (2**0.5 - 1))],
)
def test_annulus_sums(a: float, p: float, expected: float) -> None:
    assert annulus_estimate_audit(a, p) == pytest.approx(expected, rel=1e-12)


def test_annulus_sum_scales_with_per_disk_bound() -> None:
    assert annulus_estimate_audit(0.25, 1.5, per_disk_bound=3.0) == pytest.approx(
        3.0 * annulus_estimate_audit(0.25, 1.5)
    )


@pytest.mark.parametrize("a, p", [(0.0, 2.0), (0.0, 2.5), (0.2, 1.0), (0.5, 1.0), (0.0, 0.5)])
def test_annulus_rejects_bad_arguments(a: float, p: float) -> None:
    with pytest.raises(ValueError):
        annulus_estimate_audit(a, p)


def test_strip_nodes_hit_every_integer() -> None:
    nodes = strip_nodes(-2.5, 3.25, per_unit=4, extra=[0.3])
    for i in range(-2, 4):
        assert np.any(nodes == i)
    assert nodes[0] == -2.5 and nodes[-1] == 3.25
    assert 0.3 in nodes
    assert np.all(np.diff(nodes) > 0)


def test_cylinder_potential_carries_unit_flux() -> None:
    params = collar_from_length(0.05)
    t0 = 0.5
    field = solve_cylinder_potential(params, t0, 0.0, n_theta=64)
    assert field.u is not None
    i = int(np.flatnonzero(field.t == t0)[0])
    jump = field.du_dt[i].mean() - field.du_dt[i + 1].mean()
    assert 2.0 * math.pi * jump == pytest.approx(1.0, rel=1e-9)
    np.testing.assert_allclose(field.u[[0, -1]], 0.0, atol=1e-12)
    j, k = np.unravel_index(int(np.argmax(field.u)), field.u.shape)
    assert (field.t[j], k) == (t0, 0)


def test_cylinder_potential_preconditions() -> None:
    params = collar_from_length(0.05)
    with pytest.raises(ValueError, match="source"):
        solve_cylinder_potential(params, params.T, 0.0)
    with pytest.raises(ValueError, match="n_theta"):
        solve_cylinder_potential(params, 0.0, 0.0, n_theta=7)


def test_strip_audit_of_constant_gradient() -> None:
    params = collar_from_length(0.05)
    field = CylinderField.from_function(
        strip_nodes(-4.0, 4.0),
        8,
        lambda tt, th: (np.ones_like(tt), np.zeros_like(th)),
    )
    report = collar_strip_gradient_audit(params, field, -3, 3)
    assert report.ratio == pytest.approx(2.0 * math.pi, rel=1e-8)
    assert report.monotone
    assert report.passed


def test_strip_audit_of_point_source() -> None:
    params = collar_from_length(0.05)
    field = solve_cylinder_potential(params, 0.5, 0.0, n_theta=128)
    report = collar_strip_gradient_audit(params, field, -3, 3, bound=2.0 * math.pi)
    assert report.distance == pytest.approx(collar_distance(params, -3.0, 3.0))
    assert 0.0 < report.ratio <= 2.0 * math.pi
    assert report.passed


def test_strip_audit_needs_integer_nodes() -> None:
    params = collar_from_length(0.05)
    field = CylinderField.from_function(
        np.linspace(-4.1, 4.1, 100), 8, lambda tt, th: (np.ones_like(tt), np.zeros_like(th))
    )
    with pytest.raises(ValueError, match="must include"):
        collar_strip_gradient_audit(params, field, -3, 3)
    with pytest.raises(ValueError, match="need -T"):
        collar_strip_gradient_audit(params, field, 3, -3)


def test_thin_ball_is_case_one() -> None:
    params = collar_from_length(0.01)
    report = collar_ball_analysis(params, 0.0, 0.001)
    assert report.case == 1
    # at the core the θ-circle is the shortest loop: πλ = ℓ/2 = inj
    assert report.ratio == pytest.approx(1.0, rel=1e-9)
    assert report.bound == CASE1_BOUND
    assert report.applicable
    assert report.passed


@pytest.mark.parametrize("frac", [0.0, 0.3, 0.6, 0.9, 0.99])
def test_case_one_bound_holds_along_the_collar(frac: float) -> None:
    params = collar_from_length(0.01)
    t0 = frac * (params.T - 5.0)
    report = collar_ball_analysis(params, t0, 0.001)
    assert report.case == 1
    assert report.injectivity == pytest.approx(injectivity_radius_at(params, t0))
    expected = math.pi * float(collar_conformal_factor(params, t0)) / report.injectivity
    assert report.ratio == pytest.approx(expected)
    assert 1.0 - 1e-9 <= report.ratio <= 1.2
    assert report.passed


def test_long_ball_is_case_two() -> None:
    params = collar_from_length(0.01)
    report = collar_ball_analysis(params, 0.5 * params.T, 0.1)
    assert report.case == 2
    assert report.applicable
    assert report.ratio >= 2.0
    assert report.bound == CASE2_BOUND
    assert report.passed


def test_ball_centre_must_stay_off_the_ends() -> None:
    params = collar_from_length(0.01)
    with pytest.raises(ValueError, match="centre"):
        collar_ball_analysis(params, params.T - 1.0, 0.1)
