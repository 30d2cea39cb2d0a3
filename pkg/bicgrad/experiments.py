"""Experiment sweeps: each kind expands into independent tasks that return rows.

Tasks are module-level functions bound with `functools.partial`, so they can be
shipped to worker processes. Randomness is drawn from generators seeded by
`(seed, stream, index)`, which keeps every task reproducible on its own.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import quad

from bicgrad.collar import (
    CollarParams,
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
    disk_chart_curvature,
    disk_chart_radial_distance,
    global_gradient_factor,
    injectivity_radius_ceiling,
    near_boundary_sample,
    random_ratio_samples,
    ratio_bound_audit,
    solve_cylinder_potential,
    thick_part_bound,
)
from bicgrad.config import KINDS
from bicgrad.disk_geometry import ConformalField, area_bound_audit, blowup_area
from bicgrad.errors import ConfigError
from bicgrad.measure import Disk, Rectangle, SignedMeasure, measure_from_literal
from bicgrad.models import ResultRow, row
from bicgrad.potential import (
    Bump,
    chart_gradient_norm,
    eval_potential,
    exp_integrability,
    harmonic_residual_report,
    linear_counterexample_norm,
    moser_trudinger_functional,
    scaling_functional,
    weak_residual,
)
from bicgrad.schema.experiment import (
    AnnulusSection,
    BlowupSection,
    CollarSection,
    DiskAreaSection,
    ExperimentConfig,
    PotentialSection,
    TorusSection,
)
from bicgrad.torus import degenerate_family_audit

log = logging.getLogger(__name__)

CLOSED_FORM_RTOL = 1e-4
EXACT_RTOL = 1e-10

# stream ids for the seeded generators
_WEAK_STREAM = 1
_DISK_STREAM = 2
_COLLAR_STREAM = 3


@dataclass(frozen=True)
class Task:
    kind: str
    name: str
    fn: Callable[[], list[ResultRow]]


def _rng(seed: int, stream: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream, index])


def _rel_err(value: float, reference: float) -> float:
    return abs(value - reference) / max(abs(reference), 1e-300)


# ---------------------------------------------------------------------------
# potential


def _single_origin_weight(sec: PotentialSection) -> float | None:
    """Weight of the measure when it is one atom at the origin, else None."""
    atoms = [a for a in sec.atoms if a[2] != 0]
    if len(atoms) == 1 and atoms[0][0] == 0 and atoms[0][1] == 0:
        return atoms[0][2]
    return None


def _potential_scaling(sec: PotentialSection, q: float) -> list[ResultRow]:
    mu = measure_from_literal(sec.atoms)
    values = [scaling_functional(mu, (0.0, 0.0), r, q) for r in sec.radii]
    w = _single_origin_weight(sec)
    # |∇I| = |w| / (2π|x|) integrates in closed form
    ref = None if w is None else abs(w) ** q * (2.0 * math.pi) ** (1.0 - q) / (2.0 - q)
    rows = [
        row(
            "potential/scaling",
            v,
            bound=ref,
            passed=None if ref is None else _rel_err(v, ref) <= CLOSED_FORM_RTOL,
            sweep="r",
            q=q,
            r=r,
        )
        for r, v in zip(sec.radii, values)
    ]
    if len(values) > 1:
        spread = (max(values) - min(values)) / max(abs(max(values)), 1e-300)
        rows.append(
            row(
                "potential/scale-invariance",
                spread,
                bound=sec.invariance_tolerance,
                passed=spread <= sec.invariance_tolerance,
                q=q,
            )
        )
    return rows


def exp_reference(R: float, epsilon: float) -> float:
    """∫_{D_R} exp((4π - ε)|I_δ|) for a single unit atom at the origin."""
    s = epsilon / (2.0 * math.pi)
    inner = 4.0 * math.pi**2 / epsilon * min(R, 1.0) ** s
    if R <= 1.0:
        return inner
    return inner + 2.0 * math.pi * (R ** (4.0 - s) - 1.0) / (4.0 - s)


def _potential_exp(sec: PotentialSection, epsilon: float) -> list[ResultRow]:
    mu = measure_from_literal(sec.atoms)
    w = _single_origin_weight(sec)
    values = {R: exp_integrability(mu, R, epsilon) for R in sec.R}
    rows: list[ResultRow] = []
    for R, v in values.items():
        ref = None if w is None else exp_reference(R, epsilon)
        rows.append(
            row(
                "potential/exp-integrability",
                v,
                bound=ref,
                passed=None if ref is None else _rel_err(v, ref) <= sec.exp_tolerance,
                sweep="R",
                epsilon=epsilon,
                R=R,
            )
        )
    growth = 2.0 ** (epsilon / (2.0 * math.pi)) * 1.05
    for R, v in values.items():
        if 2.0 * R in values and 2.0 * R <= 1.0:
            ratio = values[2.0 * R] / v
            rows.append(
                row(
                    "potential/exp-growth",
                    ratio,
                    bound=growth,
                    passed=ratio <= growth,
                    epsilon=epsilon,
                    R=R,
                )
            )
    return rows


def _potential_moser(sec: PotentialSection, p: float) -> list[ResultRow]:
    mu = measure_from_literal(sec.atoms)

    def u(pts: np.ndarray) -> np.ndarray:
        return np.asarray(eval_potential(mu, pts))

    value = moser_trudinger_functional(u, p, singular=mu.positions)
    w = _single_origin_weight(sec)
    ref = None
    if w is not None:
        k = p * abs(w) / (2.0 * math.pi)
        if k < 2.0:
            ref = 2.0 * math.pi * 0.5 ** (2.0 - k) / (2.0 - k)
    return [
        row(
            "potential/moser-trudinger",
            value,
            bound=ref,
            passed=None if ref is None else _rel_err(value, ref) <= sec.exp_tolerance,
            sweep="p",
            p=p,
        )
    ]


def random_bump(rng: np.random.Generator, radius_range: Sequence[float]) -> Bump:
    cx, cy = rng.uniform(-0.3, 0.3, size=2)
    radius = rng.uniform(radius_range[0], radius_range[1])
    return Bump(center=(float(cx), float(cy)), radius=float(radius))


def _potential_weak(sec: PotentialSection, seed: int, index: int) -> list[ResultRow]:
    mu = measure_from_literal(sec.atoms)
    bump = random_bump(_rng(seed, _WEAK_STREAM, index), sec.bump_radius)
    value = weak_residual(mu, bump, resolution=sec.weak_grid)
    return [
        row(
            "potential/weak-residual",
            value,
            bound=sec.weak_tolerance,
            passed=value <= sec.weak_tolerance,
            bump=index,
        )
    ]


def _potential_harmonic(sec: PotentialSection) -> list[ResultRow]:
    mu = measure_from_literal(sec.atoms)

    # I_μ plus a harmonic polynomial; the difference must pass the mean-value test
    def u(pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return np.asarray(eval_potential(mu, pts)) + pts[..., 0] ** 2 - pts[..., 1] ** 2

    try:
        report = harmonic_residual_report(u, mu, Disk((0.0, 0.0), 0.5), sec.harmonic_radii)
    except ValueError as exc:
        log.warning("harmonic residual skipped: %s", exc)
        return [row("potential/harmonic-residual", math.nan)]
    return [
        row(
            "potential/harmonic-residual",
            report.max_deviation,
            bound=sec.harmonic_tolerance,
            passed=report.max_deviation <= sec.harmonic_tolerance,
        )
    ]


def _potential_chart(sec: PotentialSection) -> list[ResultRow]:
    mu = measure_from_literal(sec.atoms)
    norms = [
        chart_gradient_norm(mu, (0.0, 0.0), s, sec.chart_p, sec.chart_a)
        for s in sec.chart_scales
    ]
    rows = [
        row("potential/chart-norm", v, sweep="scale", p=sec.chart_p, scale=s)
        for s, v in zip(sec.chart_scales, norms)
    ]
    # a single atom at the chart centre pulls back to the same function at every scale
    if len(norms) > 1 and _single_origin_weight(sec) is not None:
        spread = (max(norms) - min(norms)) / max(norms)
        rows.append(
            row(
                "potential/chart-invariance",
                spread,
                bound=sec.invariance_tolerance,
                passed=spread <= sec.invariance_tolerance,
                p=sec.chart_p,
            )
        )
    return rows


def potential_tasks(config: ExperimentConfig) -> list[Task]:
    sec = config.potential
    tasks: list[Task] = []
    if sec.radii:
        tasks += [
            Task("potential", f"scaling q={q}", partial(_potential_scaling, sec, q))
            for q in sec.q
        ]
    if sec.R:
        tasks += [
            Task("potential", f"exp eps={e}", partial(_potential_exp, sec, e))
            for e in sec.epsilon
        ]
    tasks += [
        Task("potential", f"moser p={p}", partial(_potential_moser, sec, p))
        for p in sec.moser_p
    ]
    tasks += [
        Task("potential", f"weak bump={i}", partial(_potential_weak, sec, config.seed, i))
        for i in range(sec.bumps)
    ]
    if sec.harmonic_radii:
        tasks.append(Task("potential", "harmonic", partial(_potential_harmonic, sec)))
    if sec.chart_scales:
        tasks.append(Task("potential", "chart", partial(_potential_chart, sec)))
    return tasks


# ---------------------------------------------------------------------------
# disk-area


def random_curvature_measure(sec: DiskAreaSection, rng: np.random.Generator) -> SignedMeasure:
    """Atoms in D_{atom_radius}; total negative mass at most max_negative_mass."""
    n = sec.atoms_per_measure
    radius = sec.atom_radius * np.sqrt(rng.uniform(size=n))
    angle = rng.uniform(0.0, 2.0 * math.pi, size=n)
    weights = rng.uniform(-sec.max_negative_mass / n, sec.max_positive_weight, size=n)
    return SignedMeasure.from_atoms(
        (
            (float(x), float(y), float(w))
            for x, y, w in zip(radius * np.cos(angle), radius * np.sin(angle), weights)
        ),
        domain="disk",
    )


def _ball_samples(
    sec: DiskAreaSection, rng: np.random.Generator
) -> list[tuple[tuple[float, float], float]]:
    out = []
    for i in range(sec.balls_per_measure):
        rr = sec.center_radius * math.sqrt(rng.uniform())
        phi = rng.uniform(0.0, 2.0 * math.pi)
        out.append(((rr * math.cos(phi), rr * math.sin(phi)), sec.radii[i % len(sec.radii)]))
    return out


def _disk_area_measure(sec: DiskAreaSection, seed: int, index: int) -> list[ResultRow]:
    rng = _rng(seed, _DISK_STREAM, index)
    mu = random_curvature_measure(sec, rng)
    f = ConformalField.from_measure(mu, Rectangle(-1.0, 1.0, -1.0, 1.0), sec.grid, domain="disk")
    report = area_bound_audit(f, mu, _ball_samples(sec, rng), margin=sec.margin)
    log.info(
        "disk-area measure %d: worst=%s bound=%.4g clipped=%d",
        index,
        report.worst_ratio,
        report.bound,
        report.clipped,
    )
    return [
        row(
            "disk-area/ratio",
            math.nan if report.worst_ratio is None else report.worst_ratio,
            bound=report.bound + report.margin,
            passed=report.passed,
            measure=index,
        )
    ]


def disk_area_tasks(config: ExperimentConfig) -> list[Task]:
    sec = config.disk_area
    if not sec.radii:
        return []
    return [
        Task("disk-area", f"measure {i}", partial(_disk_area_measure, sec, config.seed, i))
        for i in range(sec.measures)
    ]


# ---------------------------------------------------------------------------
# blowup


def _blowup_area(sec: BlowupSection, R: float) -> list[ResultRow]:
    area = blowup_area(R, sec.a, samples=sec.samples, radial=sec.radial)
    return [
        row("blowup/ratio", area.ratio, sweep="R", R=R),
        row(
            "blowup/quadrature-gap",
            area.relative_gap,
            bound=sec.tolerance,
            passed=area.relative_gap <= sec.tolerance,
            R=R,
        ),
    ]


def _blowup_monotone(sec: BlowupSection) -> list[ResultRow]:
    ratios = [blowup_area(R, sec.a, samples=sec.samples, radial=1).ratio for R in sorted(sec.R)]
    step = min(b - a for a, b in zip(ratios, ratios[1:]))
    return [row("blowup/monotone", step, bound=0.0, passed=step > 0)]


def _blowup_remainder(sec: BlowupSection) -> list[ResultRow]:
    kappas = [
        blowup_area(R, sec.a, samples=sec.samples, radial=1).remainder
        for R in sec.remainder_R
    ]
    rows = [row("blowup/remainder", k, sweep="R", R=R) for R, k in zip(sec.remainder_R, kappas)]
    mags = [abs(k) for k in kappas]
    spread = math.inf if min(mags) == 0 else max(mags) / min(mags)
    rows.append(
        row(
            "blowup/remainder-spread",
            spread,
            bound=sec.remainder_spread,
            passed=spread <= sec.remainder_spread,
        )
    )
    return rows


def blowup_tasks(config: ExperimentConfig) -> list[Task]:
    sec = config.blowup
    tasks = [Task("blowup", f"area R={R}", partial(_blowup_area, sec, R)) for R in sec.R]
    if len(sec.R) > 1:
        tasks.append(Task("blowup", "monotone", partial(_blowup_monotone, sec)))
    if len(sec.remainder_R) > 1:
        tasks.append(Task("blowup", "remainder", partial(_blowup_remainder, sec)))
    return tasks


# ---------------------------------------------------------------------------
# torus


def _torus_family(sec: TorusSection, p: float) -> list[ResultRow]:
    report = degenerate_family_audit(
        sec.b,
        p,
        radii=sec.radii,
        N=sec.grid,
        position=sec.position,
        spread_bound=sec.spread_bound,
    )
    rows = [
        row("torus/normalized", pt.value, sweep="b", p=p, r=pt.r, b=pt.b)
        for pt in report.points
    ]
    rows.append(
        row("torus/spread", report.spread, bound=sec.spread_bound, passed=report.passed, p=p)
    )
    return rows


def torus_tasks(config: ExperimentConfig) -> list[Task]:
    sec = config.torus
    if not sec.b or not sec.radii:
        return []
    return [Task("torus", f"family p={p}", partial(_torus_family, sec, p)) for p in sec.p]


# ---------------------------------------------------------------------------
# collar


def _collar_residuals(sec: CollarSection, ell: float) -> list[ResultRow]:
    params = collar_from_length(ell)
    rows = []
    for t in sec.t:
        if t >= 2.0 * params.T:
            continue
        res = asymptotic_residuals(params, t)
        for name, value in res.as_dict().items():
            kappa = abs(value) / ell
            rows.append(
                row(
                    "collar/residual",
                    kappa,
                    bound=sec.kappa_bound,
                    passed=kappa <= sec.kappa_bound,
                    sweep="ell",
                    quantity=name,
                    t=t,
                    ell=ell,
                )
            )
    return rows


def _distance_error(
    params: CollarParams,
    pairs: Iterable[tuple[float, float]],
    ts: Iterable[float],
) -> float:
    worst = 0.0
    for t1, t2 in pairs:
        lo, hi = min(t1, t2), max(t1, t2)
        exact, _ = quad(
            lambda s: float(collar_conformal_factor(params, s)), lo, hi, epsabs=1e-13, epsrel=1e-13
        )
        worst = max(worst, abs(collar_distance(params, lo, hi) - exact))
    for t in ts:
        if 0.0 <= t < 2.0 * params.T:
            closed = collar_distance_closed_form(params, t)
            worst = max(worst, abs(closed - collar_distance(params, params.T - t, params.T)))
    return worst


def _collar_ratio(sec: CollarSection, seed: int, index: int, ell: float) -> list[ResultRow]:
    params = collar_from_length(ell)
    samples = random_ratio_samples(params, sec.ratio_samples, _rng(seed, _COLLAR_STREAM, index))
    samples.append(near_boundary_sample(params))
    report = ratio_bound_audit(params, samples)
    worst = max(report.max_ratio, 1.0 / report.min_ratio)
    error = _distance_error(params, samples[: sec.distance_pairs], sec.t)
    return [
        row("collar/ratio", worst, bound=report.bound, passed=report.passed, sweep="ell", ell=ell),
        row(
            "collar/distance",
            error,
            bound=sec.distance_tolerance,
            passed=error <= sec.distance_tolerance,
            sweep="ell",
            ell=ell,
        ),
    ]


def _collar_strip(sec: CollarSection, ell: float) -> list[ResultRow]:
    params = collar_from_length(ell)
    t0, theta0 = sec.strip_source
    field = solve_cylinder_potential(params, t0, theta0, 1.0, n_theta=sec.strip_theta)
    report = collar_strip_gradient_audit(
        params, field, sec.strip_k, sec.strip_m, bound=sec.strip_ratio_bound
    )
    return [
        row(
            "collar/strip",
            report.ratio,
            bound=sec.strip_ratio_bound,
            passed=report.passed,
            ell=ell,
            k=sec.strip_k,
            m=sec.strip_m,
        )
    ]


def _collar_balls(sec: CollarSection, ell: float) -> list[ResultRow]:
    params = collar_from_length(ell)
    rows = []
    for frac in sec.ball_t0:
        t0 = frac * (params.T - 5.0)
        for r in sec.ball_radii:
            report = collar_ball_analysis(params, t0, r)
            rows.append(
                row(
                    "collar/ball",
                    report.ratio,
                    bound=report.bound,
                    passed=report.passed,
                    ell=ell,
                    t0=frac,
                    r=r,
                    case=report.case,
                )
            )
    return rows


def _collar_charts(sec: CollarSection) -> list[ResultRow]:
    rows = []
    for r in sec.chart_r:
        err = disk_chart_curvature(r)
        rows.append(
            row(
                "collar/chart-curvature",
                err,
                bound=sec.chart_tolerance,
                passed=err <= sec.chart_tolerance,
                r=r,
            )
        )
        if math.sinh(0.5 * r) < 1.0:
            rows.append(row("collar/chart-radius", disk_chart_radial_distance(r), sweep="r", r=r))
    return rows


def _collar_topology(sec: CollarSection) -> list[ResultRow]:
    rows = []
    for g in sec.genus:
        top = TopologyData(g)
        inj = injectivity_radius_ceiling(top)
        values = {
            "inj-ceiling": inj,
            "covering": covering_count_bound(top, sec.thick_a),
            "collars": collar_count_bound(top),
            "thick-part": thick_part_bound(top, sec.thick_a, sec.thick_p),
            "global-factor": global_gradient_factor(top, inj, sec.thick_p),
        }
        rows += [
            row("collar/topology", v, sweep="genus", quantity=name, genus=g)
            for name, v in values.items()
        ]
    return rows


def _check_collar(sec: CollarSection) -> None:
    for i, ell in enumerate(sec.strip_ell):
        T = collar_from_length(ell).T
        if not (-T + 2 < sec.strip_k and sec.strip_m < T - 2):
            raise ConfigError(
                f"collar.strip_ell.{i}",
                f"strip [{sec.strip_k}, {sec.strip_m}] must lie in (-T + 2, T - 2), T = {T:.6g}",
            )
        if abs(sec.strip_source[0]) >= T - 1:
            raise ConfigError(
                "collar.strip_source", f"source must satisfy |t0| < T - 1 = {T - 1:.6g}"
            )
    for i, ell in enumerate(sec.ball_ell):
        if collar_from_length(ell).T <= 5.0:
            raise ConfigError(f"collar.ball_ell.{i}", "collar too short for ball analysis (T <= 5)")
    for i, ell in enumerate(sec.ell):
        if collar_from_length(ell).T <= 1.0:
            raise ConfigError(f"collar.ell.{i}", "collar too short for admissible pairs (T <= 1)")


def collar_tasks(config: ExperimentConfig) -> list[Task]:
    sec = config.collar
    _check_collar(sec)
    tasks = []
    for i, ell in enumerate(sec.ell):
        tasks.append(Task("collar", f"residuals ell={ell}", partial(_collar_residuals, sec, ell)))
        tasks.append(
            Task("collar", f"ratio ell={ell}", partial(_collar_ratio, sec, config.seed, i, ell))
        )
    tasks += [
        Task("collar", f"strip ell={ell}", partial(_collar_strip, sec, ell))
        for ell in sec.strip_ell
    ]
    if sec.ball_t0 and sec.ball_radii:
        tasks += [
            Task("collar", f"balls ell={ell}", partial(_collar_balls, sec, ell))
            for ell in sec.ball_ell
        ]
    if sec.chart_r:
        tasks.append(Task("collar", "charts", partial(_collar_charts, sec)))
    if sec.genus:
        tasks.append(Task("collar", "topology", partial(_collar_topology, sec)))
    return tasks


# ---------------------------------------------------------------------------
# annulus


def _annulus(sec: AnnulusSection) -> list[ResultRow]:
    rows = []
    for p in sec.p:
        q = 2.0 ** -(2.0 - p)
        series = sec.per_disk_bound * q / (1.0 - q)
        for a in sec.a:
            value = annulus_estimate_audit(a, p, sec.per_disk_bound)
            rows.append(
                row(
                    "annulus/dyadic",
                    value,
                    bound=series,
                    passed=math.isfinite(value) and value <= series * (1.0 + EXACT_RTOL),
                    p=p,
                    a=a,
                )
            )
    for k in sec.k:
        value = linear_counterexample_norm(k)
        exact = abs(k) * math.pi / 4.0
        rows.append(
            row(
                "annulus/linear",
                value,
                bound=exact,
                passed=abs(value - exact) <= EXACT_RTOL * max(1.0, exact),
                sweep="k",
                k=k,
            )
        )
    return rows


def annulus_tasks(config: ExperimentConfig) -> list[Task]:
    sec = config.annulus
    if not ((sec.p and sec.a) or sec.k):
        return []
    return [Task("annulus", "dyadic", partial(_annulus, sec))]


# ---------------------------------------------------------------------------

TASK_BUILDERS: dict[str, Callable[[ExperimentConfig], list[Task]]] = {
    "potential": potential_tasks,
    "disk-area": disk_area_tasks,
    "blowup": blowup_tasks,
    "torus": torus_tasks,
    "collar": collar_tasks,
    "annulus": annulus_tasks,
}


def build_tasks(config: ExperimentConfig, kinds: Sequence[str] = KINDS) -> list[Task]:
    """Expand the selected kinds; precondition checks happen here, before any work."""
    unknown = [k for k in kinds if k not in TASK_BUILDERS]
    if unknown:
        raise ValueError(f"unknown experiment kind(s): {', '.join(unknown)}")
    tasks: list[Task] = []
    for kind in kinds:
        tasks += TASK_BUILDERS[kind](config)
    return tasks


def execute(task: Task, timing: bool = False) -> list[ResultRow]:
    start = time.perf_counter()
    rows = task.fn()
    elapsed = 1000.0 * (time.perf_counter() - start)
    log.info("%s: %s done (%d rows, %.0f ms)", task.kind, task.name, len(rows), elapsed)
    if timing:
        rows = [r.timed(elapsed) for r in rows]
    return rows


def run(
    config: ExperimentConfig,
    kinds: Sequence[str] = KINDS,
    *,
    jobs: int = 1,
    timing: bool = False,
) -> list[ResultRow]:
    """Run the selected experiments; rows come back sorted by (experiment, params)."""
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    tasks = build_tasks(config, kinds)
    log.info("running %d task(s) on %d worker(s)", len(tasks), jobs)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(execute, tasks, [timing] * len(tasks)))
    else:
        chunks = [execute(task, timing) for task in tasks]
    rows = [r for chunk in chunks for r in chunk]
    return sorted(rows, key=lambda r: r.sort_key)
