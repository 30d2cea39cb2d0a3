from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeAlias

import numpy as np

from bicgrad.errors import PoleError
from bicgrad.measure import Disk, Rectangle, SignedMeasure, total_variation

log = logging.getLogger(__name__)

INV_2PI = 1.0 / (2.0 * math.pi)
_POLE_ULPS = 64

ScalarField: TypeAlias = Callable[[np.ndarray], np.ndarray]
VectorField: TypeAlias = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureSettings:
    """Knobs shared by every quadrature in this module.

    - `grid`: default cells per side for area quadrature (weak residual).
    - `refine`: sub-cells per side used for the 8 cells around a singular cell.
    - `radial_order` / `radial_levels`: Gauss-Legendre order per dyadic panel and
      number of dyadic panels towards a singular centre.
    - `angular`: uniform angular samples of the polar rule.
    """

    grid: int = 1024
    refine: int = 4
    radial_order: int = 16
    radial_levels: int = 48
    angular: int = 256

    def __post_init__(self) -> None:
        for name in ("grid", "refine", "radial_order", "radial_levels", "angular"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")


DEFAULT_SETTINGS = QuadratureSettings()


# ---------------------------------------------------------------------------
# exact cell integrals of the log kernel and its gradient


def _log_primitive(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    # d^2/dXdY of this is log sqrt(X^2 + Y^2)
    r2 = X * X + Y * Y
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(r2 > 0, X * Y * (np.log(np.where(r2 > 0, r2, 1.0)) - 3.0), 0.0)
        t2 = np.where(X != 0, X * X * np.arctan(Y / np.where(X != 0, X, 1.0)), 0.0)
        t3 = np.where(Y != 0, Y * Y * np.arctan(X / np.where(Y != 0, Y, 1.0)), 0.0)
    return 0.5 * (t1 + t2 + t3)


def _grad_primitive(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    # d^2/dXdY of this is X / (X^2 + Y^2)
    r2 = X * X + Y * Y
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(r2 > 0, 0.5 * Y * np.log(np.where(r2 > 0, r2, 1.0)), 0.0)
        t2 = np.where(X != 0, X * np.arctan(Y / np.where(X != 0, X, 1.0)), 0.0)
    return t1 - Y + t2


def _corners(
    primitive: Callable[[np.ndarray, np.ndarray], np.ndarray],
    X0: np.ndarray,
    X1: np.ndarray,
    Y0: np.ndarray,
    Y1: np.ndarray,
) -> np.ndarray:
    return primitive(X1, Y1) - primitive(X0, Y1) - primitive(X1, Y0) + primitive(X0, Y0)


def cell_log_integral(
    points: np.ndarray, x0: float, x1: float, y0: float, y1: float
) -> np.ndarray:
    """Exact `∫_cell log|p - y| dy` for every point p (shape (..., 2))."""
    pts = np.asarray(points, dtype=float)
    px, py = pts[..., 0], pts[..., 1]
    return _corners(_log_primitive, x0 - px, x1 - px, y0 - py, y1 - py)


def cell_kernel_gradient(
    points: np.ndarray, x0: float, x1: float, y0: float, y1: float
) -> np.ndarray:
    """Exact `∫_cell (p - y)/|p - y|^2 dy` for every point p; shape (..., 2)."""
    pts = np.asarray(points, dtype=float)
    px, py = pts[..., 0], pts[..., 1]
    X0, X1, Y0, Y1 = x0 - px, x1 - px, y0 - py, y1 - py
    gx = -_corners(_grad_primitive, X0, X1, Y0, Y1)
    gy = -_corners(lambda a, b: _grad_primitive(b, a), X0, X1, Y0, Y1)
    return np.stack([gx, gy], axis=-1)


# ---------------------------------------------------------------------------
# pointwise evaluation


def _atom_sums(
    mu: SignedMeasure,
    pts: np.ndarray,
    *,
    at_atoms: str,
    cell: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Return (Σ w log|p-a|, Σ w (p-a)/|p-a|^2) over atoms, pts shape (n, 2)."""
    n = pts.shape[0]
    logs = np.zeros(n)
    grads = np.zeros((n, 2))
    for atom in mu.atoms:
        a = np.asarray(atom.position)
        diff = pts - a
        d2 = np.einsum("ij,ij->i", diff, diff)
        hit = d2 == 0.0
        if np.any(hit):
            if at_atoms == "raise":
                raise PoleError(atom.position, atom.weight)
            # replace by the average over the dual cell centred at the node
            half = 0.5 * cell
            hp = pts[hit]
            avg_log = cell_log_integral(
                hp, a[0] - half, a[0] + half, a[1] - half, a[1] + half
            ) / (cell * cell)
            avg_grad = cell_kernel_gradient(
                hp, a[0] - half, a[0] + half, a[1] - half, a[1] + half
            ) / (cell * cell)
        safe = np.where(hit, 1.0, d2)
        logs += atom.weight * np.where(hit, 0.0, 0.5 * np.log(safe))
        grads += atom.weight * np.where(hit[:, None], 0.0, diff / safe[:, None])
        if np.any(hit):
            logs[hit] += atom.weight * avg_log
            grads[hit] += atom.weight * avg_grad
    return logs, grads


class _DensityKernel:
    """Near/far evaluation of the log kernel against a density grid.

    Far cells use the midpoint rule. The cell holding p is integrated exactly,
    its 8 neighbours with a refined midpoint rule.
    """

    def __init__(self, mu: SignedMeasure, refine: int) -> None:
        assert mu.density is not None
        self.grid = mu.density
        self.centers = self.grid.centers().reshape(-1, 2)
        self.masses = self.grid.values.reshape(-1) * self.grid.cell_area
        self.refine = refine
        h = self.grid.h
        offs = (np.arange(refine) + 0.5) * (h / refine)
        sx, sy = np.meshgrid(offs, offs)
        self._sub = np.stack([sx.ravel(), sy.ravel()], axis=-1)
        self._sub_area = (h / refine) ** 2

    def _near(self, p: np.ndarray) -> list[tuple[int, int, bool]]:
        ny, nx = self.grid.shape
        x0, y0 = self.grid.origin
        i = math.floor((p[0] - x0) / self.grid.h)
        j = math.floor((p[1] - y0) / self.grid.h)
        out: list[tuple[int, int, bool]] = []
        for dj in (-1, 0, 1):
            for di in (-1, 0, 1):
                jj, ii = j + dj, i + di
                if 0 <= jj < ny and 0 <= ii < nx:
                    out.append((jj, ii, dj == 0 and di == 0))
        return out

    def _bounds(self, jj: int, ii: int) -> tuple[float, float, float, float]:
        x0, y0 = self.grid.origin
        h = self.grid.h
        return (x0 + ii * h, x0 + (ii + 1) * h, y0 + jj * h, y0 + (jj + 1) * h)

    def evaluate(self, p: np.ndarray) -> tuple[float, np.ndarray]:
        diff = p - self.centers
        d2 = np.einsum("ij,ij->i", diff, diff)
        safe = np.where(d2 > 0, d2, 1.0)
        logs = np.where(d2 > 0, 0.5 * np.log(safe), 0.0)
        kern = np.where((d2 > 0)[:, None], diff / safe[:, None], 0.0)
        total_log = float(self.masses @ logs)
        total_grad = self.masses @ kern
        nx = self.grid.shape[1]
        for jj, ii, exact in self._near(p):
            k = jj * nx + ii
            rho = self.grid.values[jj, ii]
            if rho == 0.0:
                continue
            total_log -= self.masses[k] * logs[k]
            total_grad = total_grad - self.masses[k] * kern[k]
            x0, x1, y0, y1 = self._bounds(jj, ii)
            if exact:
                total_log += rho * float(cell_log_integral(p, x0, x1, y0, y1))
                total_grad = total_grad + rho * cell_kernel_gradient(p, x0, x1, y0, y1)
            else:
                sub = np.array([x0, y0]) + self._sub
                sd = p - sub
                sd2 = np.einsum("ij,ij->i", sd, sd)
                total_log += rho * self._sub_area * float(0.5 * np.log(sd2).sum())
                total_grad = total_grad + rho * self._sub_area * (
                    sd / sd2[:, None]
                ).sum(axis=0)
        return total_log, np.asarray(total_grad, dtype=float)


def _evaluate(
    mu: SignedMeasure,
    x: np.ndarray,
    settings: QuadratureSettings,
    *,
    at_atoms: str = "raise",
    cell: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    pts = np.asarray(x, dtype=float)
    if pts.shape[-1] != 2:
        raise ValueError(f"points must have a trailing dimension of 2, got {pts.shape}")
    lead = pts.shape[:-1]
    flat = pts.reshape(-1, 2)
    logs, grads = _atom_sums(mu, flat, at_atoms=at_atoms, cell=cell)
    if mu.density is not None and np.any(mu.density.values):
        kernel = _DensityKernel(mu, settings.refine)
        for k in range(flat.shape[0]):
            dl, dg = kernel.evaluate(flat[k])
            logs[k] += dl
            grads[k] += dg
    values = -INV_2PI * logs
    gradient = -INV_2PI * grads
    return values.reshape(lead), gradient.reshape(lead + (2,))


def eval_potential(
    mu: SignedMeasure,
    x: Sequence[float] | np.ndarray,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float | np.ndarray:
    """I_μ(x) = -(1/2π) ∫ log|x - y| dμ(y).

    Accepts one point or an array of points (..., 2). Raises `PoleError` at atoms.
    """
    values, _ = _evaluate(mu, np.asarray(x, dtype=float), settings)
    return float(values) if values.ndim == 0 else values


def eval_gradient(
    mu: SignedMeasure,
    x: Sequence[float] | np.ndarray,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> np.ndarray:
    """∇I_μ(x) = -(1/2π) ∫ (x - y)/|x - y|^2 dμ(y); shape (..., 2)."""
    _, gradient = _evaluate(mu, np.asarray(x, dtype=float), settings)
    return gradient


@dataclass(frozen=True, eq=False)
class PotentialField:
    """I_μ with an optional read-only node cache.

    Cached nodes that coincide with an atom hold the average over their dual
    cell instead of a pole.
    """

    source: SignedMeasure
    settings: QuadratureSettings = DEFAULT_SETTINGS
    xs: np.ndarray | None = None
    ys: np.ndarray | None = None
    values: np.ndarray | None = None
    gradient: np.ndarray | None = None

    @property
    def is_cached(self) -> bool:
        return self.values is not None

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(eval_potential(self.source, x, self.settings))

    def grad(self, x: np.ndarray) -> np.ndarray:
        return eval_gradient(self.source, x, self.settings)


def tabulate_potential(
    mu: SignedMeasure,
    bounds: Rectangle,
    n: int,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> PotentialField:
    """Sample (I_μ, ∇I_μ) on the n x n node grid spanning `bounds`."""
    if n < 2:
        raise ValueError(f"need at least 2 nodes per side, got {n}")
    xs = np.linspace(bounds.xmin, bounds.xmax, n)
    ys = np.linspace(bounds.ymin, bounds.ymax, n)
    hx = (bounds.xmax - bounds.xmin) / (n - 1)
    hy = (bounds.ymax - bounds.ymin) / (n - 1)
    gx, gy = np.meshgrid(xs, ys)
    nodes = np.stack([gx, gy], axis=-1)
    log.debug("tabulating potential on %dx%d nodes", n, n)
    values, gradient = _evaluate(
        mu, nodes, settings, at_atoms="cell", cell=math.sqrt(hx * hy)
    )
    for arr in (xs, ys, values, gradient):
        arr.setflags(write=False)
    return PotentialField(
        source=mu, settings=settings, xs=xs, ys=ys, values=values, gradient=gradient
    )


# ---------------------------------------------------------------------------
# polar quadrature


def radial_rule(
    inner: float, outer: float, settings: QuadratureSettings = DEFAULT_SETTINGS
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes s and weights w with Σ w f(s) ≈ ∫_inner^outer f(s) s ds.

    With inner = 0 the panels are dyadic towards the origin; otherwise geometric.
    """
    if not (0 <= inner < outer):
        raise ValueError(f"need 0 <= inner < outer, got ({inner}, {outer})")
    if inner == 0:
        edges = outer * 2.0 ** -np.arange(settings.radial_levels + 1, dtype=float)
        edges = np.append(edges, 0.0)
    else:
        panels = max(1, math.ceil(math.log2(outer / inner)))
        edges = inner * (outer / inner) ** (np.arange(panels, -1, -1) / panels)
    gx, gw = np.polynomial.legendre.leggauss(settings.radial_order)
    b, a = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    s = (a[:, None] + half[:, None] * (gx[None, :] + 1.0)).ravel()
    w = (half[:, None] * gw[None, :]).ravel() * s
    return s, w


def _polar_nodes(
    center: np.ndarray,
    inner: float,
    outer: float,
    settings: QuadratureSettings,
) -> tuple[np.ndarray, np.ndarray]:
    s, ws = radial_rule(inner, outer, settings)
    m = settings.angular
    theta = 2.0 * math.pi * (np.arange(m) + 0.5) / m
    pts = np.empty((s.size, m, 2))
    pts[..., 0] = center[0] + s[:, None] * np.cos(theta)[None, :]
    pts[..., 1] = center[1] + s[:, None] * np.sin(theta)[None, :]
    weights = np.repeat(ws[:, None] * (2.0 * math.pi / m), m, axis=1)
    return pts.reshape(-1, 2), weights.reshape(-1)


def _clear_of(pts: np.ndarray, poles: np.ndarray) -> np.ndarray:
    """Mask of nodes that did not round onto a pole.

    The innermost dyadic panels sit within a few ulps of their centre, so in
    float64 a node can land exactly on an off-origin singular point.
    """
    keep = np.ones(pts.shape[0], dtype=bool)
    for sp in poles:
        tol = _POLE_ULPS * np.finfo(float).eps * float(np.hypot(*sp))
        keep &= np.hypot(pts[:, 0] - sp[0], pts[:, 1] - sp[1]) > tol
    return keep


def polar_integral(
    f: ScalarField,
    center: Sequence[float],
    outer: float,
    *,
    inner: float = 0.0,
    singular: Iterable[Sequence[float]] = (),
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """∫ f over the annulus inner < |y - center| < outer.

    `f` may be integrably singular at `center` and at the `singular` points.
    Each off-centre singular point gets an excluded disk of radius a quarter of
    its distance to the nearest other singular point (centre included), which
    is integrated with its own polar rule.
    """
    c = np.asarray(center, dtype=float)
    sing = np.asarray(list(singular), dtype=float).reshape(-1, 2)
    poles = sing.copy()
    if sing.size:
        dc = np.hypot(sing[:, 0] - c[0], sing[:, 1] - c[1])
        sing = sing[dc > 1e-14 * max(1.0, outer)]
    holes: list[tuple[np.ndarray, float]] = []
    if sing.size:
        others = np.vstack([sing, c[None, :]])
        for k, sp in enumerate(sing):
            d = np.hypot(others[:, 0] - sp[0], others[:, 1] - sp[1])
            d[k] = np.inf
            delta = 0.25 * float(d.min())
            dist = float(np.hypot(*(sp - c)))
            if dist - delta < outer and dist + delta > inner:
                holes.append((sp, delta))

    def _in_annulus(pts: np.ndarray) -> np.ndarray:
        r = np.hypot(pts[:, 0] - c[0], pts[:, 1] - c[1])
        return (r > inner) & (r < outer)

    pts, wts = _polar_nodes(c, inner, outer, settings)
    keep = _clear_of(pts, poles)
    for sp, delta in holes:
        keep &= np.hypot(pts[:, 0] - sp[0], pts[:, 1] - sp[1]) >= delta
    total = float(np.dot(wts[keep], f(pts[keep])))

    for sp, delta in holes:
        hp, hw = _polar_nodes(sp, 0.0, delta, settings)
        inside = _in_annulus(hp) & _clear_of(hp, poles)
        if np.any(inside):
            total += float(np.dot(hw[inside], f(hp[inside])))
    return total


# ---------------------------------------------------------------------------
# functionals


def _check_q(q: float) -> None:
    if not (1.0 <= q < 2.0):
        raise ValueError(f"q must lie in [1, 2), got {q}")


def scaling_functional(
    mu: SignedMeasure,
    x: Sequence[float],
    r: float,
    q: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """r^{q-2} ∫_{D_r(x)} |∇I_μ|^q dy."""
    if r <= 0:
        raise ValueError(f"radius must be positive, got {r}")
    _check_q(q)

    def integrand(pts: np.ndarray) -> np.ndarray:
        g = eval_gradient(mu, pts, settings)
        return np.hypot(g[..., 0], g[..., 1]) ** q

    value = polar_integral(
        integrand, x, r, singular=mu.positions, settings=settings
    )
    return r ** (q - 2.0) * value


def _check_support_in_unit_disk(mu: SignedMeasure) -> None:
    pos, _ = mu.point_masses()
    if pos.size and np.any(np.hypot(pos[:, 0], pos[:, 1]) > 1.0):
        raise ValueError("support of the measure must lie in the unit disk")


def exp_integrability(
    mu: SignedMeasure,
    R: float,
    epsilon: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """∫_{D_R} exp((4π - ε)|I_μ| / tv(μ)) dx."""
    if not (0.0 < epsilon < 4.0 * math.pi):
        raise ValueError(f"epsilon must lie in (0, 4π), got {epsilon}")
    if R <= 0:
        raise ValueError(f"R must be positive, got {R}")
    tv = total_variation(mu)
    if tv <= 0:
        raise ValueError("exp-integrability needs a measure with positive total variation")
    _check_support_in_unit_disk(mu)
    k = (4.0 * math.pi - epsilon) / tv

    def integrand(pts: np.ndarray) -> np.ndarray:
        return np.exp(k * np.abs(np.asarray(eval_potential(mu, pts, settings))))

    return polar_integral(
        integrand, (0.0, 0.0), R, singular=mu.positions, settings=settings
    )


def _grid_exp_integral(field: PotentialField, p: float) -> float:
    assert field.xs is not None and field.ys is not None and field.values is not None
    xs, ys = field.xs, field.ys
    if xs[0] > -0.5 or xs[-1] < 0.5 or ys[0] > -0.5 or ys[-1] < 0.5:
        raise ValueError("sampled field must cover the square [-1/2, 1/2]^2")
    gx, gy = np.meshgrid(xs, ys)
    inside = gx * gx + gy * gy < 0.25
    cell = (xs[1] - xs[0]) * (ys[1] - ys[0])
    return float(np.sum(np.exp(p * np.abs(field.values[inside]))) * cell)


def moser_trudinger_functional(
    u: ScalarField | PotentialField,
    p: float,
    *,
    singular: Iterable[Sequence[float]] = ((0.0, 0.0),),
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """∫_{D_{1/2}} e^{p|u|} dx.

    `u` is either a callable on points (..., 2), integrated with the polar rule,
    or a tabulated `PotentialField`, summed over its nodes inside the disk.
    """
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    if isinstance(u, PotentialField) and u.is_cached:
        return _grid_exp_integral(u, p)

    def integrand(pts: np.ndarray) -> np.ndarray:
        return np.exp(p * np.abs(u(pts)))

    return polar_integral(
        integrand, (0.0, 0.0), 0.5, singular=singular, settings=settings
    )


def disk_gradient_norm(
    grad: VectorField,
    radius: float,
    p: float,
    *,
    inner: float = 0.0,
    center: Sequence[float] = (0.0, 0.0),
    singular: Iterable[Sequence[float]] = (),
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """‖grad‖_{L^p} over inner < |x - center| < radius."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")

    def integrand(pts: np.ndarray) -> np.ndarray:
        g = grad(pts)
        return np.hypot(g[..., 0], g[..., 1]) ** p

    value = polar_integral(
        integrand, center, radius, inner=inner, singular=singular, settings=settings
    )
    return value ** (1.0 / p)


def chart_gradient_norm(
    mu: SignedMeasure,
    center: Sequence[float],
    scale: float,
    p: float,
    a: float = 0.0,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """‖∇(I_μ ∘ φ)‖_{L^p(D_{1/2} minus the closed disk of radius 2a)}.

    φ(z) = center + scale * z. With a = 0 the whole half disk is used.
    """
    if scale <= 0:
        raise ValueError(f"chart scale must be positive, got {scale}")
    if not (0.0 <= a < 0.25):
        raise ValueError(f"a must lie in [0, 1/4), got {a}")
    c = np.asarray(center, dtype=float)

    def pulled_back(z: np.ndarray) -> np.ndarray:
        return scale * eval_gradient(mu, c + scale * z, settings)

    singular = (mu.positions - c) / scale
    return disk_gradient_norm(
        pulled_back, 0.5, p, inner=2.0 * a, singular=singular, settings=settings
    )


def linear_counterexample_norm(
    k: float, settings: QuadratureSettings = DEFAULT_SETTINGS
) -> float:
    """‖∇(k x¹)‖_{L¹(D_{1/2})}, which is kπ/4: harmonic, yet unbounded in k."""

    def grad(pts: np.ndarray) -> np.ndarray:
        out = np.zeros(pts.shape)
        out[..., 0] = k
        return out

    return disk_gradient_norm(grad, 0.5, 1.0, settings=settings)


# ---------------------------------------------------------------------------
# diagnostics


@dataclass(frozen=True)
class HarmonicResidualReport:
    max_deviation: float
    worst_center: tuple[float, float]
    worst_radius: float
    circles: int
    skipped: int


def circle_average(
    f: ScalarField, center: Sequence[float], radius: float, n_theta: int = 256
) -> float:
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    pts = np.stack(
        [center[0] + radius * np.cos(theta), center[1] + radius * np.sin(theta)],
        axis=-1,
    )
    return float(np.mean(f(pts)))


def harmonic_residual_report(
    u: ScalarField,
    mu: SignedMeasure,
    region: Disk,
    radii: Sequence[float],
    *,
    n_centers: int = 9,
    n_theta: int = 256,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> HarmonicResidualReport:
    """Mean-value test of w = u - I_μ on circles inside `region`.

    Centres are the region centre plus `n_centers - 1` points on a ring. Circles
    whose closed disk holds an atom are skipped.
    """
    if region.radius <= 0:
        raise ValueError(f"region radius must be positive, got {region.radius}")
    cx, cy = region.center

    def w(pts: np.ndarray) -> np.ndarray:
        return np.asarray(u(pts), dtype=float) - np.asarray(
            eval_potential(mu, pts, settings), dtype=float
        )

    atoms = mu.positions
    worst = (-1.0, (cx, cy), 0.0)
    circles = skipped = 0
    for radius in radii:
        if not (0 < radius < region.radius):
            skipped += 1
            continue
        ring = 0.5 * (region.radius - radius)
        centers = [(cx, cy)]
        for k in range(max(0, n_centers - 1)):
            phi = 2.0 * math.pi * k / max(1, n_centers - 1)
            centers.append((cx + ring * math.cos(phi), cy + ring * math.sin(phi)))
        for c in centers:
            if atoms.size and np.any(
                np.hypot(atoms[:, 0] - c[0], atoms[:, 1] - c[1]) <= radius
            ):
                skipped += 1
                continue
            deviation = abs(circle_average(w, c, radius, n_theta) - float(w(np.array(c))))
            circles += 1
            if deviation > worst[0]:
                worst = (deviation, c, radius)
    if circles == 0:
        raise ValueError("region too small: no test circle avoids the atoms")
    return HarmonicResidualReport(
        max_deviation=worst[0],
        worst_center=(float(worst[1][0]), float(worst[1][1])),
        worst_radius=float(worst[2]),
        circles=circles,
        skipped=skipped,
    )


@dataclass(frozen=True)
class Bump:
    """φ(x) = exp(-1 / (1 - |x - c|^2 / ρ^2)) inside D_ρ(c), 0 outside."""

    center: tuple[float, float]
    radius: float

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ValueError(f"bump radius must be positive, got {self.radius}")

    @property
    def sup(self) -> float:
        return math.exp(-1.0)

    def _q(self, pts: np.ndarray) -> np.ndarray:
        d = np.asarray(pts, dtype=float) - np.asarray(self.center)
        return (d[..., 0] ** 2 + d[..., 1] ** 2) / self.radius**2

    def value(self, pts: np.ndarray) -> np.ndarray:
        q = self._q(pts)
        inside = q < 1.0
        one_minus = np.where(inside, 1.0 - q, 1.0)
        return np.where(inside, np.exp(-1.0 / one_minus), 0.0)

    def laplacian(self, pts: np.ndarray) -> np.ndarray:
        q = self._q(pts)
        inside = q < 1.0
        s = np.where(inside, 1.0 - q, 1.0)
        g1 = -1.0 / s**2
        g2 = -2.0 / s**3
        rho2 = self.radius**2
        lap = np.exp(-1.0 / s) * ((g2 + g1 * g1) * 4.0 * q / rho2 + g1 * 4.0 / rho2)
        return np.where(inside, lap, 0.0)


def weak_residual(
    mu: SignedMeasure,
    bump: Bump,
    resolution: int | None = None,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """|∫ I_μ Δφ dx + ∫ φ dμ| / ‖φ‖_∞ on a resolution² grid over supp φ.

    I_μ enters as exact cell averages of the log kernel, so atoms inside the
    support need no special casing. Density cells are lumped at their centres.
    """
    n = resolution or settings.grid
    if n < 2:
        raise ValueError(f"resolution must be >= 2, got {n}")
    cx, cy = bump.center
    rho = bump.radius
    h = 2.0 * rho / n
    edges_x = cx - rho + h * np.arange(n + 1)
    edges_y = cy - rho + h * np.arange(n + 1)
    mids_x = 0.5 * (edges_x[:-1] + edges_x[1:])
    mids_y = 0.5 * (edges_y[:-1] + edges_y[1:])
    mx, my = np.meshgrid(mids_x, mids_y)
    lap = bump.laplacian(np.stack([mx, my], axis=-1))

    positions, weights = mu.point_masses()
    ex, ey = np.meshgrid(edges_x, edges_y)
    cell_avg = np.zeros((n, n))
    for (ax, ay), w in zip(positions, weights):
        prim = _log_primitive(ex - ax, ey - ay)
        # inclusion-exclusion over the corners of each cell
        integral = prim[1:, 1:] - prim[1:, :-1] - prim[:-1, 1:] + prim[:-1, :-1]
        cell_avg += w * integral / (h * h)
    potential = -INV_2PI * cell_avg
    lhs = float(np.sum(potential * lap) * h * h)
    rhs = float(np.dot(weights, bump.value(positions))) if weights.size else 0.0
    log.debug("weak residual: lhs=%.6g rhs=%.6g", lhs, rhs)
    return abs(lhs + rhs) / bump.sup


__all__ = [
    "Bump",
    "DEFAULT_SETTINGS",
    "HarmonicResidualReport",
    "PotentialField",
    "QuadratureSettings",
    "cell_kernel_gradient",
    "cell_log_integral",
    "chart_gradient_norm",
    "circle_average",
    "disk_gradient_norm",
    "eval_gradient",
    "eval_potential",
    "exp_integrability",
    "harmonic_residual_report",
    "linear_counterexample_norm",
    "moser_trudinger_functional",
    "polar_integral",
    "radial_rule",
    "scaling_functional",
    "tabulate_potential",
    "weak_residual",
]
