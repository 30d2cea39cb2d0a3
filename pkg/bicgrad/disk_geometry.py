from __future__ import annotations

import csv
import logging
import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.csgraph import dijkstra

from bicgrad.errors import ResolutionWarning
from bicgrad.measure import Rectangle, SignedMeasure, jordan_decompose, total_variation
from bicgrad.potential import DEFAULT_SETTINGS, QuadratureSettings, tabulate_potential

log = logging.getLogger(__name__)

# (dj, di) half of the 32-neighbour stencil: king, knight, (1, 3) and (2, 3) moves.
# Largest angular gap is atan(1/3), so flat distances are overestimated by at
# most 1/cos(atan(1/3)/2) ~ 1.0131.
STENCIL = (
    (0, 1), (1, -1), (1, 0), (1, 1),
    (1, -2), (1, 2), (2, -1), (2, 1),
    (1, -3), (1, 3), (3, -1), (3, 1),
    (2, -3), (2, 3), (3, -2), (3, 2),
)

FieldDomain = Literal["rectangle", "disk"]


@dataclass(frozen=True, eq=False)
class ConformalField:
    """Node samples of u for the metric g = e^{2u} g_euc.

    Node (j, i) sits at `origin + (i*h, j*h)`. With `domain="disk"` only nodes
    inside the disk inscribed in the node rectangle take part.
    """

    u: np.ndarray
    h: float
    origin: tuple[float, float] = (0.0, 0.0)
    domain: FieldDomain = "rectangle"
    base: Literal["euclidean"] = "euclidean"

    def __post_init__(self) -> None:
        u = np.array(self.u, dtype=float)
        if u.ndim != 2 or min(u.shape) < 2:
            raise ValueError(f"u must be a 2-D grid with at least 2 nodes per side, got {u.shape}")
        if self.h <= 0:
            raise ValueError(f"grid spacing must be positive, got {self.h}")
        if not np.all(np.isfinite(u)):
            raise ValueError("u must be finite at every node")
        if not np.all(np.isfinite(np.exp(2.0 * u))) or np.any(np.exp(2.0 * u) <= 0):
            raise ValueError("e^{2u} must be positive and finite at every node")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_function(
        cls,
        f: Callable[[np.ndarray], np.ndarray],
        bounds: Rectangle,
        n: int,
        domain: FieldDomain = "rectangle",
    ) -> ConformalField:
        """Sample u = f on n nodes along the longer side of `bounds`."""
        h = max(bounds.xmax - bounds.xmin, bounds.ymax - bounds.ymin) / (n - 1)
        nx = int(round((bounds.xmax - bounds.xmin) / h)) + 1
        ny = int(round((bounds.ymax - bounds.ymin) / h)) + 1
        xs = bounds.xmin + h * np.arange(nx)
        ys = bounds.ymin + h * np.arange(ny)
        gx, gy = np.meshgrid(xs, ys)
        u = np.asarray(f(np.stack([gx, gy], axis=-1)), dtype=float)
        return cls(u=u, h=h, origin=(bounds.xmin, bounds.ymin), domain=domain)

    @classmethod
    def constant(
        cls, c: float, bounds: Rectangle, n: int, domain: FieldDomain = "rectangle"
    ) -> ConformalField:
        return cls.from_function(
            lambda pts: np.full(pts.shape[:-1], float(c)), bounds, n, domain
        )

    @classmethod
    def from_measure(
        cls,
        mu: SignedMeasure,
        bounds: Rectangle,
        n: int,
        domain: FieldDomain = "rectangle",
        settings: QuadratureSettings = DEFAULT_SETTINGS,
    ) -> ConformalField:
        """u = I_μ on a square node grid, so that the curvature measure is μ."""
        if not math.isclose(bounds.xmax - bounds.xmin, bounds.ymax - bounds.ymin):
            raise ValueError("from_measure needs square bounds")
        field_ = tabulate_potential(mu, bounds, n, settings)
        assert field_.values is not None
        h = (bounds.xmax - bounds.xmin) / (n - 1)
        return cls(
            u=np.array(field_.values), h=h, origin=(bounds.xmin, bounds.ymin), domain=domain
        )

    # -- geometry ----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.u.shape  # type: ignore[return-value]

    def nodes(self) -> np.ndarray:
        ny, nx = self.shape
        gx, gy = np.meshgrid(
            self.origin[0] + self.h * np.arange(nx), self.origin[1] + self.h * np.arange(ny)
        )
        return np.stack([gx, gy], axis=-1)

    @property
    def bounds(self) -> Rectangle:
        ny, nx = self.shape
        x0, y0 = self.origin
        return Rectangle(x0, x0 + (nx - 1) * self.h, y0, y0 + (ny - 1) * self.h)

    @cached_property
    def active(self) -> np.ndarray:
        ny, nx = self.shape
        if self.domain == "rectangle":
            return np.ones((ny, nx), dtype=bool)
        b = self.bounds
        cx, cy = 0.5 * (b.xmin + b.xmax), 0.5 * (b.ymin + b.ymax)
        radius = 0.5 * min(b.xmax - b.xmin, b.ymax - b.ymin)
        pts = self.nodes()
        d = np.hypot(pts[..., 0] - cx, pts[..., 1] - cy)
        return d <= radius * (1.0 + 1e-12)

    @cached_property
    def boundary(self) -> np.ndarray:
        """Active nodes on the grid rim or next to an inactive node."""
        act = self.active
        padded = np.pad(act, 1, constant_values=False)
        interior = (
            padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
        )
        return act & ~interior

    def contains(self, point: Sequence[float]) -> bool:
        b = self.bounds
        x, y = float(point[0]), float(point[1])
        eps = 1e-12 * max(1.0, abs(b.xmax), abs(b.ymax), abs(b.xmin), abs(b.ymin))
        if not (b.xmin - eps <= x <= b.xmax + eps and b.ymin - eps <= y <= b.ymax + eps):
            return False
        if self.domain == "disk":
            cx, cy = 0.5 * (b.xmin + b.xmax), 0.5 * (b.ymin + b.ymax)
            radius = 0.5 * min(b.xmax - b.xmin, b.ymax - b.ymin)
            return math.hypot(x - cx, y - cy) <= radius * (1.0 + 1e-12)
        return True

    def snap(self, point: Sequence[float]) -> tuple[int, int]:
        """Nearest active node (j, i); ValueError when the point is outside the domain."""
        if not self.contains(point):
            raise ValueError(f"point {tuple(point)} lies outside the field domain")
        ny, nx = self.shape
        i = int(round((float(point[0]) - self.origin[0]) / self.h))
        j = int(round((float(point[1]) - self.origin[1]) / self.h))
        i, j = min(max(i, 0), nx - 1), min(max(j, 0), ny - 1)
        if not self.active[j, i]:
            pts = self.nodes()
            d = np.hypot(pts[..., 0] - point[0], pts[..., 1] - point[1])
            d = np.where(self.active, d, np.inf)
            j, i = np.unravel_index(int(np.argmin(d)), d.shape)
        return int(j), int(i)

    @cached_property
    def graph(self) -> csr_matrix:
        """Undirected grid graph; edge weight = Euclidean length x mean of e^u."""
        ny, nx = self.shape
        eu = np.exp(self.u)
        act = self.active
        index = np.arange(ny * nx).reshape(ny, nx)
        rows: list[np.ndarray] = []
        cols: list[np.ndarray] = []
        wts: list[np.ndarray] = []
        for dj, di in STENCIL:
            j0, j1 = 0, ny - dj
            i0, i1 = max(0, -di), nx - max(0, di)
            if j1 <= j0 or i1 <= i0:
                continue
            a = (slice(j0, j1), slice(i0, i1))
            b = (slice(j0 + dj, j1 + dj), slice(i0 + di, i1 + di))
            ok = act[a] & act[b]
            length = self.h * math.hypot(dj, di)
            rows.append(index[a][ok])
            cols.append(index[b][ok])
            wts.append(length * 0.5 * (eu[a][ok] + eu[b][ok]))
        n = ny * nx
        g = coo_matrix(
            (np.concatenate(wts), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n, n),
        ).tocsr()
        log.debug("conformal graph: %d nodes, %d edges", n, g.nnz)
        return g

    def distances_from(self, point: Sequence[float], limit: float = np.inf) -> np.ndarray:
        j, i = self.snap(point)
        nx = self.shape[1]
        d = dijkstra(self.graph, directed=False, indices=j * nx + i, limit=limit)
        return np.asarray(d).reshape(self.shape)

    # -- CSV grids ---------------------------------------------------------

    def write_csv(self, path: Path) -> None:
        ny, nx = self.shape
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["nx", "ny", "h", "x0", "y0"])
            writer.writerow([nx, ny, repr(self.h), repr(self.origin[0]), repr(self.origin[1])])
            for row in self.u:
                writer.writerow([repr(float(v)) for v in row])

    @classmethod
    def read_csv(cls, path: Path, domain: FieldDomain = "rectangle") -> ConformalField:
        """Read `nx, ny, h[, x0, y0]` then ny rows of nx values.

        Without x0, y0 the grid is centred at the origin.
        """
        if not path.exists():
            raise FileNotFoundError(f"field file not found at {path}")
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r]
        if len(rows) < 2:
            raise ValueError(f"{path}: missing header")
        header = [c.strip() for c in rows[0]]
        if header[:3] != ["nx", "ny", "h"]:
            raise ValueError(f"{path}: header must start with nx, ny, h")
        meta = rows[1]
        nx, ny, h = int(meta[0]), int(meta[1]), float(meta[2])
        if len(meta) >= 5:
            origin = (float(meta[3]), float(meta[4]))
        else:
            origin = (-0.5 * (nx - 1) * h, -0.5 * (ny - 1) * h)
        values = [float(v) for r in rows[2:] for v in r]
        if len(values) != nx * ny:
            raise ValueError(f"{path}: expected {nx * ny} values, got {len(values)}")
        return cls(
            u=np.array(values).reshape(ny, nx), h=h, origin=origin, domain=domain
        )


@dataclass(frozen=True)
class BallReport:
    center: tuple[float, float]
    radius: float
    area: float
    clipped: bool

    @property
    def ratio(self) -> float | None:
        if self.clipped:
            return None
        return self.area / (math.pi * self.radius**2)


def conformal_distance(f: ConformalField, x: Sequence[float], y: Sequence[float]) -> float:
    """Grid-graph length distance between the nodes nearest to x and y."""
    j, i = f.snap(y)
    d = f.distances_from(x)
    return float(d[j, i])


def geodesic_ball(f: ConformalField, x: Sequence[float], r: float) -> BallReport:
    if r <= 0:
        raise ValueError(f"radius must be positive, got {r}")
    d = f.distances_from(x, limit=r)
    inside = d <= r
    area = float(np.sum(np.exp(2.0 * f.u)[inside]) * f.h * f.h)
    clipped = bool(np.any(inside & f.boundary))
    j, i = f.snap(x)
    node = f.nodes()[j, i]
    return BallReport(
        center=(float(node[0]), float(node[1])), radius=float(r), area=area, clipped=clipped
    )


# ---------------------------------------------------------------------------
# the metric e^{2x¹} and the region Ω(R) = {r < T(θ)}


def blowup_T(theta: float | np.ndarray, R: float) -> float | np.ndarray:
    """T(θ) = log(1 + R cos θ)/cos θ, the solution of e^{T cos θ} = 1 + R cos θ."""
    if R <= 0:
        raise ValueError(f"R must be positive, got {R}")
    th = np.asarray(theta, dtype=float)
    c = np.cos(th)
    if np.any(np.abs(th) >= 0.5 * math.pi) or np.any(c <= 0):
        raise ValueError("theta must lie in (-π/2, π/2)")
    value = np.log1p(R * c) / c
    return float(value) if value.ndim == 0 else value


@dataclass(frozen=True)
class BlowupArea:
    R: float
    a: float
    closed: float
    quadrature: float
    leading: float

    @property
    def ratio(self) -> float:
        return self.closed / (math.pi * self.R**2)

    @property
    def relative_gap(self) -> float:
        return abs(self.closed - self.quadrature) / abs(self.closed)

    @property
    def remainder(self) -> float:
        """(closed - leading) / (R log R)."""
        return (self.closed - self.leading) / (self.R * math.log(self.R))


def _theta_nodes(a: float, samples: int) -> tuple[np.ndarray, float]:
    if not (0.0 < a < 0.5 * math.pi):
        raise ValueError(f"sector cutoff a must lie in (0, π/2), got {a}")
    lo, hi = -0.5 * math.pi + a, 0.5 * math.pi - a
    dtheta = (hi - lo) / samples
    return lo + dtheta * (np.arange(samples) + 0.5), dtheta


def blowup_area(
    R: float, a: float, samples: int = 4096, radial: int = 4096, chunk: int = 256
) -> BlowupArea:
    """Area of Ω(R) for e^{2x¹}, by the exact radial antiderivative and by 2-D quadrature."""
    if R <= 0:
        raise ValueError(f"R must be positive, got {R}")
    theta, dtheta = _theta_nodes(a, samples)
    c = np.cos(theta)
    T = np.asarray(blowup_T(theta, R))
    grow = (R * c + 1.0) ** 2
    closed = float(np.sum(grow * T / (2.0 * c) - (grow - 1.0) / (4.0 * c * c)) * dtheta)
    leading = float(R * R * np.sum(0.5 * np.log1p(R * c) - 0.25) * dtheta)

    frac = (np.arange(radial) + 0.5) / radial
    quad = 0.0
    for start in range(0, samples, chunk):
        cc = c[start : start + chunk, None]
        tt = T[start : start + chunk, None]
        r = tt * frac[None, :]
        quad += float(np.sum(np.exp(2.0 * r * cc) * r * (tt / radial)))
    quad *= dtheta
    log.debug("blowup R=%g: closed=%.10g quadrature=%.10g", R, closed, quad)
    return BlowupArea(R=R, a=a, closed=closed, quadrature=quad, leading=leading)


def blowup_remainder(R: float, a: float, samples: int = 4096) -> float:
    return blowup_area(R, a, samples=samples, radial=8).remainder


def blowup_field(bounds: Rectangle, n: int) -> ConformalField:
    """u = x¹ sampled exactly at the nodes."""
    return ConformalField.from_function(lambda pts: pts[..., 0], bounds, n)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AreaAuditReport:
    bound: float
    worst_ratio: float | None
    checked: int
    clipped: int
    balls: tuple[BallReport, ...]
    margin: float

    @property
    def passed(self) -> bool | None:
        if self.worst_ratio is None:
            return None
        return self.worst_ratio <= self.bound + self.margin


def area_bound_audit(
    f: ConformalField,
    curvature: SignedMeasure,
    samples: Sequence[tuple[Sequence[float], float]],
    margin: float = 0.05,
) -> AreaAuditReport:
    """Check Area(B_r(x))/πr² <= 1 + tv(𝕂⁻)/2π (+ margin) on every unclipped sample."""
    _, negative = jordan_decompose(curvature)
    bound = 1.0 + total_variation(negative) / (2.0 * math.pi)
    balls: list[BallReport] = []
    for x, r in samples:
        if r < 20.0 * f.h:
            warnings.warn(
                f"ball radius {r:g} is below 20 grid cells (h={f.h:g})",
                ResolutionWarning,
                stacklevel=2,
            )
        balls.append(geodesic_ball(f, x, r))
    ratios = [b.ratio for b in balls if b.ratio is not None]
    worst = max(ratios) if ratios else None
    return AreaAuditReport(
        bound=bound,
        worst_ratio=worst,
        checked=len(ratios),
        clipped=len(balls) - len(ratios),
        balls=tuple(balls),
        margin=margin,
    )


__all__ = [
    "AreaAuditReport",
    "BallReport",
    "BlowupArea",
    "ConformalField",
    "STENCIL",
    "area_bound_audit",
    "blowup_T",
    "blowup_area",
    "blowup_field",
    "blowup_remainder",
    "conformal_distance",
    "geodesic_ball",
]
