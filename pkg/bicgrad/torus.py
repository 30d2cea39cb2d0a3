from __future__ import annotations

import csv
import logging
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from bicgrad.errors import ResolutionWarning
from bicgrad.measure import SignedMeasure, total_variation

log = logging.getLogger(__name__)

_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Lattice:
    """Flat torus C / {1, a + b i}, stored in the normalized form.

    Computations use the similar lattice spanned by v = (ρ, 0) and
    w = (cos θ, sin θ), whose short generator has length 1 and whose
    fundamental domain has area b.
    """

    a: float
    b: float

    def __post_init__(self) -> None:
        if not self.is_normalized():
            raise ValueError(
                f"lattice (a={self.a}, b={self.b}) is not normalized; use normalize_lattice"
            )

    @property
    def rho(self) -> float:
        return math.hypot(self.a, self.b)

    @property
    def theta(self) -> float:
        return math.acos(self.a / self.rho)

    @property
    def v(self) -> np.ndarray:
        return np.array([self.rho, 0.0])

    @property
    def w(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])

    @property
    def area(self) -> float:
        return self.rho * math.sin(self.theta)

    @property
    def basis(self) -> np.ndarray:
        """Columns v and w."""
        return np.column_stack([self.v, self.w])

    @property
    def reciprocal(self) -> np.ndarray:
        """Columns g1, g2 with g_i · v_j = 2π δ_ij."""
        return 2.0 * math.pi * np.linalg.inv(self.basis).T

    @property
    def chart_radius(self) -> float:
        return min(math.sqrt(3.0) / 4.0, self.b / 4.0)

    @property
    def injectivity_radius(self) -> float:
        """Half the shortest nonzero lattice vector; 1/2 for normalized lattices."""
        return 0.5 * min(self.rho, 1.0, float(np.linalg.norm(self.v - self.w)))

    def to_lattice_coords(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(pts, dtype=float) @ np.linalg.inv(self.basis).T

    def from_lattice_coords(self, s: np.ndarray) -> np.ndarray:
        return np.asarray(s, dtype=float) @ self.basis.T

    def is_normalized(self) -> bool:
        r2 = self.a * self.a + self.b * self.b
        if not (-0.5 < self.a <= 0.5 and self.b > 0 and r2 >= 1.0 - _UNIT_TOL):
            return False
        if abs(r2 - 1.0) <= _UNIT_TOL and self.a < 0:
            return False
        return True


def normalize_lattice(a: float, b: float) -> Lattice:
    """Reduce τ = a + b i to -1/2 < a <= 1/2, |τ| >= 1 (a >= 0 when |τ| = 1), b > 0."""
    if b == 0 or not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError(f"degenerate lattice (a={a}, b={b})")
    if b < 0:
        # {1, τ} and {1, -τ} span the same lattice
        a, b = -a, -b
    for _ in range(200):
        a = a - math.ceil(a - 0.5)
        r2 = a * a + b * b
        if r2 < 1.0 - _UNIT_TOL:
            a, b = -a / r2, b / r2
            continue
        if abs(r2 - 1.0) <= _UNIT_TOL and a < 0:
            a = -a
        return Lattice(a=a, b=b)
    raise ValueError(f"lattice reduction did not converge for (a={a}, b={b})")


def torus_distance(
    L: Lattice, x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray
) -> float | np.ndarray:
    """Flat distance on the torus, min over translates y + i v + j w with |i|, |j| <= 3."""
    return _translate_min(L, x, y, 3)


def _translate_min(L: Lattice, x, y, reach: int) -> float | np.ndarray:
    d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    s = L.to_lattice_coords(d)
    s = s - np.round(s)
    best = np.full(s.shape[:-1], np.inf)
    basis = L.basis
    for i in range(-reach, reach + 1):
        for j in range(-reach, reach + 1):
            shifted = (s + np.array([i, j])) @ basis.T
            best = np.minimum(best, np.hypot(shifted[..., 0], shifted[..., 1]))
    return float(best) if best.ndim == 0 else best


@dataclass(frozen=True, eq=False)
class TorusSolution:
    """Zero-mean spectral solution of -Δu = μ (μ mollified) on the torus.

    Arrays are indexed [p, q] with node x_pq = (p/n1) v + (q/n2) w.
    """

    lattice: Lattice
    mu: SignedMeasure
    n1: int
    n2: int
    sigma: float
    u: np.ndarray
    grad: np.ndarray
    u_hat: np.ndarray
    density_hat: np.ndarray

    @property
    def cell_area(self) -> float:
        return self.lattice.area / (self.n1 * self.n2)

    @property
    def h(self) -> float:
        return math.sqrt(self.cell_area)

    def nodes(self) -> np.ndarray:
        p = np.arange(self.n1) / self.n1
        q = np.arange(self.n2) / self.n2
        sp, sq = np.meshgrid(p, q, indexing="ij")
        return self.lattice.from_lattice_coords(np.stack([sp, sq], axis=-1))

    def wavevectors(self) -> np.ndarray:
        return _wavevectors(self.lattice, self.n1, self.n2)

    def gradient_norm(self) -> np.ndarray:
        return np.hypot(self.grad[..., 0], self.grad[..., 1])

    def write_csv(self, path: Path) -> None:
        """Rows `x, y, u, ux, uy` over all nodes."""
        nodes = self.nodes().reshape(-1, 2)
        u = self.u.reshape(-1)
        g = self.grad.reshape(-1, 2)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y", "u", "ux", "uy"])
            for k in range(nodes.shape[0]):
                writer.writerow(
                    [repr(float(v)) for v in (nodes[k, 0], nodes[k, 1], u[k], g[k, 0], g[k, 1])]
                )


def _wavevectors(L: Lattice, n1: int, n2: int) -> np.ndarray:
    m1 = np.fft.fftfreq(n1, d=1.0 / n1)
    m2 = np.fft.fftfreq(n2, d=1.0 / n2)
    M1, M2 = np.meshgrid(m1, m2, indexing="ij")
    G = L.reciprocal
    kx = M1 * G[0, 0] + M2 * G[0, 1]
    ky = M1 * G[1, 0] + M2 * G[1, 1]
    return np.stack([kx, ky], axis=-1)


def grid_shape(L: Lattice, N: int) -> tuple[int, int]:
    """Nodes along v and along w; v is refined so cells stay close to square."""
    extra = max(0, math.ceil(math.log2(L.rho) - 1e-12))
    return N * 2**extra, N


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


def solve_poisson(
    L: Lattice, mu: SignedMeasure, N: int, sigma_cells: float = 3.0
) -> TorusSolution:
    """Spectral solve of -Δu = μ_σ on the torus, gauge ∫u = 0.

    Atoms enter through their exact characters e^{-i k·x_j}, damped by the
    Gaussian mollifier e^{-σ²|k|²/2} with σ = `sigma_cells` grid cells.
    Density cells are lumped at their centres.
    """
    if not _is_power_of_two(N):
        raise ValueError(f"grid size must be a power of two, got {N}")
    positions, weights = mu.point_masses()
    tv = total_variation(mu)
    mass = float(weights.sum()) if weights.size else 0.0
    if abs(mass) > 1e-12 * max(1.0, tv):
        raise ValueError(
            f"total mass must be 0 on a closed flat torus, got {mass:.6g}"
        )
    n1, n2 = grid_shape(L, N)
    cell_area = L.area / (n1 * n2)
    sigma = sigma_cells * math.sqrt(cell_area)
    k = _wavevectors(L, n1, n2)
    k2 = k[..., 0] ** 2 + k[..., 1] ** 2

    rho_hat = np.zeros((n1, n2), dtype=complex)
    for (px, py), wt in zip(positions, weights):
        rho_hat += wt * np.exp(-1j * (k[..., 0] * px + k[..., 1] * py))
    rho_hat *= np.exp(-0.5 * sigma**2 * k2) / L.area
    rho_hat[0, 0] = 0.0

    safe = np.where(k2 > 0, k2, 1.0)
    u_hat = np.where(k2 > 0, rho_hat / safe, 0.0)
    scale = n1 * n2
    u = np.real(np.fft.ifft2(u_hat)) * scale
    ux = np.real(np.fft.ifft2(1j * k[..., 0] * u_hat)) * scale
    uy = np.real(np.fft.ifft2(1j * k[..., 1] * u_hat)) * scale
    log.debug("torus solve: lattice=(%g, %g) grid=%dx%d sigma=%g", L.a, L.b, n1, n2, sigma)
    grad = np.stack([ux, uy], axis=-1)
    for arr in (u, grad, u_hat, rho_hat):
        arr.setflags(write=False)
    return TorusSolution(
        lattice=L,
        mu=mu,
        n1=n1,
        n2=n2,
        sigma=sigma,
        u=u,
        grad=grad,
        u_hat=u_hat,
        density_hat=rho_hat,
    )


def mollified_density(sol: TorusSolution) -> np.ndarray:
    """μ_σ sampled at the nodes (zero mean)."""
    return np.real(np.fft.ifft2(sol.density_hat)) * (sol.n1 * sol.n2)


def laplacian_residual(sol: TorusSolution, band: float = 0.5) -> float:
    """Relative mismatch of -Δu against μ_σ over modes with |k| <= band * k_max.

    -Δu is recomputed from the sampled u, so this checks the whole solve
    round trip rather than the formula used to build it.
    """
    if not (0.0 < band <= 1.0):
        raise ValueError(f"band must lie in (0, 1], got {band}")
    k = sol.wavevectors()
    kk = np.hypot(k[..., 0], k[..., 1])
    resolved = kk <= band * kk.max()
    u_hat = np.fft.fft2(sol.u) / (sol.n1 * sol.n2)
    lap = kk**2 * u_hat
    target = sol.density_hat
    denom = float(np.max(np.abs(target[resolved]))) if np.any(resolved) else 0.0
    if denom == 0.0:
        return float(np.max(np.abs(lap[resolved]))) if np.any(resolved) else 0.0
    return float(np.max(np.abs(lap[resolved] - target[resolved])) / denom)


def _ball_mask(sol: TorusSolution, x0: Sequence[float], r: float) -> np.ndarray:
    return np.asarray(torus_distance(sol.lattice, sol.nodes(), x0)) <= r


def _lift_multiplicity(sol: TorusSolution, x0: Sequence[float], r: float) -> np.ndarray:
    """Number of lifts of each node inside the Euclidean disk D_r(x0) of the cover."""
    L = sol.lattice
    inv_norm = float(np.linalg.norm(np.linalg.inv(L.basis), 2))
    reach = int(math.ceil(r * inv_norm)) + 1
    d = sol.nodes() - np.asarray(x0, dtype=float)
    s = L.to_lattice_coords(d)
    s = s - np.round(s)
    count = np.zeros(s.shape[:-1], dtype=int)
    for i in range(-reach, reach + 1):
        for j in range(-reach, reach + 1):
            shifted = (s + np.array([i, j])) @ L.basis.T
            count += np.hypot(shifted[..., 0], shifted[..., 1]) <= r
    return count


def _check_resolution(sol: TorusSolution, r: float) -> None:
    if r <= 0:
        raise ValueError(f"radius must be positive, got {r}")
    if r < 5.0 * sol.h:
        warnings.warn(
            f"radius {r:g} is below 5 grid cells (h={sol.h:g})",
            ResolutionWarning,
            stacklevel=3,
        )
    elif r < 10.0 * sol.sigma:
        warnings.warn(
            f"radius {r:g} is below 10 mollifier widths (sigma={sol.sigma:g})",
            ResolutionWarning,
            stacklevel=3,
        )


def _ball_weight(
    sol: TorusSolution, x0: Sequence[float], r: float, lifted: bool | None
) -> np.ndarray:
    if lifted is None:
        lifted = r > sol.lattice.injectivity_radius
    if lifted:
        return _lift_multiplicity(sol, x0, r).astype(float)
    return _ball_mask(sol, x0, r).astype(float)


def ball_gradient_integral(
    sol: TorusSolution,
    x0: Sequence[float],
    r: float,
    p: float,
    *,
    lifted: bool | None = None,
) -> float:
    """∫_{B_r(x0)} |∇u|^p over the torus ball.

    Above the injectivity radius (or with `lifted=True`) the integral runs over
    the Euclidean disk D_r(x0) in the universal cover, each node counted once
    per lift inside the disk. `lifted=False` forces the plain torus ball.
    """
    if not (1.0 <= p < 2.0):
        raise ValueError(f"p must lie in [1, 2), got {p}")
    _check_resolution(sol, r)
    weight = _ball_weight(sol, x0, r, lifted)
    return float(np.sum(weight * sol.gradient_norm() ** p) * sol.cell_area)


def ball_area(
    sol: TorusSolution, x0: Sequence[float], r: float, *, lifted: bool | None = False
) -> float:
    """Area of the torus ball, or of its lift with `lifted=True` / `None`."""
    _check_resolution(sol, r)
    return float(np.sum(_ball_weight(sol, x0, r, lifted)) * sol.cell_area)


def dipole(position: Sequence[float], offset: Sequence[float] = (0.5, 0.0)) -> SignedMeasure:
    """δ_p - δ_{p + offset} on the torus."""
    px, py = float(position[0]), float(position[1])
    return SignedMeasure.from_atoms(
        [(px, py, 1.0), (px + offset[0], py + offset[1], -1.0)], domain="torus"
    )


def normalized_gradient(
    sol: TorusSolution, x0: Sequence[float], r: float, p: float
) -> float:
    """r^{(p-2)/p} ‖∇u‖_{L^p(B_r)} / (πr²/Area(B_r))^{(p-1)/p} / tv(μ).

    Above the injectivity radius both the norm and the area are taken over the
    lifted disk.
    """
    tv = total_variation(sol.mu)
    if tv == 0:
        return 0.0
    norm = ball_gradient_integral(sol, x0, r, p) ** (1.0 / p)
    area = ball_area(sol, x0, r, lifted=None)
    area_factor = (math.pi * r * r / area) ** ((p - 1.0) / p) if area > 0 else math.inf
    return r ** ((p - 2.0) / p) * norm / area_factor / tv


@dataclass(frozen=True)
class FamilyPoint:
    b: float
    r: float
    value: float


@dataclass(frozen=True)
class FamilyReport:
    p: float
    points: tuple[FamilyPoint, ...]
    spread_bound: float

    @property
    def max_value(self) -> float:
        return max(pt.value for pt in self.points)

    @property
    def min_value(self) -> float:
        return min(pt.value for pt in self.points)

    @property
    def spread(self) -> float:
        lo = self.min_value
        return math.inf if lo <= 0 else self.max_value / lo

    def max_by_b(self) -> dict[float, float]:
        out: dict[float, float] = {}
        for pt in self.points:
            out[pt.b] = max(out.get(pt.b, -math.inf), pt.value)
        return out

    @property
    def passed(self) -> bool | None:
        if not self.points:
            return None
        return self.spread <= self.spread_bound


def degenerate_family_audit(
    b_values: Sequence[float],
    p: float,
    *,
    radii: Sequence[float] = (0.2, 0.5, 1.0, 3.0),
    N: int = 256,
    position: Sequence[float] = (0.25, 0.5),
    spread_bound: float = 10.0,
) -> FamilyReport:
    """Normalized L^p gradient of a dipole potential across the lattices (0, b).

    The ball centre sits on the positive atom. Bounded spread across b and r is
    the checked property.
    """
    points: list[FamilyPoint] = []
    for b in b_values:
        if b < 1:
            raise ValueError(f"family lattices need b >= 1, got {b}")
        L = normalize_lattice(0.0, float(b))
        sol = solve_poisson(L, dipole(position), N)
        for r in radii:
            value = normalized_gradient(sol, position, r, p)
            log.debug("family b=%g r=%g p=%g -> %.6g", b, r, p, value)
            points.append(FamilyPoint(b=float(b), r=float(r), value=value))
    return FamilyReport(p=p, points=tuple(points), spread_bound=spread_bound)


__all__ = [
    "FamilyPoint",
    "FamilyReport",
    "Lattice",
    "TorusSolution",
    "ball_area",
    "ball_gradient_integral",
    "degenerate_family_audit",
    "dipole",
    "grid_shape",
    "laplacian_residual",
    "mollified_density",
    "normalize_lattice",
    "normalized_gradient",
    "solve_poisson",
    "torus_distance",
]
