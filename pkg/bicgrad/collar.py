from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import trapezoid

log = logging.getLogger(__name__)

MAX_COLLAR_LENGTH = 2.0 * math.asinh(1.0)
# cos λt2 / cos λt1 stays inside (1/C0, C0) on admissible pairs
RATIO_CONSTANT = math.e**2


@dataclass(frozen=True)
class CollarParams:
    """Standard collar around a closed geodesic of length ell (curvature -1).

    Cylinder model: (-T, T) x S¹ with metric (λ / cos λt)² (dt² + dθ²).
    """

    ell: float
    w: float
    T: float
    lam: float


@dataclass(frozen=True)
class TopologyData:
    genus: int

    def __post_init__(self) -> None:
        if self.genus < 2:
            raise ValueError(f"hyperbolic surfaces need genus >= 2, got {self.genus}")

    @property
    def chi(self) -> int:
        return 2 - 2 * self.genus

    @property
    def area(self) -> float:
        return 2.0 * math.pi * abs(self.chi)


def collar_from_length(ell: float) -> CollarParams:
    if not (0.0 < ell < MAX_COLLAR_LENGTH):
        raise ValueError(f"collar length must lie in (0, 2 arcsinh 1), got {ell}")
    w = math.asinh(1.0 / math.sinh(0.5 * ell))
    lam = ell / (2.0 * math.pi)
    T = 4.0 * math.pi * math.atan(math.exp(w)) / ell - math.pi**2 / ell
    return CollarParams(ell=ell, w=w, T=T, lam=lam)


def fermi_to_cylinder(params: CollarParams, rho: float | np.ndarray) -> float | np.ndarray:
    """t = 4π arctan(e^ρ)/ℓ - π²/ℓ for |ρ| < w."""
    r = np.asarray(rho, dtype=float)
    if np.any(np.abs(r) >= params.w):
        raise ValueError(f"Fermi coordinate must satisfy |ρ| < w = {params.w:.6g}")
    t = 4.0 * math.pi * np.arctan(np.exp(r)) / params.ell - math.pi**2 / params.ell
    return float(t) if t.ndim == 0 else t


def cylinder_to_fermi(params: CollarParams, t: float | np.ndarray) -> float | np.ndarray:
    """Inverse of `fermi_to_cylinder`: ρ = arcsinh(tan λt)."""
    tt = np.asarray(t, dtype=float)
    if np.any(np.abs(tt) >= params.T):
        raise ValueError(f"cylinder coordinate must satisfy |t| < T = {params.T:.6g}")
    rho = np.arcsinh(np.tan(params.lam * tt))
    return float(rho) if rho.ndim == 0 else rho


def collar_conformal_factor(params: CollarParams, t: float | np.ndarray) -> float | np.ndarray:
    tt = np.asarray(t, dtype=float)
    if np.any(np.abs(tt) >= params.T):
        raise ValueError(f"cylinder coordinate must satisfy |t| < T = {params.T:.6g}")
    f = params.lam / np.cos(params.lam * tt)
    return float(f) if f.ndim == 0 else f


def _primitive(params: CollarParams, t: float) -> float:
    # ∫ λ / cos λs ds = log(sec λs + tan λs) = arcsinh(tan λs)
    return math.asinh(math.tan(params.lam * t))


def _inverse_primitive(params: CollarParams, y: float) -> float:
    return math.atan(math.sinh(y)) / params.lam


def collar_distance(params: CollarParams, t1: float, t2: float) -> float:
    """d_g({t1} x S¹, {t2} x S¹) for -T <= t1 <= t2 <= T."""
    if not (-params.T <= t1 <= t2 <= params.T):
        raise ValueError(
            f"need -T <= t1 <= t2 <= T with T = {params.T:.6g}, got ({t1}, {t2})"
        )
    return _primitive(params, t2) - _primitive(params, t1)


def collar_distance_closed_form(params: CollarParams, t: float) -> float:
    """d(t) = d_{T-t, T} written through λT and λ(T - t)."""
    if not (0.0 <= t < 2.0 * params.T):
        raise ValueError(f"t must lie in [0, 2T), got {t}")
    a = params.lam * params.T
    b = params.lam * (params.T - t)
    return math.log((1.0 + math.sin(a)) / (1.0 + math.sin(b))) - math.log(
        math.cos(a) / math.cos(b)
    )


def injectivity_radius_profile(params: CollarParams, t: float) -> float:
    """Injectivity radius at the points (T - t, θ), 0 <= t < 2T."""
    if not (0.0 <= t < 2.0 * params.T):
        raise ValueError(f"t must lie in [0, 2T), got {t}")
    d = collar_distance(params, params.T - t, params.T)
    # cosh(ℓ/2) cosh d - sinh d, without the cancellation
    s = math.exp(-d) + 2.0 * math.sinh(0.25 * params.ell) ** 2 * math.cosh(d)
    return math.asinh(s)


def injectivity_radius_at(params: CollarParams, t0: float) -> float:
    """Injectivity radius at the collar point (t0, θ), |t0| < T."""
    return injectivity_radius_profile(params, params.T - t0)


@dataclass(frozen=True)
class AsymptoticResiduals:
    """Differences between exact collar quantities and their small-ℓ forms."""

    ell: float
    t: float
    w: float
    T: float
    distance: float
    sinh_radius: float

    def as_dict(self) -> dict[str, float]:
        return {
            "w": self.w,
            "T": self.T,
            "distance": self.distance,
            "sinh_radius": self.sinh_radius,
        }


def asymptotic_residuals(params: CollarParams, t: float) -> AsymptoticResiduals:
    ell = params.ell
    d = collar_distance(params, params.T - t, params.T)
    sinh_r = math.sinh(injectivity_radius_profile(params, t))
    return AsymptoticResiduals(
        ell=ell,
        t=t,
        w=params.w - math.log(4.0 / ell),
        T=params.T - (math.pi**2 / ell - math.pi),
        distance=d - math.log((math.pi + t) / math.pi),
        sinh_radius=sinh_r - math.pi / (math.pi + t),
    )


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatioAuditReport:
    max_ratio: float
    min_ratio: float
    evaluated: int
    flagged: tuple[tuple[float, float], ...]
    bound: float = RATIO_CONSTANT

    @property
    def passed(self) -> bool | None:
        if self.evaluated == 0:
            return None
        return 1.0 / self.bound < self.min_ratio and self.max_ratio < self.bound


def is_admissible_pair(params: CollarParams, t1: float, t2: float) -> bool:
    edge = params.T - 1.0
    return abs(t1) < edge and abs(t2) < edge and abs(t2 - t1) < 2.0


def ratio_bound_audit(
    params: CollarParams, samples: Sequence[tuple[float, float]]
) -> RatioAuditReport:
    """cos λt2 / cos λt1 against (e^-2, e^2); inadmissible pairs are flagged, not evaluated."""
    flagged: list[tuple[float, float]] = []
    good: list[tuple[float, float]] = []
    for t1, t2 in samples:
        if is_admissible_pair(params, t1, t2):
            good.append((t1, t2))
        else:
            flagged.append((float(t1), float(t2)))
    if not good:
        return RatioAuditReport(
            max_ratio=math.nan, min_ratio=math.nan, evaluated=0, flagged=tuple(flagged)
        )
    arr = np.asarray(good)
    ratios = np.cos(params.lam * arr[:, 1]) / np.cos(params.lam * arr[:, 0])
    return RatioAuditReport(
        max_ratio=float(ratios.max()),
        min_ratio=float(ratios.min()),
        evaluated=len(good),
        flagged=tuple(flagged),
    )


def random_ratio_samples(
    params: CollarParams, n: int, rng: np.random.Generator
) -> list[tuple[float, float]]:
    """n admissible (t1, t2) pairs, drawn by rejection."""
    edge = params.T - 1.0
    if edge <= 0:
        raise ValueError(f"collar too short for admissible pairs (T = {params.T:.6g})")
    out: list[tuple[float, float]] = []
    while len(out) < n:
        t1 = rng.uniform(-edge, edge, size=2 * n)
        t2 = t1 + rng.uniform(-2.0, 2.0, size=2 * n)
        ok = (np.abs(t2) < edge) & (np.abs(t2 - t1) < 2.0) & (np.abs(t1) < edge)
        out.extend(zip(t1[ok].tolist(), t2[ok].tolist()))
    return out[:n]


def near_boundary_sample(params: CollarParams, eps: float = 1e-6) -> tuple[float, float]:
    """The steepest admissible pair: t2 just inside T - 1, t1 almost 2 below it."""
    t2 = params.T - 1.0 - eps
    return (t2 - 2.0 + eps, t2)


# ---------------------------------------------------------------------------
# hyperbolic balls, disk charts, counts


def hyperbolic_ball_area(r: float) -> float:
    """2π(cosh r - 1), written as 4π sinh²(r/2)."""
    if r < 0:
        raise ValueError(f"radius must be nonnegative, got {r}")
    return 4.0 * math.pi * math.sinh(0.5 * r) ** 2


def injectivity_radius_ceiling(topology: TopologyData) -> float:
    """Largest r with 2π(cosh r - 1) <= Area(Σ)."""
    return math.acosh(1.0 + abs(topology.chi))


def disk_chart_factor(r: float, x: Sequence[float] | np.ndarray) -> float | np.ndarray:
    """2 sinh(r/2) / (1 - sinh²(r/2)|x|²)."""
    pts = np.asarray(x, dtype=float)
    s = math.sinh(0.5 * r)
    denom = 1.0 - s * s * (pts[..., 0] ** 2 + pts[..., 1] ** 2)
    if np.any(denom <= 0):
        raise ValueError("disk chart factor is undefined where sinh²(r/2)|x|² >= 1")
    f = 2.0 * s / denom
    return float(f) if np.ndim(f) == 0 else f


def disk_chart_curvature(r: float, n: int = 201, extent: float = 0.5) -> float:
    """max |K + 1| of the chart metric on [-extent, extent]², K = -Δ log f / f².

    The Laplacian uses the fourth-order five-point formula along each axis.
    """
    if n < 5:
        raise ValueError(f"need at least 5 nodes per side, got {n}")
    xs = np.linspace(-extent, extent, n)
    h = xs[1] - xs[0]
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    f = np.asarray(disk_chart_factor(r, np.stack([gx, gy], axis=-1)))
    lf = np.log(f)
    core = (slice(2, -2), slice(2, -2))

    def d2(axis: int) -> np.ndarray:
        def shift(k: int) -> np.ndarray:
            return np.roll(lf, -k, axis=axis)[core]

        return (-shift(2) + 16.0 * shift(1) - 30.0 * lf[core] + 16.0 * shift(-1) - shift(-2)) / (
            12.0 * h * h
        )

    K = -(d2(0) + d2(1)) / f[core] ** 2
    return float(np.max(np.abs(K + 1.0)))


def disk_chart_radial_distance(r: float) -> float:
    """Chart distance from 0 to the unit circle: 2 artanh(sinh(r/2))."""
    s = math.sinh(0.5 * r)
    if s >= 1.0:
        raise ValueError(f"chart metric degenerates on the unit disk for r = {r}")
    return 2.0 * math.atanh(s)


def covering_count_bound(topology: TopologyData, a: float) -> int:
    """Area(Σ) / V_{a/10}, rounded up; V_s = 2π(cosh s - 1)."""
    if a <= 0:
        raise ValueError(f"a must be positive, got {a}")
    return math.ceil(abs(topology.chi) / (2.0 * math.sinh(a / 20.0) ** 2))


def collar_count_bound(topology: TopologyData) -> int:
    return 3 * topology.genus - 3


def thick_part_bound(topology: TopologyData, a: float, p: float) -> float:
    """Covering count times (a/2)^{2-p}, the per-unit-constant bound on the thick part."""
    if not (1.0 <= p < 2.0):
        raise ValueError(f"p must lie in [1, 2), got {p}")
    return covering_count_bound(topology, a) * (0.5 * a) ** (2.0 - p)


def global_gradient_factor(topology: TopologyData, inj: float, p: float) -> float:
    """|χ|^{1/p} / Inj, the geometric factor of the global L^p gradient bound."""
    if inj <= 0:
        raise ValueError(f"injectivity radius must be positive, got {inj}")
    if not (1.0 <= p < 2.0):
        raise ValueError(f"p must lie in [1, 2), got {p}")
    return abs(topology.chi) ** (1.0 / p) / inj


# ---------------------------------------------------------------------------
# potentials on the cylinder


@dataclass(frozen=True, eq=False)
class CylinderField:
    """Euclidean gradient of u sampled on t_nodes x theta (θ uniform on [0, 2π))."""

    t: np.ndarray
    theta: np.ndarray
    du_dt: np.ndarray
    du_dtheta: np.ndarray
    u: np.ndarray | None = None

    def __post_init__(self) -> None:
        shape = (self.t.size, self.theta.size)
        for name in ("du_dt", "du_dtheta"):
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} must have shape {shape}")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("t nodes must be strictly increasing")

    @classmethod
    def from_function(
        cls,
        t: np.ndarray,
        n_theta: int,
        grad: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]],
    ) -> CylinderField:
        theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
        tt, th = np.meshgrid(np.asarray(t, dtype=float), theta, indexing="ij")
        du_dt, du_dtheta = grad(tt, th)
        return cls(
            t=np.asarray(t, dtype=float),
            theta=theta,
            du_dt=np.broadcast_to(np.asarray(du_dt, dtype=float), tt.shape).copy(),
            du_dtheta=np.broadcast_to(np.asarray(du_dtheta, dtype=float), tt.shape).copy(),
        )

    @property
    def gradient_norm(self) -> np.ndarray:
        return np.hypot(self.du_dt, self.du_dtheta)


def strip_nodes(
    lo: float, hi: float, per_unit: int = 32, extra: Sequence[float] = ()
) -> np.ndarray:
    """Nodes on [lo, hi] hitting every integer, plus the `extra` points."""
    start, stop = math.ceil(lo), math.floor(hi)
    pieces = [np.array([lo, hi], dtype=float)]
    for i in range(start - 1, stop + 1):
        pieces.append(np.linspace(i, i + 1, per_unit + 1))
    nodes = np.concatenate(pieces + [np.asarray(extra, dtype=float)])
    nodes = nodes[(nodes >= lo) & (nodes <= hi)]
    return np.unique(nodes)


def _green_mode(n: int, t: np.ndarray, t0: float, L: float) -> tuple[np.ndarray, np.ndarray]:
    """Dirichlet Green's function of -d²/dt² + n² on [-L, L] and its t-derivative."""
    below = t <= t0
    if n == 0:
        lo = np.where(below, t, t0)
        hi = np.where(below, t0, t)
        g = (lo + L) * (L - hi) / (2.0 * L)
        dg = np.where(below, (L - t0) / (2.0 * L), -(t0 + L) / (2.0 * L))
        return g, dg
    A = n * (np.where(below, t, t0) + L)
    B = n * (L - np.where(below, t0, t))
    C = 2.0 * n * L
    base = np.exp(A + B - C) / (2.0 * (1.0 - np.exp(-2.0 * C)))
    ea, eb = np.exp(-2.0 * A), np.exp(-2.0 * B)
    g = base * (1.0 - ea) * (1.0 - eb) / n
    dg = np.where(below, base * (1.0 + ea) * (1.0 - eb), -base * (1.0 - ea) * (1.0 + eb))
    return g, dg


def solve_cylinder_potential(
    params: CollarParams,
    t0: float,
    theta0: float,
    weight: float = 1.0,
    *,
    t_nodes: np.ndarray | None = None,
    n_theta: int = 128,
    sigma: float | None = None,
) -> CylinderField:
    """-Δu = weight δ_{(t0, θ0)} on [-(T-1), T-1] x S¹, u = 0 at both ends.

    Separation in θ-Fourier modes; mode n is damped by e^{-σ²n²/2}
    (σ defaults to 3 angular cells).
    """
    L = params.T - 1.0
    if L <= 0:
        raise ValueError(f"collar too short for a cylinder solve (T = {params.T:.6g})")
    if not (-L < t0 < L):
        raise ValueError(f"source must satisfy |t0| < T - 1 = {L:.6g}")
    if n_theta < 4 or n_theta % 2:
        raise ValueError(f"n_theta must be an even number >= 4, got {n_theta}")
    if sigma is None:
        sigma = 3.0 * 2.0 * math.pi / n_theta
    t = strip_nodes(-L, L, extra=[t0]) if t_nodes is None else np.asarray(t_nodes, dtype=float)
    if np.any(np.abs(t) > L):
        raise ValueError("t nodes must lie in [-(T-1), T-1]")
    modes = n_theta // 2 + 1
    coef_u = np.zeros((t.size, modes), dtype=complex)
    coef_dt = np.zeros((t.size, modes), dtype=complex)
    for n in range(modes):
        g, dg = _green_mode(n, t, t0, L)
        damping = math.exp(-0.5 * (sigma * n) ** 2)
        c = (weight / (2.0 * math.pi)) * np.exp(-1j * n * theta0) * damping
        coef_u[:, n] = c * g
        coef_dt[:, n] = c * dg
    # the Nyquist mode carries both ±n/2 in the real transform
    coef_u[:, -1] *= 0.5
    coef_dt[:, -1] *= 0.5
    ns = np.arange(modes)
    u = np.fft.irfft(coef_u * n_theta, n=n_theta, axis=1)
    du_dt = np.fft.irfft(coef_dt * n_theta, n=n_theta, axis=1)
    du_dtheta = np.fft.irfft(1j * ns[None, :] * coef_u * n_theta, n=n_theta, axis=1)
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    log.debug("cylinder solve: ell=%g t0=%g nodes=%d modes=%d", params.ell, t0, t.size, modes)
    return CylinderField(t=t, theta=theta, du_dt=du_dt, du_dtheta=du_dtheta, u=u)


@dataclass(frozen=True)
class StripAuditReport:
    k: int
    m: int
    integral: float
    distance: float
    monotone: bool
    bound: float | None = None

    @property
    def ratio(self) -> float:
        return self.integral / self.distance

    @property
    def passed(self) -> bool:
        within = True if self.bound is None else self.ratio <= self.bound
        return self.monotone and within


def _strip_lengths_monotone(params: CollarParams, k: int, m: int) -> bool:
    for i in range(k + 1, m):
        prev = collar_distance(params, i - 1, i)
        nxt = collar_distance(params, i, i + 1)
        if i >= 0:
            ok = prev <= nxt * (1 + 1e-12) and nxt <= RATIO_CONSTANT * prev
        else:
            ok = nxt <= prev * (1 + 1e-12) and prev <= RATIO_CONSTANT * nxt
        if not ok:
            return False
    return True


def collar_strip_gradient_audit(
    params: CollarParams,
    field: CylinderField,
    k: int,
    m: int,
    bound: float | None = None,
) -> StripAuditReport:
    """∫_{[k,m] x S¹} |∇_g u| dV_g = ∫ |∇u| λ/cos λt dt dθ against d_{k,m}."""
    if not (-params.T + 2 < k < m < params.T - 2):
        raise ValueError(
            f"need -T + 2 < k < m < T - 2 with T = {params.T:.6g}, got k={k}, m={m}"
        )
    t = field.t
    if not (np.any(np.isclose(t, k, atol=1e-12)) and np.any(np.isclose(t, m, atol=1e-12))):
        raise ValueError(f"field nodes must include t = {k} and t = {m}")
    sel = (t >= k - 1e-12) & (t <= m + 1e-12)
    ts = t[sel]
    weight = np.asarray(collar_conformal_factor(params, ts))
    per_t = field.gradient_norm[sel].mean(axis=1) * 2.0 * math.pi * weight
    integral = float(trapezoid(per_t, ts))
    distance = collar_distance(params, k, m)
    return StripAuditReport(
        k=k,
        m=m,
        integral=integral,
        distance=distance,
        monotone=_strip_lengths_monotone(params, k, m),
        bound=bound,
    )


# ---------------------------------------------------------------------------
# balls inside a collar


@dataclass(frozen=True)
class CollarBallReport:
    t0: float
    radius: float
    case: int
    t_range: tuple[float, float]
    injectivity: float
    ratio: float
    bound: float
    applicable: bool

    @property
    def passed(self) -> bool | None:
        if not self.applicable:
            return None
        return self.ratio <= self.bound


# Case 1: λ/cos λt0 <= (e²/π) d(x0, x0') with x0' halfway along the shortest loop
# through x0, so d(x0, x0') = inj(x0).
CASE1_BOUND = RATIO_CONSTANT
# Case 2: the end strips of [k, m] cost at most 4e⁴ d_{t1,t2}, and d_{t1,t2} <= 2r.
CASE2_BOUND = 2.0 * (1.0 + 4.0 * RATIO_CONSTANT**2)


def collar_ball_analysis(params: CollarParams, t0: float, r: float) -> CollarBallReport:
    """Classify B_r((t0, 0)) as a thin-band ball (Case 1) or a long ball (Case 2).

    Case 1 reports π (λ/cos λt0) / inj(t0), which holds for every ball inside a
    single band whatever its radius; Case 2 reports d_{k,m}/r.
    """
    if r <= 0:
        raise ValueError(f"radius must be positive, got {r}")
    if not (-params.T + 5 < t0 < params.T - 5):
        raise ValueError(f"centre must satisfy |t0| < T - 5 with T = {params.T:.6g}")
    y0 = _primitive(params, t0)
    ymax = _primitive(params, params.T)
    t_hi = _inverse_primitive(params, min(y0 + r, ymax))
    t_lo = _inverse_primitive(params, max(y0 - r, -ymax))
    inj = injectivity_radius_at(params, t0)
    lo_edge, hi_edge = -params.T + 5, params.T - 5
    k_mid = round(0.5 * (t_lo + t_hi))
    case1 = (
        k_mid - 1 <= t_lo
        and t_hi <= k_mid + 1
        and lo_edge < k_mid - 1
        and k_mid + 1 < hi_edge
    )
    if case1:
        factor = float(collar_conformal_factor(params, t0))
        return CollarBallReport(
            t0=t0,
            radius=r,
            case=1,
            t_range=(t_lo, t_hi),
            injectivity=inj,
            ratio=math.pi * factor / inj,
            bound=CASE1_BOUND,
            applicable=True,
        )
    t1, t2 = max(t_lo, lo_edge), min(t_hi, hi_edge)
    k = max(math.floor(t1) - 1, math.ceil(-params.T))
    m = min(math.floor(t2) + 1, math.floor(params.T))
    d_km = collar_distance(params, max(k, -params.T), min(m, params.T))
    return CollarBallReport(
        t0=t0,
        radius=r,
        case=2,
        t_range=(t_lo, t_hi),
        injectivity=inj,
        ratio=d_km / r,
        bound=CASE2_BOUND,
        applicable=t2 - t1 >= 1.0,
    )


# ---------------------------------------------------------------------------


def annulus_estimate_audit(a: float, p: float, per_disk_bound: float = 1.0) -> float:
    """per_disk_bound · Σ_{i=1}^{m} (2^{-i})^{2-p} with a = 2^{-m} (m = ∞ for a = 0)."""
    if not (1.0 <= p):
        raise ValueError(f"p must be >= 1, got {p}")
    if p >= 2.0:
        raise ValueError(f"the dyadic series diverges for p >= 2, got p={p}")
    if per_disk_bound < 0:
        raise ValueError(f"per_disk_bound must be nonnegative, got {per_disk_bound}")
    q = 2.0 ** -(2.0 - p)
    if a == 0:
        return per_disk_bound * q / (1.0 - q)
    if not (0.0 < a <= 0.25):
        raise ValueError(f"a must lie in [0, 1/4], got {a}")
    m = -math.log2(a)
    if abs(m - round(m)) > 1e-12:
        raise ValueError(f"a must be 0 or a power 2^-m, got {a}")
    m = int(round(m))
    return per_disk_bound * q * (1.0 - q**m) / (1.0 - q)


__all__ = [
    "AsymptoticResiduals",
    "CASE1_BOUND",
    "CASE2_BOUND",
    "CollarBallReport",
    "CollarParams",
    "CylinderField",
    "MAX_COLLAR_LENGTH",
    "RATIO_CONSTANT",
    "RatioAuditReport",
    "StripAuditReport",
    "TopologyData",
    "annulus_estimate_audit",
    "asymptotic_residuals",
    "collar_ball_analysis",
    "collar_conformal_factor",
    "collar_count_bound",
    "collar_distance",
    "collar_distance_closed_form",
    "collar_from_length",
    "collar_strip_gradient_audit",
    "covering_count_bound",
    "cylinder_to_fermi",
    "disk_chart_curvature",
    "disk_chart_factor",
    "disk_chart_radial_distance",
    "fermi_to_cylinder",
    "global_gradient_factor",
    "hyperbolic_ball_area",
    "injectivity_radius_at",
    "injectivity_radius_ceiling",
    "injectivity_radius_profile",
    "is_admissible_pair",
    "near_boundary_sample",
    "random_ratio_samples",
    "ratio_bound_audit",
    "solve_cylinder_potential",
    "strip_nodes",
    "thick_part_bound",
]
