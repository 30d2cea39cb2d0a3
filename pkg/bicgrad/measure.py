from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, TypeAlias, Union

import numpy as np

DomainTag: TypeAlias = Literal["plane", "disk", "torus", "cylinder"]


@dataclass(frozen=True)
class Atom:
    position: tuple[float, float]
    weight: float


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Cell-centred density samples.

    Cell (j, i) covers `[x0 + i*h, x0 + (i+1)*h] x [y0 + j*h, y0 + (j+1)*h]`,
    `values[j, i]` is the density (measure per unit area) on it.
    """

    origin: tuple[float, float]
    h: float
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.h <= 0:
            raise ValueError(f"cell size must be positive, got {self.h}")
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError("density values must be a 2-D array")
        if not np.all(np.isfinite(values)):
            raise ValueError("density values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape  # type: ignore[return-value]

    def centers(self) -> np.ndarray:
        """Return cell centres as an array of shape (ny, nx, 2)."""
        ny, nx = self.shape
        x0, y0 = self.origin
        xs = x0 + (np.arange(nx) + 0.5) * self.h
        ys = y0 + (np.arange(ny) + 0.5) * self.h
        gx, gy = np.meshgrid(xs, ys)
        return np.stack([gx, gy], axis=-1)

    def with_values(self, values: np.ndarray) -> DensityGrid:
        return DensityGrid(origin=self.origin, h=self.h, values=values)

    def mass(self) -> float:
        return float(self.values.sum() * self.cell_area)

    def abs_mass(self) -> float:
        return float(np.abs(self.values).sum() * self.cell_area)


@dataclass(frozen=True, eq=False)
class SignedMeasure:
    """Atoms plus an optional density grid.

    Zero-weight atoms are dropped on construction; the instance is read-only.
    """

    atoms: tuple[Atom, ...] = ()
    density: DensityGrid | None = None
    domain: DomainTag = "plane"

    def __post_init__(self) -> None:
        kept: list[Atom] = []
        for atom in self.atoms:
            x, y = (float(atom.position[0]), float(atom.position[1]))
            w = float(atom.weight)
            if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(w)):
                raise ValueError(f"atom must be finite, got {atom}")
            if w != 0.0:
                kept.append(Atom(position=(x, y), weight=w))
        object.__setattr__(self, "atoms", tuple(kept))

    @classmethod
    def from_atoms(
        cls,
        atoms: Iterable[tuple[float, float, float]],
        domain: DomainTag = "plane",
    ) -> SignedMeasure:
        return cls(
            atoms=tuple(Atom(position=(x, y), weight=w) for x, y, w in atoms),
            domain=domain,
        )

    @classmethod
    def dirac(
        cls, position: tuple[float, float] = (0.0, 0.0), weight: float = 1.0
    ) -> SignedMeasure:
        return cls(atoms=(Atom(position=position, weight=weight),))

    @classmethod
    def zero(cls, domain: DomainTag = "plane") -> SignedMeasure:
        return cls(domain=domain)

    @property
    def positions(self) -> np.ndarray:
        if not self.atoms:
            return np.zeros((0, 2))
        return np.array([a.position for a in self.atoms], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.array([a.weight for a in self.atoms], dtype=float)

    @property
    def is_atomic(self) -> bool:
        return self.density is None

    def is_zero(self) -> bool:
        no_density = self.density is None or not np.any(self.density.values)
        return not self.atoms and no_density

    def total_mass(self) -> float:
        """Signed mass μ(domain)."""
        mass = float(self.weights.sum()) if self.atoms else 0.0
        if self.density is not None:
            mass += self.density.mass()
        return mass

    def scaled(self, factor: float) -> SignedMeasure:
        density = (
            self.density.with_values(self.density.values * factor)
            if self.density is not None
            else None
        )
        return SignedMeasure(
            atoms=tuple(Atom(a.position, a.weight * factor) for a in self.atoms),
            density=density,
            domain=self.domain,
        )

    def translated(self, shift: tuple[float, float]) -> SignedMeasure:
        sx, sy = shift
        density = None
        if self.density is not None:
            x0, y0 = self.density.origin
            density = DensityGrid(
                origin=(x0 + sx, y0 + sy), h=self.density.h, values=self.density.values
            )
        return SignedMeasure(
            atoms=tuple(
                Atom((a.position[0] + sx, a.position[1] + sy), a.weight)
                for a in self.atoms
            ),
            density=density,
            domain=self.domain,
        )

    def dilated(self, factor: float) -> SignedMeasure:
        """Push forward under x -> factor * x (masses preserved)."""
        if factor <= 0:
            raise ValueError(f"dilation factor must be positive, got {factor}")
        density = None
        if self.density is not None:
            x0, y0 = self.density.origin
            density = DensityGrid(
                origin=(x0 * factor, y0 * factor),
                h=self.density.h * factor,
                values=self.density.values / (factor * factor),
            )
        return SignedMeasure(
            atoms=tuple(
                Atom((a.position[0] * factor, a.position[1] * factor), a.weight)
                for a in self.atoms
            ),
            density=density,
            domain=self.domain,
        )

    def point_masses(self) -> tuple[np.ndarray, np.ndarray]:
        """Atoms plus density cells lumped at their centres."""
        pos = self.positions
        wts = self.weights
        if self.density is None:
            return pos, wts
        centers = self.density.centers().reshape(-1, 2)
        masses = self.density.values.reshape(-1) * self.density.cell_area
        nonzero = masses != 0
        return (
            np.concatenate([pos, centers[nonzero]]),
            np.concatenate([wts, masses[nonzero]]),
        )


@dataclass(frozen=True)
class Disk:
    center: tuple[float, float]
    radius: float

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        d = np.hypot(pts[..., 0] - self.center[0], pts[..., 1] - self.center[1])
        return d <= self.radius

    @property
    def area(self) -> float:
        return math.pi * self.radius**2


@dataclass(frozen=True)
class Annulus:
    center: tuple[float, float]
    inner: float
    outer: float

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        d = np.hypot(pts[..., 0] - self.center[0], pts[..., 1] - self.center[1])
        return (d >= self.inner) & (d <= self.outer)

    @property
    def area(self) -> float:
        return math.pi * (self.outer**2 - self.inner**2)


@dataclass(frozen=True)
class Rectangle:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        return (x >= self.xmin) & (x <= self.xmax) & (y >= self.ymin) & (y <= self.ymax)

    @property
    def area(self) -> float:
        return (self.xmax - self.xmin) * (self.ymax - self.ymin)


RegionSpec: TypeAlias = Union[Disk, Annulus, Rectangle]


def _validate_region(region: RegionSpec) -> None:
    if isinstance(region, Disk) and region.radius <= 0:
        raise ValueError(f"disk radius must be positive, got {region.radius}")
    if isinstance(region, Annulus) and not (0 <= region.inner < region.outer):
        raise ValueError(
            f"annulus needs 0 <= inner < outer, got ({region.inner}, {region.outer})"
        )
    if isinstance(region, Rectangle) and not (
        region.xmin < region.xmax and region.ymin < region.ymax
    ):
        raise ValueError(f"degenerate rectangle {region}")


def total_variation(mu: SignedMeasure) -> float:
    tv = float(np.abs(mu.weights).sum()) if mu.atoms else 0.0
    if mu.density is not None:
        tv += mu.density.abs_mass()
    return tv


def jordan_decompose(mu: SignedMeasure) -> tuple[SignedMeasure, SignedMeasure]:
    """Split mu into (mu_plus, mu_minus), both nonnegative, mu = mu_plus - mu_minus."""
    plus_atoms = tuple(a for a in mu.atoms if a.weight > 0)
    minus_atoms = tuple(Atom(a.position, -a.weight) for a in mu.atoms if a.weight < 0)
    plus_density = minus_density = None
    if mu.density is not None:
        values = mu.density.values
        plus_density = mu.density.with_values(np.where(values > 0, values, 0.0))
        minus_density = mu.density.with_values(np.where(values < 0, -values, 0.0))
    return (
        SignedMeasure(atoms=plus_atoms, density=plus_density, domain=mu.domain),
        SignedMeasure(atoms=minus_atoms, density=minus_density, domain=mu.domain),
    )


def restrict(mu: SignedMeasure, region: RegionSpec) -> SignedMeasure:
    """Keep atoms inside `region` and density cells whose centre lies inside."""
    _validate_region(region)
    atoms = tuple(a for a in mu.atoms if bool(region.contains(np.array(a.position))))
    density = None
    if mu.density is not None:
        inside = region.contains(mu.density.centers())
        density = mu.density.with_values(np.where(inside, mu.density.values, 0.0))
    return SignedMeasure(atoms=atoms, density=density, domain=mu.domain)


def negative_part_mass(mu: SignedMeasure) -> float:
    return total_variation(jordan_decompose(mu)[1])


def uniform_disk_density(
    radius: float,
    n: int,
    center: tuple[float, float] = (0.0, 0.0),
    value: float = 1.0,
) -> DensityGrid:
    """Constant density on the cells of an n x n grid whose centres lie in a disk."""
    h = 2.0 * radius / n
    grid = DensityGrid(
        origin=(center[0] - radius, center[1] - radius), h=h, values=np.zeros((n, n))
    )
    inside = Disk(center, radius).contains(grid.centers())
    return grid.with_values(np.where(inside, value, 0.0))


MeasureLiteral: TypeAlias = list[tuple[float, float, float]]


def measure_from_literal(
    atoms: MeasureLiteral, domain: DomainTag = "plane"
) -> SignedMeasure:
    """Build a measure from the config literal `[[x, y, w], ...]`."""
    return SignedMeasure.from_atoms(
        ((float(x), float(y), float(w)) for x, y, w in atoms), domain=domain
    )


__all__ = [
    "Annulus",
    "Atom",
    "DensityGrid",
    "Disk",
    "DomainTag",
    "MeasureLiteral",
    "Rectangle",
    "RegionSpec",
    "SignedMeasure",
    "jordan_decompose",
    "measure_from_literal",
    "negative_part_mass",
    "restrict",
    "total_variation",
    "uniform_disk_density",
]

