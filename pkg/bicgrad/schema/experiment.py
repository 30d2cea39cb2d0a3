from __future__ import annotations

import math
from typing import Annotated, TypeAlias

from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator

PositiveFloat: TypeAlias = Annotated[float, Field(gt=0)]
PositiveInt: TypeAlias = Annotated[int, Field(ge=1)]
SubCriticalExponent: TypeAlias = Annotated[float, Field(ge=1, lt=2)]
Epsilon: TypeAlias = Annotated[float, Field(gt=0, lt=4 * math.pi)]
AtomLiteral: TypeAlias = tuple[float, float, float]


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class PotentialSection(Section):
    """Log potential checks: scaling, exp-integrability, weak form, charts."""

    atoms: list[AtomLiteral]
    q: list[SubCriticalExponent]
    radii: list[PositiveFloat]
    epsilon: list[Epsilon]
    R: list[PositiveFloat]
    exp_tolerance: PositiveFloat
    moser_p: list[Annotated[float, Field(gt=0, lt=4 * math.pi)]]
    bumps: Annotated[int, Field(ge=0)]
    bump_radius: tuple[PositiveFloat, PositiveFloat]
    weak_grid: Annotated[int, Field(ge=2)]
    weak_tolerance: PositiveFloat
    harmonic_radii: list[PositiveFloat]
    harmonic_tolerance: PositiveFloat
    chart_scales: list[PositiveFloat]
    chart_p: SubCriticalExponent
    chart_a: Annotated[float, Field(ge=0, lt=0.25)]
    invariance_tolerance: PositiveFloat

    @field_validator("atoms")
    @classmethod
    def _nonempty_measure(cls, atoms: list[AtomLiteral]) -> list[AtomLiteral]:
        if not any(w != 0 for _, _, w in atoms):
            raise ValueError("the measure needs at least one atom with nonzero weight")
        if any(math.hypot(x, y) > 1.0 for x, y, _ in atoms):
            raise ValueError("atoms must lie in the closed unit disk")
        return atoms

    @field_validator("bump_radius")
    @classmethod
    def _ordered_range(cls, value: tuple[float, float]) -> tuple[float, float]:
        if value[0] > value[1]:
            raise ValueError("bump_radius must be [min, max] with min <= max")
        return value


class DiskAreaSection(Section):
    """Random atomic curvature measures on the unit square chart."""

    measures: Annotated[int, Field(ge=0)]
    grid: Annotated[int, Field(ge=16)]
    atoms_per_measure: PositiveInt
    max_negative_mass: Annotated[float, Field(ge=0)]
    max_positive_weight: Annotated[float, Field(gt=0, lt=2 * math.pi)]
    atom_radius: Annotated[float, Field(gt=0, lt=1)]
    balls_per_measure: PositiveInt
    center_radius: Annotated[float, Field(ge=0, lt=1)]
    radii: list[PositiveFloat]
    margin: Annotated[float, Field(ge=0)]


class BlowupSection(Section):
    R: list[Annotated[float, Field(gt=1)]]
    a: Annotated[float, Field(gt=0, lt=math.pi / 2)]
    samples: PositiveInt
    radial: PositiveInt
    tolerance: PositiveFloat
    remainder_R: list[Annotated[float, Field(gt=1)]]
    remainder_spread: Annotated[float, Field(ge=1)]


class TorusSection(Section):
    b: list[Annotated[float, Field(ge=1)]]
    radii: list[PositiveFloat]
    p: list[SubCriticalExponent]
    grid: PositiveInt
    position: tuple[float, float]
    spread_bound: Annotated[float, Field(ge=1)]

    @field_validator("grid")
    @classmethod
    def _power_of_two(cls, n: int) -> int:
        if n < 2 or n & (n - 1):
            raise ValueError(f"grid must be a power of two, got {n}")
        return n


class CollarSection(Section):
    ell: list[Annotated[float, Field(gt=0, lt=2 * math.asinh(1.0))]]
    t: list[Annotated[float, Field(ge=0)]]
    kappa_bound: PositiveFloat
    ratio_samples: Annotated[int, Field(ge=0)]
    distance_pairs: Annotated[int, Field(ge=0)]
    distance_tolerance: PositiveFloat
    strip_ell: list[Annotated[float, Field(gt=0, lt=0.2)]]
    strip_k: int
    strip_m: int
    strip_source: tuple[float, float]
    strip_theta: Annotated[int, Field(ge=4)]
    strip_ratio_bound: PositiveFloat
    ball_ell: list[Annotated[float, Field(gt=0, lt=0.2)]]
    ball_t0: list[Annotated[float, Field(ge=0, lt=1)]]
    ball_radii: list[PositiveFloat]
    chart_r: list[Annotated[float, Field(gt=0, lt=2)]]
    chart_tolerance: PositiveFloat
    genus: list[Annotated[int, Field(ge=2)]]
    thick_a: PositiveFloat
    thick_p: SubCriticalExponent

    @field_validator("strip_m")
    @classmethod
    def _strip_order(cls, m: int, info: ValidationInfo) -> int:
        k = info.data.get("strip_k")
        if k is not None and m <= k:
            raise ValueError(f"strip_m must exceed strip_k ({k}), got {m}")
        return m

    @field_validator("strip_theta")
    @classmethod
    def _even(cls, n: int) -> int:
        if n % 2:
            raise ValueError(f"strip_theta must be even, got {n}")
        return n


class AnnulusSection(Section):
    p: list[SubCriticalExponent]
    a: list[Annotated[float, Field(ge=0, le=0.25)]]
    per_disk_bound: Annotated[float, Field(ge=0)]
    k: list[float]

    @field_validator("a")
    @classmethod
    def _dyadic(cls, values: list[float]) -> list[float]:
        for a in values:
            if a == 0:
                continue
            m = -math.log2(a)
            if abs(m - round(m)) > 1e-12:
                raise ValueError(f"inner radius must be 0 or 2^-m, got {a}")
        return values


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    seed: int
    output: str
    potential: PotentialSection
    disk_area: DiskAreaSection = Field(alias="disk-area")
    blowup: BlowupSection
    torus: TorusSection
    collar: CollarSection
    annulus: AnnulusSection
