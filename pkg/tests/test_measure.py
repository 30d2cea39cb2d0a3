from __future__ import annotations

import math

import numpy as np
import pytest

from bicgrad.measure import (
    Annulus,
    DensityGrid,
    Disk,
    Rectangle,
    SignedMeasure,
    jordan_decompose,
    measure_from_literal,
    negative_part_mass,
    restrict,
    total_variation,
    uniform_disk_density,
)


def test_total_variation_of_atoms() -> None:
    assert total_variation(SignedMeasure.dirac()) == 1.0
    mu = SignedMeasure.from_atoms([(0.0, 0.0, 1.0), (1.0, 0.0, -1.0)])
    assert total_variation(mu) == 2.0
    assert total_variation(SignedMeasure.zero()) == 0.0


def test_total_variation_of_unit_density() -> None:
    grid = DensityGrid(origin=(0.0, 0.0), h=0.25, values=np.ones((4, 4)))
    assert total_variation(SignedMeasure(density=grid)) == pytest.approx(1.0)


def test_zero_weight_atoms_are_dropped() -> None:
    mu = SignedMeasure.from_atoms([(0.0, 0.0, 0.0), (0.5, 0.5, 2.0)])
    assert len(mu.atoms) == 1
    assert mu.atoms[0].position == (0.5, 0.5)


def test_non_finite_atom_is_rejected() -> None:
    with pytest.raises(ValueError, match="finite"):
        SignedMeasure.from_atoms([(math.nan, 0.0, 1.0)])


def test_density_is_read_only() -> None:
    grid = DensityGrid(origin=(0.0, 0.0), h=1.0, values=np.ones((2, 2)))
    with pytest.raises(ValueError):
        grid.values[0, 0] = 3.0


def test_jordan_decompose_atoms() -> None:
    mu = SignedMeasure.from_atoms([(0.0, 0.0, 1.0), (1.0, 0.0, -1.0)])
    plus, minus = jordan_decompose(mu)
    assert [a.position for a in plus.atoms] == [(0.0, 0.0)]
    assert [(a.position, a.weight) for a in minus.atoms] == [((1.0, 0.0), 1.0)]


def test_jordan_decompose_positive_measure_is_idempotent() -> None:
    mu = SignedMeasure.from_atoms([(0.0, 0.0, 1.0), (0.3, 0.1, 2.5)])
    plus, minus = jordan_decompose(mu)
    assert total_variation(plus) == total_variation(mu)
    assert minus.is_zero()
    again, rest = jordan_decompose(plus)
    assert total_variation(again) == total_variation(plus)
    assert rest.is_zero()


def test_jordan_decompose_mixed_density_is_cellwise() -> None:
    values = np.array([[1.0, -2.0], [0.0, 3.0]])
    mu = SignedMeasure(
        atoms=SignedMeasure.dirac(weight=-0.5).atoms,
        density=DensityGrid(origin=(0.0, 0.0), h=0.5, values=values),
    )
    plus, minus = jordan_decompose(mu)
    assert plus.density is not None and minus.density is not None
    np.testing.assert_array_equal(plus.density.values, [[1.0, 0.0], [0.0, 3.0]])
    np.testing.assert_array_equal(minus.density.values, [[0.0, 2.0], [0.0, 0.0]])
    # mutually singular cell by cell
    assert not np.any((plus.density.values > 0) & (minus.density.values > 0))
    assert total_variation(mu) == pytest.approx(total_variation(plus) + total_variation(minus))
    assert negative_part_mass(mu) == pytest.approx(0.5 + 2.0 * 0.25)


def test_restrict_keeps_and_drops_atoms() -> None:
    half = Disk((0.0, 0.0), 0.5)
    assert total_variation(restrict(SignedMeasure.dirac(), half)) == 1.0
    outside = SignedMeasure.dirac((0.9, 0.0))
    assert restrict(outside, half).is_zero()


def test_restrict_uniform_density_scales_with_area() -> None:
    n = 200
    grid = uniform_disk_density(1.0, n)
    mu = SignedMeasure(density=grid)
    inner = restrict(mu, Disk((0.0, 0.0), 0.5))
    ratio = total_variation(inner) / total_variation(mu)
    h = 2.0 / n
    # cells cut by either circle account for the discrepancy
    slack = (2.0 * math.pi * 0.5 * 2 * h + 2.0 * math.pi * 2 * h) / math.pi
    assert ratio == pytest.approx(0.25, abs=slack)


@pytest.mark.parametrize(
    "region",
    [
        Disk((0.1, 0.0), 0.4),
        Annulus((0.0, 0.0), 0.2, 0.6),
        Rectangle(-0.3, 0.2, -0.5, 0.5),
    ],
)
def test_restrict_never_increases_total_variation(region) -> None:
    rng = np.random.default_rng(7)
    atoms = [(x, y, w) for x, y, w in rng.uniform(-1.0, 1.0, size=(12, 3))]
    grid = DensityGrid(origin=(-1.0, -1.0), h=0.1, values=rng.normal(size=(20, 20)))
    mu = SignedMeasure(atoms=SignedMeasure.from_atoms(atoms).atoms, density=grid)
    assert total_variation(restrict(mu, region)) <= total_variation(mu)


def test_restrict_rejects_degenerate_region() -> None:
    with pytest.raises(ValueError):
        restrict(SignedMeasure.dirac(), Annulus((0.0, 0.0), 0.5, 0.2))


def test_measure_transforms_preserve_mass() -> None:
    mu = measure_from_literal([[0.1, 0.2, 1.5], [-0.3, 0.0, -0.5]])
    assert mu.total_mass() == pytest.approx(1.0)
    assert mu.dilated(3.0).total_mass() == pytest.approx(1.0)
    assert mu.translated((1.0, 1.0)).positions[0] == pytest.approx([1.1, 1.2])
    assert total_variation(mu.scaled(-2.0)) == pytest.approx(4.0)


def test_point_masses_lump_density_cells() -> None:
    grid = DensityGrid(origin=(0.0, 0.0), h=0.5, values=np.array([[4.0, 0.0], [0.0, 0.0]]))
    mu = SignedMeasure(atoms=SignedMeasure.dirac().atoms, density=grid)
    pos, wts = mu.point_masses()
    assert pos.shape == (2, 2)
    assert pos[1] == pytest.approx([0.25, 0.25])
    assert wts[1] == pytest.approx(1.0)
