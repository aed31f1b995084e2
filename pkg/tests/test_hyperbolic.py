import numpy as np
import pytest

from harmonic_presch import catalog as cat
from harmonic_presch.errors import DomainError, ParameterError
from harmonic_presch.hyperbolic import (
    ExteriorDisk,
    PuncturedDisk,
    RightHalfPlane,
    RiemannMapped,
    SlitPlane,
    UnitDisk,
    boundary_distance,
    density,
    exterior_weight,
    inv_density,
    osgood_infimum,
)

from conftest import disk_points

ALL = [UnitDisk(), RightHalfPlane(), ExteriorDisk(), PuncturedDisk(), SlitPlane(), RiemannMapped(cat.cayley(), "cayley")]


def pullback(phi_value, phi_d1, w):
    """Inverse density of the image pulled back from the disk through a covering."""
    return (1 - np.abs(w) ** 2) * np.abs(phi_d1)


def test_density_values():
    assert density(UnitDisk(), 0) == 1.0
    for z in (0.5, 0.01j, -0.9 + 0.1j):
        a = abs(z)
        assert density(PuncturedDisk(), z) == pytest.approx(1 / (2 * a * np.log(1 / a)), rel=1e-14)
    for x in (1e-3, 1.0, 250.0):
        assert inv_density(SlitPlane(), x) == pytest.approx(4 * x, rel=1e-14)
    outside = {"disk": 1.0, "exterior": 0.5, "punctured-disk": 0.0}
    for D in ALL:
        with pytest.raises(DomainError):
            inv_density(D, outside.get(D.id, -1.0 + 0j))


def test_exterior_weight():
    assert exterior_weight(2) == 6
    assert exterior_weight(3j) == pytest.approx(24)
    assert 0 < exterior_weight(1 + 1e-9) < 1e-8
    with pytest.raises(DomainError):
        exterior_weight(1.0)


def test_boundary_distance_values():
    assert boundary_distance(UnitDisk(), 0.25) == 0.75
    assert boundary_distance(PuncturedDisk(), 0.1) == pytest.approx(0.1)
    assert boundary_distance(SlitPlane(), 1j) == pytest.approx(1.0)
    assert boundary_distance(SlitPlane(), -3 + 0.5j) == pytest.approx(0.5)
    assert boundary_distance(RightHalfPlane(), 2 + 7j) == 2.0
    assert boundary_distance(ExteriorDisk(), -3.0) == 2.0


def test_cayley_pullback(rng):
    w = disk_points(rng, 100, 0.95)
    j = cat.cayley().jet(w)
    assert np.allclose(inv_density(RightHalfPlane(), j.value), pullback(j.value, j.d1, w), rtol=1e-8)


def test_slit_pullback_validates_general_formula(rng):
    w = disk_points(rng, 100, 0.95)
    j = cat.PrincipalPower(cat.cayley(), 2.0).jet(w)
    assert np.allclose(inv_density(SlitPlane(), j.value), pullback(j.value, j.d1, w), rtol=1e-8)


def test_punctured_disk_covering_pullback(rng):
    w = disk_points(rng, 100, 0.9)
    u = (1 + w) / (1 - w)
    z = np.exp(-u)
    dz = z * (-2 / (1 - w) ** 2)
    assert np.allclose(inv_density(PuncturedDisk(), z), pullback(z, dz, w), rtol=1e-8)


def test_exterior_pullback(rng):
    w = disk_points(rng, 100, 0.95)
    w = w[np.abs(w) > 1e-3]
    assert np.allclose(inv_density(ExteriorDisk(), 1 / w), pullback(1 / w, -1 / w**2, w), rtol=1e-8)


def test_riemann_mapped_reproduces_closed_forms(rng):
    D = RiemannMapped(cat.cayley(), "cayley")
    z = RightHalfPlane().sample(100, rng)
    assert np.allclose(D.inv_density(z), RightHalfPlane().inv_density(z), rtol=1e-8)
    sq = RiemannMapped(cat.PrincipalPower(cat.cayley(), 2.0), "cayley2")
    z = SlitPlane().sample(100, rng)
    assert np.allclose(sq.inv_density(z), SlitPlane().inv_density(z), rtol=1e-8)


def test_riemann_invert_round_trip(rng):
    D = RiemannMapped(cat.cayley(), "cayley")
    w = disk_points(rng, 200, 0.98)
    back = D.invert(cat.cayley()(w))
    assert np.allclose(back, w, atol=1e-10)
    with pytest.raises(DomainError):
        D.invert(-1.0 + 0.2j)
    assert D.id == "riemann:cayley"


@pytest.mark.parametrize("D", ALL, ids=lambda d: d.id)
def test_positive_on_samples(D, rng):
    z = D.sample(200, rng)
    assert np.all(D.contains(z))
    assert np.all(D.density(z) > 0)
    if not isinstance(D, RiemannMapped):
        assert np.all(D.boundary_distance(z) > 0)


def test_riemann_boundary_distance_not_available():
    with pytest.raises(NotImplementedError):
        RiemannMapped(cat.cayley(), "cayley").boundary_distance(1.0)


def test_osgood():
    disk = osgood_infimum(UnitDisk())
    assert 0.499 <= disk.infimum <= 0.5 + 1e-12
    half = osgood_infimum(RightHalfPlane())
    assert half.infimum == pytest.approx(0.5, abs=1e-12)
    punct = osgood_infimum(PuncturedDisk())
    assert punct.decreasing and punct.tends_to_zero
    for (m, v) in punct.trend:
        # 1 / (2 log(1/|z|)) on the inner ring |z| = m
        assert v == pytest.approx(1 / (2 * np.log(1 / m)), rel=1e-9)
    with pytest.raises(ParameterError):
        osgood_infimum(UnitDisk(), margin=0.7)
