import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from harmonic_presch import catalog as cat
from harmonic_presch.errors import DomainError, NotSensePreservingError, ParameterError, SingularityError
from harmonic_presch.hyperbolic import RightHalfPlane, SlitPlane, UnitDisk
from harmonic_presch.jets import numeric_wirtinger
from harmonic_presch.presch import (
    affine_post,
    affine_transform_A_eps,
    compose_conformal,
    dilatation,
    family_shift_S,
    h_plus_eps_g,
    jacobian,
    koebe_transform,
    pre_schwarzian,
    pre_schwarzian_analytic,
)

from conftest import disk_points

DISK_MAPS = [
    cat.harmonic_koebe,
    cat.half_plane_map,
    lambda: cat.f_alpha(2.0, 0.4j),
    lambda: cat.f_k_family(0.7, 1.0),
    lambda: cat.analytic(cat.k_alpha(1.5)),
    lambda: cat.reflect(cat.harmonic_koebe()),
]

unit = st.floats(0, 1)
angle = st.floats(0, 2 * math.pi)


def log_jacobian_oracle(f, z, contains=None):
    return numeric_wirtinger(lambda q: math.log(jacobian(f, q)), z, contains=contains).dz


# ------------------------------------------------------------- values


def test_simple_values():
    ident = cat.analytic(cat.Identity(UnitDisk()))
    assert jacobian(ident, 0.3 + 0.1j) == 1.0
    assert pre_schwarzian(ident, 0.3 + 0.1j).p == 0
    assert jacobian(cat.halfplane_remark3(), 1) == pytest.approx(0.25)
    assert jacobian(cat.f_alpha(1.0, 0.6), 0) == pytest.approx(0.64)
    assert abs(dilatation(cat.half_plane_map(), 0.3) + 0.3) < 1e-15
    assert abs(dilatation(cat.f_k_family(0.3, 2.5), 0.2 - 0.5j) - 0.3 * (0.2 - 0.5j)) < 1e-15


def test_zero_dilatation_at_origin_gives_h_ratio():
    for make in DISK_MAPS[:4]:
        f = make()
        # remove g'(0) first so the second term vanishes at the origin
        eps = -complex(f.g.jet(0).d1).conjugate()
        f0 = affine_transform_A_eps(f, eps) if abs(eps) > 0 else f
        hj = f0.h.jet(0)
        assert abs(dilatation(f0, 0)) < 1e-15
        assert abs(pre_schwarzian(f0, 0).p - hj.d2 / hj.d1) < 1e-13


def test_analytic_presch():
    z = np.array([0.3 + 0.1j, -0.5j, 0.9])
    assert np.all(pre_schwarzian_analytic(cat.Identity(UnitDisk()), z) == 0)
    assert np.allclose(pre_schwarzian_analytic(cat.reciprocal_map(), z), -2 / z, rtol=1e-15)
    assert np.allclose(pre_schwarzian_analytic(cat.cayley(), z * 0.9), 2 / (1 - 0.9 * z), rtol=1e-14)
    with pytest.raises(SingularityError):
        pre_schwarzian_analytic(cat.subordination_psi(0.0), 0)


def test_errors_name_the_point():
    with pytest.raises(DomainError) as exc:
        pre_schwarzian(cat.harmonic_koebe(), 1.5)
    assert exc.value.point == 1.5 and "1.5" in str(exc.value)
    with pytest.raises(NotSensePreservingError):
        affine_post(cat.harmonic_koebe(), 1, 1)
    with pytest.raises(ParameterError):
        affine_transform_A_eps(cat.harmonic_koebe(), 1)
    with pytest.raises(ParameterError):
        h_plus_eps_g(cat.harmonic_koebe(), 1.5)
    with pytest.raises(TypeError):
        dilatation(cat.halfplane_remark3(), 1)


# ------------------------------------------------------------- oracle


@pytest.mark.parametrize("k", range(len(DISK_MAPS)))
def test_presch_matches_wirtinger_oracle(k, rng):
    f = DISK_MAPS[k]()
    for z in disk_points(rng, 40, 0.9):
        z = complex(z)
        p = pre_schwarzian(f, z).p
        assert abs(p - log_jacobian_oracle(f, z)) <= 1e-6 * max(1.0, abs(p))


def test_definition_and_ratio_formula_agree(rng):
    # stored closed-form dilatation vs the quotient formula for omega'
    for make in DISK_MAPS:
        f = make()
        bare = cat.Decomposed(f.h, f.g, name="bare")
        z = disk_points(rng, 200, 0.9)
        assert np.allclose(pre_schwarzian(f, z).p, pre_schwarzian(bare, z).p, rtol=1e-11, atol=1e-11)


@given(eps_r=unit, eps_t=angle, r=st.floats(0, 0.9), t=angle)
def test_eps_difference_identity(eps_r, eps_t, r, t):
    f = cat.f_k_family(0.7, 1.0)
    eps = eps_r * complex(math.cos(eps_t), math.sin(eps_t))
    z = r * complex(math.cos(t), math.sin(t))
    w = complex(dilatation(f, z))
    dw = 0.7  # omega = k z
    lhs = pre_schwarzian_analytic(h_plus_eps_g(f, eps), z) - pre_schwarzian(f, z).p
    rhs = (eps + w.conjugate()) / (1 + eps * w) * dw / (1 - abs(w) ** 2)
    assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(rhs))


def test_h_plus_eps_g_special_cases():
    f = cat.f_k_family(0.5, 2.0)
    assert h_plus_eps_g(f, 0) is f.h
    z = np.array([0.1, 0.5j, -0.7])
    k, a = 0.5, 2.0
    assert np.allclose(pre_schwarzian_analytic(h_plus_eps_g(f, 1), z), 2 * k * (a + 1) / (1 - k * k * z * z))


# --------------------------------------------------------- transforms


def _random_composition(rng):
    """A catalog map composed with a conformal map into its domain, plus the inner map."""
    z0 = 0.7 * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
    aut = cat.disk_automorphism(z0, rng.uniform(0, 2 * np.pi))
    kind = rng.integers(0, len(DISK_MAPS) + 2)
    if kind < len(DISK_MAPS):
        return DISK_MAPS[kind](), aut
    if kind == len(DISK_MAPS):
        # remark3 on the half-plane, reached through Cayley after an automorphism
        return cat.halfplane_remark3(), cat.Composition(cat.cayley(), aut, name="cayley-aut")
    sq = cat.PrincipalPower(cat.cayley(), 2.0, name="cayley2")
    return cat.slit_plane_example(), cat.Composition(sq, aut, name="cayley2-aut")


def test_chain_rule_on_random_compositions(rng):
    worst = 0.0
    for _ in range(100):
        f, phi = _random_composition(rng)
        fo = compose_conformal(f, phi)
        w = complex(disk_points(rng, 1, 0.8)[0])
        j = phi.jet(w)
        lhs = pre_schwarzian(fo, w).p
        rhs = pre_schwarzian(f, complex(j.value)).p * j.d1 + j.d2 / j.d1
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    assert worst < 1e-9


def test_compose_identity_and_known_pullbacks(rng):
    K = cat.harmonic_koebe()
    ident = cat.Identity(UnitDisk())
    z = disk_points(rng, 20, 0.9)
    assert np.allclose(pre_schwarzian(compose_conformal(K, ident), z).p, pre_schwarzian(K, z).p, rtol=1e-15)
    # K o (1-z)/(1+z) on the half-plane reproduces the record closed form
    to_disk = cat.Mobius(-1, 1, 1, 1, domain=RightHalfPlane(), name="to-disk")
    pulled = compose_conformal(K, to_disk)
    w = RightHalfPlane().sample(50, rng)
    assert np.allclose(pre_schwarzian(pulled, w).p, cat._r3_presch(w), rtol=1e-10)
    # K o (1 - sqrt z) / (1 + sqrt z) on the slit plane
    root = cat.PrincipalPower(cat.Identity(SlitPlane()), 0.5, name="sqrt")
    slit_to_disk = cat.Composition(cat.Mobius(-1, 1, 1, 1, domain=RightHalfPlane()), root)
    pulled = compose_conformal(K, slit_to_disk)
    w = SlitPlane().sample(50, rng)
    assert np.allclose(pre_schwarzian(pulled, w).p, cat._slit_presch(w), rtol=1e-10)
    assert np.allclose(jacobian(pulled, w), cat._slit_jacobian(w), rtol=1e-10)


def test_compose_rejects_leaving_domain():
    K = cat.harmonic_koebe()
    grow = cat.Mobius(2, 0, 0, 1, domain=UnitDisk())
    with pytest.raises(DomainError):
        pre_schwarzian(compose_conformal(K, grow), 0.7)


@given(
    ar=st.floats(0.5, 3), at=angle, br=st.floats(0, 0.45), bt=angle, c=st.complex_numbers(max_magnitude=5),
    r=st.floats(0, 0.95), t=angle,
)
def test_affine_invariance(ar, at, br, bt, c, r, t):
    f = cat.harmonic_koebe()
    a = ar * complex(math.cos(at), math.sin(at))
    b = br * ar * complex(math.cos(bt), math.sin(bt))
    z = r * complex(math.cos(t), math.sin(t))
    g = affine_post(f, a, b, c)
    p0 = pre_schwarzian(f, z).p
    assert abs(pre_schwarzian(g, z).p - p0) <= 1e-12 * max(1.0, abs(p0))


@given(er=st.floats(0, 0.95), et=angle)
def test_affine_transform_normalization(er, et):
    eps = er * complex(math.cos(et), math.sin(et))
    f = affine_transform_A_eps(cat.f_alpha(2.0, 0.3), eps)
    hj = f.h.jet(0)
    assert abs(hj.value) < 1e-14 and abs(hj.d1 - 1) < 1e-13
    # g -> (g + conj(eps) h) / conj(1 + eps g'(0))
    w = (0.3 + eps.conjugate()) / (1 + eps * 0.3).conjugate()
    assert abs(f.g.jet(0).d1 - w) < 1e-13


@given(r=st.floats(0, 0.8), t=angle, th=angle)
def test_koebe_transform_normalization(r, t, th):
    z0 = r * complex(math.cos(t), math.sin(t))
    phi = cat.disk_automorphism(z0, th)
    f = koebe_transform(cat.half_plane_map(), phi)
    hj, gj = f.h.jet(0), f.g.jet(0)
    assert abs(hj.value) < 1e-13 and abs(gj.value) < 1e-13
    assert abs(hj.d1 - 1) < 1e-12
    bare = cat.Decomposed(f.h, f.g)
    w = 0.3 - 0.4j
    assert abs(pre_schwarzian(f, w).p - pre_schwarzian(bare, w).p) < 1e-9


def test_family_shift_kills_dilatation_at_origin(rng):
    base = [cat.harmonic_koebe(), cat.f_k_family(0.7, 1.0), cat.f_alpha(1.5, 0.5)]
    for F in base:
        for _ in range(5):
            z0 = complex(disk_points(rng, 1, 0.8)[0])
            S = family_shift_S(F, z0)
            assert abs(dilatation(S, 0)) < 1e-12
            assert abs(S.h.jet(0).d1 - 1) < 1e-12
    S = family_shift_S(cat.harmonic_koebe(), 0)
    assert abs(dilatation(S, 0)) == 0
