"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""

import math

import numpy as np
import pytest

from harmonic_presch import catalog as cat
from harmonic_presch import checks as ck
from harmonic_presch.hyperbolic import (
    ExteriorDisk,
    PuncturedDisk,
    RightHalfPlane,
    RiemannMapped,
    SlitPlane,
    UnitDisk,
    exterior_weight,
    inv_density,
    osgood_infimum,
)
from harmonic_presch.jets import numeric_wirtinger
from harmonic_presch.norms import divergence_witness, norm_estimate, weighted_modulus, weighted_values
from harmonic_presch.presch import (
    affine_post,
    compose_conformal,
    h_plus_eps_g,
    jacobian,
    pre_schwarzian,
    subordinate,
)

from conftest import ACCEPTANCE, disk_points


def record(key, text, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {text}" + (f" ({detail})" if detail else "")
    ACCEPTANCE[key] = line
    print(line)
    return ok


def test_criterion_1_norms():
    cases = [("L", cat.half_plane_map(), 5.0), ("K", cat.harmonic_koebe(), 7.0)]
    cases += [(f"k_{a:g}", cat.analytic(cat.k_alpha(a)), 2 * (a + 1)) for a in (1, 1.5, 2, 2.5)]
    gaps = {name: abs(norm_estimate(f, UnitDisk()).sup_lower_bound - v) for name, f, v in cases}
    worst = max(gaps.values())
    ok = record("1", "norms of L, K, k_alpha within 1e-3", worst <= 1e-3, f"worst gap {worst:.2e}")
    assert ok, gaps


def test_criterion_2_pointwise():
    cases = [(cat.harmonic_koebe(), 2.5), (cat.half_plane_map(), 1.5)]
    cases += [(cat.f_alpha(a, b1), a) for a, b1 in ((1.0, 0), (1.5, 0.3), (2.0, 0.5j), (2.5, -0.2 + 0.6j))]
    results = [ck.check_pointwise_disk(f, a0, grid=(256, 256)) for f, a0 in cases]
    passed = all(r.passed for r in results)
    gap = max(r.details["equality_gap_at_0"] for r in results)
    ok = record("2", "pointwise bound on 256x256 with equality at 0", passed and gap <= 1e-9, f"equality gap {gap:.1e}")
    assert ok, [(r.map_id, r.worst_residual) for r in results if not r.passed]


def test_criterion_3_half_plane_witness():
    f = cat.halfplane_remark3()
    D = RightHalfPlane()
    x = np.logspace(-4, 4, 81)
    axis = np.max(np.abs(weighted_values(f, D, x.astype(complex)) - 7))
    est = norm_estimate(f, D)
    ok = axis <= 1e-9 and est.sup_lower_bound <= 7 + 1e-6
    record("3", "2 Re z |P_f| = 7 on the positive axis, sup <= 7 + 1e-6", ok,
           f"axis gap {axis:.1e}, sup {est.sup_lower_bound:.9f}")
    assert ok


def test_criterion_4_slit_plane_witness():
    f = cat.slit_plane_example()
    x = np.logspace(-3, 3, 52)[1:-1]  # 50 points strictly inside (1e-3, 1e3)
    gap = max(abs(weighted_modulus(f, SlitPlane(), xi) - 9) for xi in x)
    ok = record("4", "slit-plane weighted modulus = 9 at 50 log-spaced x", gap <= 1e-9, f"gap {gap:.1e}")
    assert ok


def _grows(history, n=5):
    tail = [v for _, v in history][-n:]
    return len(tail) == n and all(b > a for a, b in zip(tail, tail[1:]))


def test_criterion_5_counterexamples():
    ext = cat.exterior_counterexample()
    rec = cat.analytic(cat.reciprocal_map())
    w1 = divergence_witness(ext, ExteriorDisk(), 1e3, "exterior_weight")
    w2 = divergence_witness(rec, PuncturedDisk(), 1e3, "inv_density")
    found = w1 is not None and w1.value > 1e3 and w2 is not None and w2.value > 1e3
    # the witnessed values are the stated functionals
    if found:
        direct = exterior_weight(w1.point) * abs(pre_schwarzian(ext, w1.point).p)
        found = math.isclose(direct, w1.value, rel_tol=1e-12) and math.isclose(
            4 * math.log(1 / abs(w2.point)), w2.value, rel_tol=1e-9
        )
    h1 = norm_estimate(ext, ExteriorDisk(), weight="exterior_weight").refinement_history
    h2 = norm_estimate(rec, PuncturedDisk()).refinement_history
    ok = found and _grows(h1) and _grows(h2)
    record("5", "witnesses above 1e3 and increasing refinement histories", ok,
           "" if not found else f"ext at {w1.point:.4g}, 1/z at |z|={abs(w2.point):.2e}")
    assert ok


def test_criterion_6_f_k_family():
    bad = []
    for k in (0.3, 0.7, 1.0):
        for a in (0.0, 1.0, 2.5):
            f = cat.f_k_family(k, a)
            res = ck.check_comparison(f, UnitDisk(), 1.0, grid=(256, 256))
            if not (res.passed and abs(res.details["lhs_at_0"] - k) <= 1e-9):
                bad.append((k, a, "pointwise", res.worst_residual, res.details["lhs_at_0"]))
            n_plus = norm_estimate(cat.analytic(h_plus_eps_g(f, 1))).sup_lower_bound
            n_f = norm_estimate(f).sup_lower_bound
            n_minus = norm_estimate(cat.analytic(h_plus_eps_g(f, -1))).sup_lower_bound
            target = (2 * a + 1) * k
            for name, v in (("h+g", n_plus - k), ("f", n_f), ("h-g", n_minus + k)):
                if abs(v - target) > 1e-3:
                    bad.append((k, a, name, v, target))
    ok = record("6", "comparison equality k at 0 and norm chain for 9 (k, a)", not bad, f"{len(bad)} failures")
    assert ok, bad


def test_criterion_7_distortion_bounds():
    maps = []
    for b1 in (0, 0.5j):
        maps += [(cat.f_alpha(a, b1), a) for a in (1.0, 1.5, 2.0, 2.5)]
        maps.append((affine_post(cat.half_plane_map(), 1, complex(b1).conjugate()), 1.5))
        maps.append((affine_post(cat.harmonic_koebe(), 1, complex(b1).conjugate()), 2.5))
    bounds = all(ck.check_distortion(f, a).passed for f, a in maps)
    r = np.linspace(0, 0.95, 64)
    # k_alpha' (r) = (1-r)^(a-1) / (1+r)^(a+1): the lower bound is attained on the positive radius
    eq = max(ck.distortion_equality(cat.f_alpha(a, b1), a, 0.0, r, "lower") for a in (1.0, 2.0, 2.5) for b1 in (0, 0.5j))
    ok = bounds and eq <= 1e-9
    record("7", "distortion bounds hold; f_alpha lower equality on the positive radius", ok, f"equality gap {eq:.1e}")
    assert ok


@pytest.mark.xfail(strict=True, reason="negative radius gives the upper equality for f_alpha, not the lower one")
def test_criterion_7_literal_negative_radius():
    r = np.linspace(0, 0.95, 64)
    gap = ck.distortion_equality(cat.f_alpha(2.0, 0), 2.0, math.pi, r, "lower")
    upper = ck.distortion_equality(cat.f_alpha(2.0, 0), 2.0, math.pi, r, "upper")
    record("7.literal", "lower equality along the negative radius for f_alpha", gap <= 1e-9,
           f"gap {gap:.2f}; the upper-bound gap there is {upper:.1e}")
    assert gap <= 1e-9


def test_criterion_8_majorization():
    n32, n52 = ck.majorization_radius(1.5), ck.majorization_radius(2.5)
    radii = abs(n32 - 0.208712) <= 1e-6 and abs(n52 - 0.145898) <= 1e-6
    results = []
    for base, alpha, kind in ((cat.half_plane_map(), 1.5, "convex"), (cat.harmonic_koebe(), 2.5, "close-to-convex")):
        F = cat.reflect(base)
        m = ck.check_majorization(F, alpha, closed_form=kind, a_violation=(0.999,))
        numeric = ck.check_majorization(F, alpha, a_samples=(1.0,), a_violation=(0.999,))
        results.append(m.inside_pass and m.violation_point is not None and numeric.violation_point is not None)
        n = ck.majorization_radius(alpha)
        results.append(abs(ck.cor4_derivative(kind, n)) <= 1e-9)
        rs = np.linspace(0.05, 0.95, 19)
        results.append(max(abs(ck.cor4_derivative(kind, x) - ck.cor4_derivative_fd(kind, x)) for x in rs) <= 1e-6)
        # closed-form subordinate Jacobian agrees with the numeric composition
        for a in (0.0, 0.5, 0.999):
            jac = jacobian(subordinate(F, cat.subordination_psi(a)), np.linspace(0.01, 0.9, 20).astype(complex))
            results.append(np.allclose(jac, ck.majorization_jacobian(kind, a, np.linspace(0.01, 0.9, 20)), rtol=1e-10))
    ok = radii and all(results)
    record("8", "n(alpha), majorization inside, violation outside, cor4 root and oracle", ok,
           f"n(3/2)={n32:.6f}, n(5/2)={n52:.6f}")
    assert ok


def _chain_worst(rng, n=100):
    makers = [cat.harmonic_koebe, cat.half_plane_map, lambda: cat.f_alpha(2.0, 0.4j),
              lambda: cat.f_k_family(0.7, 1.0), lambda: cat.analytic(cat.k_alpha(1.5))]
    worst = 0.0
    for i in range(n):
        z0 = 0.7 * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        aut = cat.disk_automorphism(z0, rng.uniform(0, 2 * np.pi))
        choice = i % (len(makers) + 2)
        if choice < len(makers):
            f, phi = makers[choice](), aut
        elif choice == len(makers):
            f, phi = cat.halfplane_remark3(), cat.Composition(cat.cayley(), aut)
        else:
            f, phi = cat.slit_plane_example(), cat.Composition(cat.PrincipalPower(cat.cayley(), 2.0), aut)
        w = complex(disk_points(rng, 1, 0.8)[0])
        j = phi.jet(w)
        lhs = pre_schwarzian(compose_conformal(f, phi), w).p
        rhs = pre_schwarzian(f, complex(j.value)).p * j.d1 + j.d2 / j.d1
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return worst


def test_criterion_9_structural_identities(rng):
    chain = _chain_worst(rng)
    # affine invariance
    f = cat.harmonic_koebe()
    z = disk_points(rng, 200, 0.95)
    g = affine_post(f, 1.3 - 0.4j, 0.5 + 0.2j, 2 - 1j)
    p0 = pre_schwarzian(f, z).p
    affine = float(np.max(np.abs(pre_schwarzian(g, z).p - p0) / np.maximum(1, np.abs(p0))))
    # definition vs dilatation formula vs Wirtinger oracle on the catalog
    catalog = [cat.harmonic_koebe(), cat.half_plane_map(), cat.f_alpha(1.5, 0.3), cat.f_k_family(0.7, 2.5),
               cat.analytic(cat.k_alpha(2.0)), cat.exterior_counterexample(), cat.slit_plane_example(),
               cat.halfplane_remark3(), cat.analytic(cat.reciprocal_map())]
    oracle = 0.0
    for m in catalog:
        D = m.domain
        for p in D.sample(20, rng):
            p = complex(p)
            o = numeric_wirtinger(lambda q: math.log(jacobian(m, q)), p, contains=D.contains).dz
            v = pre_schwarzian(m, p).p
            oracle = max(oracle, abs(o - v) / max(1.0, abs(v)))
    # hyperbolic pullbacks
    w = disk_points(rng, 100, 0.95)
    jc = cat.cayley().jet(w)
    js = cat.PrincipalPower(cat.cayley(), 2.0).jet(w)
    pull = max(
        np.max(np.abs(inv_density(RightHalfPlane(), jc.value) / ((1 - np.abs(w) ** 2) * np.abs(jc.d1)) - 1)),
        np.max(np.abs(inv_density(SlitPlane(), js.value) / ((1 - np.abs(w) ** 2) * np.abs(js.d1)) - 1)),
        np.max(np.abs(RiemannMapped(cat.cayley(), "cayley").inv_density(jc.value) / inv_density(RightHalfPlane(), jc.value) - 1)),
    )
    ok = chain < 1e-9 and affine <= 1e-12 and oracle < 1e-6 and pull <= 1e-8
    record("9", "chain rule, affine invariance, oracle agreement, density pullbacks", ok,
           f"chain {chain:.1e}, affine {affine:.1e}, oracle {oracle:.1e}, pullback {pull:.1e}")
    assert ok


def test_criterion_10_osgood():
    disk = osgood_infimum(UnitDisk())
    half = osgood_infimum(RightHalfPlane())
    punct = osgood_infimum(PuncturedDisk())
    ok = disk.infimum >= 0.499 and half.infimum >= 0.499 and punct.decreasing and punct.tends_to_zero
    record("10", "Osgood infimum >= 0.499 on disk and half-plane, to 0 on the punctured disk", ok,
           f"disk {disk.infimum:.6f}, half-plane {half.infimum:.6f}, punctured last {punct.trend[-1][1]:.2e}")
    assert ok
