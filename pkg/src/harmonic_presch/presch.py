"""Jacobian, dilatation and harmonic pre-Schwarzian, plus the transforms that act on them.

For ``f = h + conj(g)`` the pre-Schwarzian is evaluated as

    P_f = h''/h' - conj(w) w' / (1 - |w|^2),   w = g'/h',

and for :class:`~harmonic_presch.catalog.DirectMap` records the stored
closed form is used.  Both agree with ``(log J_f)_z``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import (
    AnalyticMap,
    Composition,
    Constant,
    Decomposed,
    DirectMap,
    HarmonicMap,
    Mobius,
    ScalarMultiple,
    Sum,
    _as_complex,
    disk_automorphism,
)
from .errors import NotSensePreservingError, ParameterError, SingularityError

__all__ = [
    "PreschValue",
    "evaluate_raw",
    "jacobian",
    "dilatation",
    "pre_schwarzian",
    "pre_schwarzian_analytic",
    "h_plus_eps_g",
    "compose_conformal",
    "subordinate",
    "affine_post",
    "affine_transform_A_eps",
    "koebe_transform",
    "family_shift_S",
]


@dataclass(frozen=True)
class PreschValue:
    p: complex | np.ndarray
    jacobian: float | np.ndarray
    omega: complex | np.ndarray | None = None


def evaluate_raw(f: HarmonicMap, z: np.ndarray):
    """``(J, P, omega)`` without domain checks; ``omega`` is None for DirectMap.

    Meant for grid sweeps: callers mask invalid points first and filter
    non-finite or non-positive Jacobians afterwards.
    """
    z = _as_complex(z)
    with np.errstate(all="ignore"):
        if isinstance(f, Decomposed) and isinstance(f.g, Constant):
            hj = f.h._jet(z, False)
            jac = np.abs(hj.d1) ** 2
            return jac, np.where(hj.d1 == 0, np.nan, f.h._log_derivative(z)), np.zeros_like(hj.d1)
        if isinstance(f, Decomposed):
            hj = f.h._jet(z, False)
            gj = f.g._jet(z, False)
            jac = np.abs(hj.d1) ** 2 - np.abs(gj.d1) ** 2
            if f.omega is not None:
                oj = f.omega._jet(z, True)
                omega, domega = oj.value, oj.d1
            else:
                omega = gj.d1 / hj.d1
                domega = (gj.d2 * hj.d1 - gj.d1 * hj.d2) / hj.d1**2
            m = np.abs(omega)
            p = hj.d2 / hj.d1 - np.conj(omega) * domega / ((1 - m) * (1 + m))
            return jac, p, omega
        if isinstance(f, DirectMap):
            return np.asarray(f.jacobian_fn(z), dtype=float), _as_complex(f.presch_fn(z)), None
    raise TypeError(f"unsupported map type {type(f).__name__}")


def _out(x, z):
    if np.ndim(z) == 0:
        x = np.asarray(x)[()]
        return float(x) if np.isrealobj(x) else complex(x)
    return x


def jacobian(f: HarmonicMap, z):
    z = _as_complex(z)
    f.check(z)
    jac, _, _ = evaluate_raw(f, z)
    _require_positive(jac, z)
    return _out(np.asarray(jac, dtype=float), z)


def _require_positive(jac, z):
    bad = ~(np.atleast_1d(jac) > 0)
    if bad.any():
        raise NotSensePreservingError("non-positive Jacobian", np.atleast_1d(z)[np.argmax(bad)])


def dilatation(f: Decomposed, z):
    if not isinstance(f, Decomposed):
        raise TypeError("dilatation needs a decomposed map h + conj(g)")
    z = _as_complex(z)
    f.check(z)
    _, _, omega = evaluate_raw(f, z)
    bad = ~(np.atleast_1d(np.abs(omega)) < 1)
    if bad.any():
        raise NotSensePreservingError("|dilatation| >= 1", np.atleast_1d(z)[np.argmax(bad)])
    return _out(omega, z)


def pre_schwarzian(f: HarmonicMap, z) -> PreschValue:
    z = _as_complex(z)
    f.check(z)
    jac, p, omega = evaluate_raw(f, z)
    _require_positive(jac, z)
    if not np.all(np.isfinite(p)):
        raise SingularityError("pre-Schwarzian not finite", np.atleast_1d(z)[np.argmin(np.isfinite(np.atleast_1d(p)))])
    return PreschValue(_out(p, z), _out(np.asarray(jac, dtype=float), z), None if omega is None else _out(omega, z))


def pre_schwarzian_analytic(h: AnalyticMap, z):
    """``h''/h'``."""
    j = h.jet(z, need_value=False)
    d1 = np.atleast_1d(j.d1)
    if np.any(d1 == 0):
        raise SingularityError("critical point of h", np.atleast_1d(_as_complex(z))[np.argmax(d1 == 0)])
    return j.d2 / j.d1


def h_plus_eps_g(f: Decomposed, eps: complex) -> AnalyticMap:
    """The analytic map ``h + eps g`` (locally univalent for ``|eps| <= 1``)."""
    eps = complex(eps)
    if abs(eps) > 1 + 1e-15:
        raise ParameterError(f"need |eps| <= 1, got {eps}")
    if eps == 0:
        return f.h
    return Sum(f.h, ScalarMultiple(f.g, eps), name=f"{f.h.name}+({eps})*{f.g.name}")


def compose_conformal(f: HarmonicMap, phi: AnalyticMap) -> HarmonicMap:
    """``f o phi`` for a conformal ``phi`` mapping into the domain of ``f``."""
    if isinstance(f, Decomposed):
        return Decomposed(
            Composition(f.h, phi), Composition(f.g, phi), name=f"{f.name}o{phi.name}", omega=_compose_omega(f, phi)
        )
    if isinstance(f, DirectMap):

        def jac(w):
            j = phi.jet(w, check=False)
            return np.abs(j.d1) ** 2 * np.asarray(f.jacobian_fn(j.value), dtype=float)

        def presch(w):
            j = phi.jet(w, check=False)
            return f.presch_fn(j.value) * j.d1 + j.d2 / j.d1

        return _ComposedDirect(
            jac,
            presch,
            lambda w: f.sampler(phi.jet(w, check=False).value),
            phi.domain,
            phi.singular_points,
            f"{f.name}o{phi.name}",
            validate=False,
            outer=f,
            phi=phi,
        )
    raise TypeError(f"unsupported map type {type(f).__name__}")


def _compose_omega(f: Decomposed, phi: AnalyticMap):
    return None if f.omega is None else Composition(f.omega, phi)


class _ComposedDirect(DirectMap):
    def __init__(self, *args, outer, phi, **kwargs):
        super().__init__(*args, **kwargs)
        self.outer = outer
        self.phi = phi

    def codes(self, z):
        z = _as_complex(z)
        codes = np.array(self.phi.codes(z))
        ok = codes == 0
        with np.errstate(all="ignore"):
            w = self.phi.jet(np.where(ok, z, 0), check=False).value
        outer = np.asarray(self.outer.codes(np.where(ok, w, np.nan)))
        codes[ok] = outer[ok]
        return codes


def subordinate(F: Decomposed, psi: AnalyticMap) -> Decomposed:
    """``F o psi`` without requiring ``psi`` to be locally univalent."""
    if not isinstance(F, Decomposed):
        raise TypeError("subordination needs a decomposed map")
    return Decomposed(
        Composition(F.h, psi), Composition(F.g, psi), name=f"{F.name}o{psi.name}", omega=_compose_omega(F, psi)
    )


def affine_post(f: Decomposed, a: complex, b: complex, c: complex = 0) -> Decomposed:
    """``a f + b conj(f) + c``; sense-preserving maps stay so only when ``|a| > |b|``."""
    if not isinstance(f, Decomposed):
        raise TypeError("affine post-composition needs a decomposed map")
    a, b, c = complex(a), complex(b), complex(c)
    if not abs(a) > abs(b):
        raise NotSensePreservingError(f"affine map reverses orientation: |a|={abs(a)} <= |b|={abs(b)}")
    # a(h + conj g) + b(conj h + g) + c = (a h + b g + c) + conj(conj(a) g + conj(b) h)
    new_h = Sum(ScalarMultiple(f.h, a), ScalarMultiple(f.g, b))
    if c != 0:
        new_h = Sum(new_h, Constant(c, f.h.domain))
    new_g = Sum(ScalarMultiple(f.g, a.conjugate()), ScalarMultiple(f.h, b.conjugate()))
    omega = None
    if f.omega is not None:
        # (conj(a) w + conj(b)) / (a + b w)
        omega = Composition(Mobius(a.conjugate(), b.conjugate(), b, a, domain=f.h.domain, singular=()), f.omega)
    return Decomposed(new_h, new_g, name=f"affine({a},{b},{c})o{f.name}", omega=omega)


def affine_transform_A_eps(f: Decomposed, eps: complex) -> Decomposed:
    """``(f + eps conj(f)) / (1 + eps g'(0))``."""
    eps = complex(eps)
    if not abs(eps) < 1:
        raise ParameterError(f"affine transform needs |eps| < 1, got {eps}")
    g0 = complex(f.g.jet(0, need_value=False).d1)
    norm = 1 + eps * g0
    if abs(norm) < 1e-14:
        raise ParameterError("degenerate normalization 1 + eps g'(0) = 0")
    return affine_post(f, 1 / norm, eps / norm)


def koebe_transform(f: Decomposed, phi: AnalyticMap) -> Decomposed:
    """``(f o phi - f(phi(0))) / (phi'(0) h'(phi(0)))`` for a disk automorphism ``phi``."""
    if not isinstance(f, Decomposed):
        raise TypeError("Koebe transform needs a decomposed map")
    pj = phi.jet(0)
    hj = f.h.jet(pj.value)
    gj = f.g.jet(pj.value)
    c = complex(pj.d1 * hj.d1)
    if c == 0:
        raise ParameterError("degenerate Koebe transform: phi'(0) h'(phi(0)) = 0")
    h = ScalarMultiple(Sum(Composition(f.h, phi), Constant(-hj.value, phi.domain)), 1 / c)
    g = ScalarMultiple(Sum(Composition(f.g, phi), Constant(-gj.value, phi.domain)), 1 / c.conjugate())
    omega = None if f.omega is None else ScalarMultiple(Composition(f.omega, phi), c / c.conjugate())
    return Decomposed(h, g, name=f"K[{phi.name}]({f.name})", omega=omega)


def family_shift_S(F: Decomposed, z0: complex) -> Decomposed:
    """Koebe transform at ``z0`` followed by the affine transform that kills ``g'(0)``."""
    phi = disk_automorphism(z0, 0.0)
    w = complex(phi(0))
    eps0 = -complex(F.g.jet(w, need_value=False).d1).conjugate() / complex(F.h.jet(w, need_value=False).d1)
    return affine_transform_A_eps(koebe_transform(F, phi), eps0)

