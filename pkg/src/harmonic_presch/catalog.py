"""Analytic and harmonic maps with exact second-order jets.

Analytic maps are small descriptor objects (Mobius maps, principal powers,
``k_alpha``, sums, products, compositions, ...).  Each one knows its domain
and its singular points and evaluates :class:`~harmonic_presch.jets.Jet2`
on scalars or arrays.  Harmonic maps are either :class:`Decomposed`
``h + conj(g)`` pairs or :class:`DirectMap` records carrying closed forms
for the Jacobian and pre-Schwarzian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import DomainError, NotSensePreservingError, ParameterError, SingularityError
from .hyperbolic import (
    DomainModel,
    ExteriorDisk,
    RightHalfPlane,
    SlitPlane,
    UnitDisk,
)
from .jets import Jet2, jet_compose, jet_mul, jet_variable, numeric_wirtinger, power_jet

SINGULAR_MARGIN = 1e-9

OK, OUTSIDE, SINGULAR = 0, 1, 2

__all__ = [
    "AnalyticMap",
    "Identity",
    "Constant",
    "Mobius",
    "PrincipalPower",
    "KAlpha",
    "JetFunction",
    "DerivativeDefined",
    "ScalarMultiple",
    "Sum",
    "Product",
    "Composition",
    "HarmonicMap",
    "Decomposed",
    "DirectMap",
    "FamilyDescriptor",
    "analytic",
    "harmonic_koebe",
    "half_plane_map",
    "k_alpha",
    "f_alpha",
    "f_k_parts",
    "f_k_family",
    "exterior_counterexample",
    "slit_plane_example",
    "halfplane_remark3",
    "reciprocal_map",
    "cayley",
    "disk_automorphism",
    "subordination_psi",
    "reflect",
    "family",
]


def _as_complex(z) -> np.ndarray:
    return np.asarray(z, dtype=complex)


def _scalarize(j: Jet2, like: np.ndarray) -> Jet2:
    if like.ndim == 0:
        return Jet2(complex(j.value), complex(j.d1), complex(j.d2))
    return j


def _raise_for(codes: np.ndarray, z: np.ndarray, name: str) -> None:
    codes = np.atleast_1d(codes)
    zs = np.atleast_1d(z)
    if np.any(codes == OUTSIDE):
        raise DomainError(f"{name}: point outside domain", zs[np.argmax(codes == OUTSIDE)])
    if np.any(codes == SINGULAR):
        raise SingularityError(f"{name}: too close to a singular point", zs[np.argmax(codes == SINGULAR)])


def _max_codes(a, b) -> np.ndarray:
    # np.maximum returns a numpy scalar for 0-d inputs; keep an array
    return np.asarray(np.maximum(a, b))


def _domain_codes(domain: DomainModel | None, singular: tuple, z: np.ndarray) -> np.ndarray:
    codes = np.zeros(z.shape, dtype=np.int8)
    finite = np.isfinite(z)
    codes[~finite] = OUTSIDE
    if domain is not None:
        inside = np.asarray(domain.contains(np.where(finite, z, 0)), dtype=bool)
        codes[finite & ~inside] = OUTSIDE
    for s in singular:
        near = np.abs(z - s) < SINGULAR_MARGIN
        codes[(codes == OK) & near] = SINGULAR
    return codes


class AnalyticMap:
    """Common interface: ``jet``, ``__call__``, ``derivative`` and validity codes."""

    name: str = "analytic"
    domain: DomainModel | None = None

    @property
    def singular_points(self) -> tuple:
        return ()

    def _jet(self, z: np.ndarray, need_value: bool) -> Jet2:
        raise NotImplementedError

    def _log_derivative(self, z: np.ndarray):
        """``h''/h'`` without checks; subclasses override where the ratio is
        representable but the jet itself overflows."""
        j = self._jet(z, False)
        return j.d2 / j.d1

    def codes(self, z) -> np.ndarray:
        """Per-point validity: 0 ok, 1 outside the domain, 2 near a singular point."""
        return _domain_codes(self.domain, self.singular_points, _as_complex(z))

    def check(self, z) -> None:
        z = _as_complex(z)
        _raise_for(self.codes(z), z, self.name)

    def jet(self, z, check: bool = True, need_value: bool = True) -> Jet2:
        z = _as_complex(z)
        if check:
            self.check(z)
        return _scalarize(self._jet(z, need_value), z)

    def __call__(self, z):
        return self.jet(z).value

    def derivative(self, z):
        return self.jet(z, need_value=False).d1

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


@dataclass(repr=False, eq=False)
class Identity(AnalyticMap):
    domain: DomainModel | None = None
    name: str = "identity"

    def _jet(self, z, need_value):
        return jet_variable(z)


@dataclass(repr=False, eq=False)
class Constant(AnalyticMap):
    c: complex = 0j
    domain: DomainModel | None = None
    name: str = "constant"

    def _jet(self, z, need_value):
        zero = np.zeros(z.shape, dtype=complex)
        return Jet2(zero + self.c, zero, zero)


@dataclass(repr=False, eq=False)
class Mobius(AnalyticMap):
    """``(a z + b) / (c z + d)``; singular at the pole unless overridden."""

    a: complex = 1
    b: complex = 0
    c: complex = 0
    d: complex = 1
    domain: DomainModel | None = None
    singular: tuple | None = None
    name: str = "mobius"

    @property
    def singular_points(self):
        if self.singular is not None:
            return self.singular
        return (-self.d / self.c,) if self.c != 0 else ()

    def _jet(self, z, need_value):
        den = self.c * z + self.d
        det = self.a * self.d - self.b * self.c
        d1 = det / den**2
        return Jet2((self.a * z + self.b) / den, d1, -2 * self.c * d1 / den)

    def _log_derivative(self, z):
        return -2 * self.c / (self.c * z + self.d)


@dataclass(repr=False, eq=False)
class PrincipalPower(AnalyticMap):
    """``base(z) ** exponent`` on the principal branch of the logarithm."""

    base: AnalyticMap = None
    exponent: float = 1.0
    name: str = "power"

    @property
    def domain(self):
        return self.base.domain

    @property
    def singular_points(self):
        return self.base.singular_points

    def codes(self, z):
        z = _as_complex(z)
        codes = self.base.codes(z)
        ok = codes == OK
        with np.errstate(all="ignore"):
            v = self.base.jet(np.where(ok, z, 0), check=False).value
        codes = np.array(codes)
        codes[ok & (np.abs(v) < SINGULAR_MARGIN)] = SINGULAR
        return codes

    def _jet(self, z, need_value):
        inner = self.base._jet(z, True)
        return jet_compose(power_jet(inner.value, self.exponent), inner)


@dataclass(repr=False, eq=False)
class KAlpha(AnalyticMap):
    """``(1/(2a)) [1 - ((1-z)/(1+z))**a]`` with ``k' = (1-z)**(a-1) / (1+z)**(a+1)``."""

    alpha: float = 1.0
    domain: DomainModel | None = field(default_factory=UnitDisk)
    name: str = "k-alpha"

    @property
    def singular_points(self):
        return (1.0 + 0j, -1.0 + 0j)

    def _jet(self, z, need_value):
        a = self.alpha
        lm, lp = np.log(1 - z), np.log(1 + z)
        d1 = np.exp((a - 1) * lm - (a + 1) * lp)
        d2 = d1 * (-(a - 1) / (1 - z) - (a + 1) / (1 + z))
        if need_value:
            value = (1 - np.exp(a * (lm - lp))) / (2 * a)
        else:
            value = np.full(z.shape, np.nan, dtype=complex)
        return Jet2(value, d1, d2)


@dataclass(repr=False, eq=False)
class JetFunction(AnalyticMap):
    """Map given as a function of the identity jet: jet arithmetic or closed-form derivatives."""

    fn: Callable[[Jet2], Jet2] = None
    domain: DomainModel | None = None
    singular: tuple = ()
    name: str = "jet-function"

    @property
    def singular_points(self):
        return self.singular

    def _jet(self, z, need_value):
        return self.fn(jet_variable(z))


@dataclass(repr=False, eq=False)
class DerivativeDefined(AnalyticMap):
    """Map known through ``f'`` and ``f''``; ``f(z) = int_0^z f'`` by quadrature.

    Values use adaptive Gauss-Kronrod quadrature (QUADPACK) along the radial
    segment ``[0, z]`` and are only computed when requested.
    """

    d1fn: Callable = None
    d2fn: Callable = None
    domain: DomainModel | None = None
    singular: tuple = ()
    name: str = "derivative-defined"
    quad_tol: float = 1e-10

    @property
    def singular_points(self):
        return self.singular

    def _value(self, z: complex) -> complex:
        if z == 0:
            return 0j
        val, _ = integrate.quad(
            lambda t: complex(self.d1fn(t * z)) * z,
            0.0,
            1.0,
            complex_func=True,
            epsabs=self.quad_tol,
            epsrel=self.quad_tol,
            limit=200,
        )
        return val

    def _jet(self, z, need_value):
        d1 = self.d1fn(z)
        d2 = self.d2fn(z)
        if need_value:
            flat = [self._value(complex(p)) for p in np.atleast_1d(z).ravel()]
            value = np.asarray(flat, dtype=complex).reshape(z.shape)
        else:
            value = np.full(z.shape, np.nan, dtype=complex)
        return Jet2(value, d1 + 0j * z, d2 + 0j * z)


@dataclass(repr=False, eq=False)
class ScalarMultiple(AnalyticMap):
    base: AnalyticMap = None
    c: complex = 1
    name: str = "scaled"

    @property
    def domain(self):
        return self.base.domain

    def codes(self, z):
        return self.base.codes(z)

    def _jet(self, z, need_value):
        return self.base._jet(z, need_value) * self.c

    def _log_derivative(self, z):
        return self.base._log_derivative(z)


@dataclass(repr=False, eq=False)
class Sum(AnalyticMap):
    left: AnalyticMap = None
    right: AnalyticMap = None
    name: str = "sum"

    @property
    def domain(self):
        return self.left.domain

    def codes(self, z):
        return _max_codes(self.left.codes(z), self.right.codes(z))

    def _jet(self, z, need_value):
        return self.left._jet(z, need_value) + self.right._jet(z, need_value)


@dataclass(repr=False, eq=False)
class Product(AnalyticMap):
    left: AnalyticMap = None
    right: AnalyticMap = None
    name: str = "product"

    @property
    def domain(self):
        return self.left.domain

    def codes(self, z):
        return _max_codes(self.left.codes(z), self.right.codes(z))

    def _jet(self, z, need_value):
        return jet_mul(self.left._jet(z, True), self.right._jet(z, True))


@dataclass(repr=False, eq=False)
class Composition(AnalyticMap):
    """``outer(inner(z))``; valid where ``inner`` is valid and lands in ``outer``'s domain."""

    outer: AnalyticMap = None
    inner: AnalyticMap = None
    name: str = "composition"

    @property
    def domain(self):
        return self.inner.domain

    def codes(self, z):
        z = _as_complex(z)
        codes = np.array(self.inner.codes(z))
        ok = codes == OK
        with np.errstate(all="ignore"):
            w = self.inner.jet(np.where(ok, z, 0), check=False).value
        outer = np.asarray(self.outer.codes(np.where(ok, w, np.nan)))
        codes[ok] = outer[ok]
        return codes

    def _jet(self, z, need_value):
        inner = self.inner._jet(z, True)
        return jet_compose(self.outer._jet(inner.value, need_value), inner)


# ---------------------------------------------------------------- harmonic maps


class HarmonicMap:
    name: str = "harmonic"
    domain: DomainModel | None = None

    def codes(self, z) -> np.ndarray:
        raise NotImplementedError

    def check(self, z) -> None:
        z = _as_complex(z)
        _raise_for(self.codes(z), z, self.name)

    def value(self, z):
        raise NotImplementedError


@dataclass(repr=False, eq=False)
class Decomposed(HarmonicMap):
    """``f = h + conj(g)``.

    ``omega`` optionally supplies the dilatation ``g'/h'`` in closed form.
    Evaluators then take ``omega'`` from it instead of from
    ``(g'' h' - g' h'') / h'^2``, which cancels badly where ``h'`` is large.
    """

    h: AnalyticMap = None
    g: AnalyticMap = None
    name: str = "decomposed"
    omega: AnalyticMap | None = None

    @property
    def domain(self):
        return self.h.domain

    def codes(self, z):
        return _max_codes(self.h.codes(z), self.g.codes(z))

    def jets(self, z, check: bool = True, need_value: bool = False) -> tuple[Jet2, Jet2]:
        z = _as_complex(z)
        if check:
            self.check(z)
        return (
            _scalarize(self.h._jet(z, need_value), z),
            _scalarize(self.g._jet(z, need_value), z),
        )

    def value(self, z):
        hj, gj = self.jets(z, need_value=True)
        return hj.value + np.conj(gj.value)

    def __repr__(self):
        return f"<Decomposed {self.name}>"


@dataclass(repr=False, eq=False)
class DirectMap(HarmonicMap):
    """Harmonic map known through closed forms rather than an ``(h, g)`` pair.

    The closed-form pre-Schwarzian is checked against ``(log J)_z`` from the
    finite-difference oracle at construction time.
    """

    jacobian_fn: Callable = None
    presch_fn: Callable = None
    sampler: Callable = None
    domain: DomainModel | None = None
    singular: tuple = ()
    name: str = "direct"
    validate: bool = True
    probe_points: int = 20

    def __post_init__(self):
        if self.validate:
            self._validate()

    def codes(self, z):
        return _domain_codes(self.domain, self.singular, _as_complex(z))

    def _validate(self):
        rng = np.random.default_rng(20240611)
        pts = self.domain.sample(self.probe_points, rng)
        for p in pts:
            p = complex(p)
            jac = float(self.jacobian_fn(p))
            if not jac > 0:
                raise NotSensePreservingError(f"{self.name}: closed-form Jacobian not positive", p)
            oracle = numeric_wirtinger(
                lambda q: math.log(float(self.jacobian_fn(q))), p, contains=self.domain.contains
            ).dz
            closed = complex(self.presch_fn(p))
            if abs(oracle - closed) > 1e-6 * max(1.0, abs(closed)):
                raise ValueError(
                    f"{self.name}: closed-form pre-Schwarzian {closed} disagrees with (log J)_z = {oracle} at {p}"
                )

    def value(self, z):
        self.check(z)
        return self.sampler(_as_complex(z))

    def __repr__(self):
        return f"<DirectMap {self.name}>"


def analytic(h: AnalyticMap, name: str | None = None) -> Decomposed:
    """View an analytic map as the harmonic map ``h + conj(0)``."""
    return Decomposed(h, Constant(0j, h.domain), name=name or h.name)


# ---------------------------------------------------------------- constructors


# Closed-form derivatives: differentiating the rational values through the
# quotient rule loses digits near z = -1, where h_K' vanishes.


def _koebe_h(z: Jet2) -> Jet2:
    w = z.value
    return Jet2((w - w * w / 2 + w**3 / 6) / (1 - w) ** 3, (1 + w) / (1 - w) ** 4, (5 + 3 * w) / (1 - w) ** 5)


def _koebe_g(z: Jet2) -> Jet2:
    w = z.value
    return Jet2(
        (w * w / 2 + w**3 / 6) / (1 - w) ** 3, w * (1 + w) / (1 - w) ** 4, (1 + 5 * w + 2 * w * w) / (1 - w) ** 5
    )


def _half_h(z: Jet2) -> Jet2:
    w = z.value
    return Jet2((2 * w - w * w) / (2 * (1 - w) ** 2), 1 / (1 - w) ** 3, 3 / (1 - w) ** 4)


def _half_g(z: Jet2) -> Jet2:
    w = z.value
    return Jet2(-(w * w) / (2 * (1 - w) ** 2), -w / (1 - w) ** 3, -(1 + 2 * w) / (1 - w) ** 4)


def harmonic_koebe() -> Decomposed:
    disk = UnitDisk()
    return Decomposed(
        JetFunction(_koebe_h, disk, (1 + 0j,), "koebe-h"),
        JetFunction(_koebe_g, disk, (1 + 0j,), "koebe-g"),
        name="koebe",
        omega=Identity(disk),
    )


def half_plane_map() -> Decomposed:
    disk = UnitDisk()
    return Decomposed(
        JetFunction(_half_h, disk, (1 + 0j,), "L-h"),
        JetFunction(_half_g, disk, (1 + 0j,), "L-g"),
        name="half-plane-L",
        omega=Mobius(-1, 0, 0, 1, domain=disk),
    )


def k_alpha(alpha: float) -> KAlpha:
    if not alpha >= 1:
        raise ParameterError(f"k_alpha needs alpha >= 1, got {alpha}")
    return KAlpha(float(alpha), name=f"k-alpha:{alpha:g}")


def f_alpha(alpha: float, b1: complex) -> Decomposed:
    """``k_alpha + conj(b1 k_alpha)``."""
    b1 = complex(b1)
    if not abs(b1) < 1:
        raise NotSensePreservingError(f"f_alpha needs |b1| < 1, got {b1}")
    k = k_alpha(alpha)
    return Decomposed(k, ScalarMultiple(k, b1), name=f"f-alpha:{alpha:g}:{b1}", omega=Constant(b1, k.domain))


def f_k_parts(k: float, a: float) -> tuple[DerivativeDefined, DerivativeDefined]:
    """``h_k, g_k`` with ``h_k' = (1+kz)^a / (1-kz)^(a+1)`` and ``g_k' = k z h_k'``."""
    if not (0 < k <= 1) or not a >= 0:
        raise ParameterError(f"f_k family needs k in (0, 1] and a >= 0, got k={k}, a={a}")
    k, a = float(k), float(a)

    def hd1(z):
        return np.exp(a * np.log(1 + k * z) - (a + 1) * np.log(1 - k * z))

    def hd2(z):
        return hd1(z) * (a * k / (1 + k * z) + (a + 1) * k / (1 - k * z))

    def gd1(z):
        return k * z * hd1(z)

    def gd2(z):
        return k * hd1(z) + k * z * hd2(z)

    disk = UnitDisk()
    sing = (1 / k + 0j, -1 / k + 0j)
    return (
        DerivativeDefined(hd1, hd2, disk, sing, f"h_k:{k:g}:{a:g}"),
        DerivativeDefined(gd1, gd2, disk, sing, f"g_k:{k:g}:{a:g}"),
    )


def f_k_family(k: float, a: float) -> Decomposed:
    h, g = f_k_parts(k, a)
    return Decomposed(h, g, name=f"f-k:{k:g}:{a:g}", omega=Mobius(k, 0, 0, 1, domain=h.domain))


def _ext_jacobian(z):
    z = _as_complex(z)
    r2 = np.abs(z) ** 2
    return np.abs(1 + z) ** 2 * (r2 - 1) / r2**2


def _ext_presch(z):
    z = _as_complex(z)
    r2 = np.abs(z) ** 2
    return (2 + z - r2) / (z * (z + 1) * (r2 - 1))


def _ext_sampler(z):
    z = _as_complex(z)
    return z - 1 / np.conj(z) + 2 * np.log(np.abs(z))


def exterior_counterexample() -> DirectMap:
    """``F(z) = z - 1/conj(z) + 2 log|z|`` on ``|z| > 1``."""
    return DirectMap(_ext_jacobian, _ext_presch, _ext_sampler, ExteriorDisk(), (-1 + 0j,), "ext-counter")


def _slit_jacobian(z):
    z = _as_complex(z)
    s = np.sqrt(z)
    return ((s + np.conj(s)) / (32 * np.abs(z) ** 5)).real


def _slit_presch(z):
    z = _as_complex(z)
    a = np.abs(z)
    return -(5 * a + 4 * z) / (2 * z * (a + z))


def _slit_sampler(z):
    z = _as_complex(z)
    s3 = z * np.sqrt(z)
    h = (2 / s3 + 3 / z - 5) / 24
    g = (2 / s3 - 3 / z + 1) / 24
    return h + np.conj(g)


def slit_plane_example() -> DirectMap:
    """Koebe function pulled back to ``C \\ (-inf, 0]`` through ``sqrt`` and a Cayley map."""
    return DirectMap(_slit_jacobian, _slit_presch, _slit_sampler, SlitPlane(), (0j,), "slit-example")


def _r3_jacobian(z):
    z = _as_complex(z)
    return ((z + np.conj(z)) / (8 * np.abs(z) ** 8)).real


def _r3_presch(z):
    z = _as_complex(z)
    return -(3 * z + 4 * np.conj(z)) / (z * (z + np.conj(z)))


def _r3_sampler(z):
    z = _as_complex(z)
    return harmonic_koebe().value((1 - z) / (1 + z))


def halfplane_remark3() -> DirectMap:
    """Koebe function composed with ``(1-z)/(1+z)`` on the right half-plane."""
    return DirectMap(_r3_jacobian, _r3_presch, _r3_sampler, RightHalfPlane(), (0j,), "remark3")


def reciprocal_map() -> Mobius:
    """``1/z`` on the punctured disk; the pole is the puncture, excluded by the domain."""
    from .hyperbolic import PuncturedDisk

    return Mobius(0, 1, 1, 0, domain=PuncturedDisk(), singular=(), name="reciprocal")


def cayley(domain: DomainModel | None = None) -> Mobius:
    """``(1+z)/(1-z)``: disk onto the right half-plane."""
    return Mobius(1, 1, -1, 1, domain=domain or UnitDisk(), name="cayley")


def disk_automorphism(z0: complex, theta: float = 0.0) -> Mobius:
    """``e^{i theta} (z0 + z) / (1 + conj(z0) z)``."""
    z0 = complex(z0)
    if not abs(z0) < 1:
        raise ParameterError(f"disk automorphism needs |z0| < 1, got {z0}")
    rot = complex(math.cos(theta), math.sin(theta))
    return Mobius(rot, rot * z0, z0.conjugate(), 1, domain=UnitDisk(), name=f"automorphism:{z0}:{theta:g}")


def subordination_psi(a: float) -> Product:
    """``z (a + z) / (1 + a z)``: disk into itself, fixing 0."""
    if not 0 <= a <= 1:
        raise ParameterError(f"psi needs a in [0, 1], got {a}")
    disk = UnitDisk()
    factor = Mobius(1, a, a, 1, domain=disk, singular=() if a < 1 else (-1 + 0j,), name="psi-factor")
    return Product(Identity(disk), factor, name=f"psi:{a:g}")


def reflect(f: Decomposed) -> Decomposed:
    """``-f(-z)``: both parts conjugated by the half-turn, so normalization is kept."""
    turn = Mobius(-1, 0, 0, 1, domain=UnitDisk(), name="half-turn")
    h = ScalarMultiple(Composition(f.h, turn), -1)
    g = ScalarMultiple(Composition(f.g, turn), -1)
    omega = None if f.omega is None else Composition(f.omega, turn)
    return Decomposed(h, g, name=f"flip:{f.name}", omega=omega)


# ---------------------------------------------------------------- families


@dataclass(frozen=True)
class FamilyDescriptor:
    """Affine and linear invariant family with its order and specified order."""

    name: str
    alpha0: float
    alpha: float
    extremal: Callable[[], HarmonicMap]
    conjectural: bool = False

    def __post_init__(self):
        if not (self.alpha >= 1 and self.alpha0 <= self.alpha <= self.alpha0 + 0.5 + 1e-15):
            raise ParameterError(
                f"family {self.name}: need alpha >= 1 and alpha0 <= alpha <= alpha0 + 1/2"
            )


def family(name: str, alpha: float | None = None, alpha0_sh: float = 2.5) -> FamilyDescriptor:
    """``K_H``, ``C_H``, ``S_H`` (``alpha0`` configurable, conjectured 5/2) or ``F_alpha``."""
    if name == "K_H":
        return FamilyDescriptor("K_H", 1.5, 2.0, half_plane_map)
    if name == "C_H":
        return FamilyDescriptor("C_H", 2.5, 3.0, harmonic_koebe)
    if name == "S_H":
        return FamilyDescriptor("S_H", alpha0_sh, alpha0_sh + 0.5, harmonic_koebe, conjectural=True)
    if name == "F_alpha":
        if alpha is None:
            raise ParameterError("F_alpha needs alpha")
        return FamilyDescriptor(f"F_alpha({alpha:g})", alpha, alpha, lambda: f_alpha(alpha, 0))
    raise ParameterError(f"unknown family {name!r}")
