"""Second-order jets of analytic functions and finite-difference Wirtinger oracles.

A :class:`Jet2` bundles ``(f(z), f'(z), f''(z))``.  Fields may be complex
scalars or complex numpy arrays of a common shape, so a whole sampling grid
can be pushed through the arithmetic at once.

The finite-difference routines are deliberately independent of the jet
machinery; tests use them to cross-check the exact jets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, SingularityError

__all__ = [
    "Jet2",
    "WirtingerPair",
    "jet_add",
    "jet_sub",
    "jet_mul",
    "jet_div",
    "jet_compose",
    "jet_constant",
    "jet_variable",
    "power_jet",
    "numeric_wirtinger",
    "numeric_second_derivative",
]


@dataclass(frozen=True)
class Jet2:
    """Value, first and second complex derivative at a point (or array of points)."""

    value: complex | np.ndarray
    d1: complex | np.ndarray
    d2: complex | np.ndarray

    def __add__(self, other):
        return jet_add(self, _lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return jet_sub(self, _lift(other))

    def __rsub__(self, other):
        return jet_sub(_lift(other), self)

    def __neg__(self):
        return Jet2(-self.value, -self.d1, -self.d2)

    def __mul__(self, other):
        if isinstance(other, Jet2):
            return jet_mul(self, other)
        return Jet2(self.value * other, self.d1 * other, self.d2 * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return jet_div(self, _lift(other))

    def __rtruediv__(self, other):
        return jet_div(_lift(other), self)


def _lift(x) -> Jet2:
    if isinstance(x, Jet2):
        return x
    return Jet2(x, 0j * x, 0j * x)


def jet_constant(c) -> Jet2:
    return _lift(c)


def jet_variable(z) -> Jet2:
    """Jet of the identity map at ``z``."""
    z = np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
    one = np.ones_like(z) if np.ndim(z) else 1 + 0j
    return Jet2(z, one, 0 * one)


def jet_add(a: Jet2, b: Jet2) -> Jet2:
    return Jet2(a.value + b.value, a.d1 + b.d1, a.d2 + b.d2)


def jet_sub(a: Jet2, b: Jet2) -> Jet2:
    return Jet2(a.value - b.value, a.d1 - b.d1, a.d2 - b.d2)


def jet_mul(a: Jet2, b: Jet2) -> Jet2:
    return Jet2(
        a.value * b.value,
        a.d1 * b.value + a.value * b.d1,
        a.d2 * b.value + 2 * a.d1 * b.d1 + a.value * b.d2,
    )


def jet_div(a: Jet2, b: Jet2, point: complex | None = None) -> Jet2:
    """Quotient ``a / b``; ``point`` is only used to label the error."""
    bv = np.asarray(b.value)
    if np.any(bv == 0):
        raise SingularityError("division by a jet with zero value", point)
    q = a.value / b.value
    q1 = (a.d1 - q * b.d1) / b.value
    q2 = (a.d2 - 2 * q1 * b.d1 - q * b.d2) / b.value
    return Jet2(q, q1, q2)


def jet_compose(outer: Jet2, inner: Jet2) -> Jet2:
    """Jet of ``f o g`` given the jet of ``f`` taken at ``g(z)`` and the jet of ``g`` at ``z``."""
    return Jet2(
        outer.value,
        outer.d1 * inner.d1,
        outer.d2 * inner.d1 * inner.d1 + outer.d1 * inner.d2,
    )


def power_jet(w, exponent: float) -> Jet2:
    """Jet of ``w -> w**exponent`` (principal branch) taken at ``w``."""
    w = np.asarray(w, dtype=complex)
    if np.any(w == 0):
        raise SingularityError("principal power at zero")
    lw = np.log(w)
    p0 = np.exp(exponent * lw)
    p1 = exponent * p0 / w
    p2 = (exponent - 1) * p1 / w
    if p0.ndim == 0:
        return Jet2(complex(p0), complex(p1), complex(p2))
    return Jet2(p0, p1, p2)


@dataclass(frozen=True)
class WirtingerPair:
    dz: complex
    dzbar: complex


def _default_step(z: complex) -> float:
    return 1e-5 * max(1.0, abs(z))


def _probe(sampler, points, contains):
    if contains is not None:
        for p in points:
            if not contains(p):
                raise DomainError("finite-difference stencil leaves the domain", p)
    return [complex(sampler(p)) for p in points]


def _central(sampler, z, direction, h, contains):
    fp, fm = _probe(sampler, (z + h * direction, z - h * direction), contains)
    return (fp - fm) / (2 * h)


def numeric_wirtinger(
    sampler: Callable[[complex], complex],
    z: complex,
    step: float | None = None,
    contains: Callable[[complex], bool] | None = None,
) -> WirtingerPair:
    """Wirtinger derivatives of an arbitrary (not necessarily analytic) sampler.

    Central differences along x and y, with one Richardson level
    (steps ``h`` and ``h/2``).  ``contains`` optionally guards the stencil.
    """
    z = complex(z)
    h = _default_step(z) if step is None else float(step)
    if h <= 0:
        raise ValueError("step must be positive")
    derivs = []
    for direction in (1.0, 1j):
        coarse = _central(sampler, z, direction, h, contains)
        fine = _central(sampler, z, direction, h / 2, contains)
        derivs.append((4 * fine - coarse) / 3)
    fx, fy = derivs
    return WirtingerPair(dz=(fx - 1j * fy) / 2, dzbar=(fx + 1j * fy) / 2)


def numeric_second_derivative(
    sampler: Callable[[complex], complex],
    z: complex,
    step: float | None = None,
    contains: Callable[[complex], bool] | None = None,
) -> complex:
    """``f''(z)`` for analytic ``f`` from second differences along the real axis.

    The default step is ``1e-3 * max(1, |z|)``: second differences lose
    ``eps / h**2`` to roundoff, so the first-derivative default is too small.
    """
    z = complex(z)
    h = 1e-3 * max(1.0, abs(z)) if step is None else float(step)
    if h <= 0:
        raise ValueError("step must be positive")

    def second(hh):
        fp, f0, fm = _probe(sampler, (z + hh, z, z - hh), contains)
        return (fp - 2 * f0 + fm) / (hh * hh)

    return (4 * second(h / 2) - second(h)) / 3
