"""String identifiers for maps and domains, and the ``a+bi`` complex text format."""

from __future__ import annotations

import math
import re

from . import catalog as cat
from .errors import ParameterError
from .hyperbolic import (
    DomainModel,
    ExteriorDisk,
    PuncturedDisk,
    RightHalfPlane,
    RiemannMapped,
    SlitPlane,
    UnitDisk,
)
from .presch import affine_post, h_plus_eps_g, subordinate

__all__ = ["parse_complex", "format_complex", "parse_map", "parse_analytic", "parse_domain", "MAP_IDS", "DOMAIN_IDS"]

MAP_IDS = (
    "koebe",
    "half-plane-L",
    "k-alpha:{alpha}",
    "f-alpha:{alpha}:{b1}",
    "f-k:{k}:{a}",
    "ext-counter",
    "slit-example",
    "remark3",
    "identity",
    "reciprocal",
    "cayley",
    "automorphism:{z0}:{theta}",
    "affine:{b1}:{map}",
    "flip:{map}",
    "eps:{eps}:{map}",
    "psi:{a}:{map}",
)
DOMAIN_IDS = ("disk", "half-plane", "exterior", "punctured-disk", "slit-plane", "riemann:{map}")


def parse_complex(text) -> complex:
    """Parse ``a+bi``, ``a-bi``, ``bi``, ``i`` or ``a`` (``j`` is accepted for ``i``)."""
    if isinstance(text, (int, float, complex)) and not isinstance(text, bool):
        return complex(text)
    s = str(text).strip().replace(" ", "").lower().replace("infinity", "inf").replace("inf", "\0")
    s = re.sub(r"(^|[+-])[ij]$", r"\g<1>1i", s.replace("j", "i"))
    try:
        return complex(s.replace("i", "j").replace("\0", "inf"))
    except ValueError:
        raise ParameterError(f"not a complex number: {text!r}") from None


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def format_complex(z: complex) -> str:
    """``a+bi`` with 17 significant digits, losslessly re-parsed by :func:`parse_complex`."""
    z = complex(z)
    im = z.imag
    sign = "-" if (im < 0 or (im == 0 and math.copysign(1, im) < 0)) else "+"
    return f"{_fmt(z.real)}{sign}{_fmt(abs(im))}i"


def _real(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParameterError(f"bad {what}: {text!r}") from None


def parse_analytic(map_id: str) -> cat.AnalyticMap:
    """Analytic maps: ``identity``, ``cayley``, ``k-alpha:{alpha}``, ``automorphism:{z0}:{theta}``, ``reciprocal``."""
    head, _, rest = map_id.partition(":")
    if head == "identity" and not rest:
        return cat.Identity(UnitDisk())
    if head == "cayley" and not rest:
        return cat.cayley()
    if head == "reciprocal" and not rest:
        return cat.reciprocal_map()
    if head == "k-alpha":
        return cat.k_alpha(_real(rest, "alpha"))
    if head == "automorphism":
        z0, _, theta = rest.partition(":")
        return cat.disk_automorphism(parse_complex(z0), _real(theta or "0", "theta"))
    f = parse_map(map_id)
    if isinstance(f, cat.Decomposed) and isinstance(f.g, cat.Constant) and f.g.c == 0:
        return f.h
    raise ParameterError(f"{map_id!r} is not an analytic map id")


def _named(f, map_id):
    f.name = map_id
    return f


def parse_map(map_id: str) -> cat.HarmonicMap:
    """Resolve a map id (see :data:`MAP_IDS`); analytic maps are wrapped as ``h + conj(0)``."""
    head, _, rest = map_id.partition(":")
    simple = {
        "koebe": cat.harmonic_koebe,
        "half-plane-L": cat.half_plane_map,
        "ext-counter": cat.exterior_counterexample,
        "slit-example": cat.slit_plane_example,
        "remark3": cat.halfplane_remark3,
    }
    if head in simple and not rest:
        return simple[head]()
    if head in ("identity", "reciprocal", "cayley", "automorphism", "k-alpha"):
        return cat.analytic(parse_analytic(map_id), name=map_id)
    if head == "f-alpha":
        alpha, _, b1 = rest.partition(":")
        return _named(cat.f_alpha(_real(alpha, "alpha"), parse_complex(b1 or "0")), map_id)
    if head == "f-k":
        k, _, a = rest.partition(":")
        return _named(cat.f_k_family(_real(k, "k"), _real(a, "a")), map_id)
    if head in ("affine", "eps", "psi"):
        param, _, inner_id = rest.partition(":")
        if not inner_id:
            raise ParameterError(f"{head} needs an inner map id")
        inner = _decomposed(inner_id)
        if head == "affine":
            return _named(affine_post(inner, 1, parse_complex(param).conjugate()), map_id)
        if head == "eps":
            return cat.analytic(h_plus_eps_g(inner, parse_complex(param)), name=map_id)
        return _named(subordinate(inner, cat.subordination_psi(_real(param, "a"))), map_id)
    if head == "flip" and rest:
        return _named(cat.reflect(_decomposed(rest)), map_id)
    raise ParameterError(f"unknown map id {map_id!r}")


def _decomposed(map_id: str) -> cat.Decomposed:
    f = parse_map(map_id)
    if not isinstance(f, cat.Decomposed):
        raise ParameterError(f"{map_id!r} has no (h, g) decomposition")
    return f


def parse_domain(domain_id: str) -> DomainModel:
    simple = {
        "disk": UnitDisk,
        "half-plane": RightHalfPlane,
        "exterior": ExteriorDisk,
        "punctured-disk": PuncturedDisk,
        "slit-plane": SlitPlane,
    }
    if domain_id in simple:
        return simple[domain_id]()
    head, _, rest = domain_id.partition(":")
    if head == "riemann" and rest:
        return RiemannMapped(parse_analytic(rest), rest)
    raise ParameterError(f"unknown domain id {domain_id!r}")
