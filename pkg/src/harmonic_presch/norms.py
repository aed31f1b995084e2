"""Supremum estimates of hyperbolically weighted pre-Schwarzian moduli.

Suprema of ``lambda_D^{-1} |P_f|`` are often approached only at the
boundary, so every estimate here is a lower bound over evaluated points
together with a refinement history that shows whether it has stabilized.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .catalog import HarmonicMap, _as_complex
from .errors import DomainError, NotSensePreservingError, ParameterError, SingularityError
from .hyperbolic import DomainModel, RiemannMapped
from .presch import evaluate_raw

log = logging.getLogger(__name__)

__all__ = [
    "GridSpec",
    "NormEstimate",
    "Witness",
    "weighted_modulus",
    "weighted_values",
    "norm_estimate",
    "sup_estimate",
    "polar_grid",
    "radial_profile",
    "profile_csv",
    "divergence_witness",
]

WEIGHTS = ("inv_density", "exterior_weight")
GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class GridSpec:
    n_theta: int = 512
    n_r: int = 400
    boundary_margin: float = 1e-6
    refine_rounds: int = 6
    outer_radius: float = 10.0  # exterior-disk sweeps only

    def __post_init__(self):
        if self.n_theta <= 0 or self.n_r <= 1 or self.refine_rounds < 0:
            raise ParameterError("grid spec must be positive")
        if not 0 < self.boundary_margin < 0.1:
            raise ParameterError("boundary margin must lie in (0, 0.1)")


@dataclass
class NormEstimate:
    sup_lower_bound: float
    attained_at: complex
    grid: GridSpec
    converged: bool
    refinement_history: list[tuple[float, float]] = field(default_factory=list)
    skipped: int = 0


def _chart(D: DomainModel, w: np.ndarray):
    """Points of ``D`` for chart coordinates ``w``, plus inverse densities when cheap."""
    with np.errstate(all="ignore"):
        if D.chart != "disk":
            return w, None
        z = D.from_chart(w)
        if isinstance(D, RiemannMapped):
            d1 = D.phi.jet(w, check=False).d1
            return z, (1 - np.abs(w) ** 2) * np.abs(d1)
        return z, None


def weighted_values(
    f: HarmonicMap,
    D: DomainModel,
    z: np.ndarray,
    weight: str = "inv_density",
    inv: np.ndarray | None = None,
) -> np.ndarray:
    """Vectorized weighted modulus; NaN wherever ``z`` is invalid for ``f`` or ``D``."""
    if weight not in WEIGHTS:
        raise ParameterError(f"unknown weight {weight!r}")
    z = np.atleast_1d(_as_complex(z))
    out = np.full(z.shape, np.nan)
    with np.errstate(all="ignore"):
        finite = np.isfinite(z)
        valid = finite & (f.codes(np.where(finite, z, 0)) == 0)
        if inv is None:
            valid &= np.asarray(D.contains(np.where(finite, z, 0)), dtype=bool)
        if not valid.any():
            return out
        zv = z[valid]
        jac, p, _ = evaluate_raw(f, zv)
        if weight == "exterior_weight":
            a = np.abs(zv)
            w = a**3 - a
        elif inv is not None:
            w = np.atleast_1d(inv)[valid]
        else:
            w = D._inv_density(zv)
        val = w * np.abs(p)
        good = (np.asarray(jac) > 0) & np.isfinite(val)
        out[valid] = np.where(good, val, np.nan)
    return out


def weighted_modulus(f: HarmonicMap, D: DomainModel, z, weight: str = "inv_density") -> float:
    """``lambda_D^{-1}(z) |P_f(z)|`` (or ``(|z|^3 - |z|) |P_f(z)|`` with the exterior weight)."""
    z = complex(z)
    f.check(z)
    D.check(z)
    if weight == "exterior_weight" and not abs(z) > 1:
        raise DomainError("exterior weight needs |z| > 1", z)
    val = weighted_values(f, D, np.array([z]), weight)[0]
    if not np.isfinite(val):
        jac, _, _ = evaluate_raw(f, np.array([z]))
        if not jac[0] > 0:
            raise NotSensePreservingError("non-positive Jacobian", z)
        raise SingularityError("weighted modulus not finite", z)
    return float(val)


def _polar(D: DomainModel, rho, theta):
    return _chart(D, np.asarray(rho) * np.exp(1j * np.asarray(theta)))


def polar_grid(D: DomainModel, n_theta: int, n_r: int, margin: float = 1e-6, outer_radius: float = 10.0):
    """Flattened ``(z, inv)`` over the chart ladder of ``D``; ``inv`` is None unless the chart supplies it."""
    thetas = 2 * np.pi * np.arange(n_theta) / n_theta
    radii = D.radial_ladder(n_r, margin, outer_radius)
    z, inv = _polar(D, radii[:, None], thetas[None, :])
    return np.ravel(z), None if inv is None else np.ravel(inv)


def _evaluator(fn, D):
    def run(rho, theta):
        z, inv = _polar(D, rho, theta)
        shape = np.shape(z)
        vals = fn(np.ravel(z), None if inv is None else np.ravel(inv))
        return np.asarray(vals, dtype=float).reshape(shape), z

    return run


def _eval_polar(f, D, rho, theta, weight):
    return _evaluator(lambda z, inv: weighted_values(f, D, z, weight, inv), D)(rho, theta)


def _golden_max(fun, a: float, b: float, iters: int = 40):
    """Golden-section search for a maximum of ``fun`` on ``[a, b]`` (NaN treated as -inf)."""

    def val(x):
        v = fun(x)
        return -np.inf if not np.isfinite(v) else v

    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = val(c), val(d)
    best_x, best_v = (c, fc) if fc >= fd else (d, fd)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = val(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = val(d)
        for x, v in ((c, fc), (d, fd)):
            if v > best_v:
                best_x, best_v = x, v
    return best_x, best_v


def _ends(D: DomainModel, margin: float, outer: float) -> list[float]:
    """Chart radii at the degenerate ends for the current margin (representable ones only)."""
    if D.chart == "disk":
        cand = [1 - margin]
    elif D.chart == "annulus":
        cand = [margin, 1 - margin]
    else:
        cand = [1 + margin, outer]
    return [r for r in cand if r != 1.0]


def norm_estimate(
    f: HarmonicMap,
    D: DomainModel | None = None,
    spec: GridSpec | None = None,
    weight: str = "inv_density",
) -> NormEstimate:
    """Lower bound for ``sup_D w(z) |P_f(z)|`` from a polar sweep plus refinement.

    Each refinement round runs golden-section searches in the radial and
    angular chart coordinates around the current best point, then halves
    the boundary margin (doubling the outer radius on the exterior disk)
    and sweeps the new boundary rings.  The history records the running
    maximum after each round; ``converged`` means the last two increments
    are below 1e-4.
    """
    D = D or f.domain
    fn = lambda z, inv: weighted_values(f, D, z, weight, inv)  # noqa: E731
    return sup_estimate(fn, D, spec, label=f.name)


def sup_estimate(fn, D: DomainModel, spec: GridSpec | None = None, label: str = "") -> NormEstimate:
    """Refined supremum of ``fn(z, inv)`` over ``D`` (NaN entries are skipped).

    ``inv`` is the inverse density when the chart supplies it cheaply and
    None otherwise.  This is the sweep behind :func:`norm_estimate`.
    """
    spec = spec or GridSpec()
    run = _evaluator(fn, D)
    thetas = 2 * np.pi * np.arange(spec.n_theta) / spec.n_theta
    margin, outer = spec.boundary_margin, spec.outer_radius
    radii = D.radial_ladder(spec.n_r, margin, outer)

    vals, pts = run(radii[:, None], thetas[None, :])
    skipped = int(np.sum(~np.isfinite(vals)))
    if skipped:
        log.debug("sup_estimate(%s): skipped %d singular/invalid samples", label, skipped)
    if not np.isfinite(vals).any():
        raise DomainError(f"no valid sample of {label} in {D.id}")
    i_r, i_t = np.unravel_index(int(np.nanargmax(vals)), vals.shape)
    best_v = float(vals[i_r, i_t])
    best_rho, best_theta = float(radii[i_r]), float(thetas[i_t])
    best_z = complex(pts[i_r, i_t])
    history = [(margin, best_v)]
    dtheta = 2 * np.pi / spec.n_theta

    def at(rho, theta):
        v, z = run(np.array([rho]), np.array([theta]))
        return float(v[0]), complex(z[0])

    for _ in range(spec.refine_rounds):
        k = int(np.searchsorted(radii, best_rho))
        lo = radii[max(k - 1, 0)]
        hi = radii[min(k + 1, len(radii) - 1)]
        if hi > lo:
            rho, v = _golden_max(lambda r: at(r, best_theta)[0], float(lo), float(hi))
            if v > best_v:
                best_v, best_rho = v, rho
                best_z = at(rho, best_theta)[1]
        theta, v = _golden_max(lambda t: at(best_rho, t)[0], best_theta - dtheta, best_theta + dtheta)
        if v > best_v:
            best_v, best_theta = v, theta
            best_z = at(best_rho, theta)[1]

        margin /= 2
        outer *= 2
        new = _ends(D, margin, outer)
        if new:
            ring_r = np.array(new)
            rv, rz = run(ring_r[:, None], thetas[None, :])
            if np.isfinite(rv).any():
                jr, jt = np.unravel_index(int(np.nanargmax(rv)), rv.shape)
                if rv[jr, jt] > best_v:
                    best_v = float(rv[jr, jt])
                    best_rho, best_theta = float(ring_r[jr]), float(thetas[jt])
                    best_z = complex(rz[jr, jt])
            radii = np.unique(np.concatenate([radii, ring_r]))
        history.append((margin, best_v))

    maxima = [v for _, v in history]
    converged = len(maxima) >= 3 and all(abs(b - a) < 1e-4 for a, b in zip(maxima[-3:], maxima[-2:]))
    return NormEstimate(best_v, best_z, spec, converged, history, skipped)


def radial_profile(
    f: HarmonicMap,
    D: DomainModel | None,
    theta: float,
    radii: Iterable[float],
    weight: str = "inv_density",
) -> list[tuple[float, float]]:
    """Weighted modulus along the chart ray at angle ``theta``; invalid radii are skipped."""
    D = D or f.domain
    radii = np.asarray(list(radii), dtype=float)
    vals, _ = _eval_polar(f, D, radii, np.full(radii.shape, theta), weight)
    rows = []
    for r, v in zip(radii, vals):
        if np.isfinite(v):
            rows.append((float(r), float(v)))
        else:
            log.info("radial_profile(%s): skipped r=%r", f.name, r)
    return rows


def profile_csv(rows: list[tuple[float, float]], theta: float, out=None) -> str:
    """CSV with header ``r,theta,weighted_modulus``, 17 significant digits."""
    buf = out if out is not None else io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r", "theta", "weighted_modulus"])
    for r, v in rows:
        writer.writerow([f"{r:.17g}", f"{theta:.17g}", f"{v:.17g}"])
    return buf.getvalue() if out is None else ""


@dataclass
class Witness:
    point: complex
    value: float
    weight: str
    steps: int


def divergence_witness(
    f: HarmonicMap,
    D: DomainModel | None,
    threshold: float,
    weight: str = "inv_density",
    n_theta: int = 64,
    max_steps: int = 400,
    factor: float = 10.0,
) -> Witness | None:
    """Search for a point with weighted modulus above ``threshold``.

    Rings are marched geometrically toward every degenerate end of the
    chart (margin divided by ``factor`` per step, outer radius multiplied by
    it on the exterior disk).  After each ring the two half-spaced angles
    around the best ray are added, so the ray set adapts to where the
    modulus grows.  Returns ``None`` if nothing exceeds the threshold within
    the step budget or before the radii stop being representable.
    """
    if not threshold > 0:
        raise ParameterError("threshold must be positive")
    D = D or f.domain
    base = 2 * np.pi * np.arange(n_theta) / n_theta
    ends = ["outer"] if D.chart == "disk" else ["inner", "outer"]
    for end in ends:
        thetas = base.copy()
        spacing = 2 * np.pi / n_theta
        margin, outer = 0.1, 10.0
        for step in range(max_steps):
            if D.chart == "disk" or (D.chart == "annulus" and end == "outer"):
                rho = 1 - margin
                if rho == 1.0:
                    break
            elif D.chart == "annulus":
                rho = margin
                if rho == 0.0:
                    break
            elif end == "inner":
                rho = 1 + margin
                if rho == 1.0:
                    break
            else:
                rho = outer
                if rho > 1e100:  # cubic weight would overflow
                    break
            vals, z = _eval_polar(f, D, np.full(thetas.shape, rho), thetas, weight)
            if np.isfinite(vals).any():
                j = int(np.nanargmax(vals))
                if vals[j] > threshold:
                    return Witness(complex(z[j]), float(vals[j]), weight, step)
                spacing /= 2
                thetas = np.concatenate([thetas, [thetas[j] - spacing, thetas[j] + spacing]])
            margin /= factor
            outer *= factor
    return None
