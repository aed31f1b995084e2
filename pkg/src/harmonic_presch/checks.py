"""Grid checkers for the pre-Schwarzian inequalities, distortion bounds and majorization.

Every checker reduces an inequality ``LHS <= RHS`` to residuals
``LHS - RHS`` over a sample set and reports the worst one.  A check passes
exactly when the worst residual is at most its tolerance.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .catalog import Decomposed, HarmonicMap, _as_complex, analytic, subordination_psi
from .errors import ParameterError
from .hyperbolic import DomainModel, UnitDisk
from .norms import GridSpec, norm_estimate, polar_grid, sup_estimate
from .presch import evaluate_raw, h_plus_eps_g, subordinate
from .registry import format_complex

__all__ = [
    "CheckResult",
    "MajorizationResult",
    "check_pointwise_disk",
    "check_norm_bound",
    "check_boundary_distance_bound",
    "sup_dilatation",
    "check_comparison",
    "check_norm_comparison",
    "check_distortion",
    "distortion_equality",
    "majorization_radius",
    "majorization_jacobian",
    "check_majorization",
    "cor4_derivative",
    "cor4_derivative_fd",
]


@dataclass
class CheckResult:
    check_id: str
    map_id: str
    domain_id: str
    parameters: dict
    worst_residual: float
    worst_point: complex
    samples: int
    tolerance: float
    passed: bool
    status: str = "pass"  # pass | fail | not-applicable
    conjecture_conditional: bool = False
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _result(check_id, map_id, domain_id, params, residual, points, tolerance, details=None, **kw) -> CheckResult:
    residual = np.asarray(residual, dtype=float).ravel()
    points = np.broadcast_to(np.asarray(points, dtype=complex), residual.shape).ravel() if residual.size else points
    finite = np.isfinite(residual)
    if not finite.any():
        worst, where, n = math.inf, complex(np.nan), 0
    else:
        r = np.where(finite, residual, -np.inf)
        worst = float(r.max())
        # residuals tied with the worst up to rounding: report the innermost point
        ties = np.nonzero(r >= worst - 1e-12 * max(1.0, abs(worst)))[0]
        i = int(ties[np.argmin(np.abs(points[ties]))])
        where, n = complex(points[i]), int(finite.sum())
    passed = worst <= tolerance
    return CheckResult(
        check_id, map_id, domain_id, dict(params), worst, where, n, tolerance, passed,
        "pass" if passed else "fail", details=details or {}, **kw,
    )


def _disk_points(grid: tuple[int, int], margin: float) -> np.ndarray:
    z, _ = polar_grid(UnitDisk(), grid[0], grid[1], margin)
    return z


def _valid(f: HarmonicMap, z: np.ndarray):
    z = z[np.isfinite(z)]
    return z[f.codes(z) == 0]


def _presch(f, z):
    jac, p, omega = evaluate_raw(f, z)
    ok = np.isfinite(p) & (np.asarray(jac) > 0)
    return jac, np.where(ok, p, np.nan), omega


# ---------------------------------------------------------------- pointwise bounds


def check_pointwise_disk(
    f: HarmonicMap,
    alpha0: float,
    grid: tuple[int, int] = (256, 256),
    margin: float = 1e-6,
    tolerance: float = 1e-9,
    conjectural: bool = False,
) -> CheckResult:
    """``|(1-|z|^2) P_f(z) - 2 conj(z)| - 2 alpha0`` over a polar disk grid.

    The ``(1 - |z|^2)`` factor is built from the chart radius, which keeps
    the cancellation against ``P_f`` near the unit circle at rounding level.
    """
    n_theta, n_r = grid
    thetas = 2 * np.pi * np.arange(n_theta) / n_theta
    radii = UnitDisk().radial_ladder(n_r, margin)
    rho = np.repeat(radii, n_theta)
    z = rho * np.exp(1j * np.tile(thetas, n_r))
    ok = f.codes(z) == 0
    z, rho = z[ok], rho[ok]
    _, p, _ = _presch(f, z)
    lhs = np.abs((1 - rho) * (1 + rho) * p - 2 * np.conj(z))
    _, p0, _ = _presch(f, np.array([0j]))
    lhs0 = float(abs(p0[0]))
    details = {"lhs_at_0": lhs0, "equality_gap_at_0": abs(lhs0 - 2 * alpha0), "lhs_max": float(np.nanmax(lhs))}
    return _result(
        "pointwise-disk", f.name, "disk", {"alpha0": alpha0}, lhs - 2 * alpha0, z, tolerance,
        details, conjecture_conditional=conjectural,
    )


def check_norm_bound(
    f: HarmonicMap,
    D: DomainModel | None,
    bound: float,
    spec: GridSpec | None = None,
    tolerance: float = 1e-6,
    conjectural: bool = False,
) -> CheckResult:
    """``norm_estimate(f, D) - bound``; the estimate is a lower bound on the true norm."""
    D = D or f.domain
    est = norm_estimate(f, D, spec)
    details = {
        "estimate": est.sup_lower_bound,
        "converged": est.converged,
        "refinement_history": est.refinement_history,
    }
    res = _result(
        "norm-bound", f.name, D.id, {"bound": bound}, [est.sup_lower_bound - bound],
        [est.attained_at], tolerance, details, conjecture_conditional=conjectural,
    )
    res.samples = est.grid.n_theta * est.grid.n_r
    return res


def check_boundary_distance_bound(
    f: HarmonicMap,
    D: DomainModel | None,
    alpha0: float,
    grid: tuple[int, int] = (256, 256),
    margin: float = 1e-6,
    tolerance: float = 1e-9,
    conjectural: bool = False,
) -> CheckResult:
    """``d(z) |P_f(z)| - 2 alpha0`` (the bound ``|P_f| <= 2 alpha0 / d`` multiplied through by ``d``)."""
    D = D or f.domain
    z, _ = polar_grid(D, grid[0], grid[1], margin)
    z = _valid(f, z)
    z = z[np.asarray(D.contains(z), dtype=bool)]
    d = D._boundary_distance(z)
    _, p, _ = _presch(f, z)
    return _result(
        "boundary-distance", f.name, D.id, {"alpha0": alpha0}, d * np.abs(p) - 2 * alpha0, z,
        tolerance, conjecture_conditional=conjectural,
    )


# ---------------------------------------------------------------- h + eps g comparisons


def _analytic_presch(f: Decomposed, eps: complex, z: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        hj, gj = f.h._jet(z, False), f.g._jet(z, False)
        return (hj.d2 + eps * gj.d2) / (hj.d1 + eps * gj.d1)


def sup_dilatation(f: Decomposed, D: DomainModel | None = None, spec: GridSpec | None = None) -> float:
    """Refined grid estimate of ``sup_D |omega_f|``."""
    D = D or f.domain

    def fn(z, inv):
        out = np.full(z.shape, np.nan)
        with np.errstate(all="ignore"):
            ok = np.isfinite(z)
            ok[ok] = f.codes(z[ok]) == 0
            hj, gj = f.h._jet(z[ok], False), f.g._jet(z[ok], False)
            out[ok] = np.abs(gj.d1 / hj.d1)
        return out

    return sup_estimate(fn, D, spec, label=f"omega[{f.name}]").sup_lower_bound


def check_comparison(
    f: Decomposed,
    D: DomainModel | None = None,
    eps: complex | Sequence[complex] = 1.0,
    grid: tuple[int, int] = (256, 256),
    mode: str = "single",
    eps2: complex | None = None,
    margin: float = 1e-6,
    spec: GridSpec | None = None,
    tolerance: float = 1e-6,
) -> CheckResult:
    """Pointwise comparison of ``P_{h + eps g}`` with ``P_f``.

    ``single``: ``lambda^{-1} |P_{h+eps g} - P_f| - sup|omega|``.
    ``pair``:   ``lambda^{-1} |P_{h+eps g} - P_{h+eps2 g}| - 2 sup|omega|``.
    ``unit``:   ``lambda^{-1} |P_{h+eps g} - P_f| - 1`` over every ``eps`` given.
    """
    if not isinstance(f, Decomposed):
        raise TypeError("comparison checks need a decomposed map")
    D = D or f.domain
    eps_list = [complex(e) for e in (eps if isinstance(eps, (list, tuple, np.ndarray)) else [eps])]
    if eps2 is not None:
        eps_list.append(complex(eps2))
    for e in eps_list:
        if abs(e) > 1 + 1e-15:
            raise ParameterError(f"need |eps| <= 1, got {e}")
    if mode not in ("single", "pair", "unit"):
        raise ParameterError(f"unknown comparison mode {mode!r}")
    if mode == "pair" and (eps2 is None or len(eps_list) != 2):
        raise ParameterError("pair mode needs exactly one eps and one eps2")

    z, inv = polar_grid(D, grid[0], grid[1], margin)
    keep = np.isfinite(z)
    z = z[keep]
    inv = None if inv is None else inv[keep]
    ok = f.codes(z) == 0
    z = z[ok]
    inv = D._inv_density(z) if inv is None else inv[ok]
    _, pf, _ = _presch(f, z)

    params = {"eps": [format_complex(e) for e in eps_list], "mode": mode}
    details: dict = {}
    if mode == "unit":
        diffs = np.stack([inv * np.abs(_analytic_presch(f, e, z) - pf) for e in eps_list])
        lhs = np.nanmax(diffs, axis=0)
        rhs = 1.0
    else:
        s = sup_dilatation(f, D, spec)
        details["sup_omega"] = s
        if mode == "single":
            lhs = inv * np.abs(_analytic_presch(f, eps_list[0], z) - pf)
            rhs = s
        else:
            lhs = inv * np.abs(_analytic_presch(f, eps_list[0], z) - _analytic_presch(f, eps_list[1], z))
            rhs = 2 * s
    details["lhs_max"] = float(np.nanmax(lhs))
    zero = np.abs(z) == 0
    if zero.any():
        details["lhs_at_0"] = float(lhs[zero][0])
    return _result(f"comparison-{mode}", f.name, D.id, params, lhs - rhs, z, tolerance, details)


def check_norm_comparison(
    f: Decomposed,
    D: DomainModel | None = None,
    eps: Sequence[complex] = (1.0, -1.0, 1j, -1j, 0.0),
    spec: GridSpec | None = None,
    tolerance: float = 1e-6,
) -> CheckResult:
    """``| ||P_{h+eps g}|| - ||P_f|| | - sup|omega|`` and the unit-constant sandwich.

    The sandwich residuals are ``max(0, max_eps n_eps - 1) - n_f`` and
    ``n_f - (min_eps n_eps + 1)``.  When no estimate converges, every norm
    is taken to be infinite, which is one of the two allowed outcomes, and
    the check is reported as not applicable.
    """
    if not isinstance(f, Decomposed):
        raise TypeError("norm comparison needs a decomposed map")
    D = D or f.domain
    eps = [complex(e) for e in eps]
    ef = norm_estimate(f, D, spec)
    ee = [norm_estimate(analytic(h_plus_eps_g(f, e)), D, spec) for e in eps]
    params = {"eps": [format_complex(e) for e in eps]}
    norms = {format_complex(e): x.sup_lower_bound for e, x in zip(eps, ee)}
    details = {"norm_f": ef.sup_lower_bound, "norms": norms}
    flags = [ef.converged] + [x.converged for x in ee]
    if not any(flags):
        res = _result("norm-comparison", f.name, D.id, params, [0.0], [ef.attained_at], tolerance, details)
        res.status = "not-applicable"
        res.details["reason"] = "all norms diverge"
        return res
    if not all(flags):
        details["reason"] = "mixed finite and divergent norms"
        return _result("norm-comparison", f.name, D.id, params, [math.inf], [ef.attained_at], tolerance, details)
    s = sup_dilatation(f, D, spec)
    details["sup_omega"] = s
    nf = ef.sup_lower_bound
    vals = np.array([x.sup_lower_bound for x in ee])
    residuals = list(np.abs(vals - nf) - s)
    residuals.append(max(0.0, vals.max() - 1) - nf)
    residuals.append(nf - (vals.min() + 1))
    points = [x.attained_at for x in ee] + [ef.attained_at, ef.attained_at]
    return _result("norm-comparison", f.name, D.id, params, residuals, points, tolerance, details)


# ---------------------------------------------------------------- distortion


def _distortion_bounds(alpha: float, r: np.ndarray):
    lo = (2 * alpha - 2) * np.log1p(-r) - (2 * alpha + 2) * np.log1p(r)
    hi = (2 * alpha - 2) * np.log1p(r) - (2 * alpha + 2) * np.log1p(-r)
    return lo, hi


def _b1(f: HarmonicMap, b1):
    if b1 is not None:
        return complex(b1)
    if isinstance(f, Decomposed):
        return complex(f.g.jet(0, need_value=False).d1)
    raise ParameterError("b1 is required for maps without an (h, g) pair")


def check_distortion(
    f: HarmonicMap,
    alpha: float,
    b1: complex | None = None,
    radii: Iterable[float] | None = None,
    n_theta: int = 64,
    tolerance: float = 1e-9,
) -> CheckResult:
    """Jacobian distortion and ``Re zP_f`` bounds on circles ``|z| = r``.

    Jacobian residuals are taken in log space, and the ``Re zP_f`` bounds
    are multiplied through by ``1 - r^2``, so all residuals stay of order
    one up to the unit circle.
    """
    b1 = _b1(f, b1)
    if not abs(b1) < 1:
        raise ParameterError(f"need |b1| < 1, got {b1}")
    radii = np.linspace(0, 0.95, 64) if radii is None else np.asarray(list(radii), dtype=float)
    thetas = 2 * np.pi * np.arange(n_theta) / n_theta
    r = np.repeat(radii, n_theta)
    z = r * np.exp(1j * np.tile(thetas, len(radii)))
    ok = f.codes(z) == 0
    z, r = z[ok], r[ok]
    jac, p, _ = _presch(f, z)
    with np.errstate(all="ignore"):
        logj = np.log(np.asarray(jac, dtype=float) / (1 - abs(b1) ** 2))
    lo, hi = _distortion_bounds(alpha, r)
    rezp = (1 - r) * (1 + r) * np.real(z * p)
    residual = np.max(
        np.stack([lo - logj, logj - hi, (2 * r * r - 2 * alpha * r) - rezp, rezp - (2 * alpha * r + 2 * r * r)]),
        axis=0,
    )
    return _result(
        "distortion", f.name, "disk", {"alpha": alpha, "b1": format_complex(b1)}, residual, z, tolerance,
        {"radii": len(radii), "n_theta": n_theta},
    )


def distortion_equality(
    f: HarmonicMap,
    alpha: float,
    theta: float,
    radii: Iterable[float],
    side: str = "lower",
    b1: complex | None = None,
) -> float:
    """Largest ``|log(J_f / (1 - |b1|^2)) - log(bound)|`` along the ray at angle ``theta``."""
    b1 = _b1(f, b1)
    r = np.asarray(list(radii), dtype=float)
    z = r * np.exp(1j * theta)
    jac, _, _ = evaluate_raw(f, z)
    logj = np.log(np.asarray(jac, dtype=float) / (1 - abs(b1) ** 2))
    lo, hi = _distortion_bounds(alpha, r)
    target = lo if side == "lower" else hi
    return float(np.max(np.abs(logj - target)))


# ---------------------------------------------------------------- majorization


@dataclass
class MajorizationResult:
    alpha: float
    n_alpha: float
    inside_pass: bool
    violation_point: tuple[float, float] | None
    inside_worst: float = 0.0
    samples: int = 0


def majorization_radius(alpha: float) -> float:
    """``n(alpha) = 1 + alpha - sqrt(alpha^2 + 2 alpha)``."""
    if not alpha >= 0:
        raise ParameterError(f"majorization radius needs alpha >= 0, got {alpha}")
    # 1 + a - sqrt(a^2 + 2a) written without cancellation for large a
    return 1.0 / (1 + alpha + math.sqrt(alpha * alpha + 2 * alpha))


CLOSED_FORMS = {"convex": (1, 5), "close-to-convex": (3, 7)}


def majorization_jacobian(kind: str, a, r):
    """Closed-form ``J_{F o psi_a}(r)`` for ``F = -L(-z)`` (convex) or ``-K(-z)`` (close-to-convex)."""
    if kind not in CLOSED_FORMS:
        raise ParameterError(f"unknown family {kind!r}")
    p, q = CLOSED_FORMS[kind]
    a, r = np.asarray(a, dtype=float), np.asarray(r, dtype=float)
    return (1 - r * r) ** p * (a + 2 * r + a * r * r) ** 2 / (1 + 2 * a * r + r * r) ** q


def check_majorization(
    F: Decomposed,
    alpha: float,
    a_samples: Sequence[float] = tuple(np.round(np.linspace(0, 1, 11), 12)),
    r_samples: Sequence[float] | None = None,
    closed_form: str | None = None,
    a_violation: Sequence[float] = (0.9, 0.99, 0.999),
    n_theta: int = 64,
    rel_tol: float = 1e-12,
) -> MajorizationResult:
    """Jacobian majorization ``J_{F o psi_a} <= J_F`` inside ``|z| <= n(alpha)`` and a violation search outside.

    Inside, subordinates are built from ``psi_a`` and compared with ``F`` on
    circles of radius ``r_samples`` (default 41 radii up to ``n(alpha)``).
    Outside, ``r`` runs over a 1e-3 grid in ``(n, n + 0.05]`` on the
    positive axis, using the closed forms when ``closed_form`` names one.
    """
    n = majorization_radius(alpha)
    radii = np.linspace(0, n, 41) if r_samples is None else np.asarray(list(r_samples), dtype=float)
    if np.any(radii > n + 1e-15):
        raise ParameterError("inside samples must satisfy |z| <= n(alpha)")
    thetas = 2 * np.pi * np.arange(n_theta) / n_theta
    z = (radii[:, None] * np.exp(1j * thetas)[None, :]).ravel()
    jF, _, _ = evaluate_raw(F, z)
    worst = -math.inf
    for a in a_samples:
        ja, _, _ = evaluate_raw(subordinate(F, subordination_psi(float(a))), z)
        worst = max(worst, float(np.max((ja - jF) / jF)))
    inside = worst <= rel_tol

    outer = n + 1e-3 * np.arange(1, 51)

    def jac_at(a, r):
        if closed_form is not None:
            return majorization_jacobian(closed_form, a, r)
        jr, _, _ = evaluate_raw(subordinate(F, subordination_psi(float(a))), _as_complex(r))
        return jr

    base = jac_at(1.0, outer)
    violation = None
    for a in a_violation:
        bad = np.nonzero(jac_at(a, outer) > base * (1 + rel_tol))[0]
        if bad.size:
            violation = (float(a), float(outer[bad[0]]))
            break
    return MajorizationResult(alpha, n, inside, violation, worst, z.size * len(a_samples))


def cor4_derivative(kind: str, r: float) -> float:
    """``d/da J_{f_a}(r)`` at ``a = 1`` for the convex or close-to-convex extremal."""
    if not 0 < r < 1:
        raise ParameterError(f"need 0 < r < 1, got {r}")
    if kind == "convex":
        return 2 * (1 - r) * (1 - 5 * r + r * r) / (1 + r) ** 7
    if kind == "close-to-convex":
        return 2 * (1 - r) ** 3 * (1 - 7 * r + r * r) / (1 + r) ** 9
    raise ParameterError(f"unknown family {kind!r}")


def cor4_derivative_fd(kind: str, r: float, step: float = 1e-5) -> float:
    """Central difference in ``a`` of the closed-form ``J_{f_a}(r)`` at ``a = 1``."""
    return float(
        (majorization_jacobian(kind, 1 + step, r) - majorization_jacobian(kind, 1 - step, r)) / (2 * step)
    )
