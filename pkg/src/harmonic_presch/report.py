"""Batch verification: a JSON config of checks in, one structured report out."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, is_dataclass
from typing import Callable

import numpy as np

from . import checks as ck
from .catalog import family
from .errors import ParameterError
from .hyperbolic import osgood_infimum
from .norms import GridSpec, divergence_witness, norm_estimate
from .registry import format_complex, parse_complex, parse_domain, parse_map

__all__ = ["CHECKS", "DEFAULT_CONFIG", "run_check", "run_report", "jsonable", "thread_count"]

COARSE = {"n_theta": 256, "n_r": 200}


def jsonable(obj):
    """Recursively convert results to JSON-safe values: complex as ``a+bi``, non-finite floats as strings."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return format_complex(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else ("nan" if math.isnan(x) else ("inf" if x > 0 else "-inf"))
    return obj


def _spec(params) -> GridSpec | None:
    keys = ("n_theta", "n_r", "boundary_margin", "refine_rounds", "outer_radius")
    given = {k: params[k] for k in keys if k in params}
    return GridSpec(**given) if given else None


def _grid(params, default=(256, 256)):
    g = params.get("grid", default)
    return int(g[0]), int(g[1])


def _alpha0(params):
    """``alpha0`` from the params, or from a named family; S_H makes the check conjecture-conditional."""
    if "family" in params:
        fam = family(params["family"], params.get("alpha"), params.get("alpha0_sh", 2.5))
        return params.get("alpha0", fam.alpha0), fam.conjectural
    if "alpha0" not in params:
        raise ParameterError("check needs alpha0 or family")
    return float(params["alpha0"]), False


def _complexes(v):
    if isinstance(v, (list, tuple)):
        return [parse_complex(x) for x in v]
    return parse_complex(v)


def _pointwise(f, D, p):
    a0, conj = _alpha0(p)
    return ck.check_pointwise_disk(f, a0, _grid(p), p.get("margin", 1e-6), p.get("tolerance", 1e-9), conj)


def _norm_bound(f, D, p):
    conj = p.get("family") == "S_H"
    return ck.check_norm_bound(f, D, float(p["bound"]), _spec(p), p.get("tolerance", 1e-6), conj)


def _norm_value(f, D, p):
    """Two-sided check ``|norm_estimate - expected| <= tolerance``."""
    est = norm_estimate(f, D, _spec(p), p.get("weight", "inv_density"))
    expected = float(p["expected"])
    res = ck._result(
        "norm-value", f.name, D.id, {"expected": expected}, [abs(est.sup_lower_bound - expected)],
        [est.attained_at], p.get("tolerance", 1e-3),
        {"estimate": est.sup_lower_bound, "converged": est.converged, "refinement_history": est.refinement_history},
    )
    res.samples = est.grid.n_theta * est.grid.n_r
    return res


def _boundary(f, D, p):
    a0, conj = _alpha0(p)
    return ck.check_boundary_distance_bound(f, D, a0, _grid(p), p.get("margin", 1e-6), p.get("tolerance", 1e-9), conj)


def _comparison(f, D, p):
    eps2 = p.get("eps2")
    return ck.check_comparison(
        f, D, _complexes(p.get("eps", 1.0)), _grid(p), p.get("mode", "single"),
        None if eps2 is None else _complexes(eps2), p.get("margin", 1e-6), _spec(p), p.get("tolerance", 1e-6),
    )


def _norm_comparison(f, D, p):
    return ck.check_norm_comparison(f, D, _complexes(p.get("eps", [1, -1, "i", "-i", 0])), _spec(p), p.get("tolerance", 1e-6))


def _distortion(f, D, p):
    alpha = p.get("alpha")
    if alpha is None:
        alpha, _ = _alpha0(p)
    b1 = p.get("b1")
    radii = p.get("radii")
    return ck.check_distortion(
        f, float(alpha), None if b1 is None else _complexes(b1), radii, p.get("n_theta", 64), p.get("tolerance", 1e-9)
    )


def _majorization(f, D, p):
    """Inside residual is the worst relative excess of ``J_{f_a}`` over ``J_F``; a missing violation adds 1."""
    alpha = float(p["alpha"])
    kwargs = {}
    if "a_samples" in p:
        kwargs["a_samples"] = [float(a) for a in p["a_samples"]]
    if "a_violation" in p:
        kwargs["a_violation"] = [float(a) for a in p["a_violation"]]
    m = ck.check_majorization(f, alpha, closed_form=p.get("closed_form"), **kwargs)
    residual = max(m.inside_worst, 0.0 if m.violation_point is not None else 1.0)
    res = ck._result(
        "majorization", f.name, "disk", {"alpha": alpha}, [residual], [0j], p.get("tolerance", 1e-12),
        {"n_alpha": m.n_alpha, "inside_pass": m.inside_pass, "violation_point": m.violation_point},
    )
    res.samples = m.samples
    return res


def _cor4(f, D, p):
    """Root at ``n(alpha)`` within 1e-9 and agreement with the finite difference within 1e-6."""
    kind = p["family"]
    alpha = {"convex": 1.5, "close-to-convex": 2.5}.get(kind)
    if alpha is None:
        raise ParameterError(f"unknown family {kind!r}")
    n = ck.majorization_radius(alpha)
    rs = np.linspace(0.05, 0.95, 19)
    fd = max(abs(ck.cor4_derivative(kind, r) - ck.cor4_derivative_fd(kind, r)) for r in rs)
    root = abs(ck.cor4_derivative(kind, n))
    residual = max(root - 1e-9, fd - 1e-6)
    return ck._result(
        "cor4-derivative", kind, "disk", {"family": kind}, [residual], [complex(n)], 0.0,
        {"value_at_n_alpha": root, "fd_max_gap": fd},
    )


def _witness(f, D, p):
    threshold = float(p["threshold"])
    weight = p.get("weight", "inv_density")
    w = divergence_witness(f, D, threshold, weight)
    details = {"found": w is not None}
    if w is None:
        return ck._result("witness", f.name, D.id, {"threshold": threshold, "weight": weight}, [math.inf], [0j], 0.0, details)
    details["value"] = w.value
    return ck._result(
        "witness", f.name, D.id, {"threshold": threshold, "weight": weight}, [threshold - w.value], [w.point], 0.0, details
    )


def _osgood(f, D, p):
    """``expect = bounded``: residual ``min_bound - infimum``; ``expect = to-zero``: 0 iff the trend decreases to 0."""
    est = osgood_infimum(D)
    expect = p.get("expect", "bounded")
    details = {"infimum": est.infimum, "trend": est.trend, "tends_to_zero": est.tends_to_zero}
    if expect == "bounded":
        residual = float(p.get("min_bound", 0.499)) - est.infimum
    elif expect == "to-zero":
        residual = 0.0 if est.tends_to_zero else 1.0
    else:
        raise ParameterError(f"unknown osgood expectation {expect!r}")
    return ck._result("osgood", "-", D.id, {"expect": expect}, [residual], [est.attained_at], 0.0, details)


CHECKS: dict[str, Callable] = {
    "pointwise-disk": _pointwise,
    "norm-bound": _norm_bound,
    "norm-value": _norm_value,
    "boundary-distance": _boundary,
    "comparison": _comparison,
    "norm-comparison": _norm_comparison,
    "distortion": _distortion,
    "majorization": _majorization,
    "cor4-derivative": _cor4,
    "witness": _witness,
    "osgood": _osgood,
}

# checks that need no map
_MAPLESS = {"cor4-derivative", "osgood"}


def run_check(entry: dict) -> ck.CheckResult:
    """Run one ``{id, map, domain, params}`` entry."""
    cid = entry.get("id")
    if cid not in CHECKS:
        raise ParameterError(f"unknown check id {cid!r}")
    params = dict(entry.get("params", {}))
    f = None if cid in _MAPLESS and "map" not in entry else parse_map(entry["map"])
    if "domain" in entry:
        D = parse_domain(entry["domain"])
    elif f is not None:
        D = f.domain
    else:
        D = parse_domain("disk")
    res = CHECKS[cid](f, D, params)
    if "map" in entry:
        res.map_id = entry["map"]
    return res


def thread_count() -> int:
    env = os.environ.get("PRESCH_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ParameterError(f"PRESCH_THREADS must be an integer, got {env!r}") from None
    return min(4, os.cpu_count() or 1)


def run_report(config: dict | None = None) -> dict:
    """Run every check of ``config['checks']`` (the default config when None) and merge the results.

    IDs are resolved before anything runs, so an unknown id fails fast.
    """
    config = DEFAULT_CONFIG if config is None else config
    entries = list(config.get("checks", []))
    for e in entries:
        if e.get("id") not in CHECKS:
            raise ParameterError(f"unknown check id {e.get('id')!r}")
        if "map" in e:
            parse_map(e["map"])
        if "domain" in e:
            parse_domain(e["domain"])
    workers = thread_count()
    if workers > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_check, entries))
    else:
        results = [run_check(e) for e in entries]
    records = [r.to_dict() for r in results]
    passed = sum(r.passed for r in results)
    summary = {
        "total": len(results),
        "passed": passed,
        "failed": len(results) - passed,
        "conjecture_conditional": sum(r.conjecture_conditional for r in results),
    }
    return {"checks": records, "summary": summary}


def _default_checks() -> list[dict]:
    out: list[dict] = []
    add = out.append
    add({"id": "norm-value", "map": "half-plane-L", "domain": "disk", "params": {"expected": 5}})
    add({"id": "norm-value", "map": "koebe", "domain": "disk", "params": {"expected": 7}})
    for a in (1, 1.5, 2, 2.5):
        add({"id": "norm-value", "map": f"k-alpha:{a}", "domain": "disk", "params": {"expected": 2 * (a + 1)}})
    add({"id": "pointwise-disk", "map": "koebe", "params": {"family": "C_H"}})
    add({"id": "pointwise-disk", "map": "koebe", "params": {"family": "S_H"}})
    add({"id": "pointwise-disk", "map": "half-plane-L", "params": {"family": "K_H"}})
    for a, b1 in ((1.5, "0"), (2, "0.5i"), (2.5, "0.3-0.2i")):
        add({"id": "pointwise-disk", "map": f"f-alpha:{a}:{b1}", "params": {"alpha0": a}})
    add({"id": "norm-bound", "map": "remark3", "domain": "half-plane", "params": {"bound": 7, "family": "S_H"}})
    add({"id": "norm-bound", "map": "slit-example", "domain": "slit-plane", "params": {"bound": 9, "family": "S_H"}})
    add({"id": "norm-bound", "map": "k-alpha:2", "domain": "disk", "params": {"bound": 6}})
    add({"id": "boundary-distance", "map": "koebe", "domain": "disk", "params": {"alpha0": 2.5}})
    add({"id": "boundary-distance", "map": "half-plane-L", "domain": "disk", "params": {"alpha0": 2.5}})
    for k in (0.3, 0.7, 1.0):
        for a in (0, 1, 2.5):
            m = f"f-k:{k:g}:{a:g}"
            add({"id": "comparison", "map": m, "params": {"eps": 1, **COARSE}})
            add({"id": "norm-comparison", "map": m, "params": {"eps": [1, -1], **COARSE}})
    add({"id": "comparison", "map": "koebe", "params": {"eps": [1, -1, "i", "-i", 0], "mode": "unit"}})
    add({"id": "comparison", "map": "koebe", "params": {"eps": 1, "eps2": -1, "mode": "pair", **COARSE}})
    for a, b1 in ((1.5, "0"), (2, "0.5i")):
        add({"id": "distortion", "map": f"f-alpha:{a}:{b1}", "params": {"alpha": a}})
    for m, a in (("half-plane-L", 1.5), ("koebe", 2.5)):
        for b1 in ("0", "0.5i"):
            add({"id": "distortion", "map": f"affine:{b1}:{m}", "params": {"alpha": a}})
    add({"id": "majorization", "map": "flip:half-plane-L", "params": {"alpha": 1.5, "closed_form": "convex"}})
    add({"id": "majorization", "map": "flip:koebe", "params": {"alpha": 2.5, "closed_form": "close-to-convex"}})
    add({"id": "cor4-derivative", "params": {"family": "convex"}})
    add({"id": "cor4-derivative", "params": {"family": "close-to-convex"}})
    add({"id": "witness", "map": "ext-counter", "domain": "exterior", "params": {"threshold": 1000, "weight": "exterior_weight"}})
    add({"id": "witness", "map": "reciprocal", "domain": "punctured-disk", "params": {"threshold": 1000}})
    add({"id": "osgood", "domain": "disk", "params": {"expect": "bounded"}})
    add({"id": "osgood", "domain": "half-plane", "params": {"expect": "bounded"}})
    add({"id": "osgood", "domain": "punctured-disk", "params": {"expect": "to-zero"}})
    return out


DEFAULT_CONFIG = {"checks": _default_checks()}
