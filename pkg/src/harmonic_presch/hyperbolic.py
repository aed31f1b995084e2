"""Model domains, their hyperbolic densities and boundary distances.

Densities use the curvature -4 normalization, ``lambda_D(0) = 1`` on the
unit disk.  Every domain also carries a *chart*: a polar parametrization
used by the grid sweeps in :mod:`harmonic_presch.norms`.

=========  ==============================  ==============================
chart      radial coordinate               degenerate ends
=========  ==============================  ==============================
disk       |w| in [0, 1), z = chart(w)     |w| -> 1
annulus    r in (0, 1), z = r e^{it}       r -> 0 and r -> 1
exterior   r in (1, inf), z = r e^{it}     r -> 1 and r -> inf
=========  ==============================  ==============================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DomainError, ParameterError

__all__ = [
    "DomainModel",
    "UnitDisk",
    "RightHalfPlane",
    "ExteriorDisk",
    "PuncturedDisk",
    "SlitPlane",
    "RiemannMapped",
    "density",
    "inv_density",
    "exterior_weight",
    "boundary_distance",
    "OsgoodEstimate",
    "osgood_infimum",
]


def _arr(z) -> np.ndarray:
    return np.asarray(z, dtype=complex)


def _out(x, like):
    return x if np.ndim(like) else x[()]


class DomainModel:
    """Base class; subclasses fill in the closed forms."""

    id: str = "?"
    chart: str = "disk"

    def contains(self, z):
        raise NotImplementedError

    def check(self, z) -> None:
        inside = np.atleast_1d(self.contains(z))
        if not inside.all():
            bad = np.atleast_1d(_arr(z))[np.argmin(inside)]
            raise DomainError(f"point outside domain {self.id}", bad)

    def _inv_density(self, z):
        raise NotImplementedError

    def inv_density(self, z):
        self.check(z)
        return _out(self._inv_density(_arr(z)), z)

    def density(self, z):
        return 1.0 / self.inv_density(z)

    def _boundary_distance(self, z):
        raise NotImplementedError(f"boundary distance not available for {self.id}")

    def boundary_distance(self, z):
        self.check(z)
        return _out(self._boundary_distance(_arr(z)), z)

    def from_chart(self, w):
        """Map chart coordinates to points of the domain (no checks)."""
        return _arr(w)

    def radial_ladder(self, n_r: int, margin: float, outer_radius: float = 10.0) -> np.ndarray:
        """Chart radii for a polar sweep, clustered toward the degenerate ends."""
        n_lin = n_r // 2
        lin = np.linspace(0.0, 0.9, n_lin, endpoint=False)
        edge = 1.0 - np.logspace(-1, np.log10(margin), n_r - n_lin)
        return np.concatenate([lin, edge])

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Random interior points kept away from the boundary."""
        w = np.sqrt(rng.uniform(0, 0.81, n)) * np.exp(2j * np.pi * rng.uniform(size=n))
        return self.from_chart(w)

    def __repr__(self):
        return f"{type(self).__name__}()"


class UnitDisk(DomainModel):
    id = "disk"

    def contains(self, z):
        return np.abs(z) < 1

    def _inv_density(self, z):
        return 1 - np.abs(z) ** 2

    def _boundary_distance(self, z):
        return 1 - np.abs(z)


class RightHalfPlane(DomainModel):
    id = "half-plane"

    def contains(self, z):
        return np.real(z) > 0

    def _inv_density(self, z):
        return 2 * z.real

    def _boundary_distance(self, z):
        return z.real

    def from_chart(self, w):
        w = _arr(w)
        return (1 + w) / (1 - w)


class ExteriorDisk(DomainModel):
    """``|z| > 1``, with density ``1/(|z|^2 - 1)`` (pull-back through ``1/w``)."""

    id = "exterior"
    chart = "exterior"

    def contains(self, z):
        return np.abs(z) > 1

    def _inv_density(self, z):
        return np.abs(z) ** 2 - 1

    def _boundary_distance(self, z):
        return np.abs(z) - 1

    def radial_ladder(self, n_r, margin, outer_radius=10.0):
        return 1.0 + np.logspace(np.log10(margin), np.log10(outer_radius - 1.0), n_r)

    def sample(self, n, rng):
        r = rng.uniform(1.1, 5.0, n)
        return r * np.exp(2j * np.pi * rng.uniform(size=n))


class PuncturedDisk(DomainModel):
    id = "punctured-disk"
    chart = "annulus"

    def contains(self, z):
        a = np.abs(z)
        return (a < 1) & (a > 0)

    def _inv_density(self, z):
        a = np.abs(z)
        return 2 * a * np.log(1 / a)

    def _boundary_distance(self, z):
        a = np.abs(z)
        return np.minimum(a, 1 - a)

    def radial_ladder(self, n_r, margin, outer_radius=10.0):
        n_in = n_r // 3
        n_mid = n_r // 3
        inner = np.logspace(np.log10(margin), -1, n_in, endpoint=False)
        mid = np.linspace(0.1, 0.9, n_mid, endpoint=False)
        outer = 1.0 - np.logspace(-1, np.log10(margin), n_r - n_in - n_mid)
        return np.concatenate([inner, mid, outer])

    def sample(self, n, rng):
        r = rng.uniform(0.05, 0.9, n)
        return r * np.exp(2j * np.pi * rng.uniform(size=n))


class SlitPlane(DomainModel):
    """``C \\ (-inf, 0]``; chart ``w -> ((1+w)/(1-w))**2``."""

    id = "slit-plane"

    def contains(self, z):
        z = _arr(z)
        return ~((z.imag == 0) & (z.real <= 0))

    def _inv_density(self, z):
        s = np.sqrt(z)
        return 4 * np.abs(s) * s.real

    def _boundary_distance(self, z):
        # nearest point of the slit: orthogonal projection if Re z < 0, else the tip 0
        return np.where(z.real < 0, np.abs(z.imag), np.abs(z))

    def from_chart(self, w):
        w = _arr(w)
        return ((1 + w) / (1 - w)) ** 2


@dataclass(eq=False)
class RiemannMapped(DomainModel):
    """Image of the unit disk under a conformal map ``phi``.

    ``phi`` is any object with ``jet(w, check=False)`` returning a
    :class:`~harmonic_presch.jets.Jet2` (catalog analytic maps qualify).
    Points are pulled back by damped Newton iteration from the nearest
    seed of a 32x32 polar grid.
    """

    phi: Any
    phi_id: str = "phi"
    tol: float = 1e-12
    max_iter: int = 50
    _seeds: np.ndarray = field(init=False, repr=False)
    _seed_values: np.ndarray = field(init=False, repr=False)

    chart = "disk"

    def __post_init__(self):
        r = (np.arange(32) + 0.5) / 32
        t = 2 * np.pi * np.arange(32) / 32
        self._seeds = (r[:, None] * np.exp(1j * t[None, :])).ravel()
        with np.errstate(all="ignore"):
            self._seed_values = self.phi.jet(self._seeds, check=False).value

    @property
    def id(self):
        return f"riemann:{self.phi_id}"

    def _newton(self, z: np.ndarray):
        zf = np.atleast_1d(z).ravel()
        w = np.empty_like(zf)
        ok = np.zeros(zf.shape, dtype=bool)
        chunk = 2048
        for s in range(0, zf.size, chunk):
            zc = zf[s : s + chunk]
            with np.errstate(all="ignore"):
                dist = np.abs(self._seed_values[None, :] - zc[:, None])
            dist = np.where(np.isfinite(dist), dist, np.inf)
            wc = self._seeds[np.argmin(dist, axis=1)]
            conv = np.zeros(zc.shape, dtype=bool)
            with np.errstate(all="ignore"):
                for _ in range(self.max_iter):
                    jet = self.phi.jet(wc, check=False)
                    resid = jet.value - zc
                    step = resid / jet.d1
                    t = np.ones(wc.shape)
                    trial = wc - step
                    # damp steps that leave the disk
                    for _ in range(30):
                        bad = ~(np.abs(trial) < 1)
                        bad |= ~np.isfinite(trial)
                        if not bad.any():
                            break
                        t = np.where(bad, t / 2, t)
                        trial = np.where(bad, wc - t * step, trial)
                    done = np.abs(t * step) <= self.tol * np.maximum(1.0, np.abs(wc))
                    wc = np.where(conv, wc, trial)
                    conv |= done
                    if conv.all():
                        break
                final = np.abs(self.phi.jet(wc, check=False).value - zc)
            good = conv & (np.abs(wc) < 1) & (final <= 1e-8 * np.maximum(1.0, np.abs(zc)))
            w[s : s + chunk] = wc
            ok[s : s + chunk] = good
        return w.reshape(np.shape(z)), ok.reshape(np.shape(z))

    def invert(self, z):
        """Preimage ``w`` in the disk with ``phi(w) = z``."""
        z = _arr(z)
        w, ok = self._newton(z)
        if not np.all(ok):
            bad = np.atleast_1d(z)[np.argmin(np.atleast_1d(ok))]
            raise DomainError(f"point outside domain {self.id}", bad)
        return _out(w, z)

    def contains(self, z):
        z = _arr(z)
        _, ok = self._newton(z)
        return ok

    def check(self, z):
        self.invert(z)

    def _inv_density(self, z):
        w = self.invert(z)
        d1 = self.phi.jet(w, check=False).d1
        return (1 - np.abs(w) ** 2) * np.abs(d1)

    def inv_density(self, z):
        return _out(np.asarray(self._inv_density(_arr(z))), z)

    def from_chart(self, w):
        with np.errstate(all="ignore"):
            return self.phi.jet(_arr(w), check=False).value


def density(D: DomainModel, z):
    return D.density(z)


def inv_density(D: DomainModel, z):
    return D.inv_density(z)


def boundary_distance(D: DomainModel, z):
    return D.boundary_distance(z)


def exterior_weight(z):
    """``|z|**3 - |z|`` on ``|z| > 1``."""
    a = np.abs(_arr(z))
    if np.any(~(a > 1)):
        raise DomainError("exterior weight needs |z| > 1", np.atleast_1d(z)[np.argmin(np.atleast_1d(a > 1))])
    return _out(a**3 - a, z)


@dataclass
class OsgoodEstimate:
    """Grid infimum of ``lambda_D(z) d(z, dD)``.

    ``trend`` lists ``(margin, ring minimum)`` as the sampling ring is pushed
    toward each degenerate end of the chart.
    """

    infimum: float
    attained_at: complex
    trend: list[tuple[float, float]]
    decreasing: bool
    tends_to_zero: bool


def _ring(D: DomainModel, margin: float, thetas: np.ndarray, end: str) -> np.ndarray:
    if D.chart == "disk":
        return D.from_chart((1 - margin) * np.exp(1j * thetas))
    if D.chart == "annulus":
        r = margin if end == "inner" else 1 - margin
        return r * np.exp(1j * thetas)
    r = 1 + margin if end == "inner" else 1 / margin
    return r * np.exp(1j * thetas)


def osgood_infimum(
    D: DomainModel,
    n_theta: int = 128,
    n_r: int = 200,
    margin: float = 1e-6,
    trend_margins: tuple[float, ...] | None = None,
) -> OsgoodEstimate:
    """Estimate ``inf lambda_D d(., dD)`` and its trend toward degenerate boundary parts.

    The trend is followed on the end of the chart where the ring minimum is
    smallest.  ``tends_to_zero`` is a heuristic: strictly decreasing ring
    minima whose last value is below a tenth of the first.
    """
    if n_theta <= 0 or n_r <= 0 or not (0 < margin < 0.5):
        raise ParameterError("grid spec must be positive with margin in (0, 1/2)")
    thetas = 2 * np.pi * np.arange(n_theta) / n_theta
    radii = D.radial_ladder(n_r, margin)
    if D.chart == "disk":
        pts = D.from_chart(radii[:, None] * np.exp(1j * thetas)[None, :])
    else:
        pts = radii[:, None] * np.exp(1j * thetas)[None, :]
    pts = pts.ravel()
    with np.errstate(all="ignore"):
        pts = pts[np.isfinite(pts)]
    pts = pts[np.asarray(D.contains(pts), dtype=bool)]
    vals = D._boundary_distance(pts) / D._inv_density(pts)
    i = int(np.argmin(vals))
    inf_val, where = float(vals[i]), complex(pts[i])

    if trend_margins is None:
        trend_margins = tuple(10.0 ** -k for k in (2, 4, 8, 16, 32, 64, 128, 256))
    ends = ["outer"] if D.chart == "disk" else ["inner", "outer"]
    best_trend: list[tuple[float, float]] | None = None
    for end in ends:
        trend = []
        for m in trend_margins:
            if D.chart == "disk" or end == "outer" and D.chart == "annulus":
                if 1 - m == 1.0:
                    break
            if D.chart == "exterior" and end == "inner" and 1 + m == 1.0:
                break
            ring = _ring(D, m, thetas, end)
            ring = ring[np.isfinite(ring)]
            ring = ring[np.asarray(D.contains(ring), dtype=bool)]
            if ring.size == 0:
                break
            with np.errstate(all="ignore"):
                rv = D._boundary_distance(ring) / D._inv_density(ring)
            rv = rv[np.isfinite(rv) & (rv > 0)]
            if rv.size == 0:
                break
            trend.append((m, float(rv.min())))
        if trend and (best_trend is None or trend[-1][1] < best_trend[-1][1]):
            best_trend = trend
    best_trend = best_trend or []
    mins = [v for _, v in best_trend]
    decreasing = len(mins) >= 2 and all(b < a for a, b in zip(mins, mins[1:]))
    tends_to_zero = decreasing and mins[-1] < mins[0] / 10
    if mins and min(mins) < inf_val:
        inf_val = min(mins)
        where = complex(np.nan)
    return OsgoodEstimate(inf_val, where, best_trend, decreasing, tends_to_zero)
