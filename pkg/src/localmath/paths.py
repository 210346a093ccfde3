"""Path lengths in the presence of the scaling field, and geodesics.

The length of ``p: [0, 1] -> M`` measured in the structure at ``x`` is

    L(p)_x = e^{-alpha(x)} * integral_0^1 e^{alpha(p(s))} sqrt(p' h p') ds

with ``h`` the Minkowski metric (or the identity in Euclidean test mode).
Geodesics are computed two independent ways: by integrating the
Euler-Lagrange ODE with RK4 and shooting on the initial velocity, and by
direct gradient descent on a discretized length functional.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from . import expr
from .arithmetic import ScaledNumber
from .field import EUCLIDEAN, MINKOWSKI, FieldSpec, as_point, eval_alpha

log = logging.getLogger(__name__)

RADICAND_TOL = 1e-12


class PathDomainError(ValueError):
    """The path leaves the region where its length is defined."""


def metric_matrix(metric) -> np.ndarray:
    if isinstance(metric, str):
        if metric == "minkowski":
            return MINKOWSKI
        if metric == "euclidean":
            return EUCLIDEAN
        raise ValueError(f"unknown metric {metric!r}; use 'minkowski' or 'euclidean'")
    return np.asarray(metric, dtype=float)


class Path:
    """A curve on ``s in [0, 1]``, analytic or piecewise linear."""

    def __init__(self, exprs=None, points=None, s=None):
        if (exprs is None) == (points is None):
            raise ValueError("give either component expressions or polyline points")
        self.exprs = None
        self.points = None
        self.s = None
        if exprs is not None:
            nodes = [e if isinstance(e, expr.Node) else expr.parse(e, ("s",)) for e in exprs]
            if len(nodes) != 4:
                raise ValueError("a path has 4 components")
            self.exprs = tuple(nodes)
            self._dexprs = tuple(n.diff(0) for n in nodes)
            for end in (0.0, 1.0):
                if not np.all(np.isfinite(self.at(end))):
                    raise ValueError("path endpoints must be finite")
        else:
            pts = np.asarray(points, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 4 or len(pts) < 2:
                raise ValueError("a polyline needs at least 2 points of 4 coordinates")
            if not np.all(np.isfinite(pts)):
                raise ValueError("polyline points must be finite")
            ss = np.linspace(0.0, 1.0, len(pts)) if s is None else np.asarray(s, dtype=float)
            if ss.shape != (len(pts),) or np.any(np.diff(ss) <= 0):
                raise ValueError("s must be strictly increasing, one value per point")
            self.points = pts
            self.s = ss

    @classmethod
    def analytic(cls, exprs: Sequence) -> "Path":
        return cls(exprs=exprs)

    @classmethod
    def polyline(cls, points, s=None) -> "Path":
        return cls(points=points, s=s)

    @classmethod
    def straight(cls, y, z) -> "Path":
        return cls(points=np.array([as_point(y), as_point(z)]))

    @property
    def is_analytic(self) -> bool:
        return self.exprs is not None

    def at(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.is_analytic:
            return np.stack([np.broadcast_to(e.evaluate([s]), s.shape) for e in self.exprs], axis=-1)
        return np.stack([np.interp(s, self.s, self.points[:, k]) for k in range(4)], axis=-1)

    @property
    def start(self) -> np.ndarray:
        return self.at(0.0)

    @property
    def end(self) -> np.ndarray:
        return self.at(1.0)

    def quadrature(self, n: int):
        """Midpoint nodes: ``(s_lo, s_hi, positions, tangents, weights)``."""
        if self.is_analytic:
            edges = np.linspace(0.0, 1.0, n + 1)
            mid = 0.5 * (edges[:-1] + edges[1:])
            pos = self.at(mid)
            tan = np.stack([np.broadcast_to(d.evaluate([mid]), mid.shape) for d in self._dexprs], axis=-1)
            return edges[:-1], edges[1:], pos, tan, np.diff(edges)
        segs = len(self.points) - 1
        sub = max(1, math.ceil(n / segs))
        frac = (np.arange(sub) + 0.5) / sub
        p0, p1 = self.points[:-1], self.points[1:]
        ds = np.diff(self.s)
        pos = (p0[:, None, :] + frac[None, :, None] * (p1 - p0)[:, None, :]).reshape(-1, 4)
        tan = np.repeat((p1 - p0) / ds[:, None], sub, axis=0)
        w = np.repeat(ds / sub, sub)
        lo = (self.s[:-1, None] + ds[:, None] * np.arange(sub) / sub).reshape(-1)
        return lo, lo + w, pos, tan, w


def _radicand(tan: np.ndarray, h: np.ndarray) -> np.ndarray:
    return np.einsum("...i,ij,...j->...", tan, h, tan)


def path_length(spec: FieldSpec, path: Path, x=None, metric="minkowski", n: int = 10_000) -> ScaledNumber:
    """Length of ``path`` carried to the real-number structure at ``x``.

    ``x`` defaults to the start of the path.
    """
    x = path.start if x is None else as_point(x)
    h = metric_matrix(metric)
    lo, hi, pos, tan, w = path.quadrature(n)
    rad = _radicand(tan, h)
    bad = np.nonzero(rad < -RADICAND_TOL)[0]
    if len(bad):
        k = bad[0]
        raise PathDomainError(
            f"path is spacelike on s in [{lo[k]:.6g}, {hi[k]:.6g}] (radicand {rad[k]:.3g})"
        )
    integrand = np.exp(spec.alpha_on(pos) - eval_alpha(spec, x)) * np.sqrt(np.clip(rad, 0.0, None))
    value = float(np.sum(integrand * w))
    gx = math.exp(eval_alpha(spec, x))
    return ScaledNumber(value * gx, gx)


@dataclass
class GeodesicResult:
    tau: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    completed: bool

    @property
    def path(self) -> Path:
        return Path.polyline(self.positions, self.tau / self.tau[-1])


def _normalized(v0, h):
    v = np.asarray(v0, dtype=float).reshape(4)
    speed2 = float(v @ h @ v)
    if not speed2 > 0:
        raise ValueError("initial velocity must have positive squared speed (timelike for Minkowski)")
    return v / math.sqrt(speed2)


def _geodesic_rhs(spec: FieldSpec, h: np.ndarray):
    hinv = np.linalg.inv(h)

    def rhs(state):
        p, v = state[:4], state[4:]
        A = spec.grad_on(p)
        return np.concatenate([v, hinv @ A - (A @ v) * v])

    return rhs


def solve_geodesic(spec: FieldSpec, y0, v0, tau_max: float, steps: int, metric="minkowski",
                   normalize: bool = True) -> GeodesicResult:
    """Fixed-step RK4 for ``p'' + (A . p') p' - h^{-1} A = 0``.

    The initial velocity is rescaled to unit speed unless ``normalize`` is off.
    On a non-finite state the integration stops and the result keeps the
    samples up to the last finite one.
    """
    if steps < 2:
        raise ValueError("need at least 2 steps")
    h = metric_matrix(metric)
    v = _normalized(v0, h) if normalize else np.asarray(v0, dtype=float).reshape(4)
    state = np.concatenate([as_point(y0), v])
    rhs = _geodesic_rhs(spec, h)
    dt = tau_max / steps
    out = np.empty((steps + 1, 8))
    out[0] = state
    completed = True
    last = steps
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            k1 = rhs(state)
            k2 = rhs(state + 0.5 * dt * k1)
            k3 = rhs(state + 0.5 * dt * k2)
            k4 = rhs(state + dt * k3)
            state = state + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(state)):
                completed = False
                last = k
                log.warning("geodesic state became non-finite; stopping at tau=%g", k * dt)
                break
            out[k + 1] = state
    tau = np.arange(last + 1) * dt
    return GeodesicResult(tau, out[: last + 1, :4].copy(), out[: last + 1, 4:].copy(), completed)


def shoot_geodesic(spec: FieldSpec, y, z, metric="euclidean", steps: int = 1000,
                   tol: float = 1e-12) -> GeodesicResult:
    """Geodesic from ``y`` to ``z`` by shooting on the initial velocity.

    The unknown is ``w = tau_max * v0`` with ``v0`` of unit speed, so the
    straight chord ``z - y`` is the natural first guess.
    """
    y, z = as_point(y), as_point(z)
    h = metric_matrix(metric)

    def split(w):
        tau = math.sqrt(max(float(w @ h @ w), 0.0))
        return tau, w / tau

    def residual(w):
        tau, v0 = split(w)
        sol = solve_geodesic(spec, y, v0, tau, steps, metric, normalize=False)
        if not sol.completed:
            return np.full(4, 1e6)
        return sol.positions[-1] - z

    root = optimize.root(residual, z - y, method="hybr", tol=tol)
    if not root.success:
        log.warning("shooting did not converge: %s", root.message)
    tau, v0 = split(root.x)
    result = solve_geodesic(spec, y, v0, tau, steps, metric, normalize=False)
    if np.max(np.abs(result.positions[-1] - z)) > 1e-8:
        raise RuntimeError("shooting failed to reach the end point")
    return result


# ---------------------------------------------------------------- variational


def discrete_length(spec: FieldSpec, knots: np.ndarray, h: np.ndarray, alpha_x: float) -> float:
    """Composite midpoint value of the length functional for a polyline."""
    d = np.diff(knots, axis=0)
    rad = _radicand(d, h)
    if np.any(rad < -RADICAND_TOL):
        return math.inf
    mid = 0.5 * (knots[:-1] + knots[1:])
    return float(np.sum(np.exp(spec.alpha_on(mid) - alpha_x) * np.sqrt(np.clip(rad, 0.0, None))))


def discrete_length_gradient(spec: FieldSpec, knots: np.ndarray, h: np.ndarray,
                             alpha_x: float) -> np.ndarray:
    """Gradient of :func:`discrete_length` with respect to every knot."""
    d = np.diff(knots, axis=0)
    ell = np.sqrt(np.clip(_radicand(d, h), 1e-300, None))
    mid = 0.5 * (knots[:-1] + knots[1:])
    wgt = np.exp(spec.alpha_on(mid) - alpha_x)
    A = spec.grad_on(mid)
    half = (0.5 * wgt * ell)[:, None] * A
    pull = (wgt / ell)[:, None] * (d @ h)
    grad = np.zeros_like(knots)
    grad[:-1] += half - pull
    grad[1:] += half + pull
    return grad


@dataclass
class MinimizeResult:
    path: Path
    length: ScaledNumber
    converged: bool
    iterations: int
    grad_norm: float


def minimize_path(spec: FieldSpec, y, z, metric="euclidean", knots: int = 64,
                  max_iter: int = 200_000, x=None, gtol: float = 1e-10,
                  ftol: float = 1e-15) -> MinimizeResult:
    """Gradient descent with backtracking on the discretized length.

    Starts from the straight segment with ``knots`` interior points.  Steps
    that make a segment spacelike are rejected like any other failed step.
    Stops when the gradient norm drops below ``gtol`` or the relative decrease
    over an iteration falls below ``ftol``.
    """
    if knots < 3:
        raise ValueError("need at least 3 interior knots")
    y, z = as_point(y), as_point(z)
    h = metric_matrix(metric)
    x = y if x is None else as_point(x)
    ax = eval_alpha(spec, x)
    P = y + np.linspace(0.0, 1.0, knots + 2)[:, None] * (z - y)
    f = discrete_length(spec, P, h, ax)
    if not math.isfinite(f):
        raise PathDomainError("the straight segment between the end points is spacelike")
    step = 1.0 / (knots + 1)
    converged = False
    gnorm = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        g = discrete_length_gradient(spec, P, h, ax)
        g[0] = g[-1] = 0.0
        gnorm = float(np.linalg.norm(g))
        if gnorm < gtol:
            converged = True
            break
        t = step * 2.0
        while True:
            trial = P - t * g
            ft = discrete_length(spec, trial, h, ax)
            if ft <= f - 1e-4 * t * gnorm ** 2:
                break
            t *= 0.5
            if t < 1e-20:
                break
        if t < 1e-20:
            converged = True
            break
        rel = (f - ft) / max(abs(f), 1e-300)
        P, f, step = trial, ft, t
        if rel < ftol:
            converged = True
            break
    else:
        log.warning("minimize_path: not converged after %d iterations", max_iter)
    gx = math.exp(ax)
    path = Path.polyline(P)
    return MinimizeResult(path, ScaledNumber(f * gx, gx), converged, it, gnorm)
