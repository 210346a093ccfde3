"""The scaling field alpha, its exponential g, and the connection it induces.

Points are 4-vectors ``(y0, y1, y2, y3)`` of Minkowski space, ``y0`` being
time.  The field is stored as alpha; ``g = exp(alpha)`` is derived, so g is
positive everywhere and ``A_mu = d alpha / d y_mu`` is obtained by symbolic
differentiation of the expression tree.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from . import expr
from .arithmetic import ScaledNumber, StructureMismatchError, close
from .linear import ScaledVector

MINKOWSKI = np.diag([1.0, -1.0, -1.0, -1.0])
EUCLIDEAN = np.eye(4)

# exp() overflows past this
_ALPHA_MAX = math.log(np.finfo(float).max)


def as_point(y) -> np.ndarray:
    p = np.asarray(y, dtype=float).reshape(-1)
    if p.shape != (4,):
        raise ValueError(f"a point needs 4 coordinates, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point coordinates must be finite")
    return p


class FieldSpec:
    """Parsed alpha field together with its symbolic gradient."""

    def __init__(self, alpha: expr.Node, source: Optional[str] = None):
        self.alpha = alpha
        self.source = source if source is not None else alpha.text()
        self.gradient = expr.gradient(alpha, 4)

    def __repr__(self):
        return f"FieldSpec({self.source!r})"

    @property
    def is_constant(self) -> bool:
        return expr.is_constant(self.alpha)

    def alpha_on(self, points) -> np.ndarray:
        return expr.evaluate_on(self.alpha, points)

    def grad_on(self, points) -> np.ndarray:
        """A_mu at an array of points, shape ``(..., 4)``."""
        pts = np.asarray(points, dtype=float)
        return np.stack([expr.evaluate_on(d, pts) for d in self.gradient], axis=-1)


def parse_field(text: str) -> FieldSpec:
    return FieldSpec(expr.parse(text, expr.COORDS), text)


def eval_alpha(spec: FieldSpec, y) -> float:
    return float(spec.alpha_on(as_point(y)))


def _exp_checked(a):
    if np.any(a > _ALPHA_MAX):
        raise OverflowError("range error: g = exp(alpha) overflows")
    return np.exp(a)


def eval_g(spec: FieldSpec, y) -> float:
    return float(_exp_checked(eval_alpha(spec, y)))


def grad_alpha(spec: FieldSpec, y) -> np.ndarray:
    return spec.grad_on(as_point(y))


@dataclass(frozen=True)
class Grid:
    """Uniform rectangular lattice over a box of M.

    An axis with ``box_max > box_min`` is integrated and needs at least two
    points; an axis with equal bounds is collapsed to the single coordinate
    ``box_min`` and contributes a unit measure.

    ``nodes`` puts ``points`` samples on each integrated axis, endpoints
    included.  ``cell_centers`` splits the axis into ``points`` cells of
    width ``spacing`` for midpoint quadrature.
    """

    box_min: Tuple[float, ...]
    box_max: Tuple[float, ...]
    points: Tuple[int, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.box_min)
        hi = tuple(float(v) for v in self.box_max)
        n = tuple(int(v) for v in self.points)
        if not (len(lo) == len(hi) == len(n) == 4):
            raise ValueError("grid needs 4 entries for boxMin, boxMax and points")
        for k in range(4):
            if not (math.isfinite(lo[k]) and math.isfinite(hi[k])):
                raise ValueError("grid bounds must be finite")
            if hi[k] < lo[k]:
                raise ValueError(f"axis {k}: boxMax below boxMin")
            if hi[k] > lo[k] and n[k] < 2:
                raise ValueError(f"axis {k}: integrated axes need at least 2 points")
            if n[k] < 1:
                raise ValueError(f"axis {k}: points must be positive")
        object.__setattr__(self, "box_min", lo)
        object.__setattr__(self, "box_max", hi)
        object.__setattr__(self, "points", n)

    @property
    def integrated(self) -> Tuple[bool, ...]:
        return tuple(h > l for l, h in zip(self.box_min, self.box_max))

    @property
    def spacing(self) -> np.ndarray:
        return np.array([
            (h - l) / n if on else 0.0
            for l, h, n, on in zip(self.box_min, self.box_max, self.points, self.integrated)
        ])

    @property
    def cell_volume(self) -> float:
        h = self.spacing
        return float(np.prod(h[np.asarray(self.integrated)]))

    def _axes(self, centers: bool):
        axes = []
        for l, h, n, on in zip(self.box_min, self.box_max, self.points, self.integrated):
            if not on:
                axes.append(np.array([l]))
            elif centers:
                axes.append(l + (np.arange(n) + 0.5) * (h - l) / n)
            else:
                axes.append(np.linspace(l, h, n))
        return axes

    def node_axes(self):
        return self._axes(False)

    def nodes(self) -> np.ndarray:
        """Lattice sites, shape ``(n0, n1, n2, n3, 4)``."""
        return np.stack(np.meshgrid(*self._axes(False), indexing="ij"), axis=-1)

    def cell_centers(self) -> np.ndarray:
        return np.stack(np.meshgrid(*self._axes(True), indexing="ij"), axis=-1)

    def refined(self, factor: int) -> "Grid":
        pts = tuple(n * factor if on else n for n, on in zip(self.points, self.integrated))
        return Grid(self.box_min, self.box_max, pts)

    def coarsened(self, factor: int) -> "Grid":
        pts = tuple(max(2, n // factor) if on else n for n, on in zip(self.points, self.integrated))
        return Grid(self.box_min, self.box_max, pts)


def connect(spec: FieldSpec, x, y, n: ScaledNumber) -> ScaledNumber:
    """Carry ``n`` from the structure at ``y`` to the one at ``x``.

    The base number is kept; its value is multiplied by ``g(y)/g(x)``.
    """
    gy, gx = eval_g(spec, y), eval_g(spec, x)
    if not close(n.scale, gy, 1e-9):
        raise StructureMismatchError(
            f"number lives in structure {n.scale!r}, but g(y) = {gy!r}"
        )
    return ScaledNumber(n.base, gx, n.order_reversed)


def connect_vector(spec: FieldSpec, x, y, psi: ScaledVector) -> ScaledVector:
    gy, gx = eval_g(spec, y), eval_g(spec, x)
    if not close(psi.scale, gy, 1e-9):
        raise StructureMismatchError(
            f"vector lives in space {psi.scale!r}, but g(y) = {gy!r}"
        )
    return ScaledVector(psi.base, gx)


@dataclass(frozen=True)
class Fiber:
    point: Tuple[float, ...]
    scale: float
    kind: str
    contents: Tuple[str, ...]
    metric: Optional[np.ndarray] = field(default=None, compare=False)


def fiber_at(spec: FieldSpec, y, kind: str = "gauge") -> Fiber:
    """Structures attached to ``y``: complex numbers and vectors for the gauge
    bundle, real numbers and a scaled chart of M for the geometry bundle."""
    p = as_point(y)
    g = eval_g(spec, p)
    if kind == "gauge":
        return Fiber(tuple(p), g, kind, ("C", "V"))
    if kind == "geometry":
        return Fiber(tuple(p), g, kind, ("R", "T"), MINKOWSKI.copy())
    raise ValueError(f"unknown bundle kind {kind!r}; use 'gauge' or 'geometry'")


@dataclass(frozen=True)
class RestrictionReport:
    max_norm: float
    argmax: Tuple[float, ...]
    epsilon: float
    passed: bool


def resolve_threads(threads: Optional[int] = None) -> int:
    if threads is None:
        threads = int(os.environ.get("LOCALMATH_THREADS", "1") or 1)
    return max(1, int(threads))


def sweep(fn, points: np.ndarray, threads: Optional[int] = None) -> np.ndarray:
    """Apply a vectorized ``fn`` over a flat ``(N, 4)`` point array in chunks."""
    threads = resolve_threads(threads)
    if threads == 1 or len(points) < 2 * threads:
        return fn(points)
    chunks = np.array_split(points, threads)
    with ThreadPoolExecutor(threads) as pool:
        parts = list(pool.map(fn, chunks))
    return np.concatenate(parts)


def check_local_restriction(spec: FieldSpec, region: Grid, epsilon: float,
                            threads: Optional[int] = None) -> RestrictionReport:
    """Largest Euclidean length of A over the lattice sites, against ``epsilon``."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    pts = region.nodes().reshape(-1, 4)
    if len(pts) == 0:
        raise ValueError("empty region")
    norms = sweep(lambda p: np.linalg.norm(spec.grad_on(p), axis=-1), pts, threads)
    k = int(np.argmax(norms))
    worst = float(norms[k])
    return RestrictionReport(worst, tuple(float(c) for c in pts[k]), float(epsilon), worst < epsilon)
