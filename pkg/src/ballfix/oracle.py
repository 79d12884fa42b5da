"""Independent brute-force verification sweeps.

Everything here stays deliberately separate from the pipeline: exhaustive
displacement minima over clipped grids, grid-scale modulus estimates,
randomized nearest-support checks, and tightness reports comparing the
extremal construction against its theoretical bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import BudgetExceededError, DomainError, InvalidDimensionError
from .geometry import TOL_GEOM, jung_radius, pairwise_diameter
from .maps import ExtremalMap

DEFAULT_BUDGET = 10_000_000

__all__ = [
    "DEFAULT_BUDGET",
    "GridSpec",
    "JungCounterexample",
    "TightnessReport",
    "ball_grid",
    "iter_ball_grid",
    "jung_random_test",
    "min_displacement_grid",
    "modulus_grid",
    "random_ball_points",
    "tightness_report",
]


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned evaluation grid over [-1, 1]^dim, clipped to the ball."""

    dim: int
    points_per_axis: int
    clip: bool = True

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise InvalidDimensionError(f"dimension must be a positive integer, got {self.dim!r}")
        if self.points_per_axis < 2:
            raise ValueError(f"points_per_axis must be at least 2, got {self.points_per_axis}")

    @property
    def total_points(self) -> int:
        return self.points_per_axis ** self.dim

    @property
    def grid_step(self) -> float:
        return 2.0 / (self.points_per_axis - 1)


def _check_budget(spec: GridSpec, budget: int) -> None:
    if spec.total_points > budget:
        raise BudgetExceededError(
            f"grid of {spec.total_points} points exceeds the budget of {budget}",
            limit=budget, required=spec.total_points)


def iter_ball_grid(spec: GridSpec, budget: int = DEFAULT_BUDGET):
    """Yield the grid in slabs of constant first coordinate, deterministic
    order.  Clipping keeps points with norm <= 1 and adds the radial
    projections of the shell just outside (the sphere carries behavior the
    sweeps must see)."""
    _check_budget(spec, budget)
    axis = np.linspace(-1.0, 1.0, spec.points_per_axis)
    half_diag = spec.grid_step * math.sqrt(spec.dim) / 2.0
    if spec.dim == 1:
        yield axis[:, None]
        return
    rest = np.meshgrid(*([axis] * (spec.dim - 1)), indexing="ij")
    rest = np.stack([g.ravel() for g in rest], axis=1)
    for x0 in axis:
        slab = np.concatenate([np.full((rest.shape[0], 1), x0), rest], axis=1)
        if not spec.clip:
            yield slab
            continue
        norms = np.linalg.norm(slab, axis=1)
        inside = slab[norms <= 1.0]
        shell = (norms > 1.0) & (norms <= 1.0 + half_diag)
        projected = slab[shell] / norms[shell, None]
        chunk = np.concatenate([inside, projected], axis=0)
        if chunk.shape[0]:
            yield chunk


def ball_grid(spec: GridSpec, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Materialized grid (use the iterator for large sweeps)."""
    return np.concatenate(list(iter_ball_grid(spec, budget)), axis=0)


def _eval_rows(f, pts: np.ndarray) -> np.ndarray:
    if hasattr(f, "batch"):
        return np.asarray(f.batch(pts), dtype=float)
    return np.asarray([np.atleast_1d(np.asarray(f(p), dtype=float)) for p in pts])


def min_displacement_grid(f, spec: GridSpec,
                          budget: int = DEFAULT_BUDGET) -> tuple[np.ndarray, float]:
    """Exhaustive minimum of ||x - f(x)|| over the grid; first minimizer in
    scan order wins, so results are reproducible."""
    best_val = math.inf
    best_point = None
    for chunk in iter_ball_grid(spec, budget):
        disp = np.linalg.norm(chunk - _eval_rows(f, chunk), axis=1)
        i = int(np.argmin(disp))
        if float(disp[i]) < best_val:
            best_val = float(disp[i])
            best_point = chunk[i].copy()
    return best_point, best_val


@dataclass(frozen=True)
class TightnessReport:
    """Grid-scale comparison of the extremal map's minimum displacement
    against its theoretical optimum eps / jung_radius(dim)."""

    dim: int
    eps: float
    points_per_axis: int
    grid_step: float
    min_displacement: float
    argmin: np.ndarray
    theoretical_bound: float
    gap: float

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "eps": self.eps,
            "points_per_axis": self.points_per_axis,
            "grid_step": self.grid_step,
            "min_displacement": self.min_displacement,
            "argmin": [float(v) for v in self.argmin],
            "theoretical_bound": self.theoretical_bound,
            "gap": self.gap,
        }


def tightness_report(dim: int, eps: float, spec: GridSpec | None = None,
                     points_per_axis: int = 201,
                     budget: int = DEFAULT_BUDGET) -> TightnessReport:
    """Sweep the extremal map and report how closely the grid minimum
    approaches eps / jung_radius(dim) from above."""
    if spec is None:
        spec = GridSpec(dim=dim, points_per_axis=points_per_axis)
    if spec.dim != dim:
        raise ValueError(f"spec dimension {spec.dim} != {dim}")
    extremal = ExtremalMap(dim=dim, eps=eps)
    argmin, value = min_displacement_grid(extremal, spec, budget=budget)
    bound = eps / jung_radius(dim)
    return TightnessReport(
        dim=dim,
        eps=eps,
        points_per_axis=spec.points_per_axis,
        grid_step=spec.grid_step,
        min_displacement=value,
        argmin=argmin,
        theoretical_bound=bound,
        gap=value - bound,
    )


@dataclass(frozen=True)
class JungCounterexample:
    """A configuration violating the nearest-support bound (must never
    occur; any instance is a bug, not new mathematics)."""

    points: np.ndarray
    weights: np.ndarray
    combination_point: np.ndarray
    nearest_distance: float
    bound: float


def random_ball_points(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    """Uniform samples from the unit ball (Gaussian direction, radial cdf)."""
    gauss = rng.standard_normal((count, dim))
    gauss /= np.linalg.norm(gauss, axis=1, keepdims=True)
    return gauss * (rng.random((count, 1)) ** (1.0 / dim))


def jung_random_test(dim: int, trials: int, points_per_set: int = 10,
                     seed: int = 0) -> JungCounterexample | None:
    """Randomized certification that every convex combination of a point set
    lies within diameter / jung_radius(dim) of some member.

    Returns None when all trials pass, else the first counterexample.
    """
    rng = np.random.default_rng(seed)
    radius = jung_radius(dim)
    for _ in range(trials):
        count = int(rng.integers(1, points_per_set + 1))
        pts = random_ball_points(rng, dim, count)
        weights = rng.exponential(size=count)
        weights /= weights.sum()
        y = weights @ pts
        nearest = float(np.linalg.norm(pts - y, axis=1).min())
        bound = pairwise_diameter(pts) / radius
        if nearest > bound + TOL_GEOM:
            return JungCounterexample(points=pts, weights=weights, combination_point=y,
                                      nearest_distance=nearest, bound=bound)
    return None


def modulus_grid(f, r: float, spec: GridSpec, budget: int = DEFAULT_BUDGET) -> float:
    """Ball-based modulus estimate on the exhaustive grid: the largest image
    diameter over radius-r neighborhoods of grid points.

    For maps with few distinct values (the constructed maps) this is
    computed exactly from per-value nearest-distance fields; otherwise each
    neighborhood is scanned directly.
    """
    if r <= spec.grid_step:
        raise DomainError(
            f"neighborhood radius {r} must exceed the grid step {spec.grid_step}")
    pts = ball_grid(spec, budget)
    vals = _eval_rows(f, pts)
    values, labels = np.unique(vals, axis=0, return_inverse=True)
    k = values.shape[0]
    if k == 1:
        return 0.0
    if k <= 64 and k * pts.shape[0] <= (1 << 27):
        # A value pair contributes iff some grid point is within r of a
        # sample of each; nearest-distance fields decide that exactly.
        near = np.empty((k, pts.shape[0]), dtype=bool)
        for label in range(k):
            tree = cKDTree(pts[labels == label])
            near[label] = tree.query(pts, workers=-1)[0] <= r
        pair_dist = np.linalg.norm(values[:, None, :] - values[None, :, :], axis=-1)
        best = 0.0
        for a in range(k):
            for b in range(a + 1, k):
                if np.any(near[a] & near[b]):
                    best = max(best, float(pair_dist[a, b]))
        return best
    tree = cKDTree(pts)
    best = 0.0
    scanned = 0
    for i, idx in enumerate(tree.query_ball_point(pts, r)):
        scanned += len(idx)
        if scanned > budget:
            raise BudgetExceededError(
                f"neighborhood scan exceeded the budget of {budget} evaluations",
                limit=budget, required=scanned)
        if len(idx) > 1:
            best = max(best, pairwise_diameter(vals[idx]))
    return best
