"""Euclidean geometry on the unit ball.

Provides the Jung constant, inscribed regular simplices, point-set
diameters, exact minimal enclosing balls for small dimensions, and
convex-combination evaluation with a nearest-support-point query.

All operations are pure functions; vectors are plain numpy float arrays
treated as immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidCombinationError, InvalidDimensionError

# Tolerance for geometric identities (double precision leaves ~6 digits of
# headroom at desk scale) and for convex-weight normalization.
TOL_GEOM = 1e-9
TOL_WEIGHTS = 1e-12

__all__ = [
    "TOL_GEOM",
    "TOL_WEIGHTS",
    "Ball",
    "ConvexCombination",
    "PointSet",
    "as_points",
    "as_vector",
    "diameter",
    "eval_combination",
    "jung_nearest",
    "jung_radius",
    "min_enclosing_ball",
    "pairwise_diameter",
    "regular_simplex_vertices",
]


def as_vector(coords) -> np.ndarray:
    """Coerce to a finite 1-D float vector (scalars become 1-vectors)."""
    v = np.asarray(coords, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1 or v.size < 1:
        raise InvalidDimensionError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector coordinates must be finite")
    return v


def as_points(points) -> np.ndarray:
    """Coerce to a nonempty (m, n) float array of points with a common dim."""
    if isinstance(points, PointSet):
        return points.points
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
        raise InvalidDimensionError(f"expected an (m, n) point array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("point coordinates must be finite")
    return pts


def pairwise_diameter(points) -> float:
    """Max pairwise Euclidean distance, exact up to floating arithmetic.

    Chunked so memory stays bounded for a few hundred thousand points;
    quadratic in time.
    """
    pts = as_points(points)
    m = pts.shape[0]
    if m == 1:
        return 0.0
    chunk = max(1, (1 << 20) // m)
    best = 0.0
    for start in range(0, m, chunk):
        block = pts[start:start + chunk]
        d2 = ((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1)
        best = max(best, float(d2.max()))
    return math.sqrt(best)


@dataclass(frozen=True)
class PointSet:
    """A nonempty finite point configuration with its diameter cached."""

    points: np.ndarray
    diameter: float = field(init=False)

    def __post_init__(self):
        pts = as_points(self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "diameter", pairwise_diameter(pts))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def __getitem__(self, i) -> np.ndarray:
        return self.points[i]


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        if self.radius < 0:
            raise ValueError(f"radius must be nonnegative, got {self.radius}")

    def contains(self, point, tol: float = TOL_GEOM) -> bool:
        return float(np.linalg.norm(as_vector(point) - self.center)) <= self.radius + tol


def jung_radius(n: int) -> float:
    """Diameter of the regular n-simplex inscribed in the unit sphere of R^n.

    Equals sqrt(2(n+1)/n): 2 in dimension 1, sqrt(3) in dimension 2,
    decreasing monotonically towards sqrt(2).  Jung's theorem: any set of
    diameter d lies in a closed ball of radius d / jung_radius(n).
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {n!r}")
    return math.sqrt(2.0 * (n + 1) / n)


def regular_simplex_vertices(n: int) -> PointSet:
    """Vertices of a regular n-simplex inscribed in the unit sphere of R^n.

    Returns n+1 unit vectors with pairwise inner product -1/n, pairwise
    distance jung_radius(n), and centroid at the origin.  Construction:
    take the n+1 standard basis vectors of R^(n+1), subtract their
    centroid, express them in an orthonormal basis of the sum-zero
    hyperplane, and rescale to unit norm.  Rows are sorted
    lexicographically so the ordering is reproducible; for n = 1 this
    yields (-1,), (+1,).
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {n!r}")
    centered = np.eye(n + 1) - 1.0 / (n + 1)
    # The first n centered basis vectors are linearly independent and span
    # the sum-zero hyperplane; QR gives an orthonormal basis of it.
    basis, _ = np.linalg.qr(centered[:, :n])
    verts = centered @ basis                       # (n+1, n), common norm sqrt(n/(n+1))
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    order = np.lexsort(verts.T[::-1])              # primary key: first coordinate
    return PointSet(verts[order])


def diameter(points) -> float:
    """Diameter of a point configuration (0 for a singleton)."""
    if isinstance(points, PointSet):
        return points.diameter
    return pairwise_diameter(points)


# --- minimal enclosing ball -------------------------------------------------
#
# Exact Welzl-style solver: points are inserted in their given order
# (deterministic, no shuffling) and each containment failure pins the
# offending point to the boundary, nesting at most dim+2 levels deep.
# Intended for dim <= 4 and up to a few thousand points.

_REL_EPS = 1e-14


def _circumball(boundary: list[np.ndarray]) -> tuple[np.ndarray, float]:
    """Smallest ball with all boundary points on its sphere.

    The center lies in the affine hull of the boundary points; solving
    ||c - b_i|| = ||c - b_0|| reduces to a Gram system of size <= dim.
    """
    b0 = boundary[0]
    if len(boundary) == 1:
        return b0, 0.0
    rel = np.asarray(boundary[1:]) - b0
    gram = rel @ rel.T
    rhs = 0.5 * np.einsum("ij,ij->i", rel, rel)
    try:
        t = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        t = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    center = b0 + t @ rel
    radius = float(np.max(np.linalg.norm(np.asarray(boundary) - center, axis=1)))
    return center, radius


def _in_ball(center: np.ndarray, radius: float, p: np.ndarray) -> bool:
    return float(np.linalg.norm(p - center)) <= radius * (1.0 + _REL_EPS) + _REL_EPS


def _welzl(points: np.ndarray, boundary: list[np.ndarray], dim: int) -> tuple[np.ndarray, float]:
    if boundary:
        center, radius = _circumball(boundary)
        if len(boundary) == dim + 1:
            return center, radius
    else:
        center, radius = None, 0.0
    for i in range(points.shape[0]):
        p = points[i]
        if center is None or not _in_ball(center, radius, p):
            center, radius = _welzl(points[:i], boundary + [p], dim)
    if center is None:  # unreachable for nonempty input
        raise ValueError("cannot enclose an empty point set")
    return center, radius


def min_enclosing_ball(points) -> Ball:
    """The unique smallest closed ball containing every point.

    By Jung's theorem its radius is at most diameter / jung_radius(dim).
    """
    pts = as_points(points)
    center, radius = _welzl(pts, [], pts.shape[1])
    return Ball(center=center, radius=radius)


# --- convex combinations ----------------------------------------------------


@dataclass(frozen=True)
class ConvexCombination:
    """A weighted average sum_i w_i x_i with strictly positive weights
    summing to one (within TOL_WEIGHTS)."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = as_points(self.points)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.shape[0] != pts.shape[0]:
            raise InvalidCombinationError(
                f"{pts.shape[0]} points but {w.shape[0]} weights")
        if not np.all(w > 0):
            raise InvalidCombinationError("weights must be strictly positive")
        if abs(float(w.sum()) - 1.0) > TOL_WEIGHTS:
            raise InvalidCombinationError(
                f"weights sum to {w.sum()!r}, expected 1 within {TOL_WEIGHTS}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def support_diameter(self) -> float:
        return pairwise_diameter(self.points)


def eval_combination(c: ConvexCombination) -> np.ndarray:
    """The combination as a Euclidean point; lies in the convex hull of the
    support, hence in the unit ball whenever all support points do."""
    return c.weights @ c.points


def jung_nearest(c: ConvexCombination) -> tuple[int, float]:
    """Index and distance of the support point nearest to the combination.

    Jung's theorem guarantees the distance is at most
    support_diameter / jung_radius(dim).
    """
    y = eval_combination(c)
    dists = np.linalg.norm(c.points - y, axis=1)
    i = int(np.argmin(dists))
    return i, float(dists[i])
