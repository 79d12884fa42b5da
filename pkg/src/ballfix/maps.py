"""Self-maps of the unit ball with controlled discontinuity.

Houses the two discontinuous reference constructions (the 1-D step map
and the Voronoi extremal map), finitely sampled maps, and diagnostics:
image diameters, a ball-based modulus-of-discontinuity estimator, and the
1-D two-sided discontinuity-witness search.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError, InvalidDimensionError
from .geometry import (
    TOL_GEOM,
    PointSet,
    as_points,
    as_vector,
    jung_radius,
    pairwise_diameter,
    regular_simplex_vertices,
)

# Every self-map of the ball has image diameter at most 2, so discontinuity
# scales outside (0, 2] are caller mistakes and are rejected, not clamped.
EPS_MAX = 2.0

_TIE_RULES = ("lowest_index", "highest_index")
_TIE_TOL_SQ = 1e-12  # absolute tolerance on squared distances for Voronoi ties

__all__ = [
    "ConstantMap",
    "DiscontinuityWitness1D",
    "ExtremalMap",
    "IdentityMap",
    "ModulusEstimate",
    "SampledMap",
    "StepMap1D",
    "discontinuity_witness_1d",
    "eps_fixed_indices",
    "image_diameter",
    "modulus_estimate",
    "sample_map_on_grid",
]


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not (0.0 < eps <= EPS_MAX):
        raise DomainError(f"discontinuity scale must lie in (0, {EPS_MAX}], got {eps}")
    return eps


def _check_in_ball(x: np.ndarray, tol: float = TOL_GEOM) -> np.ndarray:
    norm = float(np.linalg.norm(x))
    if norm > 1.0 + tol:
        raise DomainError(f"point has norm {norm}, outside the unit ball")
    return x


@dataclass(frozen=True)
class StepMap1D:
    """Two-valued map on [-1, 1]: +eps/2 on the left branch (x <= 0),
    -eps/2 on the right branch.  Image diameter is exactly eps, yet no
    point moves by less than eps/2."""

    eps: float

    def __post_init__(self):
        object.__setattr__(self, "eps", _check_eps(self.eps))

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0
        v = float(arr) if scalar else float(arr.reshape(-1)[0])
        if abs(v) > 1.0 + TOL_GEOM:
            raise DomainError(f"{v} lies outside [-1, 1]")
        y = 0.5 * self.eps if v <= 0.0 else -0.5 * self.eps
        return y if scalar else np.array([y])

    def batch(self, xs: np.ndarray) -> np.ndarray:
        xs = as_points(xs)
        y = np.where(xs[:, 0] <= 0.0, 0.5 * self.eps, -0.5 * self.eps)
        return y[:, None]

    @property
    def dim(self) -> int:
        return 1

    def image_points(self) -> PointSet:
        return PointSet(np.array([[0.5 * self.eps], [-0.5 * self.eps]]))


@dataclass(frozen=True)
class ExtremalMap:
    """Piecewise-constant self-map built on the Voronoi cells of an inscribed
    regular simplex.

    Each point of cell i is sent to -scale * x_i where x_i is the cell's
    site and scale = eps / jung_radius(dim).  The image is a shrunken
    reflected copy of the vertex set, so its diameter is exactly eps, while
    every point of the ball is displaced by at least eps / jung_radius(dim):
    the construction showing that bound cannot be improved.

    For eps > jung_radius(dim) the image pokes outside the unit ball
    (value norms equal eps / jung_radius(dim)); the sharp self-map regime
    is eps <= jung_radius(dim).

    Ties on cell walls are broken by vertex index so the cells form a true
    partition; "lowest_index" keeps the dim = 1 case pointwise equal to
    StepMap1D.
    """

    dim: int
    eps: float
    tie_break: str = "lowest_index"
    vertices: PointSet = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise InvalidDimensionError(f"dimension must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "eps", _check_eps(self.eps))
        if self.tie_break not in _TIE_RULES:
            raise ValueError(f"tie_break must be one of {_TIE_RULES}, got {self.tie_break!r}")
        object.__setattr__(self, "vertices", regular_simplex_vertices(self.dim))

    @property
    def scale(self) -> float:
        return self.eps / jung_radius(self.dim)

    def voronoi_index(self, x) -> int:
        """Index of the nearest simplex vertex, ties to the configured rule."""
        x = _check_in_ball(as_vector(x))
        return int(self.batch_index(x[None, :])[0])

    def batch_index(self, xs: np.ndarray) -> np.ndarray:
        xs = as_points(xs)
        verts = self.vertices.points
        d2 = (
            (xs * xs).sum(axis=1)[:, None]
            - 2.0 * xs @ verts.T
            + (verts * verts).sum(axis=1)[None, :]
        )
        tied = d2 <= d2.min(axis=1, keepdims=True) + _TIE_TOL_SQ
        if self.tie_break == "lowest_index":
            return np.argmax(tied, axis=1)
        return tied.shape[1] - 1 - np.argmax(tied[:, ::-1], axis=1)

    def __call__(self, x) -> np.ndarray:
        x = _check_in_ball(as_vector(x))
        return self.batch(x[None, :])[0]

    def batch(self, xs: np.ndarray) -> np.ndarray:
        idx = self.batch_index(xs)
        return -self.scale * self.vertices.points[idx]

    def image_points(self) -> PointSet:
        return PointSet(-self.scale * self.vertices.points)


@dataclass(frozen=True)
class ConstantMap:
    """Sends every point to a fixed value; 0-continuous test map."""

    value: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "value", _check_in_ball(as_vector(self.value)))

    @property
    def dim(self) -> int:
        return self.value.shape[0]

    def __call__(self, x) -> np.ndarray:
        return self.value.copy()

    def batch(self, xs: np.ndarray) -> np.ndarray:
        xs = as_points(xs)
        return np.tile(self.value, (xs.shape[0], 1))

    def image_points(self) -> PointSet:
        return PointSet(self.value[None, :])


@dataclass(frozen=True)
class IdentityMap:
    """Fixes every point; continuous test map."""

    dim: int

    def __call__(self, x) -> np.ndarray:
        return as_vector(x).copy()

    def batch(self, xs: np.ndarray) -> np.ndarray:
        return as_points(xs).copy()


@dataclass(frozen=True)
class SampledMap:
    """A map known only through samples: points z in the ball paired with
    values f(z), plus a covering radius r_cov promising every point of the
    ball lies within r_cov of some sample.

    The covering radius is caller-supplied metadata; `check_covering`
    verifies it probabilistically (exact verification is a separate hard
    problem).
    """

    points: np.ndarray
    values: np.ndarray
    covering_radius: float
    eps: float | None = None

    def __post_init__(self):
        pts = as_points(self.points)
        vals = as_points(self.values)
        if vals.shape != pts.shape:
            raise ValueError(f"points shape {pts.shape} != values shape {vals.shape}")
        if float(np.linalg.norm(pts, axis=1).max()) > 1.0 + TOL_GEOM:
            raise DomainError("some sample point lies outside the unit ball")
        if float(np.linalg.norm(vals, axis=1).max()) > 1.0 + TOL_GEOM:
            raise DomainError("some sample value lies outside the unit ball")
        if self.covering_radius < 0:
            raise ValueError("covering radius must be nonnegative")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "covering_radius", float(self.covering_radius))
        if self.eps is not None:
            object.__setattr__(self, "eps", _check_eps(self.eps))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def check_covering(self, probes: int = 1000, seed: int = 0) -> float:
        """Max distance from random ball probes to the sample set; the
        covering claim holds on this sample of probes iff the result is
        at most covering_radius."""
        rng = np.random.default_rng(seed)
        n = self.dim
        gauss = rng.standard_normal((probes, n))
        gauss /= np.linalg.norm(gauss, axis=1, keepdims=True)
        radii = rng.random(probes) ** (1.0 / n)
        tree = cKDTree(self.points)
        dists, _ = tree.query(gauss * radii[:, None])
        return float(dists.max())


def sample_map_on_grid(f, dim: int, spacing: float, eps: float | None = None) -> SampledMap:
    """Sample a map on a uniform axis grid over [-1, 1]^dim clipped to the
    ball (1-D: the full interval).  Covering radius is the half-diagonal of
    a grid cell."""
    if spacing <= 0:
        raise DomainError(f"spacing must be positive, got {spacing}")
    count = int(np.floor(2.0 / spacing)) + 1
    axis = np.linspace(-1.0, 1.0, count)
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    pts = pts[np.linalg.norm(pts, axis=1) <= 1.0 + TOL_GEOM]
    values = f.batch(pts) if hasattr(f, "batch") else np.asarray([as_vector(f(p)) for p in pts])
    step = float(axis[1] - axis[0]) if count > 1 else 2.0
    return SampledMap(pts, values, covering_radius=step * np.sqrt(dim) / 2.0, eps=eps)


@dataclass(frozen=True)
class ModulusEstimate:
    """Largest image diameter over closed sample-neighborhoods of one scale.

    Lower-bounds the modulus of discontinuity of the underlying map
    restricted to the samples; monotone nondecreasing in the scale.
    """

    scale: float
    value: float


@dataclass(frozen=True)
class DiscontinuityWitness1D:
    """A close pair certifying a jump: `right_point` is a sample the map
    moves right by more than the target displacement, `left_point` one it
    moves left by more than that, and `image_gap` = f(right) - f(left).

    Whenever such a pair exists, image_gap > 2 * target - |left - right|
    by the triangle-style rearrangement of the two displacement bounds.
    """

    right_point: float
    left_point: float
    image_gap: float


def image_diameter(m) -> float:
    """Diameter of a map's (finite) image set.

    Exact eps for StepMap1D; eps up to floating error for ExtremalMap;
    the diameter of the distinct sampled values for a SampledMap.
    """
    if isinstance(m, SampledMap):
        return pairwise_diameter(np.unique(m.values, axis=0))
    if hasattr(m, "image_points"):
        return m.image_points().diameter
    raise TypeError(f"no finite image set known for {type(m).__name__}")


def modulus_estimate(m: SampledMap, r: float) -> ModulusEstimate:
    """Max over samples z of the image diameter of the closed ball of
    radius r around z, intersected with the sample set."""
    if r <= 0:
        raise DomainError(f"neighborhood radius must be positive, got {r}")
    values, labels = np.unique(m.values, axis=0, return_inverse=True)
    k = values.shape[0]
    tree = cKDTree(m.points)
    neighborhoods = tree.query_ball_point(m.points, r)
    if k <= 64:
        # Few distinct values: reduce every neighborhood to its label set.
        pair_dist = np.linalg.norm(values[:, None, :] - values[None, :, :], axis=-1)
        best = 0.0
        for idx in neighborhoods:
            present = np.unique(labels[idx])
            if present.size > 1:
                best = max(best, float(pair_dist[np.ix_(present, present)].max()))
        return ModulusEstimate(scale=float(r), value=best)
    best = 0.0
    for idx in neighborhoods:
        if len(idx) > 1:
            best = max(best, pairwise_diameter(m.values[idx]))
    return ModulusEstimate(scale=float(r), value=best)


def eps_fixed_indices(m: SampledMap, eps_prime: float) -> np.ndarray:
    """Indices of samples displaced by at most eps_prime."""
    disp = np.linalg.norm(m.points - m.values, axis=1)
    return np.flatnonzero(disp <= eps_prime)


def discontinuity_witness_1d(m: SampledMap, eps_prime: float,
                             resolution: float) -> DiscontinuityWitness1D | None:
    """Search a sampled 1-D map for adjacent samples moved in opposite
    directions by more than eps_prime.

    Samples are split into right-movers (f(x) - x > eps_prime) and
    left-movers (x - f(x) > eps_prime); a witness is the first adjacent
    pair, one from each side, within `resolution` of each other.  Returns
    None when no such pair exists, in which case the grid either has a
    sample displaced by at most eps_prime (report it via
    eps_fixed_indices) or one side is empty entirely.
    """
    if m.dim != 1:
        raise InvalidDimensionError(f"witness search is 1-D only, got dim {m.dim}")
    if eps_prime <= 0:
        raise DomainError(f"target displacement must be positive, got {eps_prime}")
    if resolution <= 0:
        raise DomainError(f"resolution must be positive, got {resolution}")
    order = np.argsort(m.points[:, 0], kind="stable")
    xs = m.points[order, 0]
    fx = m.values[order, 0]
    right = fx - xs > eps_prime
    left = xs - fx > eps_prime
    if not right.any() or not left.any():
        return None
    straddle = (right[:-1] & left[1:]) | (left[:-1] & right[1:])
    close = np.abs(xs[1:] - xs[:-1]) <= resolution
    hits = np.flatnonzero(straddle & close)
    if hits.size == 0:
        return None
    i = int(hits[0])
    a, b = (i, i + 1) if right[i] else (i + 1, i)
    return DiscontinuityWitness1D(
        right_point=float(xs[a]),
        left_point=float(xs[b]),
        image_gap=float(fx[a] - fx[b]),
    )
