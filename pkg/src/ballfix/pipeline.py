"""Constructive search for near-fixed points of discontinuous ball maps.

The chain: sample the ball densely enough that radius-alpha/2 balls cover
it, embed each query point into the nerve of that cover by tent-function
weights (a point of the Vietoris-Rips complex VR(samples; alpha)), push the
weights onto the sampled values, and average back into the ball.  The
composite map F is continuous, so it has a fixed point; near that fixed
point some sample is displaced by less than the requested bound, and the
triangle-inequality chain certifying this is returned as a checkable
certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    BudgetExceededError,
    CertificateError,
    CoveringViolationError,
    DomainError,
    HypothesisError,
    NoConvergenceError,
)
from .geometry import TOL_GEOM, ConvexCombination, as_points, as_vector, jung_radius
from .maps import SampledMap

# Grid spacing is alpha/sqrt(dim) * (1 - GRID_SAFETY).  The safety margin
# keeps every point of the ball strictly inside some tent support, which
# bounds the partition-of-unity denominators away from zero (>=
# GRID_SAFETY * alpha/2) and with it the slopes of the embedding weights.
GRID_SAFETY = 0.5

DEFAULT_GRID_BUDGET = 2_000_000
DEFAULT_EVAL_BUDGET = 100_000

__all__ = [
    "EmbeddedPoint",
    "EpsFixedPointCertificate",
    "FixedPointResult",
    "PipelineParams",
    "PipelineRun",
    "RipsEdgeViolation",
    "SampleGrid",
    "averaged_map",
    "averaged_map_eval",
    "build_sample_grid",
    "embed",
    "extract_certificate",
    "find_fixed_point",
    "run_pipeline",
    "simplicial_image_check",
]


@dataclass(frozen=True)
class PipelineParams:
    """Validated parameter bundle for one pipeline run.

    eps is the discontinuity scale of the input map, eps_prime the
    displacement bound to certify, gamma the image-diameter slack, alpha
    the sampling/Rips scale, and fp_tol the fixed-point residual the
    solver must reach.  The admissibility chain

        (eps + gamma)/R + alpha/2 + fp_tol < eps_prime,   R = jung_radius(dim)

    extends the exact-arithmetic requirement by the solver residual so the
    certificate inequality stays fully checkable.
    """

    dim: int
    eps: float
    eps_prime: float
    gamma: float
    alpha: float
    fp_tol: float

    def __post_init__(self):
        radius = jung_radius(self.dim)
        if not (0.0 < self.eps <= 2.0):
            raise DomainError(f"eps must lie in (0, 2], got {self.eps}")
        if self.eps_prime <= self.eps / radius:
            raise HypothesisError(
                f"eps_prime={self.eps_prime} is not above the optimal bound "
                f"eps/R={self.eps / radius}")
        if not (0.0 < self.gamma < radius * self.eps_prime - self.eps):
            raise DomainError(
                f"gamma={self.gamma} outside (0, {radius * self.eps_prime - self.eps})")
        if self.alpha <= 0 or self.fp_tol <= 0:
            raise DomainError("alpha and fp_tol must be positive")
        slack = (self.eps + self.gamma) / radius + self.alpha / 2.0 + self.fp_tol
        if not slack < self.eps_prime:
            raise DomainError(
                f"certificate chain bound {slack} does not undercut eps_prime={self.eps_prime}; "
                "decrease alpha or fp_tol")

    @property
    def jung_term_bound(self) -> float:
        return (self.eps + self.gamma) / jung_radius(self.dim)

    @property
    def certificate_bound(self) -> float:
        return self.jung_term_bound + self.alpha / 2.0 + self.fp_tol


class SampleGrid:
    """A SampledMap dense enough that alpha/2-balls around the samples cover
    the unit ball, with a KD-tree for neighborhood queries."""

    def __init__(self, sampled: SampledMap, alpha: float, spacing: float | None = None):
        if alpha <= 0:
            raise DomainError(f"alpha must be positive, got {alpha}")
        self.sampled = sampled
        self.alpha = float(alpha)
        self.spacing = spacing
        self.tree = cKDTree(sampled.points)

    @property
    def points(self) -> np.ndarray:
        return self.sampled.points

    @property
    def values(self) -> np.ndarray:
        return self.sampled.values

    @property
    def dim(self) -> int:
        return self.sampled.dim

    def __len__(self) -> int:
        return len(self.sampled)


@dataclass(frozen=True)
class EmbeddedPoint:
    """A point expressed in the nerve of the sample cover: support indices
    into the grid plus the tent-weight convex combination over them.  The
    support has diameter at most alpha (all members lie within alpha/2 of
    the embedded point), i.e. it spans a Rips simplex of VR(grid; alpha)."""

    support: np.ndarray
    combination: ConvexCombination


@dataclass(frozen=True)
class FixedPointResult:
    """A point y with residual ||F(y) - y||; residual <= fp_tol on success."""

    y: np.ndarray
    residual: float
    evaluations: int = 0


@dataclass(frozen=True)
class RipsEdgeViolation:
    """An edge of the sample Rips complex whose image is too long."""

    i: int
    j: int
    domain_distance: float
    image_distance: float


@dataclass(frozen=True)
class CertificateTrace:
    """Where the certificate came from: the fixed point of the averaged map,
    its residual, and the index of the certified sample in the grid."""

    y: np.ndarray
    residual: float
    support_index: int


@dataclass(frozen=True)
class EpsFixedPointCertificate:
    """A sample z displaced by less than the requested bound, with the
    terms of the triangle-inequality chain that prove it:

        ||f(z) - z|| <= jung_term + residual + anchor_term
                     <= (eps+gamma)/R + fp_tol + alpha/2 < eps_prime.
    """

    z: np.ndarray
    fz: np.ndarray
    displacement: float
    bound: float
    trace: CertificateTrace
    jung_term: float = 0.0
    anchor_term: float = 0.0


def _eval_map(f, pts: np.ndarray) -> np.ndarray:
    if hasattr(f, "batch"):
        return np.asarray(f.batch(pts), dtype=float)
    return np.asarray([as_vector(f(p)) for p in pts], dtype=float)


def _min_feasible_alpha(dim: int, max_points: int) -> float:
    per_axis = max(2.0, max_points ** (1.0 / dim))
    spacing = 2.0 / (per_axis - 1.0)
    return spacing * math.sqrt(dim) / (1.0 - GRID_SAFETY)


def build_sample_grid(f, dim: int, alpha: float,
                      max_points: int = DEFAULT_GRID_BUDGET) -> SampleGrid:
    """Sample f on an axis-aligned grid fine enough that alpha/2-balls
    centered at the samples cover the unit ball.

    Grid points outside the ball but within a cell half-diagonal of it are
    projected radially onto the sphere, which preserves the covering bound
    (metric projection onto a convex set is 1-Lipschitz).  f is evaluated
    exactly once per retained sample.
    """
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    spacing = alpha / math.sqrt(dim) * (1.0 - GRID_SAFETY)
    half_count = int(math.ceil(1.0 / spacing))
    per_axis = 2 * half_count + 1
    if per_axis ** dim > max_points:
        raise BudgetExceededError(
            f"grid for alpha={alpha} needs {per_axis ** dim} points, over the "
            f"budget of {max_points}; smallest feasible alpha is about "
            f"{_min_feasible_alpha(dim, max_points):.3g}",
            limit=max_points,
            required=per_axis ** dim,
            min_feasible_alpha=_min_feasible_alpha(dim, max_points),
        )
    axis = np.arange(-half_count, half_count + 1) * spacing
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    norms = np.linalg.norm(pts, axis=1)
    inside = pts[norms <= 1.0]
    half_diag = spacing * math.sqrt(dim) / 2.0
    shell = (norms > 1.0) & (norms <= 1.0 + half_diag)
    projected = pts[shell] / norms[shell, None]
    samples = np.concatenate([inside, projected], axis=0)
    values = _eval_map(f, samples)
    sampled = SampledMap(samples, values, covering_radius=alpha / 2.0,
                         eps=getattr(f, "eps", None))
    return SampleGrid(sampled, alpha=alpha, spacing=spacing)


def embed(y, grid: SampleGrid) -> EmbeddedPoint:
    """Tent-weight embedding of y into the nerve of the sample cover.

    Support: samples strictly within alpha/2 of y.  Weights: the tents
    alpha/2 - ||z - y||, normalized to sum one; they vanish exactly where a
    sample leaves the support, so the embedding is continuous in y.
    """
    y = as_vector(y)
    if float(np.linalg.norm(y)) > 1.0 + TOL_GEOM:
        raise DomainError("embedding is defined on the unit ball only")
    idx = np.asarray(sorted(grid.tree.query_ball_point(y, grid.alpha / 2.0)), dtype=int)
    if idx.size:
        tents = grid.alpha / 2.0 - np.linalg.norm(grid.points[idx] - y, axis=1)
        keep = tents > 0.0
        idx, tents = idx[keep], tents[keep]
    if idx.size == 0:
        raise CoveringViolationError(
            f"no sample within {grid.alpha / 2.0} of {y}; the grid does not cover the ball")
    weights = tents / tents.sum()
    return EmbeddedPoint(
        support=idx,
        combination=ConvexCombination(points=grid.points[idx], weights=weights),
    )


def simplicial_image_check(grid: SampleGrid, bound: float,
                           alpha: float | None = None) -> RipsEdgeViolation | None:
    """Verify every Rips edge of the sample set maps to a short segment.

    Checks ||f(z) - f(z')|| <= bound for all samples with ||z - z'|| <=
    alpha; edges determine all Rips simplices, so this bounds every simplex
    image diameter.  Returns None on success, else the worst violating
    edge: the signal that alpha is not yet small enough and the caller
    should retry with alpha/2.
    """
    alpha = grid.alpha if alpha is None else float(alpha)
    pairs = grid.tree.query_pairs(alpha, output_type="ndarray")
    if pairs.shape[0] == 0:
        return None
    image_d = np.linalg.norm(grid.values[pairs[:, 0]] - grid.values[pairs[:, 1]], axis=1)
    worst = int(np.argmax(image_d))
    if float(image_d[worst]) <= bound:
        return None
    i, j = int(pairs[worst, 0]), int(pairs[worst, 1])
    return RipsEdgeViolation(
        i=i,
        j=j,
        domain_distance=float(np.linalg.norm(grid.points[i] - grid.points[j])),
        image_distance=float(image_d[worst]),
    )


def averaged_map_eval(y, grid: SampleGrid) -> np.ndarray:
    """The averaged pushforward F(y): embedding weights applied to the
    sampled values.  A convex combination of ball points, hence in the
    ball; continuous wherever the embedding is."""
    emb = embed(y, grid)
    return emb.combination.weights @ grid.values[emb.support]


def averaged_map(grid: SampleGrid):
    """F as a plain callable, for the fixed-point solver."""
    return lambda y: averaged_map_eval(y, grid)


def _ball_grid_points(dim: int, per_axis: int, center: np.ndarray, span: float) -> np.ndarray:
    axis = np.linspace(-span, span, per_axis)
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    pts = center + np.stack([g.ravel() for g in grids], axis=1)
    norms = np.linalg.norm(pts, axis=1)
    outside = norms > 1.0
    pts[outside] /= norms[outside, None]
    return np.unique(pts, axis=0)


def find_fixed_point(F, dim: int, fp_tol: float = 1e-6,
                     max_evals: int = DEFAULT_EVAL_BUDGET,
                     seed: int = 0) -> FixedPointResult:
    """Locate y with ||F(y) - y|| <= fp_tol for a continuous self-map F of
    the ball.

    Strategy: damped iteration y <- y + t (F(y) - y) with residual
    backtracking on t, multistarted from a coarse ball grid, then a
    coarse-to-fine residual grid search around the best candidate with
    damped polishing at every level.  A zero-residual point exists, so
    refinement terminates; if the evaluation budget runs out first a
    NoConvergenceError carries the best point found (never a nonexistence
    claim).
    """
    if fp_tol <= 0:
        raise DomainError(f"fp_tol must be positive, got {fp_tol}")
    state = {"evals": 0, "best_y": None, "best_r": math.inf}

    def probe(y: np.ndarray) -> tuple[float, np.ndarray]:
        """One budgeted evaluation: residual norm and step direction."""
        if state["evals"] >= max_evals:
            raise NoConvergenceError(
                f"fixed-point search exhausted {max_evals} evaluations; "
                f"best residual {state['best_r']:.3g}",
                best_point=state["best_y"], best_residual=state["best_r"])
        state["evals"] += 1
        d = F(y) - y
        r = float(np.linalg.norm(d))
        if r < state["best_r"]:
            state["best_y"], state["best_r"] = y.copy(), r
        return r, d

    def damped(y: np.ndarray, max_steps: int = 120) -> None:
        t = 1.0
        for _ in range(max_steps):
            r, d = probe(y)
            if r <= fp_tol:
                return
            while t > 1e-7:
                cand = y + t * d  # convex combination: stays in the ball
                if probe(cand)[0] < r:
                    y = cand
                    t = min(1.0, 2.0 * t)
                    break
                t *= 0.5
            else:
                return  # no damping level makes progress from here

    rng = np.random.default_rng(seed)
    starts = [np.zeros(dim)]
    starts += list(0.5 * np.eye(dim)) + list(-0.5 * np.eye(dim))
    gauss = rng.standard_normal((6, dim))
    gauss /= np.linalg.norm(gauss, axis=1, keepdims=True)
    starts += list(gauss * rng.random((6, 1)) ** (1.0 / dim))

    for y0 in starts:
        damped(np.asarray(y0, dtype=float))
        if state["best_r"] <= fp_tol:
            return FixedPointResult(state["best_y"], state["best_r"], state["evals"])

    # Coarse global pass, then shrink around the running best.
    per_axis = 9 if dim <= 2 else 7
    for pt in _ball_grid_points(dim, per_axis, np.zeros(dim), 1.0):
        probe(pt)
    span = 2.0 / (per_axis - 1)
    while state["best_r"] > fp_tol and span > 1e-13:
        for pt in _ball_grid_points(dim, per_axis, state["best_y"], span):
            probe(pt)
        damped(state["best_y"])
        span *= 0.4
    if state["best_r"] > fp_tol:
        raise NoConvergenceError(
            f"fixed-point refinement stalled at residual {state['best_r']:.3g}",
            best_point=state["best_y"], best_residual=state["best_r"])
    return FixedPointResult(state["best_y"], state["best_r"], state["evals"])


def extract_certificate(fp: FixedPointResult, grid: SampleGrid,
                        params: PipelineParams) -> EpsFixedPointCertificate:
    """Turn a fixed point of the averaged map into a certified sample.

    Over the embedding support of y, picks the sample whose value is
    nearest to F(y); Jung's theorem bounds that distance by
    (eps+gamma)/R because the support image has diameter at most
    eps+gamma.  With ||F(y) - y|| <= fp_tol and the sample within alpha/2
    of y, the triangle inequality certifies the displacement.
    """
    if fp.residual > params.fp_tol:
        raise DomainError(
            f"residual {fp.residual} exceeds fp_tol={params.fp_tol}; not a usable fixed point")
    emb = embed(fp.y, grid)
    support_values = grid.values[emb.support]
    f_of_y = emb.combination.weights @ support_values
    dists = np.linalg.norm(support_values - f_of_y, axis=1)
    j = int(np.argmin(dists))
    jung_term = float(dists[j])
    if jung_term > params.jung_term_bound + TOL_GEOM:
        raise CertificateError(
            f"nearest support image at {jung_term}, above the Jung bound "
            f"{params.jung_term_bound}; rerun simplicial_image_check")
    i = int(emb.support[j])
    z = grid.points[i]
    fz = grid.values[i]
    anchor_term = float(np.linalg.norm(z - fp.y))
    displacement = float(np.linalg.norm(fz - z))
    if displacement > params.certificate_bound + TOL_GEOM:
        raise CertificateError(
            f"certified displacement {displacement} exceeds the chain bound "
            f"{params.certificate_bound}")
    return EpsFixedPointCertificate(
        z=z,
        fz=fz,
        displacement=displacement,
        bound=params.eps_prime,
        trace=CertificateTrace(y=fp.y, residual=fp.residual, support_index=i),
        jung_term=jung_term,
        anchor_term=anchor_term,
    )


@dataclass(frozen=True)
class PipelineRun:
    """Everything one pipeline invocation produced, for reporting and for
    independent re-verification of the certificate."""

    params: PipelineParams
    grid: SampleGrid
    fixed_point: FixedPointResult
    certificate: EpsFixedPointCertificate
    displacement_recheck: float


def run_pipeline(f, dim: int, eps: float, eps_prime: float,
                 fp_tol: float = 1e-6,
                 grid_budget: int = DEFAULT_GRID_BUDGET,
                 eval_budget: int = DEFAULT_EVAL_BUDGET,
                 seed: int = 0) -> PipelineRun:
    """End-to-end certificate search for a map of discontinuity scale eps.

    Requires eps_prime > eps / jung_radius(dim) (below that bound extremal
    maps admit no certificate).  Picks gamma as half the available slack,
    then halves alpha from eps until both the image-diameter check passes
    and the certificate chain arithmetic closes; the returned certificate's
    displacement is re-evaluated directly on f, not trusted from grid
    internals.
    """
    radius = jung_radius(dim)
    if not (0.0 < eps <= 2.0):
        raise DomainError(f"eps must lie in (0, 2], got {eps}")
    if eps_prime <= eps / radius:
        raise HypothesisError(
            f"eps_prime={eps_prime} must exceed eps/jung_radius(dim)={eps / radius}")
    gamma = (radius * eps_prime - eps) / 2.0
    arithmetic_room = gamma / radius - fp_tol  # required: alpha/2 < this
    if arithmetic_room <= 0:
        raise DomainError(
            f"fp_tol={fp_tol} leaves no alpha satisfying the certificate chain; "
            f"reduce it below {gamma / radius}")
    alpha = float(eps)
    while alpha / 2.0 >= arithmetic_room:
        alpha /= 2.0
    while True:
        params = PipelineParams(dim=dim, eps=eps, eps_prime=eps_prime,
                                gamma=gamma, alpha=alpha, fp_tol=fp_tol)
        grid = build_sample_grid(f, dim, alpha, max_points=grid_budget)
        if simplicial_image_check(grid, eps + gamma) is not None:
            alpha /= 2.0  # not yet "sufficiently small"
            continue
        fixed_point = find_fixed_point(averaged_map(grid), dim, fp_tol=fp_tol,
                                       max_evals=eval_budget, seed=seed)
        certificate = extract_certificate(fixed_point, grid, params)
        recheck = float(np.linalg.norm(
            as_vector(f(certificate.z)) - certificate.z))
        return PipelineRun(params=params, grid=grid, fixed_point=fixed_point,
                           certificate=certificate, displacement_recheck=recheck)
