"""Stability constants, Monte-Carlo verification, sharpness families, Gibbs sets.

The verified inequality is ``S(rho) - S_min >= C * dist_1(rho, M)^2`` over
a block-convex set, with ``C = min(c1, 1/2) / 2``.  ``c1`` is the marginal
rigidity constant, estimated here as a sampled infimum against the whole set
of minimising marginals.
"""
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .blocks import BlockDecomposition, BlockState, blockstate_spectrum, entropy_of_blockstate
from .constraints import (
    BlockConvexSet,
    Full,
    MarginalPolytope,
    _sample_member,
    contains,
    make_rng,
)
from .core import _entropy_of_spectrum, as_hermitian, as_probability
from .errors import InfeasibleDirection, InvalidDistribution
from .majorization import majorizes
from .minimizer import MinimizerDescription, distance_to_minimizers, minimize_entropy

NOT_APPLICABLE = "not-applicable"
TOL_VIOL = 1e-9
TOL_DIST = 1e-8
# stress samples mix a minimiser with a member at weight 10**U(lo, hi)
STRESS_LOG10_RANGE = (-6.0, -1.0)
MIN_FIT_POINTS = 3
MIN_FIT_DECADES = 2.0


@dataclass
class StabilityReport:
    s_min: float
    c1_estimate: object
    assembled_C: float
    samples: int
    min_ratio: Optional[float]
    violations: int
    empirical_best_C: Optional[float]
    seed: int
    stress_samples: int = 0
    max_distance: float = 0.0
    # uniform Gibbs sets only: the 1/(2r) constant and its sqrt-form companion
    explicit_C: Optional[float] = None
    explicit_violations: Optional[int] = None
    sqrt_bound_violations: Optional[int] = None
    # counts of samples whose nearest minimiser fails to majorize them, and vice versa
    majorization: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


@dataclass
class SharpnessReport:
    epsilons: list
    gaps: list
    distances: list
    fitted_exponent: Optional[float]
    directional_derivative: float
    derivative_divergent: bool
    quadratic_family_found: bool = False
    # quantum lift only: worst deviation from the classical gap / distance
    gap_identity_error: Optional[float] = None
    distance_identity_error: Optional[float] = None

    def to_dict(self):
        return asdict(self)


def _dirichlet_rows(rng, n, k):
    e = rng.standard_exponential((n, k))
    return e / e.sum(axis=1, keepdims=True)


def _dist_to_set(points, targets):
    # l1 distance from each row of points to the nearest row of targets
    d = np.abs(points[:, None, :] - targets[None, :, :]).sum(axis=2)
    return d.min(axis=1)


def _entropy_rows(p):
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(p > 0, p * np.log(np.where(p > 0, p, 1.0)), 0.0)
    return -t.sum(axis=1)


def c1_sample_points(pi: MarginalPolytope, n_samples, seed):
    """Points of ``pi`` used for the ``c1`` infimum.

    Half are flat-Dirichlet mixtures of all vertices, half lie on segments
    between two random vertices (where the infimum often sits).  One stream
    is used, so a longer run extends a shorter one with the same seed.
    """
    rng = make_rng(seed, 1)
    verts = pi.vertices
    k = len(verts)
    w = _dirichlet_rows(rng, n_samples, k)
    pairs = rng.integers(0, k, size=(n_samples, 2))
    t = rng.random(n_samples)
    edge = np.zeros((n_samples, k))
    rows = np.arange(n_samples)
    edge[rows, pairs[:, 0]] += t
    edge[rows, pairs[:, 1]] += 1.0 - t
    use_edge = (rows % 2) == 1
    w[use_edge] = edge[use_edge]
    return w @ verts


def estimate_c1(pi: MarginalPolytope, minimizing_marginals, n_samples, seed,
                block_min_entropy=None):
    """Sampled marginal rigidity constant.

    ``c1 = inf (f(p) - f_min) / dist_1(p, Q*)^2`` over sampled ``p``, with
    ``f(p) = H(p) + sum_i p_i m_i`` and ``m_i`` the per-block minimum
    entropies (zero unless given).  Returns ``NOT_APPLICABLE`` for a
    singleton polytope.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    if pi.is_singleton:
        return NOT_APPLICABLE
    m = np.zeros(pi.r) if block_min_entropy is None else np.asarray(block_min_entropy, float)
    qs = np.array(minimizing_marginals, dtype=float)
    f_min = min(_entropy_of_spectrum(q) + float(q @ m) for q in qs)
    pts = c1_sample_points(pi, n_samples, seed)
    dist = _dist_to_set(pts, qs)
    keep = dist >= TOL_DIST
    if not np.any(keep):
        return float("inf")
    gap = _entropy_rows(pts[keep]) + pts[keep] @ m - f_min
    return max(float(np.min(gap / dist[keep] ** 2)), 0.0)


def assemble_constant(c1):
    if isinstance(c1, str):
        if c1 != NOT_APPLICABLE:
            raise ValueError(f"unknown c1 marker {c1!r}")
        return 0.25
    if c1 < 0:
        raise ValueError(f"c1 must be non-negative, got {c1}")
    return 0.5 * min(c1, 0.5)


def _random_pure(dim, rng):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def _random_minimizer(c, md, rng):
    q = md.minimizing_marginals[rng.integers(len(md.minimizing_marginals))]
    conds = []
    for i, cs in enumerate(c.conditionals):
        if q[i] == 0.0:
            conds.append(None)
        elif isinstance(cs, Full):
            conds.append(_random_pure(c.decomposition.block_dims[i], rng))
        else:
            cands = md.block_candidates[i]
            conds.append(cands[rng.integers(len(cands))])
    return BlockState._trusted(c.decomposition, q, conds)


def mix(a: BlockState, b: BlockState, u) -> BlockState:
    """Block state of ``(1-u) a + u b``; stays in a block-convex set with both."""
    p = (1.0 - u) * a.weights + u * b.weights
    conds = []
    for i in range(a.r):
        if p[i] == 0.0:
            conds.append(None)
        else:
            blk = (1.0 - u) * a.block(i) + u * b.block(i)
            conds.append(blk / p[i])
    return BlockState._trusted(a.decomposition, p, conds)


def stability_sample(c, md, seed, k):
    """Sample ``k`` of a verification run.

    Odd ``k`` are stress samples.  Members for ``Full`` blocks alternate
    between Wishart draws (``k % 4 in (0, 1)``) and spectral draws.
    """
    rng = make_rng(seed, 0, k)
    member = _sample_member(c, rng, "wishart" if k % 4 < 2 else "spectral")
    if k % 2 == 0:
        return member, False
    sigma = _random_minimizer(c, md, rng)
    u = 10.0 ** rng.uniform(*STRESS_LOG10_RANGE)
    return mix(sigma, member, u), True


def _run_samples(c, md, n_samples, seed):
    gaps = np.empty(n_samples)
    dists = np.empty(n_samples)
    stress = 0
    maj = {"sigma_fails_to_majorize_rho": 0, "rho_majorizes_sigma": 0}
    for k in range(n_samples):
        bs, is_stress = stability_sample(c, md, seed, k)
        stress += is_stress
        gaps[k] = entropy_of_blockstate(bs) - md.s_min
        dists[k], sigma = distance_to_minimizers(c, bs, md, check=False)
        ls, lr = blockstate_spectrum(sigma), blockstate_spectrum(bs)
        maj["sigma_fails_to_majorize_rho"] += not majorizes(ls, lr)
        maj["rho_majorizes_sigma"] += majorizes(lr, ls) and not majorizes(ls, lr)
    return gaps, dists, stress, maj


def _ratio_stats(gaps, dists, const):
    keep = dists >= TOL_DIST
    min_ratio = float(np.min(gaps[keep] / dists[keep] ** 2)) if np.any(keep) else None
    violations = int(np.sum(gaps < const * dists**2 - TOL_VIOL))
    return min_ratio, violations


def verify_stability(c: BlockConvexSet, n_samples, seed, c1_samples=10_000,
                     md: Optional[MinimizerDescription] = None) -> StabilityReport:
    """Monte-Carlo check of the quadratic stability inequality on ``c``.

    Every sample is drawn from its own stream ``(seed, 0, k)``; odd ``k``
    are perturbations of a random minimiser at log-uniform weight in
    ``[1e-6, 1e-1]``.
    """
    return _verify(c, n_samples, seed, c1_samples, md)[0]


def _verify(c, n_samples, seed, c1_samples=10_000, md=None):
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    md = md or minimize_entropy(c)
    c1 = estimate_c1(c.marginal, md.minimizing_marginals, c1_samples, seed,
                     md.per_block_min_entropy)
    const = assemble_constant(c1)
    gaps, dists, stress, maj = _run_samples(c, md, n_samples, seed)
    min_ratio, violations = _ratio_stats(gaps, dists, const)
    report = StabilityReport(
        s_min=md.s_min,
        c1_estimate=c1,
        assembled_C=const,
        samples=n_samples,
        min_ratio=min_ratio,
        violations=violations,
        empirical_best_C=min_ratio,
        seed=seed,
        stress_samples=stress,
        max_distance=float(dists.max()),
        majorization=maj,
    )
    return report, gaps, dists


def directional_derivative(q, v):
    """``d/dt H(q + t v)`` at ``t = 0``, which is ``-sum v_i log q_i`` when ``sum v = 0``.

    Returns ``(value, divergent)``; the derivative is ``+inf`` when some
    ``q_i = 0`` has ``v_i > 0``.
    """
    q = np.asarray(q, float)
    v = np.asarray(v, float)
    zero = q == 0.0
    if np.any(v[zero] > 0):
        return float("inf"), True
    return float(-np.sum(v[~zero] * np.log(q[~zero]))), False


def fit_exponent(distances, gaps):
    """Least-squares slope of ``log gap`` against ``log distance``.

    Points with non-positive gap or distance are dropped.  Returns ``None``
    unless at least three points spanning two decades of distance remain.
    """
    d = np.asarray(distances, float)
    g = np.asarray(gaps, float)
    ok = (d > 0) & (g > 0)
    d, g = d[ok], g[ok]
    if d.size < MIN_FIT_POINTS or np.log10(d.max() / d.min()) < MIN_FIT_DECADES - 1e-9:
        return None
    slope, _ = np.polyfit(np.log(d), np.log(g), 1)
    return float(slope)


def _check_ladder(epsilons):
    eps = [float(e) for e in epsilons]
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("epsilons must be strictly decreasing")
    if any(e < 0 for e in eps):
        raise ValueError("epsilons must be non-negative")
    return eps


def _family_points(pi, q, v, eps):
    q = as_probability(q)
    v = np.asarray(v, float)
    if v.shape != q.shape:
        raise InfeasibleDirection(f"direction has shape {v.shape}, expected {q.shape}")
    if abs(v.sum()) > 1e-12:
        raise InfeasibleDirection(f"direction components sum to {v.sum()}, expected 0")
    pts = []
    for e in eps:
        p = q + e * v
        if np.min(p) < -1e-12 or not contains(pi, np.clip(p, 0.0, None)):
            raise InfeasibleDirection(f"q + {e} v leaves the polytope")
        pts.append(np.clip(p, 0.0, None))
    return q, v, pts


def sharpness_family(pi: MarginalPolytope, q, v, epsilons, minimizing_marginals=None):
    """Entropy gaps and distances along ``p_eps = q + eps v`` inside ``pi``.

    Gaps are measured against the entropy of the minimising vertices
    ``Q*`` (computed from ``pi`` unless given), distances are
    ``dist_1(p_eps, Q*)``.
    """
    eps = _check_ladder(epsilons)
    q, v, pts = _family_points(pi, q, v, eps)
    if minimizing_marginals is None:
        ent = np.array([_entropy_of_spectrum(w) for w in pi.vertices])
        minimizing_marginals = pi.vertices[ent <= ent.min() + 1e-9]
    qs = np.array(minimizing_marginals, float)
    h_min = min(_entropy_of_spectrum(w) for w in qs)
    pts = np.array(pts)
    gaps = [_entropy_of_spectrum(p) - h_min for p in pts]
    dists = _dist_to_set(pts, qs).tolist()
    deriv, divergent = directional_derivative(q, v)
    expo = fit_exponent(dists, gaps)
    return SharpnessReport(
        epsilons=eps,
        gaps=gaps,
        distances=dists,
        fitted_exponent=expo,
        directional_derivative=deriv,
        derivative_divergent=divergent,
        quadratic_family_found=expo is not None and abs(expo - 2.0) <= 0.1,
    )


def quantum_sharpness_family(c: BlockConvexSet, md: MinimizerDescription, q, v, epsilons):
    """Lift of the classical family: ``rho_eps = (+)_i p_eps(i) sigma_i`` with fixed pure ``sigma_i``.

    Requires every conditional set to be ``Full``.  The report carries the
    largest deviation of the quantum gaps and distances from the classical
    ones, which should vanish.
    """
    if not all(isinstance(cs, Full) for cs in c.conditionals):
        raise ValueError("quantum sharpness family needs Full conditional sets")
    classical = sharpness_family(c.marginal, q, v, epsilons, md.minimizing_marginals)
    _, _, pts = _family_points(c.marginal, q, v, classical.epsilons)
    pure = []
    for d in c.decomposition.block_dims:
        e0 = np.zeros((d, d), dtype=complex)
        e0[0, 0] = 1.0
        pure.append(e0)
    gaps, dists = [], []
    for p in pts:
        conds = [s if w > 0 else None for w, s in zip(p, pure)]
        rho = BlockState._trusted(c.decomposition, p, conds)
        gaps.append(entropy_of_blockstate(rho) - md.s_min)
        dists.append(distance_to_minimizers(c, rho, md, check=False)[0])
    return SharpnessReport(
        epsilons=classical.epsilons,
        gaps=gaps,
        distances=dists,
        fitted_exponent=fit_exponent(dists, gaps),
        directional_derivative=classical.directional_derivative,
        derivative_divergent=classical.derivative_divergent,
        quadratic_family_found=classical.quadratic_family_found,
        gap_identity_error=float(np.max(np.abs(np.subtract(gaps, classical.gaps)))),
        distance_identity_error=float(np.max(np.abs(np.subtract(dists, classical.distances)))),
    )


def gibbs_from_observable(h0, cluster_tol):
    """Block structure of the spectral projections of ``h0``.

    Eigenvalues are scanned in increasing order; a gap larger than
    ``cluster_tol`` starts a new block.  The returned decomposition carries
    the eigenvector basis (columns in increasing energy) in ``basis``.
    """
    h0 = as_hermitian(h0)
    w, v = np.linalg.eigh(h0)
    dims = [1]
    for a, b in zip(w, w[1:]):
        if b - a > cluster_tol:
            dims.append(1)
        else:
            dims[-1] += 1
    return BlockDecomposition(tuple(dims), basis=v)


def gibbs_constraint_set(decomp: BlockDecomposition, q) -> BlockConvexSet:
    """Fixed sector populations ``q``, arbitrary states inside each sector."""
    q = as_probability(q)
    if np.min(q) <= 0.0:
        raise InvalidDistribution("sector populations must be strictly positive")
    return BlockConvexSet(decomp, MarginalPolytope.singleton(q), [Full()] * decomp.r)


def is_uniform(q, tol=1e-12):
    q = np.asarray(q, float)
    return bool(np.max(np.abs(q - 1.0 / q.size)) <= tol)


def gibbs_verify(decomp: BlockDecomposition, q, n_samples, seed) -> StabilityReport:
    """Stability check on a fixed-population Gibbs set.

    For uniform ``q`` the report also counts violations of the explicit
    ``1/(2r)`` constant and of ``dist <= sqrt(2 r gap)``.
    """
    c = gibbs_constraint_set(decomp, q)
    report, gaps, dists = _verify(c, n_samples, seed)
    if is_uniform(c.marginal.vertices[0]):
        r = decomp.r
        explicit = 1.0 / (2 * r)
        report.explicit_C = explicit
        report.explicit_violations = _ratio_stats(gaps, dists, explicit)[1]
        root = np.sqrt(2 * r * np.clip(gaps, 0.0, None))
        report.sqrt_bound_violations = int(np.sum(dists > root + 1e-6))
    return report
