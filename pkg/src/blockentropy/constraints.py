"""Block-convex constraint sets: a marginal polytope plus per-block sets.

The marginal polytope is kept in vertex form only.  Membership in a convex
hull is decided by a non-negative least-squares fit of convex weights, with
the sum-to-one condition added as a heavily weighted extra row.

All sampling takes an explicit integer seed.  Generators are Philox streams
keyed by ``(seed, *counter)`` so that sample ``k`` of a run does not depend
on how many samples were drawn before it.
"""
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.optimize import nnls
from scipy.stats import unitary_group

from .blocks import BlockDecomposition, BlockState
from .core import (
    _trace_norm,
    as_density_matrix,
    as_probability,
)
from .errors import DecompositionMismatch, DimensionMismatch

TOL_MEMB = 1e-7
_SUM_ROW_WEIGHT = 1e3


def make_rng(seed, *counter):
    """Counter-based generator for stream ``(seed, *counter)``."""
    if int(seed) < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    ss = np.random.SeedSequence([int(seed), *(int(c) for c in counter)])
    return np.random.Generator(np.random.Philox(ss))


def convex_fit_residual(points, target):
    """Distance from ``target`` to the convex hull of the rows of ``points``.

    Returns ``(residual, weights)``.  The residual is the Euclidean norm of
    the augmented system, so it also penalises weights not summing to one.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    target = np.asarray(target, dtype=float).ravel()
    a = np.vstack([points.T, _SUM_ROW_WEIGHT * np.ones(points.shape[0])])
    b = np.append(target, _SUM_ROW_WEIGHT)
    w, res = nnls(a, b)
    return float(res), w


def _real_vec(m):
    m = np.asarray(m)
    return np.concatenate([m.real.ravel(), m.imag.ravel()])


class MarginalPolytope:
    """Convex hull of finitely many probability vectors of length ``r``.

    Redundant vertices (duplicates, or points inside the hull of the rest)
    are dropped at construction, so ``vertices`` is always irredundant.
    """

    def __init__(self, vertices):
        verts = [as_probability(v) for v in vertices]
        if not verts:
            raise ValueError("polytope needs at least one vertex")
        r = verts[0].size
        if any(v.size != r for v in verts):
            raise DimensionMismatch("vertices have different lengths")
        kept = list(verts)
        i = 0
        while i < len(kept):
            others = kept[:i] + kept[i + 1:]
            if others and convex_fit_residual(np.array(others), kept[i])[0] <= TOL_MEMB:
                del kept[i]
            else:
                i += 1
        self.vertices = np.array(kept)
        self.r = r

    @classmethod
    def simplex(cls, r):
        return cls(np.eye(r))

    @classmethod
    def singleton(cls, q):
        return cls([q])

    @property
    def is_singleton(self):
        return len(self.vertices) == 1

    def __eq__(self, other):
        if not isinstance(other, MarginalPolytope) or other.r != self.r:
            return NotImplemented
        if len(other.vertices) != len(self.vertices):
            return False
        return all(
            np.min(np.abs(other.vertices - v).sum(axis=1)) <= TOL_MEMB
            for v in self.vertices
        )

    def __repr__(self):
        return f"MarginalPolytope(r={self.r}, n_vertices={len(self.vertices)})"


@dataclass(frozen=True)
class Full:
    """All states on the block."""

    kind = "full"


@dataclass(frozen=True, eq=False)
class Singleton:
    state: np.ndarray
    kind = "fixed"

    def __post_init__(self):
        object.__setattr__(self, "state", as_density_matrix(self.state))

    @property
    def dim(self):
        return self.state.shape[0]


@dataclass(frozen=True, eq=False)
class Hull:
    generators: tuple
    kind = "hull"

    def __post_init__(self):
        gens = tuple(as_density_matrix(g) for g in self.generators)
        if not gens:
            raise ValueError("hull needs at least one generator")
        if any(g.shape != gens[0].shape for g in gens):
            raise DimensionMismatch("hull generators have different dimensions")
        object.__setattr__(self, "generators", gens)

    @property
    def dim(self):
        return self.generators[0].shape[0]


ConditionalSet = Union[Full, Singleton, Hull]


class BlockConvexSet:
    """States ``(+)_i p_i rho_i`` with ``p`` in the polytope and ``rho_i`` in set ``i``."""

    def __init__(self, decomposition: BlockDecomposition, marginal: MarginalPolytope,
                 conditionals: Sequence[ConditionalSet]):
        if marginal.r != decomposition.r:
            raise DimensionMismatch(
                f"marginal has length {marginal.r}, decomposition has {decomposition.r} blocks"
            )
        conditionals = tuple(conditionals)
        if len(conditionals) != decomposition.r:
            raise DimensionMismatch(
                f"{len(conditionals)} conditional sets for {decomposition.r} blocks"
            )
        for i, (c, d) in enumerate(zip(conditionals, decomposition.block_dims)):
            if not isinstance(c, Full) and c.dim != d:
                raise DimensionMismatch(f"conditional set {i} has dim {c.dim}, block has {d}")
        self.decomposition = decomposition
        self.marginal = marginal
        self.conditionals = conditionals

    @property
    def r(self):
        return self.decomposition.r


def extreme_marginals(pi: MarginalPolytope):
    return [v.copy() for v in pi.vertices]


def contains(pi: MarginalPolytope, p) -> bool:
    p = np.asarray(p, dtype=float)
    if p.shape != (pi.r,):
        raise DimensionMismatch(f"point of shape {p.shape} for polytope in dimension {pi.r}")
    return convex_fit_residual(pi.vertices, p)[0] <= TOL_MEMB


def _dirichlet_mix(rng, k):
    if k == 1:
        return np.ones(1)
    return rng.dirichlet(np.ones(k))


def _sample_marginal(pi, rng):
    if pi.is_singleton:
        return pi.vertices[0].copy()
    p = _dirichlet_mix(rng, len(pi.vertices)) @ pi.vertices
    return np.clip(p, 0.0, None) / p.sum()


def sample_marginal(pi: MarginalPolytope, seed: int) -> np.ndarray:
    """Flat-Dirichlet mixture of the vertices.

    This covers the polytope but is not uniform on it.
    """
    return _sample_marginal(pi, make_rng(seed))


def random_state(dim, rng):
    """``G G* / Tr(G G*)`` for a square complex Gaussian ``G``."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_spectral_state(dim, rng):
    """Haar-rotated state with a flat-Dirichlet spectrum on a random support size.

    Wishart states concentrate near a typical spectrum as ``dim`` grows;
    this sampler spreads over spectra, including low-rank and nearly flat
    ones, which is what extremal-ratio searches need.
    """
    k = int(rng.integers(1, dim + 1))
    e = rng.standard_exponential(k)
    lam = np.zeros(dim)
    lam[:k] = e / e.sum()
    if dim == 1:
        return np.ones((1, 1), dtype=complex)
    u = unitary_group.rvs(dim, random_state=rng)
    return (u * lam) @ u.conj().T


_FULL_SAMPLERS = {"wishart": random_state, "spectral": random_spectral_state}


def _sample_conditional(c, dim, rng, method="wishart"):
    if isinstance(c, Full):
        return _FULL_SAMPLERS[method](dim, rng)
    if isinstance(c, Singleton):
        return c.state
    w = _dirichlet_mix(rng, len(c.generators))
    return np.tensordot(w, np.array(c.generators), axes=1)


def sample_conditional(c: ConditionalSet, dim: int, seed: int, method="wishart") -> np.ndarray:
    """Random state in ``c``.

    ``Full`` sets use ``method``: ``"wishart"`` (``G G*/Tr``) or
    ``"spectral"`` (see :func:`random_spectral_state`).  Hulls use a
    flat-Dirichlet mixture of the generators.
    """
    return _sample_conditional(c, dim, make_rng(seed), method)


def _sample_member(c, rng, method="wishart"):
    p = _sample_marginal(c.marginal, rng)
    conds = []
    for pi_, cs, d in zip(p, c.conditionals, c.decomposition.block_dims):
        rho = _sample_conditional(cs, d, rng, method)
        conds.append(rho if pi_ > 0 else None)
    return BlockState._trusted(c.decomposition, p, conds)


def sample_member(c: BlockConvexSet, seed: int, *counter, method="wishart") -> BlockState:
    """Random member of ``c``; stream ``(seed, *counter)`` fixes the draw."""
    return _sample_member(c, make_rng(seed, *counter), method)


def conditional_contains(c: ConditionalSet, rho) -> bool:
    if isinstance(c, Full):
        return True
    if isinstance(c, Singleton):
        return _trace_norm(rho - c.state) <= TOL_MEMB
    gens = np.array([_real_vec(g) for g in c.generators])
    return convex_fit_residual(gens, _real_vec(rho))[0] <= TOL_MEMB


def member_check(c: BlockConvexSet, bs: BlockState) -> bool:
    if bs.decomposition != c.decomposition:
        raise DecompositionMismatch(
            f"{bs.decomposition.block_dims} vs {c.decomposition.block_dims}"
        )
    if not contains(c.marginal, bs.weights):
        return False
    return all(
        rho is None or conditional_contains(cs, rho)
        for cs, rho in zip(c.conditionals, bs.conditionals)
    )
