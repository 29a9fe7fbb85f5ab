"""Exact entropy minimisation over a block-convex set and distance to the minimisers.

Entropy of a block state splits as ``H(p) + sum_i p_i S(rho_i)``.  For a
fixed marginal the block terms are minimised independently, and the
remaining function of ``p`` is concave, so its minimum over the polytope
sits at a vertex.  Minimisation therefore reduces to a finite search.
"""
from dataclasses import dataclass, field

import numpy as np

from .blocks import BlockState
from .constraints import (
    BlockConvexSet,
    ConditionalSet,
    Full,
    Singleton,
    extreme_marginals,
    member_check,
)
from .core import _entropy_of_spectrum, _trace_norm, _vn_entropy, as_density_matrix
from .errors import InvalidState, NotAMember

TOL_TIE = 1e-9

ANY_PURE = "any pure state"


@dataclass(frozen=True, eq=False)
class MinimizerDescription:
    """The minimiser set, parametrised by vertex marginals and block witnesses.

    ``block_candidates[i]`` lists every minimal-entropy state of block set
    ``i`` that the distance search may pick from; it is empty for ``Full``
    sets, whose minimisers are all pure states.
    """

    s_min: float
    minimizing_marginals: list
    per_block_min_entropy: list
    per_block_witnesses: list
    block_candidates: list = field(repr=False, default_factory=list)

    def marginal_objective(self, p):
        """``H(p) + sum_i p_i m_i`` where ``m_i`` are the block minima."""
        return _entropy_of_spectrum(p) + float(np.dot(p, self.per_block_min_entropy))


def _block_minimizers(c: ConditionalSet):
    if isinstance(c, Full):
        return 0.0, ANY_PURE, []
    if isinstance(c, Singleton):
        return _vn_entropy(c.state), c.state, [c.state]
    ent = np.array([_vn_entropy(g) for g in c.generators])
    best = float(ent.min())
    ties = [g for g, e in zip(c.generators, ent) if e <= best + TOL_TIE]
    return best, c.generators[int(np.argmin(ent))], ties


def conditional_min_entropy(c: ConditionalSet, dim: int):
    """Minimum entropy over one block's set and a state attaining it.

    For a hull the minimum of the concave entropy is taken at a generator.
    ``Full`` sets return ``(0.0, ANY_PURE)``.
    """
    value, witness, _ = _block_minimizers(c)
    return value, witness


def minimize_entropy(c: BlockConvexSet) -> MinimizerDescription:
    mins, witnesses, candidates = [], [], []
    for cs in c.conditionals:
        value, witness, ties = _block_minimizers(cs)
        mins.append(value)
        witnesses.append((cs.kind, witness))
        candidates.append(ties)
    mins_arr = np.array(mins)
    verts = extreme_marginals(c.marginal)
    values = np.array([_entropy_of_spectrum(q) + float(q @ mins_arr) for q in verts])
    s_min = float(values.min())
    minimizing = [q for q, v in zip(verts, values) if v <= s_min + TOL_TIE]
    return MinimizerDescription(s_min, minimizing, mins, witnesses, candidates)


def top_eigenprojector(rho):
    w, v = np.linalg.eigh(rho)
    top = v[:, -1]
    return np.outer(top, top.conj())


def nearest_pure_block(rho_i, p_i, q_i):
    """Closest ``q_i * |psi><psi|`` to ``p_i * rho_i`` in trace norm.

    The projector onto a top eigenvector of ``rho_i`` is optimal: for
    Hermitian ``A, B`` the trace norm of ``A - B`` is at least the l1
    distance of their sorted spectra, and the aligned projector attains it.

    Returns
    -------
    tuple
        ``(projector, distance)``.
    """
    rho_i = as_density_matrix(rho_i)
    if not (0.0 <= p_i <= 1.0 and 0.0 <= q_i <= 1.0):
        raise InvalidState(f"weights must lie in [0, 1], got {p_i}, {q_i}")
    proj = top_eigenprojector(rho_i)
    return proj, _trace_norm(p_i * rho_i - q_i * proj)


def _nearest_for_marginal(c, bs, md, q):
    conds, total = [], 0.0
    for i, cs in enumerate(c.conditionals):
        p_i, rho_i, q_i = bs.weights[i], bs.conditionals[i], q[i]
        if q_i == 0.0:
            conds.append(None)
            total += p_i
            continue
        if isinstance(cs, Full):
            d = c.decomposition.block_dims[i]
            if rho_i is None:
                proj = np.zeros((d, d), dtype=complex)
                proj[0, 0] = 1.0
            else:
                proj = top_eigenprojector(rho_i)
            conds.append(proj)
            total += q_i if rho_i is None else _trace_norm(p_i * rho_i - q_i * proj)
            continue
        # Singleton or Hull: pick the closest of the tied minimal-entropy states
        cands = md.block_candidates[i]
        if rho_i is None:
            dists = [q_i] * len(cands)
        else:
            dists = [_trace_norm(p_i * rho_i - q_i * s) for s in cands]
        k = int(np.argmin(dists))
        conds.append(cands[k])
        total += dists[k]
    return total, BlockState._trusted(c.decomposition, q, conds)


def distance_to_minimizers(c: BlockConvexSet, bs: BlockState, md: MinimizerDescription,
                           check=True):
    """Trace distance from ``bs`` to the minimiser set and the closest minimiser.

    Parameters
    ----------
    check : bool
        Verify that ``bs`` is a member of ``c`` first.  Callers that built
        ``bs`` from members of ``c`` may skip this.

    Raises
    ------
    NotAMember
        If ``check`` is set and ``bs`` is not in ``c``.
    """
    if check and not member_check(c, bs):
        raise NotAMember("state is not a member of the constraint set")
    best = None
    for q in md.minimizing_marginals:
        dist, sigma = _nearest_for_marginal(c, bs, md, q)
        if best is None or dist < best[0]:
            best = (dist, sigma)
    return best
