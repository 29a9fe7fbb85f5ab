"""Block-diagonal states over an ordered orthogonal decomposition.

Blocks are contiguous index ranges in a fixed basis.  A block state is held
as its marginal weights plus one normalised conditional state per block; a
block with zero weight carries ``None`` instead of a conditional.
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import block_diag

from .core import (
    _entropy_of_spectrum,
    _trace_norm,
    _vn_entropy,
    as_density_matrix,
    as_probability,
)
from .errors import (
    DecompositionMismatch,
    DimensionMismatch,
    InvalidBlockState,
    InvalidDistribution,
    InvalidState,
    NotBlockDiagonal,
)

TOL_OFFBLOCK = 1e-9
# below this a block trace counts as zero weight when decomposing
TOL_ZERO_WEIGHT = 1e-12


@dataclass(frozen=True)
class BlockDecomposition:
    """Ordered block dimensions ``d_1..d_r``.

    ``basis`` optionally records the unitary whose columns span the blocks
    (set when the decomposition comes from an observable); it is metadata
    and does not take part in equality.
    """

    block_dims: tuple
    basis: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.block_dims)
        if len(dims) == 0 or any(d < 1 for d in dims):
            raise ValueError(f"block dimensions must be positive, got {self.block_dims}")
        object.__setattr__(self, "block_dims", dims)

    @property
    def r(self):
        return len(self.block_dims)

    @property
    def total_dim(self):
        return sum(self.block_dims)

    @property
    def slices(self):
        ends = np.cumsum(self.block_dims)
        return [slice(int(e - d), int(e)) for d, e in zip(self.block_dims, ends)]


def _clean_state(block):
    """Hermitise and clip round-off negativity of an unnormalised block."""
    block = 0.5 * (block + block.conj().T)
    w, v = np.linalg.eigh(block)
    if w[0] < 0:
        w = np.clip(w, 0.0, None)
        block = (v * w) @ v.conj().T
    return block / np.trace(block).real


@dataclass(frozen=True, eq=False)
class BlockState:
    """``rho = (+)_i weights[i] * conditionals[i]``."""

    decomposition: BlockDecomposition
    weights: np.ndarray
    conditionals: tuple

    def __post_init__(self):
        d = self.decomposition
        try:
            w = as_probability(self.weights)
        except InvalidDistribution as exc:
            raise InvalidBlockState(f"weights: {exc}") from None
        if w.size != d.r:
            raise InvalidBlockState(f"{w.size} weights for {d.r} blocks")
        conds = tuple(self.conditionals)
        if len(conds) != d.r:
            raise InvalidBlockState(f"{len(conds)} conditionals for {d.r} blocks")
        checked = []
        for i, (wi, c, di) in enumerate(zip(w, conds, d.block_dims)):
            if wi == 0.0:
                if c is not None:
                    raise InvalidBlockState(f"block {i} has zero weight but a conditional")
                checked.append(None)
                continue
            if c is None:
                raise InvalidBlockState(f"block {i} has weight {wi} but no conditional")
            try:
                c = as_density_matrix(c)
            except InvalidState as exc:
                raise InvalidBlockState(f"conditional {i}: {exc}") from None
            if c.shape != (di, di):
                raise InvalidBlockState(f"conditional {i} has shape {c.shape}, block is {di}")
            checked.append(c)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "conditionals", tuple(checked))

    @classmethod
    def _trusted(cls, decomposition, weights, conditionals):
        # skip validation for values produced internally
        obj = object.__new__(cls)
        object.__setattr__(obj, "decomposition", decomposition)
        object.__setattr__(obj, "weights", np.asarray(weights, dtype=float))
        object.__setattr__(obj, "conditionals", tuple(conditionals))
        return obj

    @property
    def r(self):
        return self.decomposition.r

    def block(self, i):
        """Unnormalised block ``weights[i] * conditionals[i]``."""
        c = self.conditionals[i]
        di = self.decomposition.block_dims[i]
        if c is None:
            return np.zeros((di, di), dtype=complex)
        return self.weights[i] * c


def _check_dims(rho, d):
    if rho.shape != (d.total_dim, d.total_dim):
        raise DimensionMismatch(
            f"matrix of shape {rho.shape} for decomposition of total dim {d.total_dim}"
        )


def _off_block_max(rho, d):
    mask = np.ones(rho.shape, dtype=bool)
    for s in d.slices:
        mask[s, s] = False
    return float(np.max(np.abs(rho[mask]), initial=0.0))


def is_block_diagonal(rho, d: BlockDecomposition) -> bool:
    rho = np.asarray(rho)
    _check_dims(rho, d)
    return _off_block_max(rho, d) <= TOL_OFFBLOCK


def decompose(rho, d: BlockDecomposition) -> BlockState:
    """Split a block-diagonal state into weights and conditional states."""
    rho = as_density_matrix(rho)
    _check_dims(rho, d)
    if _off_block_max(rho, d) > TOL_OFFBLOCK:
        raise NotBlockDiagonal("state has entries outside the diagonal blocks")
    weights = np.array([np.trace(rho[s, s]).real for s in d.slices])
    weights[weights <= TOL_ZERO_WEIGHT] = 0.0
    weights = weights / weights.sum()
    conds = [
        None if w == 0.0 else _clean_state(rho[s, s])
        for w, s in zip(weights, d.slices)
    ]
    return BlockState._trusted(d, weights, conds)


def assemble(bs: BlockState) -> np.ndarray:
    """Inverse of :func:`decompose`; zero-weight blocks become zero matrices."""
    return block_diag(*[bs.block(i) for i in range(bs.r)])


def entropy_of_blockstate(bs: BlockState) -> float:
    """``H(weights) + sum_i weights[i] * S(conditionals[i])``."""
    total = _entropy_of_spectrum(bs.weights)
    for w, c in zip(bs.weights, bs.conditionals):
        if c is not None:
            total += w * _vn_entropy(c)
    return total


def _same_decomposition(a, b):
    if a.decomposition != b.decomposition:
        raise DecompositionMismatch(
            f"{a.decomposition.block_dims} vs {b.decomposition.block_dims}"
        )


def blockwise_trace_distance(a: BlockState, b: BlockState) -> float:
    """Trace distance of the assembled states, summed block by block."""
    _same_decomposition(a, b)
    return sum(_trace_norm(a.block(i) - b.block(i)) for i in range(a.r))


def blockwise_bound_check(a: BlockState, b: BlockState):
    """Both sides of ``||a-b||^2 <= 2||p-q||^2 + 2 sum_i p_i ||a_i-b_i||^2``.

    Where a block is present in only one state, the missing conditional is
    taken equal to the present one, so only the weight difference counts.
    """
    _same_decomposition(a, b)
    lhs = blockwise_trace_distance(a, b) ** 2
    marg = float(np.sum(np.abs(a.weights - b.weights)))
    cond = 0.0
    for p, ca, cb in zip(a.weights, a.conditionals, b.conditionals):
        if ca is not None and cb is not None:
            cond += p * _trace_norm(ca - cb) ** 2
    return lhs, 2.0 * marg**2 + 2.0 * cond


def direct_sum(weights, conditionals: Sequence, dims=None) -> BlockState:
    """Convenience constructor inferring the decomposition from the blocks.

    ``dims`` is required when some weight is zero, since the block size of
    an absent conditional cannot be inferred.
    """
    if dims is None:
        dims = [np.asarray(c).shape[0] for c in conditionals]
    return BlockState(BlockDecomposition(tuple(dims)), np.asarray(weights, float), conditionals)


def blockstate_spectrum(bs: BlockState) -> np.ndarray:
    """Eigenvalues of the assembled state, as the union of block spectra."""
    parts = [
        np.zeros(d) if c is None else w * np.linalg.eigvalsh(c)
        for w, c, d in zip(bs.weights, bs.conditionals, bs.decomposition.block_dims)
    ]
    return np.concatenate(parts)
