"""Scalar and matrix primitives: entropies, trace distance, purity.

All entropies are in nats.  Matrices are plain ``numpy`` arrays; the
``as_*`` helpers validate and normalise inputs and are the only place the
tolerances below are applied to raw user data.
"""
from typing import NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidDistribution,
    InvalidState,
    NonHermitianInput,
)

TOL_HERM = 1e-9
TOL_NORM = 1e-9
TOL_PSD = 1e-9
TOL_SUPP = 1e-10
TOL_RECON = 1e-8
TOL_ORTH = 1e-8


class Spectrum(NamedTuple):
    """Eigenvalues in descending order and matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_hermitian(m, tol=TOL_HERM):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise NonHermitianInput(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonHermitianInput("matrix has non-finite entries")
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise NonHermitianInput("matrix is not Hermitian")
    return 0.5 * (m + m.conj().T)


def as_density_matrix(rho):
    """Validate ``rho`` as a state and return its Hermitian part.

    Raises
    ------
    InvalidState
        If ``rho`` is not Hermitian, has an eigenvalue below ``-TOL_PSD`` or
        trace away from one by more than ``TOL_NORM``.
    """
    try:
        rho = as_hermitian(rho)
    except NonHermitianInput as exc:
        raise InvalidState(str(exc)) from None
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TOL_NORM:
        raise InvalidState(f"trace is {tr!r}, expected 1")
    lam_min = np.linalg.eigvalsh(rho)[0]
    if lam_min < -TOL_PSD:
        raise InvalidState(f"smallest eigenvalue {lam_min!r} is negative")
    return rho


def as_probability(p):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InvalidDistribution(f"expected a non-empty vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise InvalidDistribution("non-finite weight")
    if np.min(p) < -TOL_PSD:
        raise InvalidDistribution(f"negative weight {np.min(p)!r}")
    if abs(p.sum() - 1.0) > TOL_NORM:
        raise InvalidDistribution(f"weights sum to {p.sum()!r}, expected 1")
    return np.clip(p, 0.0, None)


def eigh(m):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    >>> eigh([[0, 1], [1, 0]]).eigenvalues
    array([ 1., -1.])
    """
    m = as_hermitian(m)
    w, v = np.linalg.eigh(m)
    return Spectrum(w[::-1].copy(), v[:, ::-1].copy())


def _xlogx_sum(x):
    # 0 log 0 = 0; tiny negative round-off is clipped first
    x = np.clip(np.asarray(x, dtype=float), 0.0, None)
    nz = x[x > 0]
    return float(np.sum(nz * np.log(nz)))


def _entropy_of_spectrum(x):
    return -_xlogx_sum(x)


def shannon_entropy(p):
    """Shannon entropy ``-sum p_i log p_i`` in nats."""
    return _entropy_of_spectrum(as_probability(p))


def _vn_entropy(rho):
    return _entropy_of_spectrum(np.linalg.eigvalsh(rho))


def von_neumann_entropy(rho):
    """Von Neumann entropy of a density matrix, in nats.

    Computed as the Shannon entropy of the eigenvalues, so it is invariant
    under unitary conjugation and under the choice of basis inside
    degenerate eigenspaces.
    """
    return _vn_entropy(as_density_matrix(rho))


def relative_entropy(rho, sigma):
    """Quantum relative entropy ``D(rho || sigma)``.

    Returns ``inf`` when ``rho`` has weight above ``TOL_SUPP`` outside the
    support of ``sigma``.  ``log sigma`` is only evaluated on that support.
    """
    rho = as_density_matrix(rho)
    sigma = as_density_matrix(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatch(f"{rho.shape} vs {sigma.shape}")
    s, v = np.linalg.eigh(sigma)
    supp = s > TOL_SUPP
    vs = v[:, supp]
    # diagonal of rho in sigma's eigenbasis restricted to the support
    rho_diag = np.real(np.einsum("ik,ij,jk->k", vs.conj(), rho, vs))
    if 1.0 - rho_diag.sum() > TOL_SUPP:
        return float("inf")
    cross = float(np.sum(rho_diag * np.log(s[supp])))
    d = _xlogx_sum(np.linalg.eigvalsh(rho)) - cross
    return max(d, 0.0)


def _trace_norm(a):
    return float(np.sum(np.abs(np.linalg.eigvalsh(a))))


def trace_distance(a, b):
    """Trace norm ``||a - b||_1``; lies in ``[0, 2]`` for two states.

    Note this is the full Schatten-1 norm, without the conventional factor
    one half.
    """
    a = as_density_matrix(a)
    b = as_density_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    # canonical operand order makes d(a, b) == d(b, a) bit for bit
    if a.tobytes() > b.tobytes():
        a, b = b, a
    return _trace_norm(a - b)


def purity(rho):
    """``Tr(rho^2)``, between ``1/dim`` and 1."""
    rho = as_density_matrix(rho)
    # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(rho) ** 2))


def effective_dimension(rho):
    return 1.0 / purity(rho)


def max_mass_bounds(p):
    """Two lower bounds on ``max(p)`` from the Shannon entropy.

    Returns
    -------
    tuple of float
        ``(exp(-H(p)), exp(-H(p)) / r)`` with ``r = len(p)``.
    """
    p = as_probability(p)
    lower = float(np.exp(-_entropy_of_spectrum(p)))
    return lower, lower / p.size
