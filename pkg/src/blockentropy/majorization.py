"""Majorization of spectra.

``x`` majorizes ``y`` when the partial sums of ``x`` sorted in decreasing
order dominate those of ``y`` (totals being equal).  Entropy is
Schur-concave, so a majorizing spectrum never has larger entropy.
"""
import numpy as np

TOL_MAJ = 1e-9


def _sorted_padded(x, n):
    x = np.sort(np.asarray(x, dtype=float))[::-1]
    return np.concatenate([x, np.zeros(n - x.size)])


def majorizes(x, y, tol=TOL_MAJ):
    """True if ``x`` majorizes ``y`` up to ``tol`` on every partial sum."""
    n = max(np.size(x), np.size(y))
    cx = np.cumsum(_sorted_padded(x, n))
    cy = np.cumsum(_sorted_padded(y, n))
    if abs(cx[-1] - cy[-1]) > tol:
        return False
    return bool(np.all(cx >= cy - tol))


def majorization_relation(rho, sigma, tol=TOL_MAJ):
    """Compare the spectra of two states in both directions.

    Returns
    -------
    dict
        ``sigma_majorizes_rho`` and ``rho_majorizes_sigma`` flags.
    """
    lr = np.linalg.eigvalsh(rho)
    ls = np.linalg.eigvalsh(sigma)
    return {
        "sigma_majorizes_rho": majorizes(ls, lr, tol),
        "rho_majorizes_sigma": majorizes(lr, ls, tol),
    }
