"""Invariant suite run by ``blockentropy selftest``.

Each check returns ``(name, passed, detail)``.  Sample counts are smaller
than in the test suite so the whole run takes seconds.
"""
import numpy as np

from .blocks import (
    BlockDecomposition,
    BlockState,
    assemble,
    blockwise_bound_check,
    blockwise_trace_distance,
    entropy_of_blockstate,
)
from .constraints import make_rng, member_check, random_state, sample_member
from .core import (
    _trace_norm,
    _vn_entropy,
    max_mass_bounds,
    purity,
    relative_entropy,
    von_neumann_entropy,
)
from .fixtures import NAMES, load_fixture
from .minimizer import distance_to_minimizers, minimize_entropy
from .stability import gibbs_verify, quantum_sharpness_family, sharpness_family, verify_stability


def random_block_state(dims, rng):
    d = BlockDecomposition(tuple(dims))
    w = rng.dirichlet(np.ones(d.r))
    return BlockState(d, w, [random_state(k, rng) for k in d.block_dims])


def check_entropy_decomposition(n=200, seed=0):
    worst = 0.0
    for dims in [(2, 2), (1, 3), (2, 3, 2)]:
        for k in range(n):
            bs = random_block_state(dims, make_rng(seed, 10, k))
            worst = max(worst, abs(entropy_of_blockstate(bs) - von_neumann_entropy(assemble(bs))))
    return "entropy decomposition", worst <= 1e-8, f"max error {worst:.2e}"


def check_pinsker(n=500, seed=0):
    bad = 0
    for dim in (2, 4, 8):
        for k in range(n):
            rng = make_rng(seed, 11, dim, k)
            rho, sigma = random_state(dim, rng), random_state(dim, rng)
            bad += relative_entropy(rho, sigma) < 0.5 * _trace_norm(rho - sigma) ** 2 - 1e-9
    return "pinsker", bad == 0, f"{bad} violations"


def check_entropy_purity(n=500, seed=0):
    bad = 0
    for dim in (2, 3, 4, 8):
        for k in range(n):
            rho = random_state(dim, make_rng(seed, 12, dim, k))
            bad += _vn_entropy(rho) < -np.log(purity(rho)) - 1e-9
            p = np.linalg.eigvalsh(rho).clip(0, None)
            p /= p.sum()
            bad += any(p.max() < b - 1e-12 for b in max_mass_bounds(p))
    return "entropy-purity and max-mass", bad == 0, f"{bad} violations"


def check_blockwise_trace(n=200, seed=0):
    worst, bad = 0.0, 0
    for k in range(n):
        rng = make_rng(seed, 13, k)
        a, b = random_block_state((2, 3), rng), random_block_state((2, 3), rng)
        full = _trace_norm(assemble(a) - assemble(b))
        worst = max(worst, abs(blockwise_trace_distance(a, b) - full))
        lhs, rhs = blockwise_bound_check(a, b)
        bad += lhs > rhs + 1e-9
    return "blockwise trace norm", worst <= 1e-9 and bad == 0, f"max error {worst:.2e}, {bad} violations"


def check_minimality(n=200, seed=0):
    bad = 0
    for name in NAMES:
        c = load_fixture(name)
        md = minimize_entropy(c)
        for k in range(n):
            bs = sample_member(c, seed, 14, k)
            bad += not member_check(c, bs)
            bad += entropy_of_blockstate(bs) < md.s_min - 1e-9
            _, sigma = distance_to_minimizers(c, bs, md, check=False)
            bad += abs(entropy_of_blockstate(sigma) - md.s_min) > 1e-8
    return "minimality and minimiser membership", bad == 0, f"{bad} failures"


def check_stability(n=1000, seed=0):
    details, ok = [], True
    for name in NAMES:
        rep = verify_stability(load_fixture(name), n, seed)
        ok &= rep.violations == 0
        details.append(f"{name}: C={rep.assembled_C:.4g} viol={rep.violations}")
    return "stability inequality", ok, "; ".join(details)


def check_gibbs(n=1000, seed=0):
    bad = 0
    for r in (2, 3):
        rep = gibbs_verify(BlockDecomposition((2,) * r), np.full(r, 1.0 / r), n, seed)
        bad += rep.violations + rep.explicit_violations + rep.sqrt_bound_violations
    return "explicit Gibbs constant", bad == 0, f"{bad} violations"


def check_sharpness():
    c = load_fixture("classical_segment")
    md = minimize_entropy(c)
    eps = [1e-2, 1e-3, 1e-4, 1e-5]
    cl = sharpness_family(c.marginal, [0.2, 0.8], [1, -1], eps, md.minimizing_marginals)
    qu = quantum_sharpness_family(c, md, [0.2, 0.8], [1, -1], eps)
    ok = (cl.fitted_exponent is not None and 0.9 <= cl.fitted_exponent <= 1.1
          and qu.gap_identity_error <= 1e-9 and qu.distance_identity_error <= 1e-9)
    return "sharpness harness", ok, f"exponent {cl.fitted_exponent:.4f}"


CHECKS = (
    check_entropy_decomposition,
    check_pinsker,
    check_entropy_purity,
    check_blockwise_trace,
    check_minimality,
    check_stability,
    check_gibbs,
    check_sharpness,
)


def run_all():
    return [check() for check in CHECKS]
