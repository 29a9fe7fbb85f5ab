"""Acceptance criteria, one test each, at the stated sample sizes and tolerances.

Each test records a single PASS/FAIL line that is printed in the terminal
summary, then asserts.
"""
import json
import math
import time

import numpy as np

from blockentropy.blocks import BlockDecomposition, assemble, entropy_of_blockstate
from blockentropy.cli import main
from blockentropy.constraints import (
    BlockConvexSet,
    Full,
    extreme_marginals,
    make_rng,
    random_state,
)
from blockentropy.core import (
    max_mass_bounds,
    purity,
    relative_entropy,
    shannon_entropy,
    trace_distance,
    von_neumann_entropy,
)
from blockentropy.fixtures import NAMES, fixture_path, load_fixture
from blockentropy.minimizer import distance_to_minimizers, minimize_entropy
from blockentropy.selftest import random_block_state
from blockentropy.stability import (
    gibbs_verify,
    quantum_sharpness_family,
    sharpness_family,
    stability_sample,
    verify_stability,
)

import oracles
from conftest import ACCEPTANCE_LINES

STABILITY_FIXTURES = ["classical_simplex2", "classical_segment", "gibbs_uniform_r2",
                      "gibbs_uniform_r3", "mixed_hull"]


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def test_01_entropy_decomposition():
    start = time.perf_counter()
    worst = 0.0
    for dims in [(2, 2), (1, 3), (2, 3, 2)]:
        for k in range(1000):
            bs = random_block_state(dims, make_rng(101, len(dims), sum(dims), k))
            worst = max(worst, abs(entropy_of_blockstate(bs) - von_neumann_entropy(assemble(bs))))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 10
    assert record(1, "entropy decomposition", ok,
                  f"max |diff| = {worst:.2e} over 3000 states, {elapsed:.1f} s")


def test_02_pinsker():
    start = time.perf_counter()
    violations, worst = 0, math.inf
    for dim in (2, 4, 8):
        for k in range(10_000):
            rng = make_rng(102, dim, k)
            rho, sigma = random_state(dim, rng), random_state(dim, rng)
            slack = relative_entropy(rho, sigma) - 0.5 * trace_distance(rho, sigma) ** 2
            worst = min(worst, slack)
            violations += slack < -1e-9
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 30
    assert record(2, "Pinsker", ok,
                  f"{violations} violations in 30000 pairs, min slack {worst:.2e}, {elapsed:.1f} s")


def test_03_entropy_purity_and_max_mass():
    violations = 0
    for k in range(10_000):
        rng = make_rng(103, k)
        dim = (2, 3, 4, 8)[k % 4]
        rho = random_state(dim, rng)
        violations += von_neumann_entropy(rho) < -math.log(purity(rho)) - 1e-9
        p = rng.dirichlet(np.full(dim, 0.3))
        lo, refined = max_mass_bounds(p)
        violations += p.max() < lo - 1e-12
        violations += p.max() < refined - 1e-12
        violations += shannon_entropy(p) > math.log(dim) + 1e-12
    assert record(3, "entropy-purity and max-mass bounds", violations == 0,
                  f"{violations} violations over 10000 samples")


_stability_cache = {}


def _stability_reports():
    if not _stability_cache:
        for name in STABILITY_FIXTURES:
            start = time.perf_counter()
            rep = verify_stability(load_fixture(name), 10_000, 0)
            _stability_cache[name] = (rep, time.perf_counter() - start)
    return _stability_cache


def test_04_stability():
    reports = _stability_reports()
    total = sum(t for _, t in reports.values())
    bad = {n: r.violations for n, (r, _) in reports.items() if r.violations}
    stress = min(r.stress_samples for r, _ in reports.values())
    ok = not bad and stress > 0 and total < 120
    summary = ", ".join(f"{n} C={r.assembled_C:.4g} best={r.empirical_best_C:.4g}"
                        for n, (r, _) in reports.items())
    assert record(4, "stability inequality", ok,
                  f"violations {bad or 0}, {stress}+ stress samples each, {total:.1f} s; {summary}")


def test_05_explicit_gibbs_constant():
    details, ok = [], True
    for name in ("gibbs_uniform_r2", "gibbs_uniform_r3"):
        c = load_fixture(name)
        rep = gibbs_verify(c.decomposition, c.marginal.vertices[0], 10_000, 0)
        ok &= rep.explicit_violations == 0 and rep.sqrt_bound_violations == 0
        details.append(f"r={c.r}: C=1/{2 * c.r}, {rep.explicit_violations} violations, "
                       f"{rep.sqrt_bound_violations} sqrt-form violations")
    assert record(5, "explicit Gibbs constant", ok, "; ".join(details))


def test_06_dimension_independence():
    q = [0.5, 0.5]
    small = gibbs_verify(BlockDecomposition((2, 2)), q, 10_000, 0).empirical_best_C
    large = gibbs_verify(BlockDecomposition((8, 8)), q, 10_000, 0).empirical_best_C
    drop = 1.0 - large / small
    ok = drop <= 0.20
    assert record(6, "block-dimension independence", ok,
                  f"empirical best C {small:.4f} at (2,2), {large:.4f} at (8,8), "
                  f"relative drop {drop:+.1%}")


def test_07_sharpness():
    segment = load_fixture("classical_segment")
    eps = [1e-2, 1e-3, 1e-4]
    classical = sharpness_family(segment.marginal, [0.2, 0.8], [1, -1], eps)
    lifted = BlockConvexSet(BlockDecomposition((2, 2)), segment.marginal, [Full(), Full()])
    md = minimize_entropy(lifted)
    quantum = quantum_sharpness_family(lifted, md, [0.2, 0.8], [1, -1], eps)
    ok = (0.9 <= classical.fitted_exponent <= 1.1
          and quantum.gap_identity_error <= 1e-9
          and quantum.distance_identity_error <= 1e-9)
    assert record(7, "sharpness harness", ok,
                  f"exponent {classical.fitted_exponent:.4f} (derivative "
                  f"{classical.directional_derivative:.4f}); lift errors "
                  f"gap {quantum.gap_identity_error:.1e}, dist {quantum.distance_identity_error:.1e}; "
                  f"quadratic family found: {classical.quadratic_family_found}")


def test_08_oracle_equivalence():
    start = time.perf_counter()
    worst, above, count = 0.0, 0, 0
    for name in NAMES:
        c = load_fixture(name)
        md = minimize_entropy(c)
        for k in range(60):
            # includes near-minimiser stress samples (odd k)
            bs, _ = stability_sample(c, md, 108, k)
            dist, _ = distance_to_minimizers(c, bs, md)
            brute = oracles.brute_force_distance(c, bs, bloch_step=2.0, marginal_step=1e-3)
            worst = max(worst, abs(dist - brute))
            # a grid can only overestimate a minimum
            above += dist > brute + 1e-9
            count += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 2e-2 and elapsed < 60
    assert record(8, "oracle equivalence", ok,
                  f"max |dist - brute force| = {worst:.2e} over {count} states, "
                  f"{above} above the grid value, {elapsed:.1f} s")


def _payload_of(cs):
    if cs.kind == "fixed":
        return cs.state
    return getattr(cs, "generators", None)


def test_09_minimization():
    worst = 0.0
    for name in NAMES:
        c = load_fixture(name)
        md = minimize_entropy(c)
        mins = [oracles.block_minimal_states(cs.kind, d, _payload_of(cs))[0]
                for cs, d in zip(c.conditionals, c.decomposition.block_dims)]
        exhaustive = min(
            oracles.shannon_fsum(q) + math.fsum(qi * m for qi, m in zip(q, mins))
            for q in extreme_marginals(c.marginal)
        )
        worst = max(worst, abs(md.s_min - exhaustive))
    r3 = minimize_entropy(load_fixture("gibbs_uniform_r3")).s_min
    ok = worst <= 1e-14 and abs(r3 - math.log(3)) <= 1e-12
    assert record(9, "minimization correctness", ok,
                  f"max |s_min - exhaustive| = {worst:.1e} on {len(NAMES)} fixtures, "
                  f"Gibbs r=3 off log 3 by {abs(r3 - math.log(3)):.1e}")


def _payload(path):
    return json.dumps(json.loads(path.read_text())["payload"], sort_keys=True)


def test_10_determinism(tmp_path):
    obs = tmp_path / "h.json"
    obs.write_text(json.dumps({"matrix": np.diag([0.0, 0.0, 1.0, 1.0, 2.0]).tolist()}))
    runs = [["minimize", "--spec", str(fixture_path("mixed_hull"))],
            ["sharpness", "--spec", str(fixture_path("classical_segment")), "--q", "0.2,0.8",
             "--v", "1,-1"],
            ["gibbs", "--observable", str(obs), "--seed", "42", "--samples", "500"]]
    runs += [["verify", "--spec", str(fixture_path(n)), "--seed", "42", "--samples", "500"]
             for n in NAMES]
    same = 0
    for i, args in enumerate(runs):
        outs = []
        for rep in range(2):
            out = tmp_path / f"run{i}_{rep}.json"
            main([*args, "--out", str(out)])
            outs.append(_payload(out))
        same += outs[0] == outs[1]
    ok = same == len(runs)
    assert record(10, "determinism", ok, f"{same}/{len(runs)} CLI runs byte-identical in payload")
