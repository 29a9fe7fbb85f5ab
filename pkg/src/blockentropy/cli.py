"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 parse/validation error, 3 numerical
failure, 4 invariant violation (a verification run with violations, or a
failing selftest).
"""
import argparse
import csv
import io as _stdio
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .constraints import Full
from .errors import BlockEntropyError, SpecParseError, SpecValidationError
from .io import decode_matrix, dumps, parse_spec, spec_digest, to_jsonable
from .minimizer import minimize_entropy
from .stability import (
    gibbs_from_observable,
    gibbs_verify,
    quantum_sharpness_family,
    sharpness_family,
    verify_stability,
)

EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC, EXIT_VIOLATION = 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser():
    p = _Parser(prog="blockentropy", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, spec=True, sampling=False):
        if spec:
            sp.add_argument("--spec", required=True, help="constraint-spec JSON file")
        if sampling:
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--samples", type=int, default=10000,
                            help="Monte-Carlo samples; members are Dirichlet mixtures of "
                                 "polytope vertices, which covers but is not uniform")
        sp.add_argument("--out", help="report path (default: no file)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    common(sub.add_parser("minimize", help="exact minimal entropy and minimiser set"))
    common(sub.add_parser("verify", help="Monte-Carlo check of the stability inequality"),
           sampling=True)
    sp = sub.add_parser("sharpness", help="entropy gap along p = q + eps v")
    common(sp)
    sp.add_argument("--q", type=_floats, required=True)
    sp.add_argument("--v", type=_floats, required=True)
    sp.add_argument("--eps", type=_floats, default=[1e-2, 1e-3, 1e-4, 1e-5],
                    help="strictly decreasing ladder")
    sp.add_argument("--csv", help="(distance, gap) CSV path; default next to --out")
    sp = sub.add_parser("gibbs", help="stability of fixed-population sectors of an observable")
    common(sp, spec=False, sampling=True)
    sp.add_argument("--observable", required=True, help="JSON file with a Hermitian matrix")
    sp.add_argument("--tol-cluster", type=float, default=1e-9)
    sp.add_argument("--q", type=_floats, help="sector populations (default uniform)")
    sub.add_parser("selftest", help="run the invariant suite")
    return p


def _report(command, inputs, payload, started):
    return {
        "tool": "blockentropy",
        "version": __version__,
        "command": command,
        "inputs": inputs,
        "payload": payload,
        "wall_time_s": round(time.perf_counter() - started, 6),
    }


def _flat_rows(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flat_rows(v, f"{prefix}{k}.")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flat_rows(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def _write(path, text):
    Path(path).write_text(text, encoding="utf-8")


def _emit(args, report):
    if not args.out:
        return
    if args.format == "json":
        _write(args.out, dumps(report))
        return
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    w.writerows(_flat_rows(to_jsonable(report["payload"])))
    _write(args.out, buf.getvalue())


def _minimizer_payload(md):
    return {
        "s_min": md.s_min,
        "minimizing_marginals": md.minimizing_marginals,
        "per_block_min_entropy": md.per_block_min_entropy,
        "per_block_witnesses": [
            {"kind": kind, "witness": w if isinstance(w, str) else np.asarray(w)}
            for kind, w in md.per_block_witnesses
        ],
    }


def _fmt(x):
    return "n/a" if x is None else f"{x:.6g}" if isinstance(x, float) else str(x)


def cmd_minimize(args):
    started = time.perf_counter()
    c = parse_spec(args.spec)
    md = minimize_entropy(c)
    report = _report("minimize", {"spec_digest": spec_digest(c)}, _minimizer_payload(md), started)
    _emit(args, report)
    print(f"s_min={md.s_min:.12g} minimizers={len(md.minimizing_marginals)}")
    return 0


def _stability_exit(rep):
    return EXIT_VIOLATION if rep.violations or rep.explicit_violations or rep.sqrt_bound_violations else 0


def cmd_verify(args):
    started = time.perf_counter()
    c = parse_spec(args.spec)
    rep = verify_stability(c, args.samples, args.seed)
    inputs = {"spec_digest": spec_digest(c), "seed": args.seed, "samples": args.samples}
    _emit(args, _report("verify", inputs, rep.to_dict(), started))
    print(f"s_min={rep.s_min:.12g} C={rep.assembled_C:.6g} violations={rep.violations} "
          f"empirical_best_C={_fmt(rep.empirical_best_C)}")
    return _stability_exit(rep)


def cmd_sharpness(args):
    started = time.perf_counter()
    c = parse_spec(args.spec)
    md = minimize_entropy(c)
    classical = sharpness_family(c.marginal, args.q, args.v, args.eps, md.minimizing_marginals)
    payload = {"classical": classical.to_dict()}
    primary = classical
    if all(isinstance(cs, Full) for cs in c.conditionals) and max(c.decomposition.block_dims) > 1:
        quantum = quantum_sharpness_family(c, md, args.q, args.v, args.eps)
        payload["quantum"] = quantum.to_dict()
        primary = quantum
    inputs = {"spec_digest": spec_digest(c), "q": args.q, "v": args.v, "eps": args.eps}
    report = _report("sharpness", inputs, payload, started)
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["distance", "gap"])
    w.writerows(zip(map(repr, primary.distances), map(repr, primary.gaps)))
    if args.format == "csv" and args.out:
        _write(args.out, buf.getvalue())
    else:
        _emit(args, report)
        csv_path = args.csv or (str(Path(args.out).with_suffix(".csv")) if args.out else None)
        if csv_path:
            _write(csv_path, buf.getvalue())
    print(f"s_min={md.s_min:.12g} exponent={_fmt(primary.fitted_exponent)} "
          f"derivative={_fmt(primary.directional_derivative)}")
    return 0


def _load_observable(path):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SpecParseError(f"{path}: {exc}") from None
    if isinstance(data, dict):
        if "matrix" not in data:
            raise SpecValidationError("matrix", "missing field")
        data = data["matrix"]
    return decode_matrix(data, "matrix")


def cmd_gibbs(args):
    started = time.perf_counter()
    h0 = _load_observable(args.observable)
    try:
        decomp = gibbs_from_observable(h0, args.tol_cluster)
    except BlockEntropyError as exc:
        raise SpecValidationError("matrix", str(exc)) from None
    q = np.full(decomp.r, 1.0 / decomp.r) if args.q is None else np.asarray(args.q)
    if q.size != decomp.r:
        raise SpecValidationError("q", f"{q.size} populations for {decomp.r} energy sectors")
    rep = gibbs_verify(decomp, q, args.samples, args.seed)
    inputs = {"block_dims": list(decomp.block_dims), "q": q, "seed": args.seed,
              "samples": args.samples, "tol_cluster": args.tol_cluster}
    _emit(args, _report("gibbs", inputs, rep.to_dict(), started))
    print(f"blocks={list(decomp.block_dims)} s_min={rep.s_min:.12g} C={rep.assembled_C:.6g} "
          f"violations={rep.violations} explicit_violations={_fmt(rep.explicit_violations)}")
    return _stability_exit(rep)


def cmd_selftest(args):
    from .selftest import run_all

    failed = 0
    for name, ok, detail in run_all():
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return EXIT_VIOLATION if failed else 0


COMMANDS = {
    "minimize": cmd_minimize,
    "verify": cmd_verify,
    "sharpness": cmd_sharpness,
    "gibbs": cmd_gibbs,
    "selftest": cmd_selftest,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "samples", 1) < 1 or getattr(args, "seed", 0) < 0:
        print("blockentropy: error: --samples must be positive and --seed non-negative",
              file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (SpecParseError, SpecValidationError) as exc:
        print(f"blockentropy: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (BlockEntropyError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"blockentropy: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"blockentropy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
