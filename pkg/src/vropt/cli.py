"""vropt command line: run suites, compute reference optima, generate data, self-check."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bench import ExperimentConfig, compute_reference, gen_synthetic, load_toml, run_suite
from .data import serialize_libsvm
from .solvers import ConfigError


def _cmd_run(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    res = run_suite(cfg)
    if res.reference is not None:
        print(f"F_star = {res.reference.f_star!r} ({res.reference.method})")
    print(f"{'solver':<24}{'gap':>10}{'oracle calls':>16}{'passes':>10}")
    for label, t, calls, passes in res.summary_rows():
        c = "-" if calls is None else str(calls)
        ps = "-" if passes is None else f"{passes:.2f}"
        print(f"{label:<24}{t:>10.0e}{c:>16}{ps:>10}")
    print(f"wrote {len(res.runs)} trace(s) and {res.summary_path}")
    return 0


def _cmd_reference(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    p = cfg.build_problem()
    ref = compute_reference(p, args.tol)
    out = cfg.resolve(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = Path(args.out) if args.out else out / "reference.json"
    path.write_text(ref.to_json())
    print(f"F_star = {ref.f_star!r}  change = {ref.tol:.3g}  oracle calls = {ref.oracle_calls}")
    print(f"wrote {path}")
    return 0


def _cmd_gen(args) -> int:
    spec = load_toml(args.spec)
    spec = spec.get("synthetic", spec)
    ds = gen_synthetic(spec, args.seed)
    Path(args.out).write_text(serialize_libsvm(ds))
    print(f"wrote {ds.n} rows, dim {ds.dim}, nnz {ds.nnz} to {args.out}")
    return 0


def _cmd_check(args) -> int:
    from .diagnostics import run_checks

    failed = 0
    for name, ok, detail in run_checks(seed=args.seed):
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failed += not ok
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vropt", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the solver suite in a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("reference", help="compute a reference optimum")
    p.add_argument("--config", required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--out", default=None, help="output JSON (default <output_dir>/reference.json)")
    p.set_defaults(func=_cmd_reference)

    p = sub.add_parser("gen", help="write a synthetic LIBSVM dataset")
    p.add_argument("--spec", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("check", help="run invariant diagnostics")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"vropt: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
