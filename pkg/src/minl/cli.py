"""Command line front end: ``minl {compute,scan,verify,gen}``.

Exit codes: 0 success, 1 failed verification checks, 2 state parse or
validation error, 3 dimension or arity error, 4 unwritable output,
5 unknown suite.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import statefile
from .linalg import DimensionError
from .nonlocality import OptimizerConfig, n_geo, n_re, n_re_bell_diagonal
from .qstate import (
    BellDiagonalParams,
    StateValidationError,
    bell_diagonal,
    entropy,
    mutual_information,
    product,
    random_density,
    random_pure,
)
from .tradeoffs import min_side_information
from .verify import CHECKS, SUITES, run_suite

EXIT_FAILED, EXIT_STATE, EXIT_DIMS, EXIT_OUTPUT, EXIT_SUITE = 1, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def num(x: float) -> float:
    """Round to 12 significant digits for machine-readable output."""
    return float(f"{x:.12g}")


def parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"dims must look like 2x3, got {text!r}")
    if any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError(f"dims must be positive, got {text!r}")
    return dims


def parse_grid(text: str) -> list[float] | str:
    """'0.5', '0.1,0.2', 'start:stop:num' (inclusive), or '=c2' / '=-c2' to tie to another axis."""
    if text.startswith("="):
        return text[1:]
    if ":" in text:
        start, stop, n = text.split(":")
        return list(np.linspace(float(start), float(stop), int(n)))
    return [float(v) for v in text.split(",")]


def add_optimizer_flags(p: argparse.ArgumentParser) -> None:
    d = OptimizerConfig()
    p.add_argument("--restarts", type=int, default=d.restarts)
    p.add_argument("--max-iters", type=int, default=d.max_iters)
    p.add_argument("--step-init", type=float, default=d.step_init)
    p.add_argument("--grad-eps", type=float, default=d.grad_eps)
    p.add_argument("--conv-tol", type=float, default=d.conv_tol)
    p.add_argument("--cluster-tol", type=float, default=d.cluster_tol)
    p.add_argument("--seed", type=int, default=d.seed)


def optimizer_config(args) -> OptimizerConfig:
    return OptimizerConfig(
        restarts=args.restarts,
        max_iters=args.max_iters,
        step_init=args.step_init,
        grad_eps=args.grad_eps,
        conv_tol=args.conv_tol,
        seed=args.seed,
        cluster_tol=args.cluster_tol,
    )


def write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise CliError(EXIT_OUTPUT, f"cannot write {out}: {exc}")


def _diagnostics(rep) -> dict:
    return {
        "converged": rep.converged,
        "optimized": rep.optimized,
        "iterations": rep.iterations,
        "lower_bound_only": rep.lower_bound_only,
        "restart_values": [num(v) for v in rep.objective_trace],
    }


def cmd_compute(args) -> int:
    rho = statefile.load(args.state)
    if len(rho.dims) != 2:
        raise DimensionError(f"compute needs a bipartite state, got dims {list(rho.dims)}")
    cfg = optimizer_config(args)
    doc: dict = {"dims": list(rho.dims)}
    if args.measure in ("re", "both"):
        rep = n_re(rho, cfg)
        doc["n_re"] = num(rep.value)
        doc["n_re_optimizer"] = _diagnostics(rep)
        doc["min_side_information"] = num(min_side_information(rho, report=rep).chi)
    if args.measure in ("geo", "both"):
        rep = n_geo(rho, cfg)
        doc["n_geo"] = num(rep.value)
        doc["n_geo_optimizer"] = _diagnostics(rep)
    doc["s_b_bound"] = num(entropy(rho.reduce(1)))
    doc["mutual_information"] = num(mutual_information(rho))

    if args.format == "json":
        text = json.dumps(doc, indent=2) + "\n"
    else:
        lines = [f"state dims            {'x'.join(map(str, rho.dims))}"]
        if "n_re" in doc:
            lines.append(f"N_RE (bits)           {doc['n_re']:.12g}")
        if "n_geo" in doc:
            lines.append(f"N_G (HS norm)         {doc['n_geo']:.12g}")
        lines.append(f"bound S(rho_B)        {doc['s_b_bound']:.12g}")
        lines.append(f"mutual information    {doc['mutual_information']:.12g}")
        if "min_side_information" in doc:
            lines.append(f"min side information  {doc['min_side_information']:.12g}")
        for key in ("n_re_optimizer", "n_geo_optimizer"):
            if key in doc:
                dg = doc[key]
                lines.append(
                    f"{key:<22}optimized={dg['optimized']} converged={dg['converged']} "
                    f"iterations={dg['iterations']} lower_bound_only={dg['lower_bound_only']}"
                )
        text = "\n".join(lines) + "\n"
    write_output(text, args.out)
    return 0


def _scan_points(args) -> tuple[list[str], list[tuple[float, ...]]]:
    if args.family == "werner":
        ps = parse_grid(args.p)
        if isinstance(ps, str):
            raise CliError(EXIT_DIMS, "werner scan needs explicit p values")
        return ["p"], [(p,) for p in ps]
    axes = {"c1": parse_grid(args.c1), "c2": parse_grid(args.c2), "c3": parse_grid(args.c3)}
    free = [k for k, v in axes.items() if not isinstance(v, str)]
    for k, v in axes.items():
        if isinstance(v, str) and v.lstrip("-") not in free:
            raise CliError(EXIT_DIMS, f"{k} is tied to {v!r}, which is not an explicit axis")
    points = []
    for combo in np.array(np.meshgrid(*[axes[k] for k in free], indexing="ij")).reshape(len(free), -1).T:
        vals = dict(zip(free, combo))
        points.append(tuple(float(vals[k]) if k in free else _tied(vals, axes[k]) for k in ("c1", "c2", "c3")))
    return ["c1", "c2", "c3"], points


def _tied(vals: dict, ref: str) -> float:
    return -float(vals[ref[1:]]) if ref.startswith("-") else float(vals[ref])


def cmd_scan(args) -> int:
    cfg = optimizer_config(args)
    header, points = _scan_points(args)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header + ["n_re_closed_form", "n_re_numeric", "n_geo_numeric", "s_b_bound", "abs_gap", "reason"])
    for point in points:
        c = (-point[0],) * 3 if args.family == "werner" else point
        params = BellDiagonalParams(*c)
        try:
            rho = bell_diagonal(params)
        except StateValidationError as exc:
            writer.writerow([f"{v:.12g}" for v in point] + [""] * 5 + [exc.invariant])
            continue
        closed = n_re_bell_diagonal(params)
        numeric = n_re(rho, cfg).value
        geo = n_geo(rho, cfg).value
        row = [closed, numeric, geo, entropy(rho.reduce(1)), abs(closed - numeric)]
        writer.writerow([f"{v:.12g}" for v in point] + [f"{v:.12g}" for v in row] + [""])
    write_output(buf.getvalue(), args.out)
    return 0


def cmd_verify(args) -> int:
    if args.suite != "all" and args.suite not in SUITES:
        raise CliError(EXIT_SUITE, f"unknown suite {args.suite!r}; choose from all, {', '.join(SUITES)}")
    if args.samples is not None and args.samples < 1:
        raise CliError(EXIT_DIMS, "--samples must be at least 1")
    dims = args.dims
    if dims is not None and len(dims) != 2:
        raise CliError(EXIT_DIMS, "--dims must be bipartite, e.g. 2x2")
    report = run_suite(args.suite, args.samples, args.seed, dims, optimizer_config(args), args.grid_resolution)
    if args.format == "json":
        doc = report.to_dict()
        # wall time goes to stderr so the document is reproducible byte for byte
        elapsed = doc.pop("elapsed_seconds")
        for name, ck in doc["checks"].items():
            ck["max_violation"] = num(ck["max_violation"])
        for f in doc["failures"]:
            f["violation"] = num(f["violation"])
        text = json.dumps(doc, indent=2) + "\n"
        print(f"elapsed {elapsed:.1f} s", file=sys.stderr)
    else:
        lines = [f"suite {report.suite}: {report.samples} samples, {report.elapsed:.1f} s"]
        for name, st in report.checks.items():
            what, tol = CHECKS[name]
            status = "ok  " if st.max_violation <= tol else "FAIL"
            lines.append(
                f"  {status} {name:<32} n={st.evaluations:<7d} max violation {st.max_violation:+.3e} "
                f"(tol {tol:.0e})  [{what}]"
            )
        for seed, check, v in report.failures[:50]:
            lines.append(f"  failure: seed={seed} check={check} violation={v:.3e}")
        if len(report.failures) > 50:
            lines.append(f"  ... {len(report.failures) - 50} more failures")
        for note in report.notes:
            lines.append(f"  note: {note}")
        lines.append("PASSED" if report.ok else f"FAILED ({len(report.failures)} failures)")
        text = "\n".join(lines) + "\n"
    write_output(text, args.out)
    return 0 if report.ok else EXIT_FAILED


def cmd_gen(args) -> int:
    rng = np.random.default_rng(args.seed)
    dims = args.dims or (2, 2)
    if args.kind == "bell-diagonal":
        if len(args.params) != 3:
            raise CliError(EXIT_DIMS, "bell-diagonal needs three parameters c1 c2 c3")
        rho = bell_diagonal(BellDiagonalParams(*args.params))
    elif args.kind == "werner":
        if len(args.params) != 1:
            raise CliError(EXIT_DIMS, "werner needs one parameter p")
        p = args.params[0]
        rho = bell_diagonal(BellDiagonalParams(-p, -p, -p))
    elif args.kind == "random-pure":
        rho = random_pure(dims, rng).density()
    elif args.kind == "random-mixed":
        d = int(np.prod(dims))
        rank = args.rank if args.rank is not None else d
        if not 1 <= rank <= d:
            raise CliError(EXIT_DIMS, f"rank must lie in [1, {d}]")
        rho = random_density(d, rank, rng, dims)
    else:
        if len(dims) != 2:
            raise CliError(EXIT_DIMS, "product needs bipartite dims")
        rho = product(random_density(dims[0], dims[0], rng), random_density(dims[1], dims[1], rng))
    write_output(statefile.dumps(rho), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minl", description="Measurement-induced nonlocality toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="nonlocality of one state file")
    p.add_argument("--state", required=True)
    p.add_argument("--measure", choices=("re", "geo", "both"), default="both")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")
    add_optimizer_flags(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("scan", help="CSV scan of a Bell-diagonal family")
    p.add_argument("family", choices=("bell-diagonal", "werner"))
    p.add_argument("--p", default="0:1:11", help="werner weights")
    p.add_argument("--c1", default="1")
    p.add_argument("--c2", default="0.1:0.9:9")
    p.add_argument("--c3", default="=-c2", help="defaults to -c2: (1, c, -c) is a valid state, (1, c, c) is not")
    p.add_argument("--format", choices=("csv",), default="csv")
    p.add_argument("--out")
    add_optimizer_flags(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("verify", help="run property suites")
    p.add_argument("suite", help=f"all, {', '.join(SUITES)}")
    p.add_argument("--samples", type=int)
    p.add_argument("--dims", type=parse_dims)
    p.add_argument("--grid-resolution", type=int, default=400)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")
    add_optimizer_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="write a state file")
    p.add_argument("kind", choices=("bell-diagonal", "werner", "random-pure", "random-mixed", "product"))
    p.add_argument("params", nargs="*", type=float)
    p.add_argument("--dims", type=parse_dims)
    p.add_argument("--rank", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except StateValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STATE
    except DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMS
    except ValueError as exc:
        # invalid optimizer settings and similar argument problems
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMS


if __name__ == "__main__":
    sys.exit(main())
