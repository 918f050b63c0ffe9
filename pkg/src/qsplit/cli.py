"""``qsplit`` command line."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import bench
from .instances import expand_selectors, reg_ground_state, reg_instance
from .ising import model_to_dict
from .splitting import LambdaMode
from .subsolver import SolverConfig
from .topology import TopologySpec, chimera_mask, complete_mask, edgelist_lines, pegasus_mask


def _seeds(tokens) -> tuple[int, ...]:
    """``0 1 2``, ``0,1,2`` or ``0..4`` (inclusive)."""
    out: list[int] = []
    for tok in tokens:
        for part in str(tok).split(","):
            if ".." in part:
                lo, hi = part.split("..")
                out += range(int(lo), int(hi) + 1)
            elif part:
                out.append(int(part))
    return tuple(out)


def build_spec(args) -> bench.RunSpec:
    d = bench.load_defaults(args.config)
    sol, spl, run = d["solver"], d["splitting"], d["run"]
    solver = SolverConfig(
        num_reads=args.reads if args.reads is not None else sol["num_reads"],
        sweeps=args.sweeps if args.sweeps is not None else sol["sweeps"],
        beta_start=sol["beta_start"],
        beta_end=sol["beta_end"],
        schedule=sol["schedule"],
    )
    modes = [LambdaMode.parse(x) for x in (args.lambda_mode or [spl["lambda_mode"]])]
    m = args.m if args.m is not None else d["lnls"]["m"]
    k = args.k if args.k is not None else d["kopt"]["k"]
    methods = []
    for name in args.method:
        if name == "splitting":
            methods += [bench.MethodSpec("splitting", lambda_mode=mode) for mode in modes]
        else:
            methods.append(bench.MethodSpec(name, m=m, k=k))
    spec = bench.RunSpec(
        instances=tuple(expand_selectors(args.instances, args.filter)),
        methods=tuple(methods),
        seeds=_seeds(args.seeds) if args.seeds else tuple(run["seeds"]),
        topology=TopologySpec.parse(args.topology or run["topology"]),
        solver=solver,
        maxiter=args.maxiter if args.maxiter is not None else spl["maxiter"],
        maxsubiter=args.maxsubiter if args.maxsubiter is not None else spl["maxsubiter"],
        include_gradient_factor_two=spl["include_gradient_factor_two"],
        diagonal_shift=spl["diagonal_shift"],
        method_maxiter=args.maxiter if args.maxiter is not None else run["maxiter"],
        budget=args.budget,
        out=Path(args.out),
    )
    spec.validate()
    return spec


def _refs(path) -> bench.References:
    return bench.References.from_csv(path) if path else bench.References()


def _write_rows(rows: list[dict], out, columns=None) -> None:
    fh = open(out, "w", newline="") if out else sys.stdout
    try:
        cols = columns or (list(rows[0]) if rows else [])
        w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({c: "" if r.get(c) is None else r[c] for c in cols})
    finally:
        if out:
            fh.close()


def cmd_run(args) -> int:
    spec = build_spec(args)
    results = bench.cli_run(spec, _refs(args.best_known))
    failed = [r for r in results if r.error]
    for r in failed:
        print(f"error: {r.instance} {r.method} seed={r.seed}: {r.error}", file=sys.stderr)
    print(f"{len(results) - len(failed)}/{len(results)} cells ok; output in {spec.out}", file=sys.stderr)
    return 1 if failed else 0


def cmd_curves(args) -> int:
    rows = bench.cli_curves(bench.load_traces(args.traces), _refs(args.best_known), args.filter)
    _write_rows(rows, args.out, ["method", "iteration", "mean_ratio", "n_instances"])
    return 0


def cmd_rank(args) -> int:
    records = bench.load_traces(args.traces)
    refs = _refs(args.best_known)
    if args.compare:
        counts = bench.ablation_counts(records, refs, *args.compare, factor=args.factor, at_call=args.at_call)
        cols = ["method_a", "method_b", "factor", "better", "equal", "worse", "better_scaled", "worse_scaled", "total"]
        _write_rows([counts], args.out, cols)
    else:
        _write_rows(bench.cli_rank(records, refs, args.primary, args.at_call), args.out)
    return 0


def cmd_topology(args) -> int:
    if args.family == "pegasus":
        mask = pegasus_mask(int(args.size))
    elif args.family == "chimera":
        spec = TopologySpec.parse(f"chimera:{args.size}")
        if spec.size is None:
            raise ValueError("chimera dump needs --size R,C,S")
        mask = chimera_mask(*spec.size, spec.shore)
    else:
        mask = complete_mask(int(args.size))
    if args.format == "json":
        print(json.dumps({"label": mask.label, "n": mask.n, "edges": mask.edges.tolist()}))
    else:
        sys.stdout.write("\n".join(edgelist_lines(mask)) + "\n")
    return 0


def cmd_instance(args) -> int:
    print(json.dumps(model_to_dict(reg_instance(args.n).model)))
    return 0


def cmd_oracle(args) -> int:
    s, e = reg_ground_state(args.n)
    print(json.dumps({"instance": f"reg:{args.n}", "energy": e, "k": int((s < 0).sum()), "spins": s.astype(int).tolist()}))
    return 0


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qsplit", description="Hardware-mask splitting heuristics for Ising problems.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run methods on instances and record traces")
    r.add_argument("instances", nargs="+", help="reg:N, reg:A..B[:STEP], edge-list files or directories")
    r.add_argument("--method", nargs="+", default=["splitting"], choices=bench.METHODS)
    r.add_argument("--topology", help="pegasus[:M] | chimera[:R,C,S] | complete | empty")
    r.add_argument("--maxiter", type=int, help="outer iterations (splitting) or solver calls (others)")
    r.add_argument("--maxsubiter", type=int)
    r.add_argument("--lambda-mode", nargs="+", help="scan | fixed:<v> | monotone | zero (several allowed)")
    r.add_argument("--m", type=int, help="LNLS subproblem size")
    r.add_argument("--k", type=int, help="k-Opt neighborhood radius (1 or 2)")
    r.add_argument("--seeds", nargs="+", help="e.g. 0 1 2, 0,1,2 or 0..4")
    r.add_argument("--budget", type=int, help="cap on solver calls per cell")
    r.add_argument("--reads", type=int, help="annealing reads per solver call")
    r.add_argument("--sweeps", type=int, help="annealing sweeps per read")
    r.add_argument("--filter", help="keep Reg sizes matching e.g. '>150'")
    r.add_argument("--config", help="TOML file overriding the packaged defaults")
    r.add_argument("--best-known", help="CSV of name,value best-known cuts")
    r.add_argument("--out", default="out")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("curves", help="mean approximation ratio per solver call")
    c.add_argument("traces", nargs="+", help="trace.csv files or run directories")
    c.add_argument("--best-known")
    c.add_argument("--filter", help="instance size filter, e.g. '>150'")
    c.add_argument("--out")
    c.set_defaults(func=cmd_curves)

    k = sub.add_parser("rank", help="per-instance final ratios or ablation counts")
    k.add_argument("traces", nargs="+")
    k.add_argument("--best-known")
    k.add_argument("--primary", default="splitting", help="method whose ratio orders the rows")
    k.add_argument("--compare", nargs=2, metavar=("A", "B"), help="emit better/equal/worse counts of A against B")
    k.add_argument("--factor", type=float, default=1.001)
    k.add_argument("--at-call", type=int)
    k.add_argument("--out")
    k.set_defaults(func=cmd_rank)

    t = sub.add_parser("topology", help="hardware graphs")
    tsub = t.add_subparsers(dest="action", required=True)
    td = tsub.add_parser("dump")
    td.add_argument("--family", choices=["pegasus", "chimera", "complete"], required=True)
    td.add_argument("--size", required=True, help="M for pegasus, R,C,S for chimera, n for complete")
    td.add_argument("--format", choices=["edgelist", "json"], default="edgelist")
    td.set_defaults(func=cmd_topology)

    i = sub.add_parser("instance", help="instance generators")
    isub = i.add_subparsers(dest="action", required=True)
    ig = isub.add_parser("gen")
    igsub = ig.add_subparsers(dest="family", required=True)
    ireg = igsub.add_parser("reg", help="Reg spin glass as a JSON model")
    ireg.add_argument("--n", type=int, required=True)
    ireg.set_defaults(func=cmd_instance)

    o = sub.add_parser("oracle", help="exact reference values")
    osub = o.add_subparsers(dest="family", required=True)
    oreg = osub.add_parser("reg", help="Reg ground state")
    oreg.add_argument("--n", type=int, required=True)
    oreg.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"qsplit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
