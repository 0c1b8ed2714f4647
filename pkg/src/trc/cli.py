"""Command-line entry point (``trc``).

Exit codes: 0 success, 1 experiment bounds violated, 2 invalid input,
3 numerical failure, 4 not converged.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import io
from .errors import NotConverged, NumericalFailure, TRCError
from .experiments import format_summary, load_spec, run_experiment, violations, write_jsonl
from .generators import random_complete_bn, random_kappa_bfg
from .markov import moralize
from .markov import to_dot as moral_dot
from .model import Evidence, validate_network
from .oracle import compare_report, exact_marginals, format_kl_columns
from .propagate import EngineConfig, TRCConfig, build_regions, trc_run
from .propagate.pipeline import factorize_for_trc
from .regions import format_level_report, table2_report
from .regions import to_dot as region_dot
from .rgbf import audit_equivalence, format_audit

EXIT_OK, EXIT_BOUNDS, EXIT_INVALID, EXIT_NUMERICAL, EXIT_NOT_CONVERGED = 0, 1, 2, 3, 4


def _emit(text, path=None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _evidence(args, net):
    ev = Evidence({})
    if getattr(args, "evidence", None):
        ev = io.read_evidence(args.evidence, net)
    if getattr(args, "observe", None):
        extra = io.loads_evidence(" ".join(args.observe), net)
        ev = Evidence({**ev.assignments, **extra.assignments})
    ev.check(net)
    return ev


def _trc_config(args) -> TRCConfig:
    eng = EngineConfig(epsilon=args.epsilon, damping=args.damping,
                       max_outer_iterations=args.max_iterations, strict=args.strict)
    return TRCConfig(rgbf=not args.no_rgbf, seed=args.seed, placement=args.placement,
                     factorize=args.factorize, engine_cfg=eng)


def cmd_validate(args):
    net = io.read_model(args.model)
    rep = validate_network(net)
    if rep.ok:
        print(f"{net.name}: ok ({len(net)} variables, {len(net.edges)} edges)")
        return EXIT_OK
    for v in rep.violations:
        print(f"violation: {v}")
    return EXIT_INVALID


def cmd_factorize(args):
    net = io.read_model(args.model)
    validate_network(net).raise_if_invalid()
    bfg, meta = factorize_for_trc(net, args.mode)
    io.write_model(bfg, args.output)
    io.write_metadata(meta, args.meta or f"{args.output}.meta")
    inter = sum(v.kind == "intermediate" for v in bfg.variables)
    print(f"{bfg.name}: {len(bfg)} nodes ({inter} intermediate) -> {args.output}")
    return EXIT_OK


def cmd_moralize(args):
    net = io.read_model(args.model)
    validate_network(net).raise_if_invalid()
    bfg, _ = factorize_for_trc(net, args.factorize)
    fs = moralize(bfg)
    if args.dot:
        _emit(moral_dot(fs), args.output)
    else:
        pairs = sorted({tuple(sorted((a, b))) for f in fs.factors for a in f.scope for b in f.scope if a < b})
        lines = [f"{a} -- {b}{'  (moral)' if fs.is_moral(a, b) else ''}" for a, b in pairs]
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_regions(args):
    net = io.read_model(args.model)
    built = build_regions(net, TRCConfig(rgbf=args.rgbf, factorize=args.factorize, placement=args.placement,
                                         seed=args.seed))
    rg = built.rg
    out = []
    if args.list_outer:
        for lab, kind in zip(built.outer.labels, built.outer.kinds):
            out.append(f"{kind:<12} {' '.join(lab)}")
    if args.report or not (args.list_outer or args.dot):
        n = len(built.bfg.originals)
        out.append(format_level_report(table2_report(built.rg_cvm, n)))
        out.append(f"regions {len(rg.regions)}  edges {len(rg.edges)}  entries {rg.size_entries()}  "
                   f"sum of counting numbers {sum(rg.counts)}")
        if args.rgbf:
            out.append(format_audit(audit_equivalence(built.rg_cvm, rg)))
    if args.dot:
        out.append(region_dot(rg).rstrip("\n"))
    _emit("\n".join(out) + "\n", args.output)
    return EXIT_OK


def _approx(args, net, ev):
    if args.method == "exact":
        return exact_marginals(net, ev.assignments)
    cfg = _trc_config(args)
    cfg.engine = args.method.removeprefix("trc-")
    return trc_run(net, ev.assignments, cfg)


def cmd_infer(args):
    net = io.read_model(args.model)
    ev = _evidence(args, net)
    rep = _approx(args, net, ev)
    _emit(rep.to_text())
    if args.jsonl:
        _emit(rep.to_jsonl(), args.jsonl)
    return EXIT_OK if rep.converged else EXIT_NOT_CONVERGED


def cmd_compare(args):
    net = io.read_model(args.model)
    ev = _evidence(args, net)
    exact = exact_marginals(net, ev.assignments)
    approx = _approx(args, net, ev)
    approx.marginals = {v: approx.marginals[v] for v in exact.marginals}
    cmp = compare_report(approx, exact, label=f"{net.name} {args.method}")
    lines = [f"{'variable':<10}{'exact mean':>12}{'approx mean':>13}{'KL':>12}"]
    em, am = exact.means, approx.means
    for v in exact.marginals:
        lines.append(f"{v:<10}{em[v]:>12.4f}{am[v]:>13.4f}{cmp.kl[v]:>12.3e}")
    _emit("\n".join(lines) + "\n\n" + format_kl_columns([(args.method, cmp)]))
    if args.jsonl:
        _emit(approx.to_jsonl(cmp.kl), args.jsonl)
    return EXIT_OK if approx.converged else EXIT_NOT_CONVERGED


def cmd_gen_random(args):
    make = random_kappa_bfg if args.kappa else random_complete_bn
    net = make(args.n, args.m, args.seed)
    if args.output:
        io.write_model(net, args.output)
        print(f"{net.name}: {len(net)} nodes -> {args.output}")
    else:
        sys.stdout.write(io.dumps_model(net))
    return EXIT_OK


def cmd_run_experiment(args):
    spec = load_spec(args.spec)
    if args.workers:
        spec.workers = args.workers
    results = run_experiment(spec)
    text = format_summary(results)
    bad = violations(results, spec.bounds)
    if bad:
        text += "\nbound violations:\n" + "".join(f"  {b}\n" for b in bad)
    _emit(text, args.text)
    if args.text:
        sys.stdout.write(text)
    if args.output:
        write_jsonl(results, args.output)
    return EXIT_BOUNDS if bad else EXIT_OK


def _engine_flags(p):
    p.add_argument("--method", default="trc-cccp", choices=["trc-cccp", "trc-gbp", "exact"])
    p.add_argument("--epsilon", type=float, default=1e-5, help="outer convergence threshold")
    p.add_argument("--no-rgbf", action="store_true", help="skip the RGBF transform")
    p.add_argument("--seed", type=int, default=0, help="seed for random RGBF placement")
    p.add_argument("--placement", default="back", choices=["front", "back", "random"])
    p.add_argument("--damping", type=float, default=0.5, help="GBP message damping")
    p.add_argument("--max-iterations", type=int, default=2000)
    p.add_argument("--factorize", default="auto", choices=["auto", "kappa", "binary", "none"])
    p.add_argument("--strict", action="store_true", help="fail (exit 4) instead of reporting non-convergence")
    p.add_argument("--evidence", help="evidence file of name=state lines")
    p.add_argument("--observe", nargs="*", metavar="NAME=STATE", help="evidence on the command line")
    p.add_argument("--jsonl", help="also write line-delimited records here")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="trc", description="Triplet region construction inference for discrete BNs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model file")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("factorize", help="write the binary factorized graph and its metadata sidecar")
    p.add_argument("model")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--meta", help="sidecar path (default OUTPUT.meta)")
    p.add_argument("--mode", default="auto", choices=["auto", "kappa", "binary", "none"])
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("moralize", help="moral graph of the factorized model")
    p.add_argument("model")
    p.add_argument("--dot", action="store_true", help="Graphviz output, moral edges dashed")
    p.add_argument("--factorize", default="auto", choices=["auto", "kappa", "binary", "none"])
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_moralize)

    p = sub.add_parser("regions", help="region graph report, outer regions or DOT export")
    p.add_argument("model")
    p.add_argument("--report", action="store_true", help="per-level table and property checks (default)")
    p.add_argument("--list-outer", action="store_true")
    p.add_argument("--rgbf", action="store_true", help="apply the RGBF transform first")
    p.add_argument("--dot", action="store_true")
    p.add_argument("--placement", default="back", choices=["front", "back", "random"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--factorize", default="auto", choices=["auto", "kappa", "binary", "none"])
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("infer", help="posterior marginals")
    p.add_argument("model")
    _engine_flags(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("compare", help="approximate vs exact marginals with KL summary")
    p.add_argument("model")
    _engine_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gen-random", help="random complete BN (or kappa_n BFG) in the model format")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("seed", type=int)
    p.add_argument("--kappa", action="store_true", help="kappa_n-shaped BFG instead of a complete BN")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen_random)

    p = sub.add_parser("run-experiment", help="run a JSON experiment matrix")
    p.add_argument("spec")
    p.add_argument("-o", "--output", help="line-delimited JSON records")
    p.add_argument("--text", help="write the summary table here as well")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_run_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NotConverged as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except NumericalFailure as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (TRCError, OSError, json.JSONDecodeError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
