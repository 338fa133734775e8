"""Command line interface.

Subcommands: classify, w, leaf, fills, distance, report, fixtures.
Deterministic output; ``--json`` prints the full report to stdout, and
``--out DIR`` writes it to a file as well.  Exit status 0 covers honest
verdicts including Unknown; nonzero means a usage or input error.
"""

from __future__ import annotations

import argparse
import pathlib
import sys

from .classify import (_coordinate_splittings, _power_map,
                       bounded_path_witness, classify)
from .config import load_config
from .errors import (BudgetExhausted, FixtureInvalid, InvalidInput,
                     NotApplicable, NumericalTolerance)
from .fixtures import fixture, fixture_names
from .graphs import parse_marked_graph, strata
from .laminations import lamination_approx
from .pairs import one_edge_splitting
from .reports import dump_report, make_report
from .whitehead import fills
from .wproj import (build_context, default_m_samples, displacement_table,
                    divergence_check, estimate_M, w_of)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--fixture", help="catalog fixture name")
    p.add_argument("--input", help="graph/map file in the text format")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--power", type=int, default=None)
    p.add_argument("--seg-len", type=int, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--out", help="directory for the JSON report")
    p.add_argument("--json", action="store_true", help="print JSON to stdout")


def _load_cfg(args):
    cfg = load_config(args.config) if args.config else load_config()
    over = {}
    if args.seg_len:
        over["seg_len"] = args.seg_len
    if args.horizon:
        over["horizon_fwd"] = args.horizon
        over["horizon_bwd"] = args.horizon
    if args.budget:
        over["outer_budget"] = args.budget
    return cfg.with_overrides(**over) if over else cfg


def _load_spec(args, cfg):
    if args.fixture:
        return fixture(args.fixture, cfg=cfg)
    if args.input:
        text = pathlib.Path(args.input).read_text(encoding="utf-8")
        mg, endo, _ = parse_marked_graph(text)
        if endo is None:
            raise InvalidInput("input file carries no MAP section")
        from .fixtures import ExampleSpec

        return ExampleSpec(pathlib.Path(args.input).stem, mg, {"f": endo}, None)
    raise InvalidInput("provide --fixture NAME or --input FILE")


def _emit(args, report: dict, human: str) -> int:
    text = dump_report(report)
    if args.out:
        out = pathlib.Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        name = f"{report['command']}-{report['parameters'].get('name', 'input')}.json"
        (out / name).write_text(text, encoding="utf-8")
    if args.json:
        sys.stdout.write(text)
    else:
        print(human)
    return 0


def cmd_classify(args) -> int:
    cfg = _load_cfg(args)
    spec = _load_spec(args, cfg)
    result = classify(spec, cfg, power=args.power)
    report = make_report("classify", {"name": spec.name, "power": result.power},
                         result.to_json(), verdict=result.verdict)
    human = f"{spec.name}: {result.verdict}"
    if result.stage:
        human += f" (stage: {result.stage})"
    return _emit(args, report, human)


def cmd_w(args) -> int:
    cfg = _load_cfg(args)
    spec = _load_spec(args, cfg)
    ctx = build_context(spec.mg, spec.f, spec.maps.get("f_inv"), cfg)
    word = spec.mg.graph.parse_path(args.word.split())
    cls = spec.mg.path_to_rose(word)
    res = w_of(ctx, cls)
    report = make_report(
        "w", {"name": spec.name, "class": args.word},
        {"status": res.status, "value": res.value,
         "forward_entry": res.fwd_entry})
    human = f"w([{args.word}]) = {res.value}" if res.defined \
        else f"w([{args.word}]): {res.status}"
    return _emit(args, report, human)


def cmd_leaf(args) -> int:
    cfg = _load_cfg(args)
    spec = _load_spec(args, cfg)
    filt = strata(spec.f, cfg)
    eg = filt.eg_strata()
    if not eg:
        raise InvalidInput("map has no exponential stratum")
    idx = eg[args.stratum] if args.stratum < len(eg) else eg[0]
    lam = lamination_approx(spec.mg, spec.f, idx, cfg, filt)
    segs = {k: spec.mg.graph.print_path(s) for k, s in
            enumerate(lam.segments[: args.depth + 1])}
    report = make_report(
        "leaf", {"name": spec.name, "stratum": idx, "depth": args.depth},
        {"seed": spec.mg.graph.edge_names[lam.seed],
         "segments": segs, "lengths": [len(s) for s in lam.segments]})
    human = "\n".join(f"depth {k}: {v if len(v) < 120 else v[:117] + '...'}"
                      for k, v in segs.items())
    return _emit(args, report, human)


def cmd_fills(args) -> int:
    cfg = _load_cfg(args)
    spec = _load_spec(args, cfg)
    classes = []
    for token_word in args.classes:
        path = spec.mg.graph.parse_path(token_word.split())
        classes.append(spec.mg.circuit_to_rose_class(path))
    verdict = fills(classes, spec.mg.rank, cfg)
    report = make_report("fills", {"name": spec.name, "classes": args.classes},
                         verdict.to_json(spec.mg.rank), verdict=verdict.kind)
    return _emit(args, report, f"fills: {verdict.kind}")


def cmd_distance(args) -> int:
    cfg = _load_cfg(args)
    spec = _load_spec(args, cfg)
    if not spec.decomposition:
        raise InvalidInput("distance command needs a fixture with "
                           "decomposition data")
    chain = bounded_path_witness(spec, args.k, cfg)
    report = make_report(
        "distance", {"name": spec.name, "k": args.k},
        {"bound": len([a for a in chain.arrows if a["move"] == "collapse"]),
         "chain": chain.to_json()})
    return _emit(args, report,
                 f"distance(<G,J3>, <G,J3>^(f^{args.k})) <= 4 (chain verified)")


def cmd_report(args) -> int:
    cfg = _load_cfg(args)
    spec = _load_spec(args, cfg)
    result = classify(spec, cfg, power=args.power)
    results = {"classification": result.to_json()}
    if result.verdict == "Loxodromic":
        ctx = build_context(spec.mg, _power_map(spec.f, result.power),
                            spec.maps.get("f_inv"), cfg)
        splittings = _coordinate_splittings(spec.mg)
        estimate_M(ctx, default_m_samples(ctx, splittings[:2]))
        results["m_hat"] = ctx.m_hat
        results["displacement"] = displacement_table(ctx, splittings[0], 4)
        if "psi" in spec.maps:
            results["divergence"] = divergence_check(
                ctx, spec.mg.induced_rose_map(spec.maps["psi"]),
                one_edge_splitting(spec.mg, spec.params["splitting_h"]))
    report = make_report("report", {"name": spec.name}, results,
                         verdict=result.verdict)
    return _emit(args, report, f"{spec.name}: {result.verdict} (full report)")


def cmd_fixtures(args) -> int:
    names = fixture_names()
    report = make_report("fixtures", {"name": "catalog"}, {"names": names})
    return _emit(args, report, "\n".join(names))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="freesplit",
        description="outer automorphisms acting on free splittings: "
                    "classification with machine-checkable witnesses")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="run the trichotomy classifier")
    _common(p)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("w", help="orbit phase of a conjugacy class")
    _common(p)
    p.add_argument("--word", required=True, help="edge tokens, e.g. 'A B'ate'")
    p.set_defaults(fn=cmd_w)

    p = sub.add_parser("leaf", help="print leaf segments of a lamination")
    _common(p)
    p.add_argument("--stratum", type=int, default=0)
    p.add_argument("--depth", type=int, default=3)
    p.set_defaults(fn=cmd_leaf)

    p = sub.add_parser("fills", help="free factor support verdict for classes")
    _common(p)
    p.add_argument("--classes", nargs="+", required=True,
                   help="each class as quoted edge tokens")
    p.set_defaults(fn=cmd_fills)

    p = sub.add_parser("distance", help="verified chain bound for a fixture")
    _common(p)
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(fn=cmd_distance)

    p = sub.add_parser("report", help="classification plus tables")
    _common(p)
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("fixtures", help="list the fixture catalog")
    p.add_argument("--list", action="store_true")
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_fixtures)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (InvalidInput, FixtureInvalid) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BudgetExhausted, NumericalTolerance, NotApplicable) as exc:
        print(f"budget: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
