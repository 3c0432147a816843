"""Unified command line: one binary, per-module subcommands, JSON envelopes.

Every invocation emits an envelope {tool_version, command, config, seed,
result}; identical (config, seed) pairs produce byte-identical envelopes, so
wall-clock timing is only included when --timing asks for it.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import ca, machines, preimage
from .causal import (
    DegenerateWindowError,
    Schedule,
    SpaceGraph,
    build_causal_network,
    causal_invariance_test,
    check_overlap_freedom,
    estimate_dimension,
)
from .causal.rules import rules_from_json
from .games import (
    chsh_classical_optimum,
    chsh_quantum,
    ghz_classical_exhaustive,
    ghz_quantum,
    lhv_bound_theorem_check,
    marginal_invariance_check,
    order_robustness_check,
    protocol_from_json,
)

ENVELOPE_SCHEMA = {
    "type": "object",
    "required": ["tool_version", "command", "config", "seed", "result"],
    "properties": {
        "tool_version": {"type": "string"},
        "command": {"type": "string"},
        "config": {"type": "object"},
        "seed": {"type": "integer"},
        "result": {"type": ["object", "array", "number", "string", "boolean", "null"]},
        "wall_time_s": {"type": "number"},
    },
    "additionalProperties": False,
}


def rational(value: Fraction) -> dict:
    """Exact p/q string with a float alongside."""
    return {"exact": f"{value.numerator}/{value.denominator}", "value": float(value)}


def _parse_init(spec: str, width: int, seed: int, boundary: str) -> ca.Configuration:
    if spec == "single":
        return ca.Configuration.single(width, boundary)
    if spec == "random":
        return ca.Configuration.random(width, seed, boundary)
    if set(spec) <= {"0", "1"} and spec:
        if len(spec) != width:
            raise ValueError(f"init bitstring has {len(spec)} cells, width is {width}")
        return ca.Configuration.from_bitstring(spec, boundary)
    raise ValueError(f"init must be single, random, or a bitstring, got {spec!r}")


# -- subcommand handlers ----------------------------------------------------

def _cmd_ca_run(args: argparse.Namespace) -> dict:
    rule = ca.rule_table_from_number(args.rule)
    init = _parse_init(args.init, args.width, args.seed, args.boundary)
    diagram = ca.evolve(init, rule, args.steps)
    args._diagram = diagram
    return {
        "rule": args.rule,
        "width": args.width,
        "steps": args.steps,
        "boundary": args.boundary,
        "rows": ca.rows_as_bitstrings(diagram),
    }


def _cmd_preimage_solve(args: argparse.Namespace) -> dict:
    problem = preimage.InitProblem(
        ending=ca.Configuration.from_bitstring(args.ending),
        steps=args.steps,
        predicate=preimage.Predicate.parse(args.predicate),
        bound=args.bound,
        rule=ca.rule_table_from_number(args.rule),
    )
    outcome = preimage.solve_init(problem)
    return {
        "kind": outcome.kind,
        "initial": outcome.initial.to_bitstring() if outcome.initial else None,
        "predecessors_examined": outcome.predecessors_examined,
        "work": outcome.work,
    }


def _cmd_preimage_stats(args: argparse.Namespace) -> dict:
    rule = ca.rule_table_from_number(args.rule)
    if args.mode == "exhaustive":
        stats = preimage.predecessor_count_stats(
            args.width, args.steps, rule, "exhaustive", threshold=args.threshold
        )
    else:
        parts = args.mode.split(":")
        if len(parts) != 3 or parts[0] != "sample":
            raise ValueError("mode must be exhaustive or sample:<count>:<seed>")
        stats = preimage.predecessor_count_stats(
            args.width,
            args.steps,
            rule,
            "sampled",
            threshold=args.threshold,
            sample_count=int(parts[1]),
            seed=int(parts[2]),
        )
    return {
        "mean": rational(stats.mean),
        "max": stats.max_count,
        "fraction_exceeding": rational(stats.fraction_exceeding),
        "abort_fraction": rational(stats.abort_fraction),
        "threshold": stats.threshold,
        "endings_observed": stats.endings_observed,
    }


def _cmd_tm_bb(args: argparse.Namespace) -> dict:
    result = machines.busy_beaver_search(
        args.states, args.symbols, args.cap, canonical=args.canonical
    )
    return {
        "max_steps": result.max_steps,
        "halting_count": result.halting_count,
        "undecided_count": result.undecided_count,
        "machines_examined": result.machines_examined,
        "champion": result.champion.to_json_rows() if result.champion else None,
    }


def _cmd_tm_run(args: argparse.Namespace) -> dict:
    rows = json.loads(Path(args.machine).read_text())
    machine = machines.TuringMachine.from_json_rows(rows)
    result = machines.run_tm(machine, args.cap)
    return {
        "status": result.status,
        "steps_executed": result.steps_executed,
        "tape_nonzero": result.tape_nonzero,
    }


def _cmd_tag_run(args: argparse.Namespace) -> dict:
    data = json.loads(Path(args.system).read_text())
    system = machines.CyclicTagSystem(tuple(data["appendants"]))
    trace = machines.run_cyclic_tag(
        system, args.word, args.steps, max_word_length=args.max_word_length
    )
    return {
        "trace": trace,
        "halted": bool(trace and trace[-1] == "" or args.word == ""),
        "steps_executed": len(trace) - 1,
    }


def _parse_schedule(spec: str) -> Schedule:
    if spec == "fixed":
        return Schedule("fixed")
    if spec.startswith("random:"):
        return Schedule("random", seed=int(spec.split(":", 1)[1]))
    raise ValueError(f"schedule must be fixed or random:<seed>, got {spec!r}")


def _cmd_causal_build(args: argparse.Namespace) -> dict:
    graph = SpaceGraph.from_json(Path(args.graph).read_text())
    rules = rules_from_json(Path(args.rules).read_text())
    schedule = _parse_schedule(args.schedule)
    final, network = build_causal_network(graph, rules, schedule, args.steps)
    return {
        "events": json.loads(network.to_json())["events"],
        "dependencies": sorted(list(p) for p in network.edges),
        "final_graph": {
            "vertices": len(final.vertices),
            "edges": len(final.edges),
        },
        "schedule": schedule.describe(),
    }


def _cmd_causal_check(args: argparse.Namespace) -> dict:
    rules = rules_from_json(Path(args.rules).read_text())
    report = check_overlap_freedom(rules)
    witness = None
    if report.witness is not None:
        witness = {
            "rule_a": report.witness.rule_a,
            "rule_b": report.witness.rule_b,
            "glued": [list(p) for p in report.witness.glued],
            "amalgam_vertices": report.witness.amalgam_vertices,
            "amalgam_edges": [list(e) for e in report.witness.amalgam_edges],
        }
    return {"overlap_free": report.overlap_free, "witness": witness}


def _cmd_causal_invariance(args: argparse.Namespace) -> dict:
    graph = SpaceGraph.from_json(Path(args.graph).read_text())
    rules = rules_from_json(Path(args.rules).read_text())
    seeds = [args.seed + i for i in range(args.samples)]
    verdict = causal_invariance_test(graph, rules, args.steps, sample_seeds=seeds)
    witness = None
    if verdict.witness is not None:
        witness = [verdict.witness[0].describe(), verdict.witness[1].describe()]
    return {
        "invariant_over_sample": verdict.invariant_over_sample,
        "schedules_compared": verdict.schedules_compared,
        "witness": witness,
    }


def _cmd_causal_dimension(args: argparse.Namespace) -> dict:
    graph = SpaceGraph.from_json(Path(args.graph).read_text())
    estimate = estimate_dimension(
        graph, args.centers, args.rmin, args.rmax, seed=args.seed
    )
    return {
        "dimension": estimate.dimension,
        "residual": estimate.residual,
        "radii": list(estimate.radii),
        "mean_ball_sizes": list(estimate.mean_ball_sizes),
        "centers": list(estimate.centers),
    }


def _cmd_games_chsh(args: argparse.Namespace) -> dict:
    a1, b1 = args.angles
    result = chsh_quantum(a1, b1)
    success: dict = {"value": result.success}
    if (a1, b1) == (math.pi / 8, -math.pi / 8):
        success["exact"] = "(5+sqrt(2))/8"
    return {
        "success": success,
        "per_input": list(result.per_input),
        "angles": [a1, b1],
    }


def _cmd_games_ghz(args: argparse.Namespace) -> dict:
    per_input = ghz_quantum()
    return {
        "per_input": {
            "".join(map(str, x)): value for x, value in per_input.items()
        }
    }


def _cmd_games_classical(args: argparse.Namespace) -> dict:
    if args.game == "chsh":
        best, winners = chsh_classical_optimum()
        return {
            "optimum": rational(best),
            "maximizer_count": len(winners),
            "maximizers": [[list(a), list(b)] for a, b in winners],
        }
    best, winners = ghz_classical_exhaustive()
    return {
        "max_satisfied": best,
        "out_of": 4,
        "maximizer_count": len(winners),
    }


def _cmd_games_order_check(args: argparse.Namespace) -> dict:
    protocol = protocol_from_json(Path(args.protocol).read_text())
    report = order_robustness_check(protocol)
    out = {
        "discrepancy_free": report.discrepancy_free,
        "assignments_checked": report.assignments_checked,
        "discrepancy_count": len(report.discrepancies),
        "discrepancies": [
            {
                "z": d["z"],
                "alice_first": list(d["alice_first"]),
                "bob_first": list(d["bob_first"]),
            }
            for d in report.discrepancies
        ],
        "success_alice_first": rational(report.success_alice_first),
        "success_bob_first": rational(report.success_bob_first),
    }
    if report.discrepancy_free:
        lhv = lhv_bound_theorem_check(protocol)
        out["lhv"] = {
            "success": rational(lhv.success),
            "within_classical_bound": lhv.within_classical_bound,
        }
    if protocol.hidden:
        marginals = marginal_invariance_check(protocol)
        out["marginal_tv_distances"] = {
            h: rational(d) for h, d in marginals.distances.items()
        }
    return out


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit run seed")
    common.add_argument("--out", type=str, default=None, help="output path")
    common.add_argument(
        "--format",
        choices=("json", "csv", "pgm"),
        default=None,
        help="output format (default: inferred from --out, else json)",
    )
    common.add_argument(
        "--budget-mem", type=int, default=1 << 24, help="table entry budget"
    )
    common.add_argument("--quiet", action="store_true", help="suppress stdout echo")
    common.add_argument(
        "--timing", action="store_true", help="include wall time in the envelope"
    )

    parser = argparse.ArgumentParser(
        prog="substrates",
        description="cellular automata, preimages, small machines, causal nets, games",
    )
    parser.add_argument("--version", action="version", version=__version__)
    tools = parser.add_subparsers(dest="tool", required=True)

    ca_parser = tools.add_parser("ca", help="elementary cellular automata")
    ca_sub = ca_parser.add_subparsers(dest="action", required=True)
    run = ca_sub.add_parser("run", parents=[common], help="evolve a configuration")
    run.add_argument("--rule", type=int, required=True)
    run.add_argument("--width", type=int, required=True)
    run.add_argument("--steps", type=int, required=True)
    run.add_argument("--boundary", choices=("cyclic", "zero"), default="cyclic")
    run.add_argument("--init", type=str, default="single")
    run.set_defaults(handler=_cmd_ca_run, command="ca run")

    pre = tools.add_parser("preimage", help="ancestor and preimage algorithms")
    pre_sub = pre.add_subparsers(dest="action", required=True)
    solve = pre_sub.add_parser("solve", parents=[common])
    solve.add_argument("--rule", type=int, default=110)
    solve.add_argument("--ending", type=str, required=True)
    solve.add_argument("--steps", type=int, required=True)
    solve.add_argument("--bound", type=int, required=True)
    solve.add_argument("--predicate", type=str, default="always_true")
    solve.set_defaults(handler=_cmd_preimage_solve, command="preimage solve")
    stats = pre_sub.add_parser("stats", parents=[common])
    stats.add_argument("--rule", type=int, default=110)
    stats.add_argument("--width", type=int, required=True)
    stats.add_argument("--steps", type=int, required=True)
    stats.add_argument("--mode", type=str, default="exhaustive")
    stats.add_argument("--threshold", type=int, default=10)
    stats.set_defaults(handler=_cmd_preimage_stats, command="preimage stats")

    tm = tools.add_parser("tm", help="small Turing machines")
    tm_sub = tm.add_subparsers(dest="action", required=True)
    bb = tm_sub.add_parser("bb", parents=[common], help="busy beaver search")
    bb.add_argument("--states", type=int, required=True)
    bb.add_argument("--symbols", type=int, required=True)
    bb.add_argument("--cap", type=int, default=10_000)
    bb.add_argument("--canonical", action="store_true")
    bb.set_defaults(handler=_cmd_tm_bb, command="tm bb")
    tm_run = tm_sub.add_parser("run", parents=[common])
    tm_run.add_argument("--machine", type=str, required=True)
    tm_run.add_argument("--cap", type=int, default=1_000_000)
    tm_run.set_defaults(handler=_cmd_tm_run, command="tm run")

    tag = tools.add_parser("tag", help="cyclic tag systems")
    tag_sub = tag.add_subparsers(dest="action", required=True)
    tag_run = tag_sub.add_parser("run", parents=[common])
    tag_run.add_argument("--system", type=str, required=True)
    tag_run.add_argument("--word", type=str, required=True)
    tag_run.add_argument("--steps", type=int, required=True)
    tag_run.add_argument("--max-word-length", type=int, default=1_000_000)
    tag_run.set_defaults(handler=_cmd_tag_run, command="tag run")

    causal = tools.add_parser("causal", help="graph rewriting and causal networks")
    causal_sub = causal.add_subparsers(dest="action", required=True)
    build = causal_sub.add_parser("build", parents=[common])
    build.add_argument("--graph", type=str, required=True)
    build.add_argument("--rules", type=str, required=True)
    build.add_argument("--schedule", type=str, default="fixed")
    build.add_argument("--steps", type=int, required=True)
    build.set_defaults(handler=_cmd_causal_build, command="causal build")
    check = causal_sub.add_parser("check", parents=[common])
    check.add_argument("--rules", type=str, required=True)
    check.set_defaults(handler=_cmd_causal_check, command="causal check")
    inv = causal_sub.add_parser("invariance", parents=[common])
    inv.add_argument("--graph", type=str, required=True)
    inv.add_argument("--rules", type=str, required=True)
    inv.add_argument("--steps", type=int, required=True)
    inv.add_argument("--samples", type=int, default=8)
    inv.set_defaults(handler=_cmd_causal_invariance, command="causal invariance")
    dim = causal_sub.add_parser("dimension", parents=[common])
    dim.add_argument("--graph", type=str, required=True)
    dim.add_argument("--rmin", type=int, required=True)
    dim.add_argument("--rmax", type=int, required=True)
    dim.add_argument("--centers", type=int, default=5)
    dim.set_defaults(handler=_cmd_causal_dimension, command="causal dimension")

    games = tools.add_parser("games", help="CHSH and GHZ nonlocal games")
    games_sub = games.add_subparsers(dest="action", required=True)
    chsh = games_sub.add_parser("chsh", parents=[common])
    chsh.add_argument(
        "--angles",
        type=float,
        nargs=2,
        default=(math.pi / 8, -math.pi / 8),
        metavar=("A1", "B1"),
    )
    chsh.set_defaults(handler=_cmd_games_chsh, command="games chsh")
    ghz = games_sub.add_parser("ghz", parents=[common])
    ghz.set_defaults(handler=_cmd_games_ghz, command="games ghz")
    classical = games_sub.add_parser("classical", parents=[common])
    classical.add_argument("--game", choices=("chsh", "ghz"), required=True)
    classical.set_defaults(handler=_cmd_games_classical, command="games classical")
    order = games_sub.add_parser("order-check", parents=[common])
    order.add_argument("--protocol", type=str, required=True)
    order.set_defaults(handler=_cmd_games_order_check, command="games order-check")

    return parser


def _config_dict(args: argparse.Namespace) -> dict:
    skip = {"handler", "command", "tool", "action", "seed", "out", "quiet", "timing"}
    config = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or key.startswith("_"):
            continue
        if isinstance(value, tuple):
            value = list(value)
        config[key] = value
    return config


def _flatten(prefix: str, value, rows: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], rows)
    elif isinstance(value, (list, tuple)):
        for i, item in enumerate(value):
            _flatten(f"{prefix}[{i}]", item, rows)
    else:
        rows.append((prefix, json.dumps(value)))


def _to_csv(result: dict) -> str:
    rows: list[tuple[str, str]] = []
    _flatten("", result, rows)
    return "\n".join(f"{key},{value}" for key, value in rows) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = args.format
    if fmt is None and args.out:
        suffix = Path(args.out).suffix.lower()
        fmt = {".pgm": "pgm", ".pbm": "pgm", ".csv": "csv"}.get(suffix, "json")
    if fmt is None:
        fmt = "json"
    start = time.perf_counter()
    try:
        result = args.handler(args)
    except (
        ValueError,
        KeyError,
        OSError,
        preimage.BudgetExceededError,
        preimage.LimitExceededError,
        machines.EnumerationBudgetError,
        machines.WordLengthExceededError,
        DegenerateWindowError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    envelope = {
        "tool_version": __version__,
        "command": args.command,
        "config": _config_dict(args),
        "seed": args.seed,
        "result": result,
    }
    if args.timing:
        envelope["wall_time_s"] = time.perf_counter() - start
    _validate_envelope(envelope)
    payload = json.dumps(envelope, indent=2, sort_keys=True) + "\n"
    if fmt == "pgm":
        diagram = getattr(args, "_diagram", None)
        if diagram is None:
            print("error: pgm output only applies to ca run", file=sys.stderr)
            return 1
        data = ca.to_pbm(diagram)
        if args.out:
            Path(args.out).write_bytes(data)
            if not args.quiet:
                sys.stdout.write(payload)
        else:
            sys.stdout.buffer.write(data)
        return 0
    if fmt == "csv":
        text = _to_csv(result)
        if args.out:
            Path(args.out).write_text(text)
            if not args.quiet:
                sys.stdout.write(payload)
        else:
            sys.stdout.write(text)
        return 0
    if args.out:
        Path(args.out).write_text(payload)
        if not args.quiet:
            sys.stdout.write(payload)
    elif not args.quiet:
        sys.stdout.write(payload)
    return 0


def _validate_envelope(envelope: dict) -> None:
    import jsonschema

    jsonschema.validate(envelope, ENVELOPE_SCHEMA)
    # the envelope must survive a JSON round trip unchanged
    assert json.loads(json.dumps(envelope)) == envelope


if __name__ == "__main__":
    raise SystemExit(main())
