"""Order-robustness verification for deterministic two-party protocols.

A thread protocol is a program over side-tagged bit variables: Alice-side,
Bob-side, and shared-random (each party holds its own copy of the shared
bits, so reading them touches neither side).  An instruction touches the
sides of its target and of every non-shared variable it reads; an
instruction reading across sides models a long-range thread.

Two schedules are compared for every assignment Z of (x_a, x_b, shared
bits):

  (1) Alice-first: all instructions touching only Alice run first in program
      order, y_a is read off, then the rest run in program order.
  (2) Bob-first mirror.

A protocol whose outputs never differ between the two schedules induces a
local-hidden-variable strategy (each output becomes a well-defined function
of own input and shared bits), so its CHSH success is capped at 3/4.
Protocols that beat 3/4 must therefore exhibit a discrepancy witness Z.

Protocols in which an output can only be produced by an instruction
touching both sides admit neither schedule; they are flagged as straddling
events and rejected rather than analyzed.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterator, Literal

from .chsh import Strategy, chsh_success

Side = Literal["alice", "bob", "shared"]

INPUT_A = "x_a"
INPUT_B = "x_b"

_OPS: dict[str, int] = {
    "const0": 0,
    "const1": 0,
    "copy": 1,
    "not": 1,
    "xor": 2,
    "xnor": 2,
    "and": 2,
    "or": 2,
}


def _apply_op(op: str, args: tuple[int, ...]) -> int:
    if op == "const0":
        return 0
    if op == "const1":
        return 1
    if op == "copy":
        return args[0]
    if op == "not":
        return 1 - args[0]
    if op == "xor":
        return args[0] ^ args[1]
    if op == "xnor":
        return 1 - (args[0] ^ args[1])
    if op == "and":
        return args[0] & args[1]
    if op == "or":
        return args[0] | args[1]
    raise ValueError(f"unknown op {op!r}")


class StraddlingEventError(Exception):
    """A single event would have to touch both sides before an output exists.

    This is the straddling-update escape hatch: it trades away the existence
    of the two observer schedules, so it is out of scope here and rejected.
    """


@dataclass(frozen=True)
class Variable:
    name: str
    side: Side


@dataclass(frozen=True)
class Instruction:
    target: str
    op: str
    args: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.op not in _OPS:
            raise ValueError(f"unknown op {self.op!r}")
        if len(self.args) != _OPS[self.op]:
            raise ValueError(
                f"{self.op} takes {_OPS[self.op]} args, got {len(self.args)}"
            )


@dataclass(frozen=True)
class ThreadProtocol:
    variables: tuple[Variable, ...]
    program: tuple[Instruction, ...]
    output_a: str
    output_b: str
    hidden: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        sides = {v.name: v.side for v in self.variables}
        if len(sides) != len(self.variables):
            raise ValueError("duplicate variable names")
        if sides.get(INPUT_A) != "alice" or sides.get(INPUT_B) != "bob":
            raise ValueError("protocols must declare x_a (alice) and x_b (bob)")
        if sides.get(self.output_a) != "alice":
            raise ValueError("y_a must be an alice-side variable")
        if sides.get(self.output_b) != "bob":
            raise ValueError("y_b must be a bob-side variable")
        read_only = {INPUT_A, INPUT_B} | {
            v.name for v in self.variables if v.side == "shared"
        }
        for instr in self.program:
            if instr.target in read_only:
                raise ValueError(f"{instr.target} is read-only")
            if instr.target not in sides:
                raise ValueError(f"unknown target {instr.target}")
            for a in instr.args:
                if a not in sides:
                    raise ValueError(f"unknown argument {a}")
        for h in self.hidden:
            if sides.get(h) != "bob":
                raise ValueError("hidden variables live on Bob's side")

    @property
    def sides(self) -> dict[str, Side]:
        return {v.name: v.side for v in self.variables}

    @property
    def shared_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables if v.side == "shared")

    def touches(self, instr: Instruction) -> frozenset[str]:
        sides = self.sides
        touched = {sides[instr.target]}
        touched.update(sides[a] for a in instr.args)
        touched.discard("shared")
        return frozenset(touched)


def _schedule_order(
    p: ThreadProtocol, first: Side
) -> tuple[list[Instruction], list[Instruction]]:
    """Split the program into the `first` side's own instructions (program
    order) and everything else (program order)."""
    own = [i for i in p.program if p.touches(i) <= {first}]
    rest = [i for i in p.program if not (p.touches(i) <= {first})]
    return own, rest


def _check_schedules_exist(p: ThreadProtocol) -> None:
    alice_own, _ = _schedule_order(p, "alice")
    bob_own, _ = _schedule_order(p, "bob")
    if not any(i.target == p.output_a for i in alice_own):
        raise StraddlingEventError(
            "y_a is only produced by events touching Bob: no schedule outputs "
            "it before Bob is touched (straddling event, out of scope)"
        )
    if not any(i.target == p.output_b for i in bob_own):
        raise StraddlingEventError(
            "y_b is only produced by events touching Alice: no schedule "
            "outputs it before Alice is touched (straddling event, out of scope)"
        )


def _run(
    p: ThreadProtocol,
    z: dict[str, int],
    first: Side,
) -> tuple[int, int, dict[str, tuple[int, int]]]:
    """Execute under the first-side-then-rest schedule.

    Returns (early output, late output, hidden snapshots) where the early
    output is the first side's output read at the end of its own segment,
    and hidden snapshots give each hidden bit's value just before the first
    cross-side instruction and just after the last one.
    """
    env = {v.name: 0 for v in p.variables}
    env.update(z)
    own, rest = _schedule_order(p, first)
    for instr in own:
        env[instr.target] = _apply_op(instr.op, tuple(env[a] for a in instr.args))
    early = env[p.output_a if first == "alice" else p.output_b]
    cross = [i for i, instr in enumerate(rest) if p.touches(instr) == {"alice", "bob"}]
    before: dict[str, int] = {}
    after: dict[str, int] = {}
    for i, instr in enumerate(rest):
        if cross and i == cross[0]:
            before = {h: env[h] for h in p.hidden}
        env[instr.target] = _apply_op(instr.op, tuple(env[a] for a in instr.args))
        if cross and i == cross[-1]:
            after = {h: env[h] for h in p.hidden}
    if not cross:
        # no cross-side updates ever run: snapshot the settled values
        before = {h: env[h] for h in p.hidden}
        after = dict(before)
    late = env[p.output_b if first == "alice" else p.output_a]
    snapshots = {h: (before[h], after[h]) for h in p.hidden}
    return early, late, snapshots


def _assignments(p: ThreadProtocol, max_bits: int) -> Iterator[dict[str, int]]:
    names = (INPUT_A, INPUT_B) + p.shared_names
    if len(names) > max_bits:
        raise ValueError(
            f"{len(names)} assignment bits exceed the {max_bits}-bit budget"
        )
    for bits in product((0, 1), repeat=len(names)):
        yield dict(zip(names, bits))


@dataclass(frozen=True)
class OrderReport:
    discrepancies: tuple[dict, ...]
    success_alice_first: Fraction
    success_bob_first: Fraction
    assignments_checked: int

    @property
    def discrepancy_free(self) -> bool:
        return not self.discrepancies


def order_robustness_check(p: ThreadProtocol, *, max_bits: int = 24) -> OrderReport:
    """Compare outputs under the two observer schedules over every Z."""
    _check_schedules_exist(p)
    discrepancies: list[dict] = []
    wins = [0, 0]
    total = 0
    for z in _assignments(p, max_bits):
        total += 1
        ya_1, yb_1, _ = _run(p, z, "alice")
        yb_2, ya_2, _ = _run(p, z, "bob")
        target = z[INPUT_A] & z[INPUT_B]
        wins[0] += (ya_1 ^ yb_1) == target
        wins[1] += (ya_2 ^ yb_2) == target
        if (ya_1, yb_1) != (ya_2, yb_2):
            discrepancies.append(
                {
                    "z": dict(z),
                    "alice_first": (ya_1, yb_1),
                    "bob_first": (ya_2, yb_2),
                }
            )
    return OrderReport(
        tuple(discrepancies),
        Fraction(wins[0], total),
        Fraction(wins[1], total),
        total,
    )


@dataclass(frozen=True)
class LhvReport:
    strategies: tuple[tuple[Strategy, Strategy], ...]  # one pair per shared value
    success: Fraction
    within_classical_bound: bool


def lhv_bound_theorem_check(p: ThreadProtocol, *, max_bits: int = 24) -> LhvReport:
    """Build the local-hidden-variable strategy a discrepancy-free protocol
    induces and check it against the 3/4 bound.

    Discrepancy freedom makes y_a a function of (x_a, shared) alone: under
    the Alice-first schedule it is computed before anything of Bob's runs,
    and agreement between schedules extends that value to both orders.
    """
    report = order_robustness_check(p, max_bits=max_bits)
    if not report.discrepancy_free:
        raise ValueError("protocol has schedule discrepancies: no LHV reduction")
    shared = p.shared_names
    strategies: list[tuple[Strategy, Strategy]] = []
    total_success = Fraction(0)
    for shared_bits in product((0, 1), repeat=len(shared)):
        zs = dict(zip(shared, shared_bits))
        outputs: dict[tuple[int, int], tuple[int, int]] = {}
        for xa, xb in product((0, 1), repeat=2):
            z = {INPUT_A: xa, INPUT_B: xb, **zs}
            ya, yb, _ = _run(p, z, "alice")
            outputs[(xa, xb)] = (ya, yb)
        alice: Strategy = (outputs[(0, 0)][0], outputs[(1, 0)][0])
        bob: Strategy = (outputs[(0, 0)][1], outputs[(0, 1)][1])
        # the induced strategy must reproduce the protocol on every input
        for (xa, xb), (ya, yb) in outputs.items():
            if (alice[xa], bob[xb]) != (ya, yb):
                raise AssertionError(
                    "discrepancy-free protocol failed to reduce to an LHV "
                    f"strategy at shared={zs}, input=({xa},{xb})"
                )
        strategies.append((alice, bob))
        total_success += chsh_success(alice, bob)
    n_shared = 1 << len(shared)
    success = total_success / n_shared
    return LhvReport(tuple(strategies), success, success <= Fraction(3, 4))


@dataclass(frozen=True)
class MarginalReport:
    distances: dict[str, Fraction]  # per hidden bit, total variation distance


def marginal_invariance_check(p: ThreadProtocol, *, max_bits: int = 24) -> MarginalReport:
    """Total variation distance, over uniform Z, between each Bob-side hidden
    bit before and after Alice's cross-side updates (Alice-first schedule)."""
    _check_schedules_exist(p)
    totals_before = {h: 0 for h in p.hidden}
    totals_after = {h: 0 for h in p.hidden}
    count = 0
    for z in _assignments(p, max_bits):
        count += 1
        _, _, snapshots = _run(p, z, "alice")
        for h, (before, after) in snapshots.items():
            totals_before[h] += before
            totals_after[h] += after
    distances = {
        h: abs(Fraction(totals_before[h], count) - Fraction(totals_after[h], count))
        for h in p.hidden
    }
    return MarginalReport(distances)


# -- serialization -----------------------------------------------------------

def protocol_from_json(text: str) -> ThreadProtocol:
    data = json.loads(text)
    return ThreadProtocol(
        variables=tuple(
            Variable(str(v["name"]), str(v["side"])) for v in data["variables"]
        ),
        program=tuple(
            Instruction(
                str(i["target"]), str(i["op"]), tuple(str(a) for a in i.get("args", []))
            )
            for i in data["program"]
        ),
        output_a=str(data["outputs"]["y_a"]),
        output_b=str(data["outputs"]["y_b"]),
        hidden=tuple(str(h) for h in data.get("hidden", [])),
    )


def protocol_to_json(p: ThreadProtocol) -> str:
    return json.dumps(
        {
            "variables": [{"name": v.name, "side": v.side} for v in p.variables],
            "program": [
                {"target": i.target, "op": i.op, "args": list(i.args)}
                for i in p.program
            ],
            "outputs": {"y_a": p.output_a, "y_b": p.output_b},
            "hidden": list(p.hidden),
        },
        indent=2,
        sort_keys=True,
    )


# -- the bounded protocol family ------------------------------------------------

_BINARY_SLOT: tuple[tuple[str, tuple[int, ...]], ...] = (
    ("const0", ()),
    ("const1", ()),
    ("copy", (0,)),
    ("copy", (1,)),
    ("xor", (0, 1)),
    ("xnor", (0, 1)),
    ("and", (0, 1)),
    ("or", (0, 1)),
)

_UNARY_SLOT: tuple[tuple[str, tuple[int, ...]], ...] = (
    ("const0", ()),
    ("const1", ()),
    ("copy", (0,)),
    ("not", (0,)),
)

_FAMILY_VARIABLES = (
    Variable(INPUT_A, "alice"),
    Variable(INPUT_B, "bob"),
    Variable("r", "shared"),
    Variable("a", "alice"),
    Variable("h", "bob"),
    Variable("y_a_var", "alice"),
    Variable("y_b_var", "bob"),
)


def _slot_instruction(
    target: str, choice: tuple[str, tuple[int, ...]], operands: tuple[str, ...]
) -> Instruction:
    op, picks = choice
    return Instruction(target, op, tuple(operands[i] for i in picks))


def enumerate_bounded_protocols() -> Iterator[ThreadProtocol]:
    """The exhaustive bounded family used for the order-robustness theorem.

    Fixed skeleton over one shared bit r:

        a   := F1(x_a, r)          (Alice's measurement)
        h   := F2(r)               (Bob's hidden bit setup)
        [h  := F3(h, a)]           (optional cross-side thread update)
        y_a := F4(a)
        y_b := F5(x_b, h)

    with F1, F3, F5 over the 8 binary slot ops and F2, F4 over the 4 unary
    ones.  The family contains genuinely local protocols, shared-randomness
    protocols, and thread protocols that beat 3/4 under one schedule.
    """
    for f1 in _BINARY_SLOT:
        for f2 in _UNARY_SLOT:
            for f3 in (None,) + _BINARY_SLOT:
                for f4 in _UNARY_SLOT:
                    for f5 in _BINARY_SLOT:
                        program = [
                            _slot_instruction("a", f1, (INPUT_A, "r")),
                            _slot_instruction("h", f2, ("r",)),
                        ]
                        if f3 is not None:
                            program.append(_slot_instruction("h", f3, ("h", "a")))
                        program.append(_slot_instruction("y_a_var", f4, ("a",)))
                        program.append(_slot_instruction("y_b_var", f5, (INPUT_B, "h")))
                        yield ThreadProtocol(
                            variables=_FAMILY_VARIABLES,
                            program=tuple(program),
                            output_a="y_a_var",
                            output_b="y_b_var",
                            hidden=("h",),
                        )
