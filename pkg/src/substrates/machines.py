"""Small Turing machines, exhaustive enumeration, busy-beaver search, and a
cyclic tag system interpreter.

Machine convention (pinned; other conventions change busy-beaver values):
two-way infinite tape, blank symbol 0, start state 0, a single HALT
pseudo-state, and shift-count semantics — every executed transition counts
as one step, including the transition into HALT.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Literal

import numpy as np

from . import _simcore

HALT = -1

Move = Literal[-1, 1]


class EnumerationBudgetError(Exception):
    """Requested enumeration exceeds the configured budget."""


class WordLengthExceededError(Exception):
    """A cyclic tag word outgrew the configured ceiling."""


@dataclass(frozen=True)
class TuringMachine:
    """Total transition table over n_states x n_symbols.

    transitions[state * n_symbols + symbol] = (write, move, next_state),
    with move in {-1, +1} and next_state in range(n_states) or HALT.
    """

    n_states: int
    n_symbols: int
    transitions: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        if self.n_states < 1 or self.n_symbols < 2:
            raise ValueError("need at least 1 state and 2 symbols")
        if len(self.transitions) != self.n_states * self.n_symbols:
            raise ValueError("transition table must be total")
        for write, move, nxt in self.transitions:
            if not 0 <= write < self.n_symbols:
                raise ValueError(f"write symbol {write} out of range")
            if move not in (-1, 1):
                raise ValueError(f"move must be -1 or +1, got {move}")
            if nxt != HALT and not 0 <= nxt < self.n_states:
                raise ValueError(f"next state {nxt} out of range")

    def to_json_rows(self) -> list[list]:
        rows = []
        for state in range(self.n_states):
            for sym in range(self.n_symbols):
                w, m, nxt = self.transitions[state * self.n_symbols + sym]
                rows.append(
                    [state, sym, w, "L" if m == -1 else "R", "H" if nxt == HALT else nxt]
                )
        return rows

    @classmethod
    def from_json_rows(cls, rows: list[list]) -> TuringMachine:
        states = 1 + max(int(r[0]) for r in rows)
        symbols = 1 + max(int(r[1]) for r in rows)
        table: list[tuple[int, int, int] | None] = [None] * (states * symbols)
        for state, sym, write, move, nxt in rows:
            idx = int(state) * symbols + int(sym)
            if table[idx] is not None:
                raise ValueError(f"duplicate transition for state {state}, symbol {sym}")
            table[idx] = (
                int(write),
                -1 if move == "L" else 1,
                HALT if nxt == "H" else int(nxt),
            )
        if any(entry is None for entry in table):
            raise ValueError("transition table must be total")
        return cls(states, symbols, tuple(table))  # type: ignore[arg-type]


@dataclass(frozen=True)
class RunResult:
    status: Literal["halted", "cap_exceeded", "cycle_detected"]
    steps_executed: int
    tape_nonzero: int = 0


def _machine_arrays(
    m: TuringMachine,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    cells = m.n_states * m.n_symbols
    writes = np.zeros(cells, dtype=np.int8)
    moves = np.zeros(cells, dtype=np.int64)
    nexts = np.zeros(cells, dtype=np.int64)
    defined = np.ones(cells, dtype=np.uint8)
    for i, (w, mv, nxt) in enumerate(m.transitions):
        writes[i], moves[i], nexts[i] = w, mv, nxt
    return writes, moves, nexts, defined

_EMPTY_TAPE = np.zeros(0, dtype=np.int8)

_STATUS = {
    _simcore.HALTED: "halted",
    _simcore.CYCLE: "cycle_detected",
    _simcore.CAP: "cap_exceeded",
}


def run_tm(m: TuringMachine, cap: int, detect_cycles: bool = True) -> RunResult:
    """Run from a blank tape until HALT, the step cap, or a detected cycle.

    Cycle detection is Brent's algorithm over translation-normalized
    configurations: the tape is infinite and homogeneous, so recurrence up
    to translation is a sound proof of non-halting (it never misclassifies
    a halter).
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    writes, moves, nexts, defined = _machine_arrays(m)
    code, _, _, steps, nonzero, _, _, _, _ = _simcore.sim_segment(
        writes,
        moves,
        nexts,
        defined,
        m.n_symbols,
        cap,
        _EMPTY_TAPE,
        0,
        0,
        0,
        1 if detect_cycles else 0,
    )
    if code == _simcore.HALTED:
        return RunResult("halted", int(steps), int(nonzero))
    return RunResult(_STATUS[code], int(steps))


# -- enumeration ---------------------------------------------------------------

def raw_machine_count(s: int, k: int) -> int:
    """Count of total s-state k-symbol tables: each of the s*k cells picks one
    of k writes x 2 moves x (s+1) targets including HALT."""
    return (2 * k * (s + 1)) ** (s * k)


def enumerate_tms(
    s: int,
    k: int,
    canonical: bool = False,
    *,
    sim_cap: int = 100_000,
    raw_budget: int = 2_000_000,
    max_cells: int = 8,
) -> Iterator[TuringMachine]:
    """Enumerate total s-state k-symbol machines in a deterministic order.

    Raw mode walks the full product space (refused above `raw_budget`
    machines).  Canonical mode emits one representative per blank-tape
    behavior: transitions are introduced in first-use order during
    simulation, states are numbered by first use, the first transition's
    move is fixed to R, halting transitions are pinned to (write 1, move R),
    and never-used cells are filled with that halting transition.
    """
    if s < 1 or k < 2:
        raise ValueError("need at least 1 state and 2 symbols")
    if canonical:
        if s * k > max_cells:
            raise EnumerationBudgetError(
                f"canonical enumeration refused for s*k = {s * k} > {max_cells}"
            )
        yield from _tree_normal_enumeration(s, k, sim_cap)
        return
    total = raw_machine_count(s, k)
    if total > raw_budget:
        raise EnumerationBudgetError(
            f"raw enumeration of {total} machines exceeds budget {raw_budget}"
        )
    cell_choices = [
        (w, mv, nxt)
        for w in range(k)
        for mv in (-1, 1)
        for nxt in list(range(s)) + [HALT]
    ]
    for combo in itertools.product(cell_choices, repeat=s * k):
        yield TuringMachine(s, k, combo)


_HALT_FILL = (1, 1, HALT)


def _tree_normal_enumeration(s: int, k: int, sim_cap: int) -> Iterator[TuringMachine]:
    """Fill transitions on demand while simulating from the blank tape.

    Each reached undefined cell branches over the halting fill plus every
    (write, move, target) with targets limited to already-used states or the
    next fresh one; the first transition's move is fixed to R.  Leaves are
    machines that halted, cycled, or ran to sim_cap; unreached cells get the
    halting fill, so emitted tables are total.
    """
    cells = s * k
    writes = np.zeros(cells, dtype=np.int8)
    moves = np.zeros(cells, dtype=np.int64)
    nexts = np.zeros(cells, dtype=np.int64)
    defined = np.zeros(cells, dtype=np.uint8)

    def emit() -> TuringMachine:
        full = tuple(
            (int(writes[i]), int(moves[i]), int(nexts[i])) if defined[i] else _HALT_FILL
            for i in range(cells)
        )
        return TuringMachine(s, k, full)

    def continue_run(
        content: np.ndarray, head_rel: int, state: int, steps: int
    ) -> Iterator[TuringMachine]:
        code, st, head, at, _, tape, lo, hi, idx = _simcore.sim_segment(
            writes, moves, nexts, defined, k, sim_cap, content, head_rel, state, steps, 1
        )
        if code != _simcore.HOLE:
            yield emit()
            return
        # branch over every canonical filling of the reached hole
        used = {0}
        for cell in range(cells):
            if defined[cell]:
                used.add(cell // k)
                if nexts[cell] != HALT:
                    used.add(int(nexts[cell]))
        targets = sorted(used)
        fresh = max(used) + 1
        if fresh < s:
            targets.append(fresh)
        first_cell = not defined.any()
        move_options = (1,) if first_cell else (-1, 1)
        options: list[tuple[int, int, int]] = [_HALT_FILL]
        options.extend(
            (w, mv, tgt) for w in range(k) for mv in move_options for tgt in targets
        )
        window = tape[lo : hi + 1]
        for write, move, nxt in options:
            defined[idx] = 1
            writes[idx], moves[idx], nexts[idx] = write, move, nxt
            if nxt == HALT:
                yield emit()
            else:
                resumed = window.copy()
                resumed[head - lo] = write
                yield from continue_run(resumed, head - lo + move, nxt, at + 1)
            defined[idx] = 0
        writes[idx] = moves[idx] = nexts[idx] = 0

    yield from continue_run(_EMPTY_TAPE, 0, 0, 0)


def _normalized_dict(state: int, head: int, tape: dict[int, int]) -> tuple:
    if not tape:
        return (state, 0, b"")
    first = min(tape)
    last = max(tape)
    return (state, head - first, bytes(tape.get(i, 0) for i in range(first, last + 1)))


def canonical_form(m: TuringMachine, sim_cap: int = 100_000) -> TuringMachine:
    """Map a machine to its canonical representative by replaying its run.

    States are relabeled by first visit, moves are mirrored if the first
    executed move is L, halting transitions become (1, R, HALT), and cells
    never reached within sim_cap get the halting fill.
    """
    k = m.n_symbols
    tape: dict[int, int] = {}
    state = 0
    head = 0
    steps = 0
    relabel = {0: 0}
    mirror = 0  # +1 or -1 once the first move executes
    used_cells: list[tuple[int, int, tuple[int, int, int]]] = []  # (state, sym, rule)
    seen_cells: set[int] = set()
    saved = (0, 0, b"")
    saved_count = 0
    power = 1
    lam = 0
    while steps < sim_cap:
        sym = tape.get(head, 0)
        idx = state * k + sym
        write, move, nxt = m.transitions[idx]
        if idx not in seen_cells:
            seen_cells.add(idx)
            used_cells.append((state, sym, (write, move, nxt)))
            if mirror == 0:
                mirror = move
        if write:
            tape[head] = write
        else:
            tape.pop(head, None)
        head += move
        steps += 1
        if nxt == HALT:
            break
        if nxt not in relabel:
            relabel[nxt] = len(relabel)
        state = nxt
        if (
            state == saved[0]
            and len(tape) == saved_count
            and _normalized_dict(state, head, tape) == saved
        ):
            break
        lam += 1
        if lam == power:
            saved = _normalized_dict(state, head, tape)
            saved_count = len(tape)
            power *= 2
            lam = 0
    sign = mirror if mirror else 1
    table: dict[int, tuple[int, int, int]] = {}
    for state, sym, (write, move, nxt) in used_cells:
        new_idx = relabel[state] * k + sym
        if nxt == HALT:
            table[new_idx] = _HALT_FILL
        else:
            table[new_idx] = (write, move * sign, relabel[nxt])
    full = tuple(table.get(i, _HALT_FILL) for i in range(m.n_states * k))
    return TuringMachine(m.n_states, k, full)


# -- busy beaver -----------------------------------------------------------------

@dataclass(frozen=True)
class BusyBeaverResult:
    champion: TuringMachine | None
    max_steps: int
    halting_count: int
    undecided_count: int
    machines_examined: int


def busy_beaver_search(
    s: int,
    k: int,
    cap: int,
    canonical: bool = True,
    *,
    raw_budget: int = 2_000_000,
    max_cells: int = 8,
) -> BusyBeaverResult:
    """Run every enumerated machine from the blank tape up to cap steps.

    max_steps is the maximum over halters; cap_exceeded and cycle_detected
    machines are counted as undecided.  The champion is the first machine in
    enumeration order attaining max_steps.
    """
    champion = None
    max_steps = 0
    halting = 0
    undecided = 0
    examined = 0
    for m in enumerate_tms(
        s, k, canonical, sim_cap=cap, raw_budget=raw_budget, max_cells=max_cells
    ):
        examined += 1
        result = run_tm(m, cap)
        if result.status == "halted":
            halting += 1
            if result.steps_executed > max_steps:
                max_steps = result.steps_executed
                champion = m
        else:
            undecided += 1
    return BusyBeaverResult(champion, max_steps, halting, undecided, examined)


# -- cyclic tag systems ------------------------------------------------------------

@dataclass(frozen=True)
class CyclicTagSystem:
    """An ordered, nonempty list of binary appendant words (empty words allowed)."""

    appendants: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.appendants) < 1:
            raise ValueError("need at least one appendant")
        for word in self.appendants:
            if set(word) - {"0", "1"}:
                raise ValueError(f"appendants must be binary words, got {word!r}")


def run_cyclic_tag(
    c: CyclicTagSystem,
    word: str,
    max_steps: int,
    *,
    max_word_length: int = 1_000_000,
) -> list[str]:
    """Trace of words under cyclic tag dynamics.

    Per step: halt if the word is empty; otherwise delete the leading bit
    and append the current appendant if that bit was 1.  The appendant
    pointer advances every step regardless of the deleted bit.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be nonnegative")
    if set(word) - {"0", "1"}:
        raise ValueError(f"word must be binary, got {word!r}")
    trace = [word]
    current = word
    for i in range(max_steps):
        if not current:
            break
        appendant = c.appendants[i % len(c.appendants)]
        leading, current = current[0], current[1:]
        if leading == "1":
            current += appendant
        if len(current) > max_word_length:
            raise WordLengthExceededError(
                f"word grew past {max_word_length} cells at step {i + 1}"
            )
        trace.append(current)
    return trace
