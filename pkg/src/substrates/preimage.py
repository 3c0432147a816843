"""Ancestor and preimage algorithms for elementary CAs on cyclic lattices.

Backward dynamics of a width-n cyclic CA reduce to walks over (left, center)
cell-pair states: constraint j ties cells j-1, j, j+1 of a candidate initial
row to ending cell j, so scanning left to right only ever needs the last two
assigned cells, closed over the seam by trying the four possible seeds.

Everything here works on cyclic configurations; a closed configuration space
(exactly 2^n rows, forward out-degree 1) is what makes the predecessor
counting statistics exact.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Literal

import numpy as np

from .ca import Configuration, RuleTable, rule_table_from_number, step_all_configs


class BudgetExceededError(Exception):
    """A table or enumeration would exceed the configured memory budget."""


class LimitExceededError(Exception):
    """Exhaustive mode requested beyond the configured width limit."""


def _require_cyclic(c: Configuration) -> None:
    if c.boundary != "cyclic":
        raise ValueError("preimage algorithms are defined on cyclic configurations")


# -- one-step preimages -----------------------------------------------------

def _collect_preimages(
    e: int, n: int, r: RuleTable, into: set[int], cap: int | None = None
) -> tuple[bool, int]:
    """Depth-first scan adding packed preimages of packed ending e to `into`.

    Returns (capped, rule_evaluations).  Depth-first order means completions
    arrive early, so when `into` outgrows cap the scan stops immediately
    instead of paying for the full preimage set.
    """
    out = r.outputs
    ebits = [(e >> (n - 1 - j)) & 1 for j in range(n)]
    evals = 0
    if n == 1:
        for v in (0, 1):
            evals += 1
            if out[4 * v + 2 * v + v] == ebits[0]:
                into.add(v)
                if cap is not None and len(into) > cap:
                    return True, evals
        return False, evals
    for a in (0, 1):
        for b in (0, 1):
            # stack entries: (j, prev=I[j-1], cur=I[j], packed prefix I[0..j])
            stack = [(1, a, b, (a << 1) | b)]
            while stack:
                j, prev, cur, bits = stack.pop()
                if j == n - 1:
                    evals += 2
                    if (
                        out[4 * prev + 2 * cur + a] == ebits[n - 1]
                        and out[4 * cur + 2 * a + b] == ebits[0]
                    ):
                        into.add(bits)
                        if cap is not None and len(into) > cap:
                            return True, evals
                    continue
                for nxt in (0, 1):
                    evals += 1
                    if out[4 * prev + 2 * cur + nxt] == ebits[j]:
                        stack.append((j + 1, cur, nxt, (bits << 1) | nxt))
    return False, evals


def preimages_one_step(e: Configuration, r: RuleTable) -> set[Configuration]:
    """Exactly the set of configurations that step to e."""
    _require_cyclic(e)
    n = e.width
    packed: set[int] = set()
    _collect_preimages(e.to_int(), n, r, packed)
    return {Configuration.from_int(p, n) for p in packed}


def has_ancestor(e: Configuration, r: RuleTable) -> bool:
    """True iff some configuration reaches e in one or more steps.

    Any deeper ancestor's penultimate stage is itself a one-step preimage,
    so existence of any ancestor reduces to existence of a one-step one.
    Runs in O(n) per seam seed by propagating feasible cell-pair states.
    """
    _require_cyclic(e)
    n = e.width
    out = r.outputs
    eb = [(e.to_int() >> (n - 1 - j)) & 1 for j in range(n)]
    if n == 1:
        return any(out[4 * v + 2 * v + v] == eb[0] for v in (0, 1))
    for a in (0, 1):
        for b in (0, 1):
            states = {(a, b)}
            for j in range(1, n - 1):
                states = {
                    (cur, nxt)
                    for prev, cur in states
                    for nxt in (0, 1)
                    if out[4 * prev + 2 * cur + nxt] == eb[j]
                }
                if not states:
                    break
            if any(
                out[4 * prev + 2 * cur + a] == eb[n - 1]
                and out[4 * cur + 2 * a + b] == eb[0]
                for prev, cur in states
            ):
                return True
    return False


# -- exact-t existence by the block method ----------------------------------

@lru_cache(maxsize=64)
def _block_tables(r: RuleTable, t: int, block_width: int) -> tuple[np.ndarray, ...]:
    """Interface-transfer matrices for every possible ending block value.

    A block of `block_width` ending cells is determined by an initial
    window of block_width + 2t cells.  Tabulating all windows gives, per
    block value, the boolean relation between the window's leading and
    trailing 2t-cell interfaces.  Index bv of the returned tuple is the
    matrix for ending block value bv.
    """
    w = block_width + 2 * t
    vals = np.arange(1 << w, dtype=np.int64)
    bits = ((vals[:, None] >> np.arange(w - 1, -1, -1)[None, :]) & 1).astype(np.int64)
    lut = np.array(r.outputs, dtype=np.int64)
    arr = bits
    for _ in range(t):
        arr = lut[(arr[:, :-2] << 2) | (arr[:, 1:-1] << 1) | arr[:, 2:]]
    weights = 1 << np.arange(block_width - 1, -1, -1)
    block_vals = (arr * weights).sum(axis=1)
    iface = 1 << (2 * t)
    left = (vals >> block_width).astype(np.int64)
    right = (vals & (iface - 1)).astype(np.int64)
    mats = []
    for bv in range(1 << block_width):
        m = np.zeros((iface, iface), dtype=np.float32)
        sel = block_vals == bv
        m[left[sel], right[sel]] = 1.0
        mats.append(m)
    return tuple(mats)


@lru_cache(maxsize=32)
def _image_after(r: RuleTable, n: int, t: int) -> np.ndarray:
    """Sorted unique packed images of the full configuration space after t steps."""
    cur = step_all_configs(r, n)
    for _ in range(t - 1):
        cur = cur[cur]
    return np.unique(cur)


def exists_initial_exact_t(
    e: Configuration,
    r: RuleTable,
    t: int,
    max_table_entries: int = 1 << 24,
) -> bool:
    """Decide whether some initial row evolves to e in exactly t steps.

    Block method: the ending row is cut into contiguous blocks, each block's
    consistent initial windows are tabulated, and adjacent tables are joined
    through their shared 2t-cell interfaces around the seam.  Intended for
    t = O(log n); refuses t whose per-block table would exceed the budget.
    """
    _require_cyclic(e)
    if t < 1:
        raise ValueError("step count must be at least 1")
    n = e.width
    ev = e.to_int()
    if 2 * t >= n:
        # The t-step dependency cone wraps the whole ring: the single block
        # covering everything degenerates to tabulating all 2^n candidates.
        if (1 << n) > max_table_entries:
            raise BudgetExceededError(
                f"t={t} needs a full-ring table of 2^{n} entries, over budget"
            )
        image = _image_after(r, n, t)
        pos = int(np.searchsorted(image, ev))
        return pos < len(image) and int(image[pos]) == ev
    bw = min(t, n - 2 * t)
    if (1 << (bw + 2 * t)) > max_table_entries:
        raise BudgetExceededError(
            f"t={t} needs per-block tables of 2^{bw + 2 * t} entries, over budget"
        )
    widths = [bw] * (n // bw)
    if n % bw:
        widths.append(n % bw)
    ebits = [(ev >> (n - 1 - j)) & 1 for j in range(n)]
    chain: np.ndarray | None = None
    start = 0
    for width in widths:
        bv = 0
        for j in range(start, start + width):
            bv = (bv << 1) | ebits[j]
        mat = _block_tables(r, t, width)[bv]
        if chain is None:
            chain = mat
        else:
            chain = np.minimum(chain @ mat, 1.0)
        start += width
    assert chain is not None
    return bool(np.trace(chain) > 0)


# -- named predicates --------------------------------------------------------

@dataclass(frozen=True)
class Predicate:
    """A small named family of polynomial-time predicates on initial rows."""

    name: Literal["always_true", "even_parity", "contains_pattern", "density_at_most"]
    pattern: tuple[int, ...] = ()
    max_density: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        if self.name == "contains_pattern" and not self.pattern:
            raise ValueError("contains_pattern needs a nonempty bit pattern")
        if not 0 <= self.max_density <= 1:
            raise ValueError("density bound must lie in [0, 1]")

    def __call__(self, c: Configuration) -> bool:
        cells = c.cells
        if self.name == "always_true":
            return True
        if self.name == "even_parity":
            return sum(cells) % 2 == 0
        if self.name == "contains_pattern":
            if len(self.pattern) > len(cells):
                return False
            # cyclic containment: the row is a ring
            doubled = cells + cells[: len(self.pattern) - 1]
            k = len(self.pattern)
            return any(doubled[i : i + k] == self.pattern for i in range(len(cells)))
        if self.name == "density_at_most":
            return Fraction(sum(cells), len(cells)) <= self.max_density
        raise ValueError(f"unknown predicate {self.name!r}")

    @classmethod
    def parse(cls, spec: str) -> Predicate:
        """Parse CLI syntax: name or name:args, e.g. contains_pattern:1011."""
        name, _, arg = spec.partition(":")
        if name == "always_true":
            return cls("always_true")
        if name == "even_parity":
            return cls("even_parity")
        if name == "contains_pattern":
            if not arg or set(arg) - {"0", "1"}:
                raise ValueError(f"contains_pattern needs a bitstring, got {arg!r}")
            return cls("contains_pattern", pattern=tuple(int(b) for b in arg))
        if name == "density_at_most":
            return cls("density_at_most", max_density=Fraction(arg))
        raise ValueError(f"unknown predicate {name!r}")

    def describe(self) -> str:
        if self.name == "contains_pattern":
            return f"contains_pattern:{''.join(map(str, self.pattern))}"
        if self.name == "density_at_most":
            return f"density_at_most:{self.max_density}"
        return self.name


ALWAYS_TRUE = Predicate("always_true")


# -- the Proposition-1 solver -------------------------------------------------

@dataclass(frozen=True)
class InitProblem:
    """Find an initial row satisfying a predicate that reaches `ending` in
    exactly `steps` steps, giving up when any backward level outgrows `bound`."""

    ending: Configuration
    steps: int
    predicate: Predicate = ALWAYS_TRUE
    bound: int = 1
    rule: RuleTable = field(default_factory=lambda: rule_table_from_number(110))

    def __post_init__(self) -> None:
        _require_cyclic(self.ending)
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if self.bound < 1:
            raise ValueError("bound must be at least 1")


@dataclass(frozen=True)
class SolveOutcome:
    kind: Literal["found", "none", "aborted"]
    initial: Configuration | None
    predecessors_examined: int
    work: int


def solve_init(p: InitProblem) -> SolveOutcome:
    """Trace `steps` levels backward from the ending row, keeping the full
    predecessor list per level; abort as soon as a level exceeds the bound,
    otherwise return the lexicographically smallest predicate-satisfying
    level-t predecessor (or none).

    `work` counts rule-table evaluations; for non-aborted runs it stays
    within a fixed constant times n * steps * bound.
    """
    n = p.ending.width
    rule = p.rule
    level = {p.ending.to_int()}
    work = 0
    for _ in range(p.steps):
        nxt: set[int] = set()
        for cfg in sorted(level):
            capped, evals = _collect_preimages(cfg, n, rule, nxt, cap=p.bound)
            work += evals
            if capped:
                return SolveOutcome("aborted", None, 0, work)
        if not nxt:
            return SolveOutcome("none", None, 0, work)
        level = nxt
    examined = len(level)
    for cfg in sorted(level):
        if p.predicate(Configuration.from_int(cfg, n)):
            witness = Configuration.from_int(cfg, n)
            return SolveOutcome("found", witness, examined, work)
    return SolveOutcome("none", None, examined, work)


# -- predecessor statistics ----------------------------------------------------

@dataclass(frozen=True)
class PredecessorStats:
    mean: Fraction
    max_count: int
    fraction_exceeding: Fraction
    abort_fraction: Fraction
    threshold: int
    endings_observed: int


def predecessor_count_stats(
    n: int,
    t: int,
    r: RuleTable,
    mode: Literal["exhaustive", "sampled"] = "exhaustive",
    *,
    threshold: int = 10,
    sample_count: int = 0,
    seed: int = 0,
    exhaustive_limit: int = 16,
) -> PredecessorStats:
    """Statistics of |{I : step^t(I) = E}| over uniform endings E.

    In exhaustive mode the mean is exactly 1: forward out-degree is 1 on a
    space of 2^n vertices, so the 2^n length-t paths land once per ending
    on average.  `fraction_exceeding` counts endings whose level-t
    predecessor count exceeds the threshold; `abort_fraction` counts endings
    for which any backward level would exceed it (the solver's abort rule).
    """
    if t < 1:
        raise ValueError("steps must be at least 1")
    if mode == "exhaustive":
        if n > exhaustive_limit:
            raise LimitExceededError(
                f"exhaustive mode limited to n <= {exhaustive_limit}, got {n}"
            )
        size = 1 << n
        cur = step_all_configs(r, n)
        for _ in range(t - 1):
            cur = cur[cur]
        counts = np.bincount(cur, minlength=size)
        total = int(counts.sum())
        mean = Fraction(total, size)
        max_count = int(counts.max())
        exceeding = Fraction(int((counts > threshold).sum()), size)
        aborts = sum(
            1
            for e in range(size)
            if _would_abort(e, n, t, r, threshold)
        )
        return PredecessorStats(
            mean, max_count, exceeding, Fraction(aborts, size), threshold, size
        )
    if mode == "sampled":
        if sample_count < 1:
            raise ValueError("sampled mode needs a positive sample count")
        rng = random.Random(seed)
        counts_list = []
        aborts = 0
        for _ in range(sample_count):
            e = rng.randrange(1 << n)
            counts_list.append(_count_level_t(e, n, t, r))
            if _would_abort(e, n, t, r, threshold):
                aborts += 1
        mean = Fraction(sum(counts_list), sample_count)
        exceeding = Fraction(
            sum(1 for c in counts_list if c > threshold), sample_count
        )
        return PredecessorStats(
            mean,
            max(counts_list),
            exceeding,
            Fraction(aborts, sample_count),
            threshold,
            sample_count,
        )
    raise ValueError(f"unknown mode {mode!r}")


def _backward_levels(e: int, n: int, t: int, r: RuleTable, cap: int | None) -> list[set[int]] | None:
    """Distinct-predecessor levels 0..t behind packed ending e.

    Returns None if a level outgrows cap (the solver's abort condition).
    """
    levels = [{e}]
    for _ in range(t):
        nxt: set[int] = set()
        for cfg in levels[-1]:
            capped, _ = _collect_preimages(cfg, n, r, nxt, cap=cap)
            if capped:
                return None
        levels.append(nxt)
        if not nxt:
            break
    while len(levels) < t + 1:
        levels.append(set())
    return levels


def _count_level_t(e: int, n: int, t: int, r: RuleTable) -> int:
    levels = _backward_levels(e, n, t, r, None)
    assert levels is not None
    return len(levels[t])


def _would_abort(e: int, n: int, t: int, r: RuleTable, bound: int) -> bool:
    return _backward_levels(e, n, t, r, bound) is None
