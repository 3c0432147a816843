"""Elementary cellular automaton engine.

Rules are the 256 two-color nearest-neighbor rules in standard Wolfram
numbering: the output bit for neighborhood (a, b, c) sits at bit position
4a + 2b + c of the rule number.  Configurations are fixed-width bit rows
with either cyclic or fixed-zero boundaries.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal

import numpy as np

Boundary = Literal["cyclic", "zero"]

_TRIPLES = [(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)]


@dataclass(frozen=True)
class RuleTable:
    """Local map of an elementary CA: 8 output bits plus the rule number."""

    rule_number: int
    outputs: tuple[int, ...]  # indexed by 4a + 2b + c

    def __post_init__(self) -> None:
        if len(self.outputs) != 8 or any(b not in (0, 1) for b in self.outputs):
            raise ValueError("rule table needs exactly 8 output bits")
        reconstructed = sum(bit << i for i, bit in enumerate(self.outputs))
        if reconstructed != self.rule_number:
            raise ValueError(
                f"outputs encode rule {reconstructed}, not {self.rule_number}"
            )

    def __call__(self, left: int, center: int, right: int) -> int:
        return self.outputs[4 * left + 2 * center + right]

    @property
    def entries(self) -> dict[tuple[int, int, int], int]:
        return {t: self.outputs[4 * t[0] + 2 * t[1] + t[2]] for t in _TRIPLES}


def rule_table_from_number(k: int) -> RuleTable:
    """Build the rule table for Wolfram rule number k (0-255)."""
    if not 0 <= k <= 255:
        raise ValueError(f"rule number {k} out of range 0-255")
    return RuleTable(k, tuple((k >> i) & 1 for i in range(8)))


def rule110_from_recurrence() -> RuleTable:
    """Rule 110 built by evaluating p' = p + q - (1 + o)*p*q on all triples.

    o, p, q are the left, center, and right cells of the neighborhood.
    """
    outputs = [0] * 8
    for o, p, q in _TRIPLES:
        outputs[4 * o + 2 * p + q] = p + q - (1 + o) * p * q
    number = sum(bit << i for i, bit in enumerate(outputs))
    return RuleTable(number, tuple(outputs))


@dataclass(frozen=True)
class Configuration:
    """A fixed-width row of binary cells with a boundary mode."""

    cells: tuple[int, ...]
    boundary: Boundary = "cyclic"

    def __post_init__(self) -> None:
        if len(self.cells) < 1:
            raise ValueError("configuration needs at least one cell")
        if any(c not in (0, 1) for c in self.cells):
            raise ValueError("cells must be 0 or 1")
        if self.boundary not in ("cyclic", "zero"):
            raise ValueError(f"unknown boundary mode {self.boundary!r}")

    @property
    def width(self) -> int:
        return len(self.cells)

    def to_bitstring(self) -> str:
        return "".join(map(str, self.cells))

    def to_int(self) -> int:
        """Pack cells into an int, cell 0 as the most significant bit."""
        value = 0
        for c in self.cells:
            value = (value << 1) | c
        return value

    @classmethod
    def from_bitstring(cls, bits: str, boundary: Boundary = "cyclic") -> Configuration:
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"not a bitstring: {bits!r}")
        return cls(tuple(int(b) for b in bits), boundary)

    @classmethod
    def from_int(cls, value: int, width: int, boundary: Boundary = "cyclic") -> Configuration:
        if not 0 <= value < (1 << width):
            raise ValueError(f"value {value} does not fit in {width} cells")
        return cls(tuple((value >> (width - 1 - j)) & 1 for j in range(width)), boundary)

    @classmethod
    def single(cls, width: int, boundary: Boundary = "cyclic") -> Configuration:
        """All zeros except one black cell at the center."""
        cells = [0] * width
        cells[width // 2] = 1
        return cls(tuple(cells), boundary)

    @classmethod
    def random(cls, width: int, seed: int, boundary: Boundary = "cyclic") -> Configuration:
        import random

        rng = random.Random(seed)
        return cls(tuple(rng.randrange(2) for _ in range(width)), boundary)


@dataclass(frozen=True)
class SpacetimeDiagram:
    """Rows of a CA evolution; row i is generation i."""

    rows: tuple[Configuration, ...]

    def __post_init__(self) -> None:
        if not self.rows:
            raise ValueError("diagram needs at least one row")
        widths = {r.width for r in self.rows}
        if len(widths) != 1:
            raise ValueError("all rows must share one width")

    @property
    def steps(self) -> int:
        return len(self.rows) - 1

    @property
    def width(self) -> int:
        return self.rows[0].width


def step(c: Configuration, r: RuleTable) -> Configuration:
    """Advance a configuration one generation."""
    cells = c.cells
    n = len(cells)
    out = r.outputs
    if c.boundary == "cyclic":
        new = tuple(
            out[4 * cells[j - 1] + 2 * cells[j] + cells[(j + 1) % n]]
            for j in range(n)
        )
    else:
        new = tuple(
            out[
                4 * (cells[j - 1] if j > 0 else 0)
                + 2 * cells[j]
                + (cells[j + 1] if j + 1 < n else 0)
            ]
            for j in range(n)
        )
    return Configuration(new, c.boundary)


def evolve(c: Configuration, r: RuleTable, t: int) -> SpacetimeDiagram:
    """Evolve t steps, keeping every generation (t + 1 rows)."""
    if t < 0:
        raise ValueError("step count must be nonnegative")
    rows = [c]
    for _ in range(t):
        rows.append(step(rows[-1], r))
    return SpacetimeDiagram(tuple(rows))


def center_column(d: SpacetimeDiagram, column: int | None = None) -> tuple[int, ...]:
    """Extract one column of the diagram in time order.

    Defaults to the geometric center, which requires an odd width; pass an
    explicit column index for even widths.
    """
    if column is None:
        if d.width % 2 == 0:
            raise ValueError("even width: supply an explicit column index")
        column = d.width // 2
    if not 0 <= column < d.width:
        raise ValueError(f"column {column} out of range")
    return tuple(row.cells[column] for row in d.rows)


# -- packed-int fast path -------------------------------------------------
#
# Exhaustive sweeps over all 2^n configurations work on packed ints (cell 0
# is the most significant bit, matching Configuration.to_int).  These are
# the workhorses behind the preimage module's oracles and statistics.

def step_all_configs(r: RuleTable, n: int) -> np.ndarray:
    """Map every packed n-cell cyclic configuration through one step.

    Returns an int64 array F of length 2^n with F[x] = step(x).
    """
    if not 1 <= n <= 26:
        raise ValueError("packed sweep supports 1 <= n <= 26")
    x = np.arange(1 << n, dtype=np.int64)
    lut = np.array(r.outputs, dtype=np.int64)
    out = np.zeros_like(x)
    for j in range(n):
        center = (x >> (n - 1 - j)) & 1
        left = (x >> (n - 1 - ((j - 1) % n))) & 1
        right = (x >> (n - 1 - ((j + 1) % n))) & 1
        out |= lut[4 * left + 2 * center + right] << (n - 1 - j)
    return out


def step_packed(value: int, n: int, r: RuleTable) -> int:
    """One cyclic step on a packed int configuration."""
    out = 0
    for j in range(n):
        left = (value >> (n - 1 - ((j - 1) % n))) & 1
        center = (value >> (n - 1 - j)) & 1
        right = (value >> (n - 1 - ((j + 1) % n))) & 1
        out |= r.outputs[4 * left + 2 * center + right] << (n - 1 - j)
    return out


# -- rendering -------------------------------------------------------------

def to_pbm(d: SpacetimeDiagram) -> bytes:
    """Render as binary PBM (magic P4), one image row per generation, black=1."""
    w, h = d.width, len(d.rows)
    header = f"P4\n{w} {h}\n".encode()
    packed = bytearray()
    for row in d.rows:
        byte = 0
        nbits = 0
        for cell in row.cells:
            byte = (byte << 1) | cell
            nbits += 1
            if nbits == 8:
                packed.append(byte)
                byte = nbits = 0
        if nbits:
            packed.append(byte << (8 - nbits))
    return header + bytes(packed)


def to_pbm_ascii(d: SpacetimeDiagram) -> str:
    """Render as ASCII PBM (magic P1)."""
    lines = [f"P1\n{d.width} {len(d.rows)}"]
    lines.extend(" ".join(map(str, row.cells)) for row in d.rows)
    return "\n".join(lines) + "\n"


def rows_as_bitstrings(d: SpacetimeDiagram) -> list[str]:
    return [row.to_bitstring() for row in d.rows]
