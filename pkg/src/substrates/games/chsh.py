"""The CHSH game: win iff y_A xor y_B = x_A and x_B on uniform input bits.

Classical analysis is exact rational arithmetic over all deterministic
strategies; shared randomness cannot help, since a mixture's success is a
convex combination of deterministic successes and so never exceeds their
maximum.  The quantum protocol evaluates amplitudes exactly (no sampling).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .statevec import apply_one_qubit, bell_phi_plus, measurement_probs, rotation

# a deterministic one-party strategy maps its input bit to an output bit:
# encoded as (output on 0, output on 1)
Strategy = tuple[int, int]

ALL_STRATEGIES: tuple[Strategy, ...] = ((0, 0), (0, 1), (1, 0), (1, 1))

INPUTS = tuple(product((0, 1), repeat=2))


def chsh_success(alice: Strategy, bob: Strategy) -> Fraction:
    """Exact success probability of a deterministic strategy pair."""
    wins = sum(
        1 for xa, xb in INPUTS if alice[xa] ^ bob[xb] == (xa & xb)
    )
    return Fraction(wins, len(INPUTS))


def chsh_classical_optimum() -> tuple[Fraction, list[tuple[Strategy, Strategy]]]:
    """Exhaustive maximum over the 16 deterministic strategy pairs."""
    best = Fraction(0)
    winners: list[tuple[Strategy, Strategy]] = []
    for alice in ALL_STRATEGIES:
        for bob in ALL_STRATEGIES:
            value = chsh_success(alice, bob)
            if value > best:
                best = value
                winners = [(alice, bob)]
            elif value == best:
                winners.append((alice, bob))
    return best, winners


@dataclass(frozen=True)
class ChshQuantumResult:
    success: float
    per_input: tuple[float, float, float, float]  # inputs (0,0),(0,1),(1,0),(1,1)


def chsh_quantum(
    angle_a1: float = math.pi / 8, angle_b1: float = -math.pi / 8
) -> ChshQuantumResult:
    """Shared Bell pair; on input 1 each party rotates its qubit, then both
    measure in the standard basis and output what they observe."""
    per_input = []
    for xa, xb in INPUTS:
        state = bell_phi_plus()
        if xa:
            state = apply_one_qubit(state, rotation(angle_a1), 0)
        if xb:
            state = apply_one_qubit(state, rotation(angle_b1), 1)
        probs = measurement_probs(state)
        win = sum(
            float(probs[(ya << 1) | yb])
            for ya in (0, 1)
            for yb in (0, 1)
            if ya ^ yb == (xa & xb)
        )
        per_input.append(win)
    return ChshQuantumResult(sum(per_input) / 4.0, tuple(per_input))
