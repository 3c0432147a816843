"""JIT-compiled Turing machine segment simulator.

One call runs a machine from a given configuration until it reaches an
undefined transition cell, halts, provably cycles, or hits the step cap.
The tape working array is sized for the remaining steps, so no reallocation
happens inside the loop.

Cycle detection is Brent's algorithm over translation-normalized
configurations (state, head offset from first nonblank cell, nonblank
content): the tape is infinite and homogeneous, so recurrence up to
translation is a sound proof of non-halting.  Nonblank content bounds are
maintained incrementally (amortized O(1) per step), and full content
comparison only happens when state, nonzero count, head offset, and content
length all match the saved snapshot.
"""
from __future__ import annotations

import numpy as np
from numba import njit

HOLE = 0
HALTED = 1
CYCLE = 2
CAP = 3


@njit(cache=True)
def sim_segment(writes, moves, nexts, defined, k, cap, content, head_rel, state, steps, detect):
    """Returns (code, state, head, steps, nonzero, tape, lo, hi, hole_idx).

    `content` is the visited tape window (may include zeros), `head_rel` the
    head position relative to content[0] (it may point just outside).  The
    returned tape with its visited bounds lo/hi and head describe the exit
    configuration, for resuming once a hole is filled.
    """
    remaining = cap - steps
    clen = content.shape[0]
    size = clen + 2 * (remaining + 2)
    tape = np.zeros(size, np.int8)
    base = remaining + 2
    nonzero = 0
    for i in range(clen):
        tape[base + i] = content[i]
        if content[i] != 0:
            nonzero += 1
    head = base + head_rel
    lo = min(head, base)
    hi = max(head, base + clen - 1)
    # exact nonblank content bounds, valid while nonzero > 0
    clo = 0
    chi = -1
    if nonzero > 0:
        clo = base
        while tape[clo] == 0:
            clo += 1
        chi = base + clen - 1
        while tape[chi] == 0:
            chi -= 1
    saved_state = state
    saved_count = nonzero
    saved_off = head - clo if nonzero > 0 else 0
    saved_content = tape[clo : chi + 1].copy() if nonzero > 0 else np.zeros(0, np.int8)
    power = 1
    lam = 0
    while steps < cap:
        sym = tape[head]
        idx = state * k + sym
        if defined[idx] == 0:
            return HOLE, state, head, steps, nonzero, tape, lo, hi, idx
        w = writes[idx]
        mv = moves[idx]
        nx = nexts[idx]
        if sym != w:
            tape[head] = w
            if w != 0:
                if nonzero == 0:
                    clo = head
                    chi = head
                else:
                    if head < clo:
                        clo = head
                    elif head > chi:
                        chi = head
                nonzero += 1
            else:
                nonzero -= 1
                if nonzero == 0:
                    clo = 0
                    chi = -1
                elif head == clo:
                    while tape[clo] == 0:
                        clo += 1
                elif head == chi:
                    while tape[chi] == 0:
                        chi -= 1
        head += mv
        steps += 1
        if head < lo:
            lo = head
        elif head > hi:
            hi = head
        if nx == -1:
            return HALTED, state, head, steps, nonzero, tape, lo, hi, -1
        state = nx
        if detect == 1:
            if state == saved_state and nonzero == saved_count:
                if nonzero == 0:
                    # blank tape both times: every head position is equivalent
                    return CYCLE, state, head, steps, nonzero, tape, lo, hi, -1
                length = chi - clo + 1
                if head - clo == saved_off and length == saved_content.shape[0]:
                    same = True
                    for i in range(length):
                        if tape[clo + i] != saved_content[i]:
                            same = False
                            break
                    if same:
                        return CYCLE, state, head, steps, nonzero, tape, lo, hi, -1
            lam += 1
            if lam == power:
                saved_state = state
                saved_count = nonzero
                if nonzero > 0:
                    saved_off = head - clo
                    saved_content = tape[clo : chi + 1].copy()
                else:
                    saved_off = 0
                    saved_content = np.zeros(0, np.int8)
                power *= 2
                lam = 0
    return CAP, state, head, steps, nonzero, tape, lo, hi, -1
