"""Discrete substrates: cellular automata, preimage solvers, small machines,
trivalent graph rewriting with causal networks, and nonlocal games."""

__version__ = "0.1.0"
