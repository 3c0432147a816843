"""CHSH and GHZ nonlocal games, plus the thread-protocol order verifier."""

from .statevec import (
    apply_one_qubit,
    bell_phi_plus,
    ghz_state,
    hadamard,
    identity2,
    measurement_probs,
    rotation,
    s_dagger,
)
from .chsh import (
    ChshQuantumResult,
    chsh_classical_optimum,
    chsh_quantum,
    chsh_success,
)
from .ghz import (
    GHZ_MEASUREMENT_BASES,
    PROMISE_INPUTS,
    OutsidePromiseError,
    ghz_classical_exhaustive,
    ghz_outcome_distribution,
    ghz_quantum,
    ghz_success,
    search_ghz_protocol,
)
from .threads import (
    Instruction,
    LhvReport,
    MarginalReport,
    OrderReport,
    StraddlingEventError,
    ThreadProtocol,
    Variable,
    enumerate_bounded_protocols,
    lhv_bound_theorem_check,
    marginal_invariance_check,
    order_robustness_check,
    protocol_from_json,
)

__all__ = [
    "apply_one_qubit",
    "bell_phi_plus",
    "ghz_state",
    "hadamard",
    "identity2",
    "measurement_probs",
    "rotation",
    "s_dagger",
    "ChshQuantumResult",
    "chsh_classical_optimum",
    "chsh_quantum",
    "chsh_success",
    "GHZ_MEASUREMENT_BASES",
    "PROMISE_INPUTS",
    "OutsidePromiseError",
    "ghz_classical_exhaustive",
    "ghz_outcome_distribution",
    "ghz_quantum",
    "ghz_success",
    "search_ghz_protocol",
    "Instruction",
    "LhvReport",
    "MarginalReport",
    "OrderReport",
    "StraddlingEventError",
    "ThreadProtocol",
    "Variable",
    "enumerate_bounded_protocols",
    "lhv_bound_theorem_check",
    "marginal_invariance_check",
    "order_robustness_check",
    "protocol_from_json",
]
