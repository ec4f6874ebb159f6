"""Exact local invariants of singular fibers of curve families."""

from fibercalc.arith import HJChain, branch_beta, chi_pair, dedekind_sum, hj_expand
from fibercalc.fiber_model import (
    Component,
    FiberError,
    FiberGraph,
    NodeEdge,
    emit_fiber,
    fiber_genus,
    is_minimal_nc,
    minimize,
    parse_fiber,
    validate,
)
from fibercalc.invariants import InvariantBundle, chi_via_pairs, compute_invariants
from fibercalc.dualizer import dual_fiber, duality_check, multiplicity_lcm, node_chain

__version__ = "0.1.0"

__all__ = [
    "Component", "FiberError", "FiberGraph", "HJChain", "InvariantBundle", "NodeEdge",
    "branch_beta", "chi_pair", "chi_via_pairs", "compute_invariants", "dedekind_sum",
    "dual_fiber", "duality_check", "emit_fiber", "fiber_genus", "hj_expand",
    "is_minimal_nc", "minimize", "multiplicity_lcm", "node_chain", "parse_fiber",
    "validate",
]
