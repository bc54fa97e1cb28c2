"""Commutative closures and commutation graphs of finite rings."""

from ccgraph.closure import (
    ClosureResult,
    CommutationGraph,
    Counterexample,
    closure,
    commutation_graph,
    is_commutatively_closed,
    one_step,
)
from ccgraph.descriptor import RingSemanticError, RingSpecError, parse_ring_spec, render
from ccgraph.rings import SIZE_GUARD, SizeGuardError, build_ring

__version__ = "0.1.0"

__all__ = [
    "ClosureResult",
    "CommutationGraph",
    "Counterexample",
    "RingSemanticError",
    "RingSpecError",
    "SIZE_GUARD",
    "SizeGuardError",
    "build_ring",
    "closure",
    "commutation_graph",
    "is_commutatively_closed",
    "one_step",
    "parse_ring_spec",
    "render",
]
