"""PySWIPT Allocation Package

Water-filling, circuit-constrained dual water-filling and greedy channel
inversion primitives used by all policies.
"""

from .core import (
    WaterfillResult,
    GreedyInversionResult,
    waterfill,
    waterfill_nonnegative,
    dual_waterfill_circuit,
    greedy_inversion,
    kkt_residual,
    descending_order,
    ascending_order,
    unpermute
)

__all__ = [
    "WaterfillResult",
    "GreedyInversionResult",
    "waterfill",
    "waterfill_nonnegative",
    "dual_waterfill_circuit",
    "greedy_inversion",
    "kkt_residual",
    "descending_order",
    "ascending_order",
    "unpermute",
]
