"""
PySWIPT Throughput Dispatch

Selects the exact throughput expression of a scenario type. The simulator,
the oracle and the baselines evaluate every allocation through it.
"""

import logging

from ..utils.types import ScenarioParams, ChannelRealization, Allocation, ThroughputReport
from .su_downlink import throughput_su_dl
from .su_uplink import throughput_su_ul
from .mu_downlink import throughput_mu_dl
from .mu_uplink import throughput_mu_ul


logger = logging.getLogger(__name__)


def evaluate_throughput(
    alloc: Allocation,
    ch: ChannelRealization,
    p: ScenarioParams
) -> ThroughputReport:
    """Evaluate the exact throughput of ``alloc`` for the scenario type of ``p``.

    Args:
        alloc: Allocation to evaluate
        ch: Channel realization the allocation was computed for
        p: Scenario

    Returns:
        ThroughputReport with spectral efficiency sum / K

    Raises:
        ValidationError: On dimension mismatch
        AllocationError: If the allocation breaks its power budgets
    """
    if p.is_single_user:
        evaluator = throughput_su_dl if p.is_downlink else throughput_su_ul
    else:
        evaluator = throughput_mu_dl if p.is_downlink else throughput_mu_ul
    return evaluator(alloc, ch, p)

