"""Quality-of-service re-acquisition policy.

Three equal-priority triggers: fewer tracking channels than a PVT needs,
a fast drop from the initially acquired count, or too few channels at good
signal strength. The caller (pipeline) guarantees that a triggered
re-acquisition never disturbs channels that are still tracking.
"""

import enum
from dataclasses import dataclass


class ReacquireReason(enum.Enum):
    NONE = "none"
    BELOW_MIN_PVT = "below_min_pvt"
    DROP_RATE = "drop_rate"
    QUALITY = "quality"


@dataclass
class QosPolicy:
    min_tracking: int = 4           # minimum channels for a PVT solution
    drop_fraction: float = 0.30
    drop_window_s: float = 10.0     # "short period" for the drop-rate rule
    min_num_chans: int = 5
    min_cn0_dbhz: float = 40.0


def qos_should_reacquire(tracking_count: int, initial_acquired: int,
                         dropped_in_window: int, cn0s,
                         policy: QosPolicy = QosPolicy()):
    """Returns (should_reacquire, reason)."""
    if tracking_count < policy.min_tracking:
        return True, ReacquireReason.BELOW_MIN_PVT
    if initial_acquired > 0 and \
            dropped_in_window >= policy.drop_fraction * initial_acquired:
        return True, ReacquireReason.DROP_RATE
    strong = sum(1 for c in cn0s if c >= policy.min_cn0_dbhz)
    if strong < policy.min_num_chans:
        return True, ReacquireReason.QUALITY
    return False, ReacquireReason.NONE
