from .engines import (AcqConfig, AcqResult, acquire_joint, acquire_pcs,
                      detect_peak, wipe_if)
from .qos import QosPolicy, ReacquireReason, qos_should_reacquire

__all__ = [
    "AcqConfig", "AcqResult", "acquire_pcs", "acquire_joint", "detect_peak",
    "wipe_if", "QosPolicy", "ReacquireReason", "qos_should_reacquire",
]
