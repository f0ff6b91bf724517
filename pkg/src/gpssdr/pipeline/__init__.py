from .queues import BoundedQueue, QueuePolicy
from .channels import ChannelTable, manage_channels
from .metrics import SessionMetrics
from .session import Fanout, run_session
from .sources import FileSource, SimSource

__all__ = [
    "BoundedQueue", "QueuePolicy", "ChannelTable", "manage_channels",
    "SessionMetrics", "run_session", "Fanout", "FileSource", "SimSource",
]
