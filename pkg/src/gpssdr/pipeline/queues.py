"""Bounded FIFO queues linking producer, consumer and fan-out loops."""

import enum
import threading
from collections import deque


class QueuePolicy(enum.Enum):
    DROP_NEWEST = "drop"    # producer side: count the overflow, discard block
    BLOCK = "block"         # offline mode: producer waits, nothing dropped
    DROP_OLDEST = "drop_oldest"  # fan-out sinks: slow consumer loses history


class BoundedQueue:
    """Thread-safe bounded FIFO with an overflow counter.

    push() returns False when the item was dropped under DROP_NEWEST; pop()
    returns None once the queue is closed and drained.
    """

    def __init__(self, capacity: int, policy: QueuePolicy = QueuePolicy.DROP_NEWEST):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.policy = policy
        self._items = deque()
        self._lock = threading.Lock()
        self._not_empty = threading.Condition(self._lock)
        self._not_full = threading.Condition(self._lock)
        self._closed = False
        self.overflow_count = 0

    def push(self, item) -> bool:
        with self._lock:
            if self.policy is QueuePolicy.BLOCK:
                while len(self._items) >= self.capacity and not self._closed:
                    self._not_full.wait()
                if self._closed:
                    return False
            elif len(self._items) >= self.capacity:
                if self.policy is QueuePolicy.DROP_OLDEST:
                    self._items.popleft()
                else:
                    self.overflow_count += 1
                    return False
            self._items.append(item)
            self._not_empty.notify()
            return True

    def pop(self, timeout=None):
        with self._lock:
            while not self._items and not self._closed:
                if not self._not_empty.wait(timeout=timeout):
                    return None
            if not self._items:
                return None
            item = self._items.popleft()
            self._not_full.notify()
            return item

    def close(self):
        with self._lock:
            self._closed = True
            self._not_empty.notify_all()
            self._not_full.notify_all()

    def __len__(self):
        with self._lock:
            return len(self._items)
