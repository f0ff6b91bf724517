"""Fixed-size tracking channel table and assignment rules."""

from ..trk.channel import Channel, ChannelPhase

MAX_CHANNELS = 12


class ChannelTable:
    """At most 12 slots, one PRN per slot; tracking channels are never
    evicted by new detections."""

    def __init__(self, fmt, trk_config, num_channels: int = MAX_CHANNELS):
        if not 1 <= num_channels <= MAX_CHANNELS:
            raise ValueError(f"num_channels must be 1..{MAX_CHANNELS}")
        self.fmt = fmt
        self.trk_config = trk_config
        self.slots = [None] * num_channels

    def active(self):
        return [ch for ch in self.slots
                if ch is not None and ch.phase not in (ChannelPhase.IDLE,
                                                       ChannelPhase.LOST)]

    def active_prns(self):
        return {ch.prn for ch in self.active()}

    def tracking_count(self):
        return sum(1 for ch in self.active() if ch.phase is ChannelPhase.TRACKING)

    def release_lost(self):
        """Free slots whose channels lost lock; returns the freed PRNs."""
        freed = []
        for i, ch in enumerate(self.slots):
            if ch is not None and ch.phase is ChannelPhase.LOST:
                freed.append(ch.prn)
                self.slots[i] = None
        return freed


def manage_channels(acq_results, table: ChannelTable, acq_ref_sample: int,
                    start_sample: int):
    """Assign new detections to free slots without disturbing live channels.

    Duplicate PRNs and detections beyond the table capacity are ignored.
    Returns the list of newly assigned channels.
    """
    assigned = []
    active = table.active_prns()
    for res in acq_results:
        if not res.detected or res.prn in active:
            continue
        slot = next((i for i, ch in enumerate(table.slots) if ch is None), None)
        if slot is None:
            continue
        ch = Channel(res.prn, table.fmt, table.trk_config)
        ch.assign(res, acq_ref_sample, start_sample)
        table.slots[slot] = ch
        active.add(res.prn)
        assigned.append(ch)
    return assigned
