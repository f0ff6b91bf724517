"""Session-level throughput and overflow statistics."""

from dataclasses import dataclass, field


@dataclass
class StageTimer:
    total_s: float = 0.0
    max_s: float = 0.0
    count: int = 0

    def add(self, dt: float):
        self.total_s += dt
        self.count += 1
        if dt > self.max_s:
            self.max_s = dt

    @property
    def mean_s(self):
        return self.total_s / self.count if self.count else 0.0


@dataclass
class SessionMetrics:
    produced_blocks: int = 0
    delivered_blocks: int = 0
    dropped_blocks: int = 0
    overflow_count: int = 0
    run_time_s: float = 0.0
    stream_time_s: float = 0.0
    channels_tracking: int = 0
    pvt_count: int = 0
    stages: dict = field(default_factory=dict)
    status: str = "ok"
    error: str = ""

    @property
    def avg_overflows_per_sec(self):
        return self.overflow_count / self.run_time_s if self.run_time_s > 0 else 0.0

    @property
    def avg_time_between_overflows_s(self):
        if self.overflow_count == 0:
            return None
        return self.run_time_s / self.overflow_count

    @property
    def wall_to_stream_ratio(self):
        return self.run_time_s / self.stream_time_s if self.stream_time_s > 0 else 0.0

    def consumer_mean_iteration_s(self):
        t = 0.0
        for name in ("tracking", "acquisition", "pvt", "logging"):
            if name in self.stages:
                t += self.stages[name].total_s
        return t / self.delivered_blocks if self.delivered_blocks else 0.0

    def to_text(self) -> str:
        lines = [
            f"status={self.status}",
            f"produced_blocks={self.produced_blocks}",
            f"delivered_blocks={self.delivered_blocks}",
            f"dropped_blocks={self.dropped_blocks}",
            f"overflow_count={self.overflow_count}",
            f"avg_overflows_per_sec={self.avg_overflows_per_sec:.6f}",
            "avg_time_between_overflows_s=" + (
                "none" if self.avg_time_between_overflows_s is None
                else f"{self.avg_time_between_overflows_s:.3f}"),
            f"run_time_s={self.run_time_s:.3f}",
            f"stream_time_s={self.stream_time_s:.3f}",
            f"wall_to_stream_ratio={self.wall_to_stream_ratio:.4f}",
            f"channels_tracking={self.channels_tracking}",
            f"pvt_count={self.pvt_count}",
            f"consumer_mean_iteration_s={self.consumer_mean_iteration_s():.6f}",
        ]
        for name, st in sorted(self.stages.items()):
            lines.append(f"stage_{name}_mean_s={st.mean_s:.6f}")
            lines.append(f"stage_{name}_max_s={st.max_s:.6f}")
        if self.error:
            lines.append(f"error={self.error}")
        return "\n".join(lines) + "\n"
