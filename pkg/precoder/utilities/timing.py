"""
Stage Timer
Purpose: Wall-clock timings of the stages of a CLI command (coefficients, solve, simulate, ...)
         for the `timings` field of result documents and the console summary.
Key Decisions: time.perf_counter; repeated stages accumulate. Disabled under --reproducible so
              output documents stay byte-identical.
"""

import time
from contextlib import contextmanager


class StageTimer:
    """
    Accumulates elapsed seconds per named stage.
    """

    def __init__(self, enabled: bool = True):
        """
        Args:
            enabled: When False, stages still run but nothing is recorded.
        """
        self.enabled = enabled
        self.seconds: dict[str, float] = {}
        self.counts: dict[str, int] = {}

    @contextmanager
    def stage(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            if self.enabled:
                self.seconds[name] = self.seconds.get(name, 0.0) + time.perf_counter() - start
                self.counts[name] = self.counts.get(name, 0) + 1

    @property
    def total(self) -> float:
        return sum(self.seconds.values())

    def as_dict(self) -> dict[str, float]:
        """Rounded timings for result documents; empty when disabled."""
        return {name: round(sec, 6) for name, sec in self.seconds.items()}
