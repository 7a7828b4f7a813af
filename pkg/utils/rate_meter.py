"""Rolling step-rate meter for the run loop."""

from __future__ import annotations

import time
from collections import deque


class RateMeter:
    def __init__(self, buffer_len: int = 16) -> None:
        self._started = time.perf_counter()
        self._last_tick = self._started
        self._difftimes: deque[float] = deque(maxlen=max(1, buffer_len))

    def tick(self) -> float:
        """Record one completed step and return the duration of that step in seconds."""
        now = time.perf_counter()
        elapsed = now - self._last_tick
        self._last_tick = now
        self._difftimes.append(elapsed)
        return elapsed

    def rate(self) -> float:
        """Steps per second over the rolling window."""
        if not self._difftimes:
            return 0.0
        mean = sum(self._difftimes) / len(self._difftimes)
        return round(1.0 / mean, 2) if mean > 0 else 0.0

    def seconds_per_step(self) -> float:
        if not self._difftimes:
            return 0.0
        return sum(self._difftimes) / len(self._difftimes)

    def elapsed(self) -> float:
        return time.perf_counter() - self._started
