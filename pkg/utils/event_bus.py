"""Very small event bus used as the sink between the run loop and its consumers."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Callable
from typing import Any

Handler = Callable[[Any], None]


class EventBus:
    def __init__(self) -> None:
        self._subscribers: dict[str, list[Handler]] = defaultdict(list)

    def subscribe(self, topic: str, handler: Handler) -> Callable[[], None]:
        """Register a handler; the returned callable removes it again."""
        self._subscribers[topic].append(handler)

        def _unsubscribe() -> None:
            handlers = self._subscribers.get(topic, [])
            if handler in handlers:
                handlers.remove(handler)

        return _unsubscribe

    def publish(self, topic: str, payload: Any = None) -> int:
        handlers = list(self._subscribers.get(topic, []))
        for handler in handlers:
            handler(payload)
        return len(handlers)
