"""Wall-clock timings of solver and optimizer calls.

Timings go to the log and to ``RunResult.timings``. They never enter written
artifacts, so repeated runs still write identical CSV and JSON files.
"""

import contextlib
import functools
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterator, Optional

logger = logging.getLogger(__name__)


def timed(label: Optional[str] = None) -> Callable[[Callable], Callable]:
    """Decorator logging each call's duration at DEBUG, and at ERROR when it raises."""

    def decorate(func: Callable) -> Callable:
        name = label or func.__name__

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                logger.error(f"{name} failed after {time.perf_counter() - start:.3f}s: {e}")
                raise
            logger.debug(f"{name} took {time.perf_counter() - start:.3f}s")
            return result

        return wrapper

    return decorate


@dataclass
class RunTimings:
    """Seconds spent per stage of one experiment (classify, advance, fd_advance, ...)."""

    seconds: Dict[str, float] = field(default_factory=dict)
    calls: Dict[str, int] = field(default_factory=dict)

    @contextlib.contextmanager
    def measure(self, stage: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            self.seconds[stage] = self.seconds.get(stage, 0.0) + elapsed
            self.calls[stage] = self.calls.get(stage, 0) + 1

    @property
    def total(self) -> float:
        return sum(self.seconds.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seconds": {stage: round(value, 6) for stage, value in self.seconds.items()},
            "calls": dict(self.calls),
            "total_seconds": round(self.total, 6),
        }

    def log_summary(self, level: int = logging.DEBUG) -> None:
        for stage, value in self.seconds.items():
            logger.log(level, f"{stage}: {value:.3f}s over {self.calls[stage]} call(s)")
