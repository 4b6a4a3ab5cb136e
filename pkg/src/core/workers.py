"""Thread pool helpers.

Results always come back in submission order, so callers see the same
output for any pool size.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from src.core.config import CONF

T = TypeVar("T")
R = TypeVar("R")


def run_ordered(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    items = list(items)
    workers = max(1, min(threads or CONF.threads, len(items) or 1))
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))

