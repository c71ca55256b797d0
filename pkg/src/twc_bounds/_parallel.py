"""Chunked worker pool for grid sweeps.

Chunks are produced by the caller with a fixed size, so the set of chunks
(and hence every per-chunk reduction) is the same for any worker count.
Results always come back in chunk order.
"""

import os
from collections import deque
from concurrent.futures import Future, ThreadPoolExecutor
from typing import Callable, Deque, Iterable, Iterator, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "TWC_THREADS"


def resolve_workers(threads: Optional[int] = None) -> int:
    """Worker count from an explicit value, else TWC_THREADS; 0 means one per CPU."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "").strip()
        threads = int(raw) if raw else 0
    if threads < 0:
        raise ValueError(f"thread count must be >= 0, got {threads}")
    if threads == 0:
        return os.cpu_count() or 1
    return threads


def run_chunks(func: Callable[[T], R], chunks: Iterable[T], workers: int = 1) -> Iterator[R]:
    """Apply `func` to every chunk, yielding results in input order.

    With `workers <= 1` everything runs inline. Otherwise at most
    2 * workers chunks are in flight, which bounds memory for large grids.
    Closing the iterator early cancels chunks that have not started.
    """
    if workers <= 1:
        for chunk in chunks:
            yield func(chunk)
        return

    pending: Deque[Future] = deque()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        try:
            for chunk in chunks:
                pending.append(pool.submit(func, chunk))
                if len(pending) >= 2 * workers:
                    yield pending.popleft().result()
            while pending:
                yield pending.popleft().result()
        finally:
            for future in pending:
                future.cancel()
