"""Deterministic parallel mapping over pre-seeded independent tasks."""

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "FLAGTYPE_THREADS"


def thread_count():
    """Worker cap: FLAGTYPE_THREADS if set, else a small multiple of cores."""
    raw = os.environ.get(THREADS_ENV, "")
    if raw.strip():
        try:
            return max(1, int(raw))
        except ValueError:
            return 1
    return max(1, min(8, os.cpu_count() or 1))


def parallel_map(fn, items):
    """Map fn over items, merging results in submission order.

    Each item must carry its own random state (seeds are split by the
    caller), so the result is independent of scheduling and of the
    worker count.
    """
    items = list(items)
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
