"""Deterministic block-parallel map.

Work is cut into fixed blocks whose boundaries never depend on the worker
count, and results come back in block order.  Callers reduce the per-block
partial sums with ``math.fsum`` (exactly rounded), so totals are bit-identical
for any number of workers.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_THREADS = "THREADS"


def resolve_workers(workers: int | None = None) -> int:
    """Explicit value first, then the THREADS environment variable, then 1."""
    if workers is None:
        env = os.environ.get(ENV_THREADS, "").strip()
        workers = int(env) if env else 1
    workers = int(workers)
    if workers < 1:
        raise ValueError("worker count must be >= 1")
    return workers


def block_ranges(total: int, block: int) -> list[tuple[int, int]]:
    """Half-open [start, stop) ranges of length ``block`` covering ``range(total)``."""
    return [(s, min(s + block, total)) for s in range(0, total, block)]


def map_blocks(fn: Callable[[T], R], items: Sequence[T], workers: int | None = None) -> list[R]:
    """``[fn(x) for x in items]``, optionally across processes, order preserved."""
    workers = resolve_workers(workers)
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))
