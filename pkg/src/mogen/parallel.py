"""Chunked multiprocessing with deterministic reassembly.

Work items are split into contiguous chunks and results come back in chunk
order, so callers can rebuild order-sensitive reductions exactly.  A
:class:`ChunkPool` forks its workers once and shares the item list with
them via copy-on-write (fork start method, Linux target), so repeated
passes over the same corpus ship only chunk bounds and results across
process boundaries.  Workers only run pure functions on plain data.
"""

from __future__ import annotations

import multiprocessing
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

# Snapshot inherited by forked workers; the parent clears it right after the
# fork, each child keeps its copy for the lifetime of the pool.
_FORK_ITEMS: Sequence | None = None


def _run_task(task):
    fn, start, end = task
    return fn(_FORK_ITEMS[start:end])


def split_bounds(n: int, n_chunks: int) -> list[tuple[int, int]]:
    """Bounds of up to ``n_chunks`` contiguous, near-equal chunks."""
    n_chunks = max(1, min(n_chunks, n))
    size, extra = divmod(n, n_chunks)
    bounds = []
    start = 0
    for i in range(n_chunks):
        end = start + size + (1 if i < extra else 0)
        bounds.append((start, end))
        start = end
    return bounds


class ChunkPool:
    """Applies functions to contiguous chunks of a fixed item list.

    With ``workers <= 1`` (or a trivially small list) everything runs
    inline; the parallel and serial paths share the same chunk functions.
    """

    def __init__(self, items: Sequence[T], workers: int = 1):
        global _FORK_ITEMS
        self.items = items
        self._pool = None
        self._bounds = [(0, len(items))]
        if workers > 1 and len(items) > 1:
            self._bounds = split_bounds(len(items), workers)
            if len(self._bounds) > 1:
                ctx = multiprocessing.get_context("fork")
                _FORK_ITEMS = items
                try:
                    self._pool = ctx.Pool(processes=len(self._bounds))
                finally:
                    _FORK_ITEMS = None

    def run(self, fn: Callable[[Sequence[T]], R], ordered: bool = True) -> list[R]:
        """``fn`` over each chunk.

        ``ordered=True`` returns results in chunk order (required for
        order-sensitive reductions); ``ordered=False`` yields them as they
        finish, which overlaps the caller's reduction with ongoing work and
        is safe for commutative merges.
        """
        if self._pool is None:
            return [fn(self.items[start:end]) for start, end in self._bounds]
        tasks = [(fn, start, end) for start, end in self._bounds]
        mapper = self._pool.imap if ordered else self._pool.imap_unordered
        return list(mapper(_run_task, tasks))

    def close(self) -> None:
        if self._pool is not None:
            self._pool.close()
            self._pool.join()
            self._pool = None

    def __enter__(self) -> "ChunkPool":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def map_chunks(
    fn: Callable[[Sequence[T]], R], items: Sequence[T], workers: int
) -> list[R]:
    """One-shot convenience wrapper around :class:`ChunkPool`."""
    with ChunkPool(items, workers) as pool:
        return pool.run(fn)
