import asyncio
import math
from typing import Any, Callable, List, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def split_list(data: Sequence[Any], n_chunks: int) -> List[List[Any]]:
    """Splits a list into n roughly equal chunks."""
    data = list(data)
    if n_chunks <= 0:
        return [data]
    chunk_size = math.ceil(len(data) / n_chunks)
    if chunk_size == 0:
        return [[] for _ in range(n_chunks)]
    return [data[i:i + chunk_size] for i in range(0, len(data), chunk_size)]


async def _gather_chunks(fn: Callable[[List[T]], List[R]], chunks: List[List[T]]) -> List[List[R]]:
    tasks = [asyncio.to_thread(fn, chunk) for chunk in chunks]
    return await asyncio.gather(*tasks)


def run_chunked(fn: Callable[[List[T]], List[R]], items: Sequence[T], threads: int = 1) -> List[R]:
    """
    Maps `fn` over chunks of `items` and concatenates the results in input
    order. With one thread (or one chunk) no event loop is started.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return list(fn(items))
    chunks = [chunk for chunk in split_list(items, threads) if chunk]
    results = asyncio.run(_gather_chunks(fn, chunks))
    merged: List[R] = []
    for part in results:
        merged.extend(part)
    return merged
