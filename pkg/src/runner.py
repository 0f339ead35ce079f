import asyncio
from collections.abc import Callable, Sequence

from logger import get_logger

logger = get_logger(__name__)


async def map_ordered[T, R](
    func: Callable[[T], R], items: Sequence[T], max_concurrent: int = 4
) -> list[R]:
    """
    Evaluates func over items on worker threads.
    Limits concurrency with a semaphore; results come back in input order.
    """
    semaphore = asyncio.Semaphore(max(max_concurrent, 1))

    async def sem_eval(item: T) -> R:
        async with semaphore:
            return await asyncio.to_thread(func, item)

    tasks = [sem_eval(item) for item in items]
    return await asyncio.gather(*tasks)


def run_ordered[T, R](func: Callable[[T], R], items: Sequence[T], workers: int = 1) -> list[R]:
    """
    Synchronous entry point: sequential for workers <= 1, threaded otherwise.
    Output order never depends on the number of workers.
    """
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    logger.debug("Evaluating %d items on %d workers", len(items), workers)
    return asyncio.run(map_ordered(func, items, workers))
