"""Thread-pool plumbing shared by the comparison and simulation drivers.

Work units carry their own derived seeds, so scheduling order never
affects results; callers re-assemble outputs by index.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def resolve_threads(threads: int | None) -> int:
    """Explicit value, else CSVNET_THREADS, else the available core count."""
    if threads is None:
        env = os.environ.get("CSVNET_THREADS", "").strip()
        threads = int(env) if env else (os.cpu_count() or 1)
    threads = int(threads)
    if threads < 1:
        raise ValueError("threads must be at least 1")
    return threads


def run_tasks(tasks, threads: int | None) -> list:
    """Run callables and return their results in submission order."""
    tasks = list(tasks)
    threads = resolve_threads(threads)
    if threads == 1 or len(tasks) <= 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return [future.result() for future in [pool.submit(t) for t in tasks]]
