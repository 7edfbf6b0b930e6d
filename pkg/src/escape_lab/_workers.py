import os
from concurrent.futures import ThreadPoolExecutor

from .errors import DomainError

ENV_VAR = "ESCAPE_LAB_THREADS"


def worker_count(requested=None) -> int:
    """Requested workers (default: CPU count), capped by $ESCAPE_LAB_THREADS."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    env = os.environ.get(ENV_VAR, "").strip()
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise DomainError(f"{ENV_VAR}={env!r} is not an integer") from None
        n = min(n, cap)
    return max(1, int(n))


def ordered_map(fn, items, workers=None):
    """``list(map(fn, items))`` spread over threads; output keeps input order."""
    items = list(items)
    n = min(worker_count(workers), len(items))
    if n <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
