import os
from concurrent.futures import ThreadPoolExecutor


def max_threads():
    """Thread cap from ``HYPERCONLAB_THREADS`` (default 1: serial)."""
    raw = os.environ.get("HYPERCONLAB_THREADS", "").strip()
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def pmap(fn, items):
    """Ordered map; results come back in input order regardless of threading."""
    items = list(items)
    n = min(max_threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
