"""Run a function on a thread with a large C stack.

Terms are trees walked recursively; generated code (long application chains,
for example) can nest far deeper than the main thread's stack allows.
"""

from __future__ import annotations

import contextvars
import sys
import threading

STACK_BYTES = 512 * 1024 * 1024
RECURSION_LIMIT = 1_000_000


def run_deep(fn, *args, **kwargs):
    ctx = contextvars.copy_context()
    box: dict = {}

    def target():
        try:
            box["value"] = ctx.run(fn, *args, **kwargs)
        except BaseException as e:  # re-raised on the calling thread
            box["error"] = e

    old_limit = sys.getrecursionlimit()
    old_size = threading.stack_size(STACK_BYTES)
    sys.setrecursionlimit(max(old_limit, RECURSION_LIMIT))
    try:
        th = threading.Thread(target=target, name="stagec-deep")
        th.start()
        th.join()
    finally:
        threading.stack_size(old_size)
        sys.setrecursionlimit(old_limit)
    if "error" in box:
        raise box["error"]
    return box.get("value")
