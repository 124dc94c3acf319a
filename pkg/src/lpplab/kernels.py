"""Backend selection and replica-parallel drivers for the sweep kernels.

The compiled extension is used when it imports; ``LPPLAB_BACKEND=python``
forces the numpy mirror.  Both produce identical bits, so the choice only
affects speed.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _fallback

_compiled = None
if os.environ.get("LPPLAB_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:  # pragma: no cover - depends on the build
        _compiled = None

backend = _compiled if _compiled is not None else _fallback
BACKEND = backend.backend_name()


def default_threads():
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:  # pragma: no cover
        return os.cpu_count() or 1


def split_range(r0, r1, parts):
    """Contiguous, nearly equal pieces of [r0, r1)."""
    parts = max(1, min(parts, r1 - r0))
    edges = np.linspace(r0, r1, parts + 1).round().astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def run_replicas(fn, r0, r1, outs, args, threads=None, impl=None):
    """Call ``fn(seed.., lo, hi, .., *out_slices)`` over pieces of [r0, r1).

    ``args`` is a callable (lo, hi) -> positional args up to the outputs;
    ``outs`` are arrays whose first axis indexes replicas r0..r1-1.
    """
    threads = threads or default_threads()
    pieces = split_range(r0, r1, threads)

    def work(piece):
        lo, hi = piece
        sl = [o[lo - r0:hi - r0] for o in outs]
        fn(*args(lo, hi), *sl)

    if len(pieces) <= 1:
        for p in pieces:
            work(p)
    else:
        with ThreadPoolExecutor(len(pieces)) as ex:
            list(ex.map(work, pieces))
    return outs


def get(name, impl=None):
    mod = {None: backend, "compiled": _compiled, "python": _fallback}[impl]
    if mod is None:
        raise RuntimeError("compiled kernels are not available")
    return getattr(mod, name)


def have_compiled():
    return _compiled is not None
