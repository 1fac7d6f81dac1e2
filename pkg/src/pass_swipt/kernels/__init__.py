"""Hot kernels with a compiled core and a numpy fallback.

The Cython extension ``_core`` is used when it has been built; otherwise the
pure-Python ``_fallback`` module is used. Set ``PASS_SWIPT_BACKEND=python``
to force the fallback.

Kernels
-------
aggregate_gains
    Complex aggregate channel for a batch of layouts and receivers.
score_gains
    Objective and relative constraint violation from aggregate gains.
repair_spacing
    Least-squares projection of layouts onto the minimum-spacing set.
pso_loop
    The full LDW-PSO iteration loop on a prepared swarm.
"""
import os

from . import _fallback as fallback

try:
    from . import _core as compiled
except ImportError:  # extension not built
    compiled = None

if compiled is not None and os.environ.get("PASS_SWIPT_BACKEND", "").lower() != "python":
    backend = compiled
else:
    backend = fallback

BACKEND = backend.NAME

aggregate_gains = backend.aggregate_gains
score_gains = backend.score_gains
repair_spacing = backend.repair_spacing
pso_loop = backend.pso_loop
better = backend.better
best_index = backend.best_index

__all__ = [
    "BACKEND", "aggregate_gains", "score_gains", "repair_spacing", "pso_loop",
    "better", "best_index", "compiled", "fallback",
]
