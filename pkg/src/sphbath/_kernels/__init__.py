"""Hot numerical kernels with a compiled core and a pure-Python fallback.

Import-time selection: the Cython extension `_core` is used when present,
unless SPHBATH_PURE=1 forces the fallback.  Both expose the same API and
are cross-checked in the test suite; `BACKEND` records which one is live.
"""

import os

if os.environ.get("SPHBATH_PURE") == "1":
    from . import _fallback as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _fallback as _impl

BACKEND = _impl.BACKEND
s_sum = _impl.s_sum
s_table_half = _impl.s_table_half
kappa_box = _impl.kappa_box
kappa_box_many = _impl.kappa_box_many
mode_decay_sum = _impl.mode_decay_sum

__all__ = [
    "BACKEND",
    "s_sum",
    "s_table_half",
    "kappa_box",
    "kappa_box_many",
    "mode_decay_sum",
]
