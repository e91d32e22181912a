"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; setting
INFINIKIT_PURE to a nonempty value forces the pure backend.  Both
backends expose the same three callables and agree behaviorally, so
everything above this module is backend-agnostic.
"""

from __future__ import annotations

import os

if os.environ.get("INFINIKIT_PURE"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _pykernels as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.BACKEND
MAX_QL_SWEEPS: int = _impl.MAX_QL_SWEEPS
QL_TOL: float = _impl.QL_TOL

eig_sym = _impl.eig_sym
checkpoint_sums = _impl.checkpoint_sums
power_checkpoint_sums = _impl.power_checkpoint_sums
