"""Kernel selection: compiled extension if available, numpy fallback otherwise.

Set FOMCERT_PURE=1 to force the pure-Python kernels.
"""

import os

from . import _pykernels

if os.environ.get("FOMCERT_PURE") == "1":
    _impl = _pykernels
else:
    try:
        from fomcert import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

IMPLEMENTATION = _impl.IMPLEMENTATION

soft_threshold = _impl.soft_threshold
project_simplex = _impl.project_simplex
entropy_prox_simplex = _impl.entropy_prox_simplex
sq_euclid_bregman = _impl.sq_euclid_bregman
entropy_bregman = _impl.entropy_bregman
burg_bregman = _impl.burg_bregman
