"""Hot-loop kernels with a compiled core and a pure-Python fallback.

The compiled extension (_ckernels, built from Cython) is preferred; set
DEFZETA_BACKEND=python to force the fallback.  Both implementations perform
identical exact integer arithmetic, so results are bit-for-bit equal.
"""

import os

from . import pybackend as _py

_impl = _py
if os.environ.get("DEFZETA_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _py

backend_name = _impl.BACKEND
mat_mul_add = _impl.mat_mul_add
vec_addmul = _impl.vec_addmul
mod_list = _impl.mod_list
pack_bytes = _impl.pack_bytes
unpack_add = _impl.unpack_add
conv_trunc = _impl.conv_trunc
csr_apply = _impl.csr_apply
lincomb = _impl.lincomb
count_projective = _impl.count_projective


def get_backend(name):
    """Explicit backend access, used by tests and the benchmark."""
    if name == "python":
        return _py
    if name == "c":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
