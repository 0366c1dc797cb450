"""Kernel backend selection.

Prefers the compiled extension (``spatialmem._native._kernels``) and falls
back to the pure numpy implementation.  Set ``SPATIALMEM_PURE=1`` to force
the fallback, e.g. for the backend comparison benchmark.
"""

import os

from . import _pure

if os.environ.get("SPATIALMEM_PURE") == "1":
    _impl = _pure
else:
    try:
        from ._native import _kernels as _impl
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND

morton_encode = _impl.morton_encode
morton_decode = _impl.morton_decode
morton_encode_batch = _impl.morton_encode_batch
morton_decode_batch = _impl.morton_decode_batch
dots = getattr(_impl, "dots", _pure.dots)
search_layer = _impl.search_layer


def get_backend(name: str):
    """Return a specific backend module ("pure" or "native") for benchmarks."""
    if name == "pure":
        return _pure
    from ._native import _kernels
    return _kernels
