"""Select the elimination kernel backend at import time.

Prefers the compiled extension ``lieforge._ffelim`` when it built; falls back
to the pure-Python twin ``lieforge._ffelim_py``.  Setting ``LIEFORGE_PURE=1``
in the environment forces the pure backend (useful for benchmarking and for
debugging suspected backend divergence).
"""

from __future__ import annotations

import os

if os.environ.get("LIEFORGE_PURE") == "1":
    from lieforge._ffelim_py import ff_forward_dense, ff_forward_sparse

    BACKEND = "pure"
else:
    try:
        from lieforge._ffelim import ff_forward_dense, ff_forward_sparse

        BACKEND = "compiled"
    except ImportError:
        from lieforge._ffelim_py import ff_forward_dense, ff_forward_sparse

        BACKEND = "pure"

__all__ = ["ff_forward_dense", "ff_forward_sparse", "BACKEND"]
