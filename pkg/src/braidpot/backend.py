"""Backend selection: compiled extension if importable, numpy fallback otherwise.

Set BRAIDPOT_BACKEND=python to force the fallback (used by the benchmark
and by tests that compare the two implementations).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("BRAIDPOT_BACKEND", "").lower() == "python":
    _impl = _kernels_py
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

name = _impl.BACKEND_NAME

i_orders = _impl.i_orders
i_orders_scaled = _impl.i_orders_scaled
j_orders = _impl.j_orders
k_orders = _impl.k_orders
k_orders_scaled = _impl.k_orders_scaled
yukawa_sum = _impl.yukawa_sum
nocore_reduce = _impl.nocore_reduce
dir_reduce = _impl.dir_reduce


def get_backends():
    """Both kernel implementations, for cross-checks and benchmarks."""
    impls = {"python": _kernels_py}
    try:
        from . import _ckernels

        impls["compiled"] = _ckernels
    except ImportError:
        pass
    return impls
