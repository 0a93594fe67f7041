"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback is
always present.  DIAGCOUNT_KERNELS=python (or =compiled) forces a choice;
forcing the compiled backend when it is missing raises at import time so a
misconfigured deployment fails loudly rather than silently running slow.
"""

from __future__ import annotations

import os

from . import _kernels_py

_FORCED = os.environ.get("DIAGCOUNT_KERNELS", "").strip().lower()

_compiled = None
if _FORCED not in ("python", "py", "pure"):
    try:
        from . import _ckernels as _compiled
    except ImportError:
        _compiled = None
        if _FORCED in ("compiled", "c"):
            raise ImportError(
                "DIAGCOUNT_KERNELS requested the compiled backend but "
                "diagcount._ckernels is not importable; rebuild the package "
                "or unset the variable")

_impl = _compiled if _compiled is not None else _kernels_py

BACKEND = _impl.BACKEND_NAME

enum_product_powers = _impl.enum_product_powers
value_counts = _impl.value_counts
fold_dense = _impl.fold_dense
dot_opposite = _impl.dot_opposite
fold_sparse = _impl.fold_sparse
join_sparse = _impl.join_sparse
residue_power_counts = _impl.residue_power_counts
congruence_count = _impl.congruence_count


def available_backends() -> dict:
    """Importable kernel modules keyed by name (for tests and benchmarks)."""
    out = {"python": _kernels_py}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out
