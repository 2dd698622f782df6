"""Backend selection for the hot loops.

The compiled extension is preferred; set ``FRACTONLAB_PURE_PYTHON=1`` to force
the pure-Python fallback. Both backends produce bit-identical results.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and not os.environ.get("FRACTONLAB_PURE_PYTHON"):
    impl: ModuleType = _compiled
    BACKEND = "compiled"
else:
    impl = _pykernels
    BACKEND = "python"


def backend(name: str | None = None) -> ModuleType:
    """Return a kernel module by name ('compiled' or 'python'); None gives the default."""
    if name is None:
        return impl
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def has_compiled() -> bool:
    return _compiled is not None
