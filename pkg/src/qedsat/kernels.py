"""Select the compiled kernels when available.

Set ``QEDSAT_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
iterate_sequence = _kernels_py.iterate_sequence

if os.environ.get("QEDSAT_PURE_PYTHON", "").strip() not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        BACKEND = "cython"
        iterate_sequence = _compiled.iterate_sequence
