"""Kernel selection: compiled extension when available, pure Python otherwise.

Set RGC_KERNEL=c to require the compiled kernel (ImportError if missing),
RGC_KERNEL=py to force the pure fallback, anything else/unset picks
automatically.
"""

import os

_choice = os.environ.get("RGC_KERNEL", "auto")
if _choice not in ("auto", "c", "py"):
    raise ImportError(f"RGC_KERNEL must be 'auto', 'c' or 'py', got {_choice!r}")

if _choice == "py":
    from . import _kernel_py as _impl
    BACKEND = "py"
else:
    try:
        from . import _kernel_c as _impl  # type: ignore[attr-defined]
        BACKEND = "c"
    except ImportError:
        if _choice == "c":
            raise
        from . import _kernel_py as _impl
        BACKEND = "py"

mat_mul = _impl.mat_mul
mat_rank = _impl.mat_rank
mat_solve = _impl.mat_solve
