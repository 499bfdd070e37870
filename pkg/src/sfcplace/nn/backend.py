"""Kernel backend selection.

Prefers the compiled extension and falls back to numpy. Force a choice
with SFCPLACE_BACKEND=compiled or SFCPLACE_BACKEND=python.
"""

import os

_requested = os.environ.get("SFCPLACE_BACKEND", "").strip().lower()

if _requested == "python":
    from . import _kernels_py as kernels
elif _requested == "compiled":
    from . import _kernels as kernels  # ImportError here means no extension built
elif _requested == "":
    try:
        from . import _kernels as kernels
    except ImportError:
        from . import _kernels_py as kernels
else:
    raise RuntimeError(
        f"SFCPLACE_BACKEND={_requested!r} not recognised; "
        "use 'compiled' or 'python'"
    )

BACKEND_NAME = kernels.NAME


def available_backends():
    """Importable kernel modules, compiled first when present."""
    backends = []
    try:
        from . import _kernels

        backends.append(_kernels)
    except ImportError:
        pass
    from . import _kernels_py

    backends.append(_kernels_py)
    return backends
