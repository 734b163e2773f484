"""Stepping-kernel backend selection.

The scenario integrator exists twice: a compiled Cython extension
(``_core_cy``) for speed and a pure-Python twin (``_core_py``) as a
dependency-free fallback.  Both implement identical arithmetic; the import
below picks the extension when it is available unless the environment
variable ``WINDFFS_PURE_PYTHON`` is set to a non-empty value.

``backend`` is the module-level default; ``get_backend("python"|"compiled")``
fetches a specific one (used by the cross-checking tests and the benchmark).
"""

from __future__ import annotations

import os

from . import _core_py
from ._plan import KernelOutput, KernelPlan  # noqa: F401  (re-export)

_FORCE_PY = bool(os.environ.get("WINDFFS_PURE_PYTHON"))

try:
    from . import _core_cy
except ImportError:  # extension not built
    _core_cy = None

backend = _core_py if (_FORCE_PY or _core_cy is None) else _core_cy


def get_backend(name: str | None = None):
    """Return a kernel backend: "python", "compiled", or None for the default."""
    if name is None:
        return backend
    if name == "python":
        return _core_py
    if name == "compiled":
        if _core_cy is None:
            raise RuntimeError("compiled kernel is not available (extension not built)")
        return _core_cy
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    names = ["python"]
    if _core_cy is not None:
        names.append("compiled")
    return names
