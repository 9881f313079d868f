"""Kernel backend selection: compiled extension when available, numpy otherwise.

Set FUZZYSPHERE_PURE_PYTHON=1 to force the numpy kernels (used by the
benchmark and by backend parity tests).
"""
import os

from . import _core_py

basis_dtheta = _core_py.basis_dtheta

if os.environ.get("FUZZYSPHERE_PURE_PYTHON") == "1":
    _impl = _core_py
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _core_py

basis = _impl.basis
synth = _impl.synth
coherent = _impl.coherent

BACKEND = "compiled" if _impl.__name__.endswith("_core") else "python"
