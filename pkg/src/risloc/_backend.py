"""Kernel backend selection.

The compiled Cython kernels are preferred when importable; otherwise the
numpy implementation is used. Set RISLOC_BACKEND=python to force the
fallback, or RISLOC_BACKEND=compiled to fail loudly if the extension is
missing. Both backends expose identical signatures and satisfy the same
accuracy contracts (erf absolute error <= 1.5e-7).
"""
import os

_requested = os.environ.get("RISLOC_BACKEND", "auto").lower()

if _requested not in ("auto", "compiled", "python"):
    raise RuntimeError(f"unknown RISLOC_BACKEND value: {_requested!r}")

if _requested == "python":
    from . import _kernels_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        from . import _kernels_py as _impl
        BACKEND = "python"

erf = _impl.erf
coherent_phases = _impl.coherent_phases
quantized_pmf = _impl.quantized_pmf
fi_stencil = _impl.fi_stencil
