"""Kernel backend selection.

The hot loops (batched model evaluation and Jacobian assembly inside the
fitter) have two interchangeable implementations: a compiled Cython
extension (``_fast``) and a pure-numpy fallback (``_ref``). The compiled
backend is preferred when importable; set ``SDMAFIT_PURE_PYTHON=1`` to
force the fallback. Both expose identical signatures and are compared
against each other in the test suite and the benchmark script.
"""

import os

if os.environ.get("SDMAFIT_PURE_PYTHON"):
    from . import _ref as _impl

    BACKEND = "python"
else:
    try:
        from . import _fast as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _ref as _impl

        BACKEND = "python"

ma_values = _impl.ma_values
ma_values_argmax = _impl.ma_values_argmax
sma_values = _impl.sma_values
ma_value_jacobian = _impl.ma_value_jacobian
sma_value_jacobian = _impl.sma_value_jacobian
dma_value_jacobian = _impl.dma_value_jacobian
sdma_value_jacobian = _impl.sdma_value_jacobian


def backend_name() -> str:
    """Name of the kernel backend selected at import: compiled or python."""
    return BACKEND
