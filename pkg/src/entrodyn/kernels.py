"""Backend selection for the hot loops.

The compiled extension is used when it imports; setting the environment
variable ``ENTRODYN_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os

if os.environ.get("ENTRODYN_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _pykernels as _impl

        BACKEND = "python"

replicator_field = _impl.replicator_field
theta_elements = _impl.theta_elements
rk4_step = _impl.rk4_step
integrate = _impl.integrate
propagate = _impl.propagate
