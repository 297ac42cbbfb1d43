"""Hot-kernel backend selection.

The compiled extension (``_core``, Cython) is preferred; the pure-numpy
``_fallback`` is used when the extension is missing or when the
environment variable ``CATMC_PURE_PYTHON`` is set to a non-empty value.
``BACKEND`` records which one is active.
"""

import os

if os.environ.get("CATMC_PURE_PYTHON"):
    from . import _fallback as _impl

    BACKEND = "python"
else:
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _fallback as _impl

        BACKEND = "python"

logit_probs = _impl.logit_probs
logit_derivs = _impl.logit_derivs
obs_loglik = _impl.obs_loglik
obs_loglik_grad = _impl.obs_loglik_grad

__all__ = [
    "BACKEND",
    "logit_probs",
    "logit_derivs",
    "obs_loglik",
    "obs_loglik_grad",
]
