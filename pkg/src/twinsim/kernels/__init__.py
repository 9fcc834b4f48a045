"""Hot-loop kernels with backend selection at import.

The compiled extension is preferred when built; set ``TWINSIM_KERNELS=pure``
to force the pure-Python fallback (``compiled`` to require the extension).
Both backends produce bit-identical results.
"""

import os

_choice = os.environ.get("TWINSIM_KERNELS", "auto")

if _choice == "pure":
    from . import _purepy as _impl
elif _choice == "compiled":
    from . import _core as _impl  # type: ignore[attr-defined]
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _purepy as _impl

BACKEND: str = _impl.BACKEND
raycast = _impl.raycast
integrate_scan = _impl.integrate_scan
rollout = _impl.rollout

__all__ = ["BACKEND", "raycast", "integrate_scan", "rollout"]
