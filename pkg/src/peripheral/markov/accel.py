"""Select jitted or plain-Python graph kernels.

Set ``PERIPHERAL_NUMBA=0`` to force the pure-Python path (same code, not compiled).
"""

import functools
import os

from . import kernels

ENV_FLAG = "PERIPHERAL_NUMBA"
_NAMES = ("tarjan_scc", "bottom_components", "component_periods")


def numba_enabled() -> bool:
    if os.environ.get(ENV_FLAG, "1").strip().lower() in ("0", "false", "no", "off"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


@functools.lru_cache(maxsize=4)
def get_kernels(use_numba: bool | None = None):
    """``(tarjan_scc, bottom_components, component_periods)`` for the chosen backend."""
    if use_numba is None:
        use_numba = numba_enabled()
    funcs = tuple(getattr(kernels, name) for name in _NAMES)
    if not use_numba:
        return funcs
    import numba

    return tuple(numba.njit(cache=True)(f) for f in funcs)
