"""Import-time selection between the numba and numpy kernel paths."""

import os

_flag = os.environ.get("MVRECON_DISABLE_NUMBA", "0").strip().lower()
NUMBA_DISABLED = _flag not in ("", "0", "false", "no")

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised via the env flag instead
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):  # fallback decorator, never used to run code
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


USE_NUMBA = NUMBA_AVAILABLE and not NUMBA_DISABLED
