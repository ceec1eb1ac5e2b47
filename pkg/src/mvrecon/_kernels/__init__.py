"""Hot numeric kernels with two interchangeable implementations.

Each kernel ships a numba ``@njit`` version (scalar loops) and a pure-numpy
vectorized fallback. The active path is chosen once at import time:

  * numba is used when importable, unless ``MVRECON_DISABLE_NUMBA`` is set
    to anything other than ``0``/``false``/empty;
  * both paths are kept importable for the cross-checking tests and the
    benchmark in ``benchmarks/kernel_bench.py``.

Both implementations of a kernel use the same arithmetic expressions so
their outputs agree bitwise.
"""

from ._select import NUMBA_AVAILABLE, NUMBA_DISABLED, USE_NUMBA
from .closest import nearest_vertex, nearest_vertex_numpy
from .dlt import dlt_triangulate_pairs, dlt_triangulate_pairs_numpy
from .carve import carve_votes, carve_votes_numpy
from .raster import rasterize_faceid, rasterize_faceid_numpy
from .raster import rasterize_colors, rasterize_colors_numpy

__all__ = [
    "USE_NUMBA",
    "NUMBA_AVAILABLE",
    "NUMBA_DISABLED",
    "nearest_vertex",
    "nearest_vertex_numpy",
    "dlt_triangulate_pairs",
    "dlt_triangulate_pairs_numpy",
    "carve_votes",
    "carve_votes_numpy",
    "rasterize_faceid",
    "rasterize_faceid_numpy",
    "rasterize_colors",
    "rasterize_colors_numpy",
]
