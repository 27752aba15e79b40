"""Sequential e-value forecast comparison and fusion.

Thin wrapper over the compiled extension; see the project README for the
full interface. Matrix inputs are (steps x horizon) float64 arrays.
"""

try:
    from ._eselect import *  # noqa: F401,F403  (installed package layout)
    from ._eselect import __version__  # noqa: F401
except ImportError:  # in-tree build: the module sits on PYTHONPATH
    from _eselect import *  # noqa: F401,F403
    from _eselect import __version__  # noqa: F401
