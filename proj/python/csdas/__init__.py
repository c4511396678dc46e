"""Compressed-domain vibration detection and classification for DAS.

Thin Python surface over the C++ core: observation matrices, CS
compression, filter-bank design and compressed-domain projection, band
energies in both domains, and OMP reconstruction.
"""

try:
    from ._csdas import *  # noqa: F401,F403
    from ._csdas import __version__  # noqa: F401
except ImportError:  # build-tree layout: extension next to the package
    from _csdas import *  # noqa: F401,F403
    from _csdas import __version__  # noqa: F401
