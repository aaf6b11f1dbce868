"""Semantic Monte Carlo localization on floor-plan maps.

Thin wrapper around the C++ core; see the project README for the data
formats and the CLI.
"""

from ._smcl import *  # noqa: F401,F403
from ._smcl import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
