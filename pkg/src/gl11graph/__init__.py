"""Exact flat GL(1|1) connections on trivalent fatgraphs."""
from __future__ import annotations

from .grassmann import GrassmannNumber
from .supermatrix import Supermatrix
from .coords import EdgeCoords, HatCoords
from .fatgraph import Fatgraph

__version__ = "0.1.0"

__all__ = ["GrassmannNumber", "Supermatrix", "EdgeCoords", "HatCoords", "Fatgraph", "__version__"]
