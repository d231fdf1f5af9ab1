"""Exact symbolic toolkit for higher spin conformally invariant operators in Clifford analysis."""

from __future__ import annotations

__version__ = "1.0.0"

from .clifford import Blade, DimensionError, Multivector  # noqa: E402
from .params import ParameterError, SpaceParams  # noqa: E402
from .weighted import WeightError, WeightedFunction  # noqa: E402
