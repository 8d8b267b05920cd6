"""Behavior trees that share knowledge: tick engine, stringBT codec,
query/response transfer protocol, and a search-and-rescue simulator."""
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
