"""clatool: generate, verify and apply constrained locating arrays."""

from importlib.metadata import version

__version__ = version("clatool")
