"""Fragment-level evidence selection for retrieval-augmented generation."""

from ._fragsel import *  # noqa: F401,F403
from ._fragsel import __version__  # noqa: F401
