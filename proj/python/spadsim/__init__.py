"""Gated-mode SPAD simulation and analysis toolkit."""

from ._spadsim import *  # noqa: F401,F403
from ._spadsim import __doc__  # noqa: F401
