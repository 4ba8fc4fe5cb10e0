"""Spectral continuation of periodic traveling waves for fractional KdV."""

from ._fkdv import *  # noqa: F401,F403
from ._fkdv import FkdvError, __doc__  # noqa: F401
