"""Sampling-based Earth Mover's Distance testers and estimators."""

from ._emdtest import *  # noqa: F401,F403
from ._emdtest import __version__  # noqa: F401
