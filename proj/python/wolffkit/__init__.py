"""Wolff potentials, capacities and solvers for -Delta_p u = mu."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
