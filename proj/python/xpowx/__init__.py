"""Python access to the xpowx number-theory library."""

from ._core import *  # noqa: F401,F403
from ._core import BudgetError, DomainError

__version__ = "0.1.0"
