"""Secret key rates for the loss-tolerant QKD protocol with flawed states and mismatched detectors."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
