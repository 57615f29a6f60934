from ._hwfuzz import *  # noqa: F401,F403
from ._hwfuzz import __doc__  # noqa: F401

__version__ = "0.1.0"
