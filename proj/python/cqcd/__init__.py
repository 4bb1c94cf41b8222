from ._cqcd import *  # noqa: F401,F403
from ._cqcd import __doc__  # noqa: F401
