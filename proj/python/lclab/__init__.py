"""Long-context data preparation, retrieval, and evaluation toolkit."""

try:
    from ._lclab import *  # noqa: F401,F403
    from ._lclab import __doc__  # noqa: F401
except ImportError:
    from _lclab import *  # noqa: F401,F403
    from _lclab import __doc__  # noqa: F401
