try:
    from ._wdistlab import *  # noqa: F401,F403
    from ._wdistlab import __doc__  # noqa: F401
except ImportError:
    from _wdistlab import *  # noqa: F401,F403
    from _wdistlab import __doc__  # noqa: F401
