from ._tropmap import *  # noqa: F401,F403
