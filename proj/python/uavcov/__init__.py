"""UAV swarm coverage planning: grid world, link budget, clustering, Q-learning planner."""

from ._uavcov import *  # noqa: F401,F403
from ._uavcov import __version__  # noqa: F401
