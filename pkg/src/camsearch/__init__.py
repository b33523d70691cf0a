"""Interactive multi-camera person-search benchmark toolkit.

Synthesizes camera-network worlds, builds spatio-temporal topology graphs
from trajectories, generates three tracks of search tasks with algorithmic
ground truth, hosts a deterministic witness/tool environment for agents,
and scores runs with turn-weighted metrics.
"""

__version__ = "0.1.0"
