"""Rainbow subdivisions and blow-ups in expanders, at desk scale."""
from .errors import *  # noqa: F401,F403
from .graph import (
    Bipartition,
    ColouredGraph,
    Graph,
    average_degree,
    bipartition,
    cut_and_density,
    load_coloured_graph,
    load_graph,
)

__version__ = "0.1.0"
