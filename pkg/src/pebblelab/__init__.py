"""Graph pebbling experiments: exact solvers, random configurations, grids, girth graphs."""

from .graph import Graph, GraphSpec, cartesian_product, diameter, generate, girth, metrics, vertex_connectivity
from .pebbling import (
    Configuration,
    PebblingSolver,
    Status,
    apply_move,
    class0,
    graham_check,
    is_r_solvable,
    is_solvable,
    pebbling_number,
    pi_bounds,
    weight_bound,
)

__version__ = "0.1.0"
