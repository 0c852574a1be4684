"""Approximate shortest descending paths on triangulated terrains.

Typical use::

    from sdpath import Solver, generators
    t = generators.ramp()
    sol = Solver(t, epsilon=0.1, source=0)
    sol.query([1, 1, 0]).length
"""

from .discretizer import Discretization, compute_delta, discretize, place_steiner, place_uniform
from .errors import (
    DegenerateTerrainError,
    EpsilonDomainError,
    FacesNotAdjacentError,
    MalformedPathError,
    NoDescendingPathError,
    OffSurfaceError,
    SDPError,
    TerrainIndexError,
    TerrainParseError,
    UnknownNodeError,
    WrongLocationKindError,
)
from .geometry import Path
from .graph import DescendGraph
from .oracle import (
    euclid_lower_bound,
    refine_study,
    sample_descending_paths,
    snap_path,
    two_face_exact,
    verify_descending,
)
from .query import QueryAnswer, Solver, candidate_nodes, query
from .sssp import IntervalList, SPTree, bushwhack, dijkstra, extract_path
from .terrain import (
    GeomParams,
    Location,
    Terrain,
    ValidationReport,
    dump_terrain,
    geometry_params,
    insert_source,
    load_terrain,
    locate,
    validate,
)
from . import generators

__version__ = "0.1.0"
