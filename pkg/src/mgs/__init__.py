"""Maximal green sequences for quivers of finite mutation type."""

from .construction import ConstructionTrace, construct_closed, construct_with_boundary
from .quiver import (
    IceQuiver,
    VertexState,
    apply_green_sequence,
    canonical_form,
    framed,
    mutate,
    parse_quiver,
    permanently_red_vertices,
    serialize_quiver,
    vertex_state,
)
from .search import NotFoundWithin, build_catalog, enumerate_class, find_mgs, search_mgs
from .seeds import seed
from .surface import (
    MarkedSurface,
    TaggedTriangulation,
    flip,
    load_triangulation,
    parse_triangulation,
    quiver_of,
    serialize_triangulation,
)

__version__ = "0.1.0"
