"""Cycle-driven factual-agent MAS for dynamic representation of emergency situations."""

__version__ = "0.1.0"

from .atn import AgentView, AtnSpec, default_atn, parse_atn, step_atn  # noqa: E402
from .config import MasConfig, load_config  # noqa: E402
from .fsf import FSF, Coord, make_fsf, parse_fsf, serialize_fsf  # noqa: E402
from .mas import (  # noqa: E402
    Absorbed, ActivityKind, ActivityRecord, AgentKind, Created, FactualAgent, RepresentationMAS,
    update_indicators_brigade, update_indicators_fire,
)
from .ontology import Family, Kind, Ontology, SemanticClass, classify, default_ontology, load_ontology  # noqa: E402
from .proximity import (  # noqa: E402
    ProximityBreakdown, ProximityParams, semantic_proximity, spatial_proximity,
    temporal_proximity, total_proximity,
)
from .scenario import World, WorldSpec, build_paperlike_scenario, load_trace, tick_world  # noqa: E402

__all__ = [
    "AgentView", "AtnSpec", "default_atn", "parse_atn", "step_atn",
    "MasConfig", "load_config",
    "FSF", "Coord", "make_fsf", "parse_fsf", "serialize_fsf",
    "Absorbed", "ActivityKind", "ActivityRecord", "AgentKind", "Created", "FactualAgent",
    "RepresentationMAS", "update_indicators_brigade", "update_indicators_fire",
    "Family", "Kind", "Ontology", "SemanticClass", "classify", "default_ontology", "load_ontology",
    "ProximityBreakdown", "ProximityParams", "semantic_proximity", "spatial_proximity",
    "temporal_proximity", "total_proximity",
    "World", "WorldSpec", "build_paperlike_scenario", "load_trace", "tick_world",
]
