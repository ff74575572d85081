"""Mixed-initiative hypothesis exploration engine.

Turns a dataset plus an analysis intent into an interactively growable,
ordered tree of generated hypotheses with data-grounded chart hints and
supporting text, and analyzes every exploration action recorded along the
way.
"""

from .analytics import (
    BacktrackReport,
    DiagramMetrics,
    EngagementReport,
    ExplorationCounts,
    classify_backtracks,
    diagram_metrics,
    engagement,
    exploration_counts,
    session_report,
)
from .generation import (
    HypothesisDraft,
    PromptBundle,
    ProviderConfig,
    build_branch_prompt,
    build_initial_prompt,
    generate,
    parse_branch_response,
    parse_initial_response,
)
from .hints import (
    ChartPayload,
    ChartSpec,
    RetrieverConfig,
    SupportingText,
    compute_payload,
    derive_spec,
    fetch_supporting_text,
    validate_spec,
)
from .ingest import ColumnProfile, DataSummary, DatasetHandle, ingest, summary_text
from .layout import LayoutConfig, PositionedNode, edge_routes, fit_layout, layout
from .model import (
    DiagramTree,
    Focus,
    HypothesisNode,
    InteractionEvent,
    Session,
    add_children,
    children_of,
    list_bookmarks,
    new_tree,
    replace_children,
    root_path,
    set_bookmark,
)
from .service import ApiConfig, create_app
from .storage import SessionStore, replay_tree

__version__ = "0.1.0"

__all__ = [
    "ApiConfig",
    "BacktrackReport",
    "ChartPayload",
    "ChartSpec",
    "ColumnProfile",
    "DataSummary",
    "DatasetHandle",
    "DiagramMetrics",
    "DiagramTree",
    "EngagementReport",
    "ExplorationCounts",
    "Focus",
    "HypothesisDraft",
    "HypothesisNode",
    "InteractionEvent",
    "LayoutConfig",
    "PositionedNode",
    "PromptBundle",
    "ProviderConfig",
    "RetrieverConfig",
    "Session",
    "SessionStore",
    "SupportingText",
    "add_children",
    "build_branch_prompt",
    "build_initial_prompt",
    "children_of",
    "classify_backtracks",
    "compute_payload",
    "create_app",
    "derive_spec",
    "diagram_metrics",
    "edge_routes",
    "engagement",
    "exploration_counts",
    "fetch_supporting_text",
    "fit_layout",
    "generate",
    "ingest",
    "layout",
    "list_bookmarks",
    "new_tree",
    "parse_branch_response",
    "parse_initial_response",
    "replace_children",
    "replay_tree",
    "root_path",
    "session_report",
    "set_bookmark",
    "summary_text",
    "validate_spec",
]
