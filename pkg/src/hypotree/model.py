"""Session, tree, node and event domain types plus tree navigation primitives.

The hypothesis tree is an ordered, leveled tree rooted at the analysis-intent
node (level 0). Every other node is an AI-generated hypothesis. Children keep
a contiguous 0..k-1 sibling_index in arrival order, which the layout engine
and the diagram JSON rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import TYPE_CHECKING, Any, Iterable

from .errors import EmptyDrafts, RootNotBookmarkable, UnknownNode

if TYPE_CHECKING:
    from .generation import HypothesisDraft
    from .layout import PositionedNode

EVENT_KINDS = frozenset(
    {
        "session_start",
        "node_click",
        "branch_generate",
        "branch_regenerate",
        "chart_expand",
        "chart_collapse",
        "bookmark_set",
        "bookmark_clear",
    }
)

#: Event kinds that move the exploration focus to their target node.
FOCUS_KINDS = frozenset({"node_click", "branch_generate", "branch_regenerate"})


def utc_now_rfc3339() -> str:
    """Current UTC time as an RFC3339 string with second precision."""
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%f")[:-3] + "Z"


@dataclass
class HypothesisNode:
    """One hypothesis in the tree.

    The root is a degenerate node: it carries the analysis intent as title,
    has level 0, no parent, and empty hypothesis fields.
    """

    node_id: str
    parent_id: str | None
    level: int
    title: str
    hypothesis_text: str = ""
    visualization_idea: str = ""
    rationale: str = ""
    related_work: str = ""
    user_input: str = ""
    bookmarked: bool = False
    sibling_index: int = 0
    # unknown keys from a loaded diagram file, re-emitted on save
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def is_root(self) -> bool:
        return self.parent_id is None


@dataclass
class DiagramTree:
    """Ordered, leveled tree of hypothesis nodes keyed by node_id."""

    nodes: dict[str, HypothesisNode]
    root_id: str
    layout: dict[str, "PositionedNode"] | None = None
    # monotonically increasing id source; replay bumps it past restored ids
    next_node_seq: int = 1
    # unknown top-level keys from a loaded diagram file
    extra: dict[str, Any] = field(default_factory=dict)

    def node(self, node_id: str) -> HypothesisNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    @property
    def root(self) -> HypothesisNode:
        return self.nodes[self.root_id]

    def new_node_id(self) -> str:
        node_id = f"n{self.next_node_seq}"
        self.next_node_seq += 1
        return node_id


@dataclass(frozen=True)
class InteractionEvent:
    """One timestamped exploration action; the unit of all analytics.

    payload is kind-specific. For session_start / branch_generate /
    branch_regenerate it carries created_node_ids plus the full created node
    records (and removed_node_ids for regeneration) so the tree can be
    rebuilt from the log alone.
    """

    event_id: int
    timestamp: str
    session_id: str
    kind: str
    node_id: str | None = None
    payload: dict[str, Any] = field(default_factory=dict)


@dataclass
class Focus:
    """Tracks the node the exploration is currently anchored on."""

    current_node_id: str

    def advance(self, kind: str, node_id: str | None) -> None:
        if kind in FOCUS_KINDS and node_id is not None:
            self.current_node_id = node_id


@dataclass
class Session:
    session_id: str
    dataset_ref: str
    intent_text: str
    tree: DiagramTree
    created_at: str
    event_log_ref: str = "events.jsonl"


def new_tree(intent_text: str, root_id: str | None = None) -> DiagramTree:
    """Create a fresh tree holding only the intent node."""
    tree = DiagramTree(nodes={}, root_id="")
    rid = root_id if root_id is not None else tree.new_node_id()
    tree.root_id = rid
    tree.nodes[rid] = HypothesisNode(
        node_id=rid, parent_id=None, level=0, title=intent_text
    )
    return tree


def root_path(tree: DiagramTree, node_id: str) -> list[str]:
    """Trajectory from a node up to the root: [node_id, parent, ..., root_id]."""
    node = tree.node(node_id)
    path = [node.node_id]
    while node.parent_id is not None:
        node = tree.node(node.parent_id)
        path.append(node.node_id)
    return path


def children_of(tree: DiagramTree, node_id: str) -> list[HypothesisNode]:
    """Direct children in sibling_index order."""
    tree.node(node_id)
    kids = [n for n in tree.nodes.values() if n.parent_id == node_id]
    kids.sort(key=lambda n: n.sibling_index)
    return kids


def descendant_ids(tree: DiagramTree, node_id: str) -> list[str]:
    """All node ids strictly below node_id, depth-first in sibling order."""
    out: list[str] = []
    stack = [c.node_id for c in reversed(children_of(tree, node_id))]
    while stack:
        nid = stack.pop()
        out.append(nid)
        stack.extend(c.node_id for c in reversed(children_of(tree, nid)))
    return out


def add_children(
    tree: DiagramTree,
    parent_id: str,
    drafts: Iterable["HypothesisDraft"],
    user_input: str = "",
    node_ids: list[str] | None = None,
) -> list[str]:
    """Append one node per draft under parent_id, in arrival order.

    node_ids, when given (log replay), must match the draft count; otherwise
    fresh ids are assigned from the tree's sequence.
    """
    parent = tree.node(parent_id)
    drafts = list(drafts)
    if not drafts:
        raise EmptyDrafts()
    if node_ids is not None and len(node_ids) != len(drafts):
        raise ValueError("node_ids and drafts length mismatch")

    base_index = len(children_of(tree, parent_id))
    created: list[str] = []
    for offset, draft in enumerate(drafts):
        nid = node_ids[offset] if node_ids is not None else tree.new_node_id()
        tree.nodes[nid] = HypothesisNode(
            node_id=nid,
            parent_id=parent_id,
            level=parent.level + 1,
            title=draft.title,
            hypothesis_text=draft.hypothesis_text,
            visualization_idea=draft.visualization_idea,
            rationale=draft.rationale,
            related_work=draft.related_work,
            user_input=user_input,
            sibling_index=base_index + offset,
        )
        created.append(nid)
    _bump_seq(tree, created)
    return created


def replace_children(
    tree: DiagramTree,
    parent_id: str,
    drafts: Iterable["HypothesisDraft"],
    user_input: str = "",
    node_ids: list[str] | None = None,
) -> list[str]:
    """Drop the whole subtree under parent_id, then add the drafts as children.

    Removed nodes leave the live tree entirely (bookmarks go with them);
    callers capture descendant_ids() beforehand when the removal must be
    recorded, e.g. in the branch_regenerate event payload.
    """
    tree.node(parent_id)
    drafts = list(drafts)
    if not drafts:
        raise EmptyDrafts()
    for nid in descendant_ids(tree, parent_id):
        del tree.nodes[nid]
    return add_children(tree, parent_id, drafts, user_input, node_ids)


def set_bookmark(tree: DiagramTree, node_id: str, flag: bool) -> HypothesisNode:
    """Set or clear a node's bookmark. Idempotent; the root is not a hypothesis."""
    node = tree.node(node_id)
    if node.is_root:
        raise RootNotBookmarkable()
    node.bookmarked = flag
    return node


def list_bookmarks(tree: DiagramTree) -> list[HypothesisNode]:
    """Bookmarked nodes ordered by (level, sibling_index, node_id)."""
    marked = [n for n in tree.nodes.values() if n.bookmarked]
    marked.sort(key=lambda n: (n.level, n.sibling_index, n.node_id))
    return marked


def validate_tree(tree: DiagramTree) -> None:
    """Raise ValueError when a structural invariant is broken.

    Checks: single root, resolvable parents, acyclic parent chains,
    level = parent.level + 1, contiguous sibling indexes.
    """
    roots = [n for n in tree.nodes.values() if n.parent_id is None]
    if len(roots) != 1 or roots[0].node_id != tree.root_id:
        raise ValueError("tree must have exactly one root matching root_id")
    for node in tree.nodes.values():
        if node.parent_id is None:
            if node.level != 0:
                raise ValueError(f"root {node.node_id} has level {node.level}")
            continue
        if node.parent_id not in tree.nodes:
            raise ValueError(f"{node.node_id} references missing parent {node.parent_id}")
        parent = tree.nodes[node.parent_id]
        if node.level != parent.level + 1:
            raise ValueError(f"{node.node_id} level {node.level} != parent level + 1")
        # parent-chain termination (cycle guard)
        seen = {node.node_id}
        cur = node
        while cur.parent_id is not None:
            if cur.parent_id in seen:
                raise ValueError(f"cycle through {cur.parent_id}")
            seen.add(cur.parent_id)
            cur = tree.nodes[cur.parent_id]
    by_parent: dict[str, list[int]] = {}
    for node in tree.nodes.values():
        if node.parent_id is not None:
            by_parent.setdefault(node.parent_id, []).append(node.sibling_index)
    for pid, indexes in by_parent.items():
        if sorted(indexes) != list(range(len(indexes))):
            raise ValueError(f"children of {pid} have non-contiguous sibling indexes")


def _bump_seq(tree: DiagramTree, ids: Iterable[str]) -> None:
    # keep the id sequence ahead of any externally supplied "n<k>" ids
    for nid in ids:
        if nid.startswith("n") and nid[1:].isdigit():
            tree.next_node_seq = max(tree.next_node_seq, int(nid[1:]) + 1)
