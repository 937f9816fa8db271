"""The one graph shape shared by every view."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

from .diagnostics import View
from .frontend.cst import SyntaxTree

SYNTHETIC_BASE = 1_000_000_000
COLLAPSED_BASE = 1_000_000_000
ENTRY_BASE = 2_000_000_000
GLOBAL_INIT_ID = 3_000_000_000


def collapsed_id(decl_node: int) -> int:
    return COLLAPSED_BASE + decl_node


def entry_id(fn_def: int) -> int:
    return ENTRY_BASE + 2 * fn_def


def exit_id(fn_def: int) -> int:
    return ENTRY_BASE + 2 * fn_def + 1


def is_synthetic(nid: int) -> bool:
    return nid >= SYNTHETIC_BASE


@dataclass
class GraphNode:
    id: int
    kind: str
    label: str
    file: str
    line_start: int
    col_start: int
    line_end: int
    col_end: int
    views: set[View] = field(default_factory=set)

    @property
    def span(self) -> tuple[str, int, int, int, int]:
        return (self.file, self.line_start, self.col_start, self.line_end, self.col_end)


@dataclass(frozen=True)
class GraphEdge:
    src: int
    dst: int
    view: View
    label: str = ""

    @property
    def sort_key(self) -> tuple[str, int, int, str]:
        return (self.view.value, self.src, self.dst, self.label)


def node_from_cst(tree: SyntaxTree, nid: int, view: View, *, kind: str | None = None,
                  label: str | None = None, node_id: int | None = None) -> GraphNode:
    """GraphNode for CST node ``nid`` located in original file/line coordinates."""
    n = tree[nid]
    path, line_start, line_end = tree.origin(nid)
    return GraphNode(
        id=nid if node_id is None else node_id,
        kind=n.kind if kind is None else kind,
        label=tree.label(nid) if label is None else label,
        file=path, line_start=line_start, col_start=n.start[1],
        line_end=line_end, col_end=n.end[1], views={view},
    )


class CodeGraph:
    """Nodes keyed by id plus an ordered, duplicate-free edge list."""

    def __init__(self, views: Iterable[View] = (), meta: dict | None = None):
        self.views: set[View] = set(views)
        self.nodes: dict[int, GraphNode] = {}
        self._edges: dict[GraphEdge, None] = {}
        self.meta: dict = dict(meta or {})
        # analysis side data that is not part of the serialized graph
        self.extras: dict = {}

    # ---- construction ----------------------------------------------------
    def add_node(self, node: GraphNode) -> GraphNode:
        existing = self.nodes.get(node.id)
        if existing is None:
            self.nodes[node.id] = node
            return node
        existing.views |= node.views
        return existing

    def add_edge(self, src: int, dst: int, view: View, label: str = "") -> GraphEdge:
        e = GraphEdge(src, dst, view, label)
        self._edges.setdefault(e, None)
        self.views.add(view)
        return e

    def remove_edges(self, edges: Iterable[GraphEdge]) -> None:
        for e in edges:
            self._edges.pop(e, None)

    def remove_nodes(self, ids: Iterable[int]) -> None:
        ids = set(ids)
        for i in ids:
            self.nodes.pop(i, None)
        self._edges = {e: None for e in self._edges if e.src not in ids and e.dst not in ids}

    # ---- queries -----------------------------------------------------------
    @property
    def edges(self) -> list[GraphEdge]:
        return list(self._edges)

    def sorted_edges(self) -> list[GraphEdge]:
        return sorted(self._edges, key=lambda e: e.sort_key)

    def edges_of(self, view: View) -> list[GraphEdge]:
        return [e for e in self._edges if e.view is view]

    def has_edge(self, src: int, dst: int, view: View | None = None, label: str | None = None) -> bool:
        for e in self._edges:
            if e.src == src and e.dst == dst and (view is None or e.view is view) \
                    and (label is None or e.label == label):
                return True
        return False

    def successors(self, nid: int, view: View) -> Iterator[GraphEdge]:
        return (e for e in self._edges if e.src == nid and e.view is view)

    def adjacency(self, view: View) -> dict[int, list[GraphEdge]]:
        adj: dict[int, list[GraphEdge]] = {}
        for e in self._edges:
            if e.view is view:
                adj.setdefault(e.src, []).append(e)
        return adj

    def view_nodes(self, view: View) -> set[int]:
        return {i for i, n in self.nodes.items() if view in n.views}

    def copy(self) -> "CodeGraph":
        g = CodeGraph(self.views, self.meta)
        g.nodes = {i: replace(n, views=set(n.views)) for i, n in self.nodes.items()}
        g._edges = dict(self._edges)
        g.extras = dict(self.extras)
        return g

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CodeGraph):
            return NotImplemented
        return (self.views == other.views and self.nodes == other.nodes
                and set(self._edges) == set(other._edges) and self.meta == other.meta)

    def __repr__(self) -> str:
        views = ",".join(sorted(v.value for v in self.views))
        return f"CodeGraph({views}; {len(self.nodes)} nodes, {len(self._edges)} edges)"

    def check(self) -> None:
        """Raise AssertionError when an edge endpoint or view tag is inconsistent."""
        for e in self._edges:
            assert e.src in self.nodes and e.dst in self.nodes, f"dangling edge {e}"
            assert e.view in self.nodes[e.src].views and e.view in self.nodes[e.dst].views, \
                f"edge {e} touches a node outside its view"
