"""Concrete syntax tree with stable pre-order node ids.

Each normalized file is parsed on its own with tree-sitter; the per-file
top-level nodes are then hung under one synthetic ``translation_unit`` root so
a project becomes a single tree. Ids are pre-order indices over that tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import tree_sitter
import tree_sitter_c
import tree_sitter_cpp

from ..diagnostics import ALL_VIEWS, Category, Diagnostic, View
from ..preprocessor import Lang, SourceUnit

IDENTIFIER_KINDS = frozenset({
    "identifier", "field_identifier", "type_identifier",
    "statement_identifier", "namespace_identifier",
})
UNSUPPORTED = "unsupported_construct"

_THREAD_RE = re.compile(r"^(pthread_\w+|thrd_\w+|mtx_\w+|cnd_\w+|_beginthread\w*|CreateThread)$")
_STD_THREAD = frozenset({"thread", "jthread", "async", "mutex", "lock_guard", "unique_lock", "condition_variable"})


@lru_cache(maxsize=None)
def language(lang: Lang) -> tree_sitter.Language:
    mod = tree_sitter_c if lang is Lang.C else tree_sitter_cpp
    return tree_sitter.Language(mod.language())


@lru_cache(maxsize=None)
def grammar_kinds(lang: Lang) -> frozenset[str]:
    lg = language(lang)
    kinds = {lg.node_kind_for_id(i) for i in range(lg.node_kind_count)}
    return frozenset(k for k in kinds if k) | {UNSUPPORTED, "translation_unit"}


@dataclass(slots=True)
class SyntaxNode:
    id: int
    kind: str
    named: bool
    field: str | None
    file: int
    start: tuple[int, int]  # (line, col); line is 1-based in normalized text
    end: tuple[int, int]
    start_byte: int
    end_byte: int
    children: list[int] = field(default_factory=list)
    parent: int | None = None

    @property
    def span(self) -> tuple[int, int, int, int, int]:
        return (self.file, self.start[0], self.start[1], self.end[0], self.end[1])


_HEADER_KINDS = {
    "if_statement": "consequence",
    "while_statement": "body",
    "for_statement": "body",
    "for_range_loop": "body",
    "switch_statement": "body",
    "function_definition": "body",
    "class_specifier": "body",
    "struct_specifier": "body",
    "union_specifier": "body",
    "enum_specifier": "body",
    "namespace_definition": "body",
}


class SyntaxTree:
    """Flat store of :class:`SyntaxNode` plus the unit it came from."""

    def __init__(self, unit: SourceUnit):
        self.unit = unit
        self.lang = unit.lang
        self.nodes: list[SyntaxNode] = []
        self.sources: list[bytes] = []
        self.file_paths: list[str] = []
        self.excluded: list[str] = []

    @property
    def root(self) -> SyntaxNode:
        return self.nodes[0]

    def __getitem__(self, nid: int) -> SyntaxNode:
        return self.nodes[nid]

    def __len__(self) -> int:
        return len(self.nodes)

    def text(self, nid: int) -> str:
        n = self.nodes[nid]
        if n.parent is None:
            return "\n".join(s.decode("utf-8", "replace") for s in self.sources)
        return self.sources[n.file][n.start_byte:n.end_byte].decode("utf-8", "replace")

    def child(self, nid: int, name: str) -> SyntaxNode | None:
        for c in self.nodes[nid].children:
            if self.nodes[c].field == name:
                return self.nodes[c]
        return None

    def named_children(self, nid: int) -> list[SyntaxNode]:
        return [self.nodes[c] for c in self.nodes[nid].children if self.nodes[c].named]

    def walk(self, nid: int = 0) -> Iterator[SyntaxNode]:
        """Pre-order; ids come out ascending."""
        stack = [nid]
        while stack:
            cur = self.nodes[stack.pop()]
            yield cur
            stack.extend(reversed(cur.children))

    def subtree_end(self, nid: int) -> int:
        """One past the largest id in the subtree of ``nid``."""
        n = self.nodes[nid]
        while n.children:
            n = self.nodes[n.children[-1]]
        return n.id + 1

    def contains(self, ancestor: int, nid: int) -> bool:
        return ancestor <= nid < self.subtree_end(ancestor)

    def ancestors(self, nid: int) -> Iterator[SyntaxNode]:
        p = self.nodes[nid].parent
        while p is not None:
            yield self.nodes[p]
            p = self.nodes[p].parent

    def origin(self, nid: int) -> tuple[str, int, int]:
        """Original (path, first line, last line) of a node."""
        n = self.nodes[nid]
        if not self.unit.files:
            return ("", 0, 0)
        if n.parent is None:
            first = self.unit.files[0]
            return (first.path, first.origin(1)[1] if first.line_map else 1, first.origin(1)[1] if first.line_map else 1)
        src = self.unit.files[n.file]
        path, line_start = src.origin(n.start[0])
        end_path, line_end = src.origin(n.end[0])
        if end_path != path:
            line_end = line_start
        return (path, line_start, line_end)

    def label(self, nid: int) -> str:
        """Display text shared by every view that shows this node."""
        n = self.nodes[nid]
        if n.parent is None:
            return self.unit.name or "translation_unit"
        if n.kind == "compound_statement":
            return "{...}"
        if n.kind == "do_statement":
            cond = self.child(nid, "condition")
            return "do ... while " + _squash(self.text(cond.id)) if cond else "do"
        body_field = _HEADER_KINDS.get(n.kind)
        if body_field:
            body = self.child(nid, body_field)
            if body is not None and body.id != nid:
                raw = self.sources[n.file][n.start_byte:body.start_byte].decode("utf-8", "replace")
                return _squash(raw)
        return _squash(self.text(nid))


def _squash(text: str) -> str:
    return " ".join(text.split())


def _convert(tree: SyntaxTree, ts_root: tree_sitter.Node, file_idx: int, parent: int) -> None:
    # iterative pre-order so deep expressions cannot hit the recursion limit
    stack: list[tuple[tree_sitter.Node, str | None, int]] = []
    kids = ts_root.children
    for i in range(len(kids) - 1, -1, -1):
        stack.append((kids[i], ts_root.field_name_for_child(i), parent))
    while stack:
        ts, fld, par = stack.pop()
        kind = UNSUPPORTED if ts.type == "ERROR" else ts.type
        node = SyntaxNode(
            id=len(tree.nodes), kind=kind, named=ts.is_named or kind == UNSUPPORTED, field=fld,
            file=file_idx,
            start=(ts.start_point[0] + 1, ts.start_point[1]),
            end=(ts.end_point[0] + 1, ts.end_point[1]),
            start_byte=ts.start_byte, end_byte=ts.end_byte, parent=par,
        )
        tree.nodes.append(node)
        tree.nodes[par].children.append(node.id)
        kids = ts.children
        for i in range(len(kids) - 1, -1, -1):
            stack.append((kids[i], ts.field_name_for_child(i), node.id))


def _error_bytes(node: tree_sitter.Node) -> int:
    if node.type == "ERROR":
        return node.end_byte - node.start_byte
    if not node.has_error:
        return 0
    return sum(_error_bytes(c) for c in node.children)


def parse(unit: SourceUnit) -> tuple[SyntaxTree, list[Diagnostic]]:
    """Parse every file of ``unit`` into one :class:`SyntaxTree`.

    A file whose text is mostly unparseable is excluded with a
    ``SyntaxError`` diagnostic; smaller parse errors become
    ``unsupported_construct`` nodes and analysis carries on around them.
    """
    parser = tree_sitter.Parser(language(unit.lang))
    tree = SyntaxTree(unit)
    tree.nodes.append(SyntaxNode(0, "translation_unit", True, None, 0, (1, 0), (1, 0), 0, 0))
    diagnostics: list[Diagnostic] = []
    kept = 0
    for src in unit.files:
        data = src.text.encode("utf-8")
        ts_tree = parser.parse(data)
        ts_root = ts_tree.root_node
        if ts_root.has_error and data.strip():
            bad = _error_bytes(ts_root)
            if bad * 2 > len(data.strip()):
                first = _first_error(ts_root)
                path, line = src.origin(first.start_point[0] + 1 if first else 1)
                diagnostics.append(Diagnostic(
                    Category.SyntaxError, path, line,
                    "file excluded: unrecoverable syntax error", ALL_VIEWS))
                tree.excluded.append(src.path)
                continue
        tree.sources.append(data)
        tree.file_paths.append(src.path)
        _convert(tree, ts_root, kept, 0)
        kept += 1
    if tree.nodes[0].children:
        last = tree.nodes[tree.nodes[0].children[-1]]
        tree.nodes[0].end = last.end
        tree.nodes[0].file = 0
    diagnostics.extend(_construct_diagnostics(tree))
    return tree, diagnostics


def _first_error(node: tree_sitter.Node) -> tree_sitter.Node | None:
    if node.type == "ERROR" or node.is_missing:
        return node
    for c in node.children:
        if c.has_error or c.is_missing:
            found = _first_error(c)
            if found is not None:
                return found
    return None


def _in_function_body(tree: SyntaxTree, nid: int) -> bool:
    return any(a.kind == "function_definition" for a in tree.ancestors(nid))


def _construct_diagnostics(tree: SyntaxTree) -> list[Diagnostic]:
    """Flag constructs that the views model poorly or not at all."""
    out: list[Diagnostic] = []
    seen: set[tuple[Category, str, int]] = set()

    def emit(cat: Category, nid: int, msg: str, fatal: frozenset) -> None:
        path, line, _ = tree.origin(nid)
        if (cat, path, line) in seen:
            return
        seen.add((cat, path, line))
        out.append(Diagnostic(cat, path, line, msg, fatal))

    cfg_dfg = frozenset({View.CFG, View.DFG})
    for n in tree.walk():
        kind = n.kind
        if kind == UNSUPPORTED:
            if any(a.kind == "goto_statement" for a in tree.ancestors(n.id)):
                continue
            if _squash(tree.text(n.id)).startswith("goto"):
                # `goto *expr;` is outside the grammar and surfaces as a stray keyword
                emit(Category.GotoUnsupportedPattern, n.id, "computed goto", cfg_dfg)
                continue
            emit(Category.Other, n.id, f"unparsed fragment {_squash(tree.text(n.id))[:40]!r}", frozenset())
        elif kind == "goto_statement":
            if any(tree[c].kind == UNSUPPORTED for c in n.children) or "*" in tree.text(n.id):
                emit(Category.GotoUnsupportedPattern, n.id, "computed goto", cfg_dfg)
        elif kind in ("identifier", "type_identifier"):
            name = tree.text(n.id)
            if _THREAD_RE.match(name):
                emit(Category.Multithreading, n.id, f"thread API {name}", cfg_dfg)
            elif name in _STD_THREAD and n.parent is not None and tree[n.parent].kind == "qualified_identifier" \
                    and tree.text(n.parent).startswith("std::"):
                emit(Category.Multithreading, n.id, f"std::{name}", cfg_dfg)
        elif kind == "operator_name":
            emit(Category.OperatorOverloading, n.id, f"overloaded {_squash(tree.text(n.id))}", cfg_dfg)
        elif kind == "storage_class_specifier" and tree.text(n.id) == "static":
            parent = tree[n.parent] if n.parent is not None else None
            if parent is not None and parent.kind == "declaration" and _in_function_body(tree, n.id):
                emit(Category.StaticVariables, n.id, "function-local static variable",
                     frozenset({View.DFG}))
    return out
