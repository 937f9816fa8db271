"""AST view: pruned syntax tree, variable collapsing and node blacklisting."""

from __future__ import annotations

import logging
from bisect import bisect_right
from typing import Iterable

from .diagnostics import Category, Diagnostic, UnknownVariable, View
from .frontend.cst import SyntaxTree, grammar_kinds
from .frontend.symbols import Symbol, SymbolTable
from .graph import CodeGraph, GraphNode, collapsed_id, is_synthetic, node_from_cst
from .preprocessor import Lang

log = logging.getLogger(__name__)

AST_LABEL = "child"


def build_ast(tree: SyntaxTree, prune: bool = True) -> CodeGraph:
    """One node per named CST node; anonymous tokens (punctuation,
    operators, bare keywords) are dropped when ``prune`` is set."""
    g = CodeGraph({View.AST}, {"project": tree.unit.name, "lang": tree.lang.value})
    for n in tree.walk():
        if prune and not n.named:
            continue
        g.add_node(node_from_cst(tree, n.id, View.AST))
        if n.parent is None:
            continue
        parent = n.parent
        while parent not in g.nodes:
            parent = tree[parent].parent
        g.add_edge(parent, n.id, View.AST, AST_LABEL)
    return g


def collapse_targets(table: SymbolTable, names: Iterable[str] | None) -> list[Symbol]:
    if names is None:
        return [s for s in table.symbols
                if s.kind in ("variable", "parameter") and not s.external and not s.constant]
    wanted = list(names)
    out: list[Symbol] = []
    for name in wanted:
        hits = [s for s in table.symbols
                if s.name == name and s.kind in ("variable", "parameter", "member_variable") and not s.external]
        if not hits:
            raise UnknownVariable(f"no variable named {name!r}")
        out.extend(hits)
    return out


def collapse_variables(g: CodeGraph, table: SymbolTable, names: Iterable[str] | None = None) -> CodeGraph:
    """Merge every occurrence of each targeted variable into one synthetic node.

    Occurrences are grouped per Symbol, so shadowed names stay apart.
    """
    targets = sorted({s.uid: s for s in collapse_targets(table, names)}.values(),
                     key=lambda s: s.decl_node)
    out = g.copy()
    remap: dict[int, int] = {}
    occ_views: dict[int, set[View]] = {}
    for sym in targets:
        occ = [i for i in [sym.decl_node, *sym.use_nodes] if i in out.nodes]
        if not occ:
            continue
        sid = collapsed_id(sym.decl_node)
        views = set().union(*(out.nodes[i].views for i in occ))
        proto = node_from_cst(table.tree, sym.decl_node, View.AST, kind="identifier", label=sym.name, node_id=sid)
        proto.views = views
        for i in occ:
            remap[i] = sid
            occ_views[i] = set(out.nodes[i].views)
            del out.nodes[i]
        out.add_node(proto)
    if not remap:
        return out
    old = out.edges
    out.remove_edges(old)
    for e in old:
        out.add_edge(remap.get(e.src, e.src), remap.get(e.dst, e.dst), e.view, e.label)
    out.extras["collapsed"] = {**out.extras.get("collapsed", {}), **remap}
    out.extras["occurrence_views"] = {**out.extras.get("occurrence_views", {}), **occ_views}
    return out


def blacklist_nodes(g: CodeGraph, kinds: Iterable[str], tree: SyntaxTree | None = None,
                    diagnostics: list[Diagnostic] | None = None) -> CodeGraph:
    """Drop nodes of the listed kinds with their AST subtrees and every incident edge.

    With ``tree`` the subtree is taken from the syntax tree, so statement
    nodes of a CFG or DFG go too even when no AST edges are present. Without
    it the graph's own AST edges decide.
    """
    kinds = set(kinds)
    lang = g.meta.get("lang")
    if lang:
        known = grammar_kinds(Lang.parse(lang))
        for k in sorted(kinds - known):
            log.warning("ignoring unknown node kind %r", k)
            if diagnostics is not None:
                diagnostics.append(Diagnostic(Category.Other, "", 0, f"unknown node kind {k!r} in blacklist"))
    out = g.copy()
    collapsed: dict[int, int] = out.extras.get("collapsed", {})
    if tree is not None:
        spans = sorted((n.id, tree.subtree_end(n.id)) for n in tree.walk() if n.kind in kinds)

        def covered(nid: int) -> bool:
            i = bisect_right(spans, (nid, float("inf"))) - 1
            # spans nest, so scanning back over earlier starts is enough
            while i >= 0:
                lo, hi = spans[i]
                if lo <= nid < hi:
                    return True
                i -= 1
            return False

        removed = {i for i in out.nodes if not is_synthetic(i) and covered(i)}
        members: dict[int, list[int]] = {}
        for occ, sid in collapsed.items():
            members.setdefault(sid, []).append(occ)
        occ_views = out.extras.get("occurrence_views", {})
        for sid, occs in members.items():
            if sid not in out.nodes:
                continue
            alive = [o for o in occs if not covered(o)]
            if not alive:
                removed.add(sid)
            else:
                out.nodes[sid].views = set().union(*(occ_views.get(o, out.nodes[sid].views) for o in alive))
        removed |= {i for i, n in out.nodes.items() if n.kind in kinds}
    else:
        parents: dict[int, set[int]] = {}
        for e in out.edges_of(View.AST):
            parents.setdefault(e.dst, set()).add(e.src)
        removed = {i for i, n in out.nodes.items() if n.kind in kinds}
        # a node goes once all of its AST parents are gone; collapsed nodes
        # can have several parents, so iterate to a fixpoint
        changed = True
        while changed:
            changed = False
            for nid, ps in parents.items():
                if nid not in removed and ps and ps <= removed:
                    removed.add(nid)
                    changed = True
    out.remove_nodes(removed)
    return out


__all__ = ["build_ast", "collapse_variables", "blacklist_nodes", "AST_LABEL", "GraphNode"]
