"""Build the per-view graphs for one unit and merge any subset of them."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterable, Sequence

from .ast_view import blacklist_nodes, build_ast, collapse_variables
from .cfg import build_cfg
from .dfg import Definition, DefUseFacts, build_dfg_view
from .diagnostics import Diagnostic, View, ViewNotBuilt
from .frontend import SymbolTable, SyntaxTree, build_symbol_table, parse
from .graph import CodeGraph
from .preprocessor import SourceUnit

ALL = "all"


@dataclass
class ProgramViews:
    unit: SourceUnit
    tree: SyntaxTree
    table: SymbolTable
    graphs: dict[View, CodeGraph] = field(default_factory=dict)
    full_cst: CodeGraph | None = None
    facts: DefUseFacts | None = None
    reaching: dict[int, frozenset[Definition]] | None = None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def built(self) -> set[View]:
        return set(self.graphs)

    def fatal_for(self, views: Iterable[View]) -> list[Diagnostic]:
        views = set(views)
        return [d for d in self.diagnostics if d.fatal_for & views]


def analyze(unit: SourceUnit, views: Iterable[View] = (View.AST, View.CFG, View.DFG),
            full_cst: bool = False) -> ProgramViews:
    """Parse ``unit`` and build the requested views (a DFG needs the CFG, so
    asking for it builds both)."""
    views = set(views)
    tree, diagnostics = parse(unit)
    table = build_symbol_table(tree)
    pv = ProgramViews(unit, tree, table, diagnostics=list(unit.diagnostics) + diagnostics + table.diagnostics)
    if View.AST in views:
        pv.graphs[View.AST] = build_ast(tree)
    if full_cst:
        pv.full_cst = build_ast(tree, prune=False)
    if views & {View.CFG, View.DFG}:
        cfg, cfg_diags = build_cfg(tree, table)
        pv.graphs[View.CFG] = cfg
        pv.diagnostics.extend(cfg_diags)
        if View.DFG in views:
            dfg, facts, rd = build_dfg_view(cfg, table)
            pv.graphs[View.DFG] = dfg
            pv.facts, pv.reaching = facts, rd
            pv.diagnostics.extend(facts.diagnostics)
    pv.diagnostics = _dedupe(pv.diagnostics)
    return pv


def _dedupe(diags: list[Diagnostic]) -> list[Diagnostic]:
    seen: set[Diagnostic] = set()
    out = []
    for d in diags:
        if d not in seen:
            seen.add(d)
            out.append(d)
    return out


def combine(pv: ProgramViews, views: Iterable[View | str], collapse: Sequence[str] | str | None = None,
            blacklist: Iterable[str] = (), full_cst: bool = False,
            diagnostics: list[Diagnostic] | None = None) -> CodeGraph:
    """Union of the requested views over shared node ids, then options.

    ``collapse`` is ``None`` (off), ``"all"`` (every variable) or a list of
    variable names; ``full_cst`` swaps the pruned AST for the unpruned tree.
    """
    want = sorted({View.parse(v) if isinstance(v, str) else v for v in views}, key=lambda v: v.value)
    if not want:
        raise ViewNotBuilt("no view requested")
    g = CodeGraph(want, {"project": pv.unit.name, "lang": pv.unit.lang.value})
    for v in want:
        src = pv.full_cst if (v is View.AST and full_cst) else pv.graphs.get(v)
        if src is None:
            raise ViewNotBuilt(f"{v.value} view was not built for {pv.unit.name}")
        for n in src.nodes.values():
            g.add_node(replace(n, views=set(n.views)))
        for e in src.edges:
            g.add_edge(e.src, e.dst, e.view, e.label)
        for key, value in src.extras.items():
            g.extras.setdefault(key, value)
    if collapse is not None and collapse != []:
        names = None if isinstance(collapse, str) and collapse.lower() == ALL else list(collapse)
        g = collapse_variables(g, pv.table, names)
    kinds = list(blacklist)
    if kinds:
        g = blacklist_nodes(g, kinds, tree=pv.tree, diagnostics=diagnostics)
    return g


# The fifteen variants: every non-empty view subset with and without
# collapsing (14), plus the unpruned syntax tree on its own.
VARIANTS: list[tuple[frozenset[View], bool, bool]] = [
    (frozenset(c), collapse, False)
    for r in (1, 2, 3) for c in combinations((View.AST, View.CFG, View.DFG), r)
    for collapse in (False, True)
] + [(frozenset({View.AST}), False, True)]


def variant(pv: ProgramViews, index: int) -> CodeGraph:
    views, collapse, full = VARIANTS[index]
    return combine(pv, views, collapse=ALL if collapse else None, full_cst=full)
