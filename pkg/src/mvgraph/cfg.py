"""Statement-level control-flow graphs, linked across calls.

Each function gets virtual ``ENTRY:<name>`` / ``EXIT:<name>`` nodes; every
other CFG node is the CST node of a statement (or of a loop header part such
as the initializer and update of a ``for``). Calls are linked from the calling
statement to the callee entry, and from the callee exit to the statement's
successors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .diagnostics import Category, DanglingGoto, Diagnostic, View
from .frontend.cst import SyntaxNode, SyntaxTree
from .frontend.symbols import FUNCTION_KINDS, Symbol, SymbolTable
from .graph import CodeGraph, GraphNode, entry_id, exit_id, node_from_cst

log = logging.getLogger(__name__)

CALL = "function_call"
RETURN = "function_return"
INTERPROCEDURAL = frozenset({CALL, RETURN})

_NOT_STATEMENTS = frozenset({"comment", "attribute_declaration"})


@dataclass
class CfgFunction:
    symbol: Symbol
    name: str
    definition: int
    entry: int
    exit: int
    statement_nodes: list[int] = field(default_factory=list)
    # CFG node -> CST roots whose subtrees hold the statement's own code
    content: dict[int, list[int]] = field(default_factory=dict)
    graph: CodeGraph | None = None


class CallSite(NamedTuple):
    statement: int
    caller: int  # definition node of the calling function
    groups: tuple[tuple[int, ...], ...]  # per call, in evaluation order: alternative callee definitions


@dataclass
class PathBundle:
    function: str
    paths: list[tuple[int, ...]]
    loop_iterations_max: int
    recursion_depth_max: int
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def bounds(self) -> tuple[int, int]:
        return (self.loop_iterations_max, self.recursion_depth_max)

    def to_dict(self) -> dict:
        return {
            "function": self.function,
            "bounds": {"loop_iterations_max": self.loop_iterations_max,
                       "recursion_depth_max": self.recursion_depth_max},
            "paths": [list(p) for p in self.paths],
        }


def display_name(sym: Symbol) -> str:
    if sym.record is not None and sym.kind == "member_function":
        return f"{sym.record.name}::{sym.name}"
    return sym.name


class _IntraBuilder:
    def __init__(self, tree: SyntaxTree, table: SymbolTable, fn_def: int, strict: bool):
        self.tree = tree
        self.table = table
        self.fn_def = fn_def
        self.strict = strict
        self.sym = table.function_defs[fn_def]
        self.name = display_name(self.sym)
        self.entry = entry_id(fn_def)
        self.exit = exit_id(fn_def)
        self.g = CodeGraph({View.CFG}, {"project": tree.unit.name, "lang": tree.lang.value})
        self.fn = CfgFunction(self.sym, self.name, fn_def, self.entry, self.exit)
        self.labels: dict[str, int] = {}
        self.gotos: list[tuple[int, str]] = []
        self.breaks: list[list[tuple[int, str]]] = []
        self.continues: list[tuple[int, str]] = []

    # ---- helpers -----------------------------------------------------
    def add(self, nid: int, content: Iterable[int | None] = ()) -> int:
        self.g.add_node(node_from_cst(self.tree, nid, View.CFG))
        self.fn.statement_nodes.append(nid)
        self.fn.content[nid] = [c for c in content if c is not None]
        return nid

    def connect(self, pending: list[tuple[int, str]], dst: int) -> None:
        for src, label in pending:
            self.g.add_edge(src, dst, View.CFG, label)

    def child(self, node: SyntaxNode, name: str) -> SyntaxNode | None:
        return self.tree.child(node.id, name)

    # ---- building ----------------------------------------------------
    def build(self) -> CfgFunction:
        fn_node = self.tree[self.fn_def]
        path, line_start, line_end = self.tree.origin(self.fn_def)
        for nid, kind, prefix, line, col in (
                (self.entry, "function_entry", "ENTRY", line_start, fn_node.start[1]),
                (self.exit, "function_exit", "EXIT", line_end, fn_node.end[1])):
            self.g.add_node(GraphNode(nid, kind, f"{prefix}:{self.name}", path, line, col, line, col, {View.CFG}))
        pending = [(self.entry, "")]
        for c in self.tree.named_children(self.fn_def):
            if c.kind == "field_initializer_list":
                self.connect(pending, self.add(c.id, [c.id]))
                pending = [(c.id, "")]
        body = self.child(fn_node, "body")
        if body is not None:
            pending = self.stmt(body, pending)
        self.connect(pending, self.exit)
        for src, label in self.gotos:
            target = self.labels.get(label)
            if target is None:
                if self.strict:
                    raise DanglingGoto(label, self.name, self.tree.origin(src)[1])
                target = self.exit
            self.g.add_edge(src, target, View.CFG, "goto")
        self.fn.graph = self.g
        return self.fn

    def stmt(self, node: SyntaxNode, pending: list[tuple[int, str]]) -> list[tuple[int, str]]:
        k = node.kind
        handler = getattr(self, "s_" + k, None)
        if handler is not None:
            return handler(node, pending)
        if k in _NOT_STATEMENTS:
            return pending
        self.connect(pending, self.add(node.id, [node.id]))
        return [(node.id, "")]

    def s_compound_statement(self, node, pending):
        for c in self.tree.named_children(node.id):
            pending = self.stmt(c, pending)
        return pending

    def s_return_statement(self, node, pending):
        self.connect(pending, self.add(node.id, [node.id]))
        self.g.add_edge(node.id, self.exit, View.CFG, "")
        return []

    s_throw_statement = s_return_statement

    def s_break_statement(self, node, pending):
        self.connect(pending, self.add(node.id))
        if self.breaks:
            self.breaks[-1].append((node.id, ""))
            return []
        return [(node.id, "")]

    def s_continue_statement(self, node, pending):
        self.connect(pending, self.add(node.id))
        if self.continues:
            target, label = self.continues[-1]
            self.g.add_edge(node.id, target, View.CFG, label)
            return []
        return [(node.id, "")]

    def s_goto_statement(self, node, pending):
        self.connect(pending, self.add(node.id))
        label = self.child(node, "label")
        if label is None or label.kind != "statement_identifier":
            # computed goto: the target is unknown, so flow continues to the exit
            self.g.add_edge(node.id, self.exit, View.CFG, "goto")
            return []
        self.gotos.append((node.id, self.tree.text(label.id)))
        return []

    def s_labeled_statement(self, node, pending):
        self.connect(pending, self.add(node.id))
        label = self.child(node, "label")
        if label is not None:
            self.labels.setdefault(self.tree.text(label.id), node.id)
        out = [(node.id, "")]
        for c in self.tree.named_children(node.id):
            if c.field != "label":
                out = self.stmt(c, out)
        return out

    def s_if_statement(self, node, pending):
        cond = self.child(node, "condition")
        self.connect(pending, self.add(node.id, [cond.id if cond else None]))
        cons = self.child(node, "consequence")
        out = self.stmt(cons, [(node.id, "true")]) if cons is not None else [(node.id, "true")]
        alt = self.child(node, "alternative")
        if alt is None:
            return out + [(node.id, "false")]
        if alt.kind == "else_clause":
            inner = self.tree.named_children(alt.id)
            false_out = [(node.id, "false")]
            for c in inner:
                false_out = self.stmt(c, false_out)
            return out + false_out
        return out + self.stmt(alt, [(node.id, "false")])

    def _loop(self, node, body, cont_target, cont_label, entry_pending):
        self.breaks.append([])
        self.continues.append((cont_target, cont_label))
        out = self.stmt(body, entry_pending) if body is not None else entry_pending
        self.continues.pop()
        return out, self.breaks.pop()

    def s_while_statement(self, node, pending):
        cond = self.child(node, "condition")
        self.connect(pending, self.add(node.id, [cond.id if cond else None]))
        out, breaks = self._loop(node, self.child(node, "body"), node.id, "continue", [(node.id, "true")])
        for src, label in out:
            self.g.add_edge(src, node.id, View.CFG, label or "loop_back")
        return [(node.id, "false")] + breaks

    def s_for_range_loop(self, node, pending):
        parts = [self.child(node, f) for f in ("declarator", "right")]
        self.connect(pending, self.add(node.id, [p.id for p in parts if p is not None]))
        out, breaks = self._loop(node, self.child(node, "body"), node.id, "continue", [(node.id, "true")])
        for src, label in out:
            self.g.add_edge(src, node.id, View.CFG, label or "loop_back")
        return [(node.id, "false")] + breaks

    def s_do_statement(self, node, pending):
        cond = self.child(node, "condition")
        self.add(node.id, [cond.id if cond else None])
        # the body runs first; the condition's "true" edge joins the body entry
        out, breaks = self._loop(node, self.child(node, "body"), node.id, "continue",
                                 pending + [(node.id, "true")])
        self.connect(out, node.id)
        return [(node.id, "false")] + breaks

    def s_for_statement(self, node, pending):
        init = self.child(node, "initializer")
        cond = self.child(node, "condition")
        update = self.child(node, "update")
        if init is not None:
            self.connect(pending, self.add(init.id, [init.id]))
            pending = [(init.id, "")]
        self.connect(pending, self.add(node.id, [cond.id if cond else None]))
        if update is not None:
            self.add(update.id, [update.id])
            cont, back = update.id, "loop_update"
        else:
            cont, back = node.id, "loop_back"
        out, breaks = self._loop(node, self.child(node, "body"), cont, "continue", [(node.id, "true")])
        for src, label in out:
            self.g.add_edge(src, cont, View.CFG, back if not label else label)
        if update is not None:
            self.g.add_edge(update.id, node.id, View.CFG, "")
        return [(node.id, "false")] + breaks

    def s_switch_statement(self, node, pending):
        cond = self.child(node, "condition")
        self.connect(pending, self.add(node.id, [cond.id if cond else None]))
        body = self.child(node, "body")
        self.breaks.append([])
        carried: list[tuple[int, str]] = []
        has_default = False
        for c in self.tree.named_children(body.id) if body is not None else []:
            if c.kind != "case_statement":
                carried = self.stmt(c, carried)
                continue
            value = self.child(c, "value")
            if value is None:
                has_default = True
                label = "default"
            else:
                label = "case " + " ".join(self.tree.text(value.id).split())
            flow = carried + [(node.id, label)]
            for s in self.tree.named_children(c.id):
                if s.field == "value":
                    continue
                flow = self.stmt(s, flow)
            carried = flow
        breaks = self.breaks.pop()
        out = carried + breaks
        if not has_default:
            out.append((node.id, "default"))
        return out

    def s_try_statement(self, node, pending):
        body = self.child(node, "body")
        return self.stmt(body, pending) if body is not None else pending

    def s_expression_statement(self, node, pending):
        self.connect(pending, self.add(node.id, [node.id]))
        return [(node.id, "")]

    def s_function_definition(self, node, pending):
        return pending


def build_intraprocedural_cfg(tree: SyntaxTree, table: SymbolTable, fn_def: int,
                              strict: bool = True) -> CfgFunction:
    """CFG of one function definition; raises :class:`DanglingGoto` when strict."""
    fn = _IntraBuilder(tree, table, fn_def, strict).build()
    return fn


# ---- call resolution ---------------------------------------------------------

class CallResolver:
    def __init__(self, tree: SyntaxTree, table: SymbolTable, diagnostics: list[Diagnostic]):
        self.tree = tree
        self.table = table
        self.diagnostics = diagnostics
        self._reported: set[int] = set()

    def targets(self, expr: SyntaxNode | None) -> list[Symbol]:
        if expr is None:
            return []
        k = expr.kind
        if k in ("parenthesized_expression",):
            inner = self.tree.named_children(expr.id)
            return self.targets(inner[0]) if inner else []
        if k == "pointer_expression":
            return self.targets(self.tree.child(expr.id, "argument"))
        if k == "conditional_expression":
            out = self.targets(self.tree.child(expr.id, "consequence"))
            for s in self.targets(self.tree.child(expr.id, "alternative")):
                if s not in out:
                    out.append(s)
            return out
        if k == "field_expression":
            return self.targets(self.tree.child(expr.id, "field"))
        if k in ("qualified_identifier", "template_function"):
            name = self.tree.child(expr.id, "name")
            return self.targets(name)
        sym = self.table.binding.get(expr.id)
        if sym is None:
            return []
        if sym.kind in FUNCTION_KINDS:
            return [sym] if sym.definition is not None else []
        if sym.params is not None:
            found = [f for f in self.table.address_taken_functions() if self.table.compatible(f, sym.params)]
            if not found and expr.id not in self._reported:
                self._reported.add(expr.id)
                path, line, _ = self.tree.origin(expr.id)
                self.diagnostics.append(Diagnostic(
                    Category.UnresolvedPointerCall, path, line,
                    f"no address-taken function matches pointer {sym.name!r}"))
            return found
        return []

    def constructor_targets(self, record: Symbol, nargs: int) -> list[Symbol]:
        return [c for c in self.table.constructors(record) if c.params is not None and len(c.params) == nargs][:1]

    def groups(self, roots: list[int]) -> list[list[Symbol]]:
        out: list[list[Symbol]] = []
        for r in roots:
            out.extend(self._collect(self.tree[r]))
        return out

    def _collect(self, node: SyntaxNode) -> list[list[Symbol]]:
        k = node.kind
        if k in ("lambda_expression", "function_definition"):
            return []
        if k == "conditional_expression":
            groups = self._collect_kids([self.tree.child(node.id, "condition")])
            merged: list[Symbol] = []
            for part in ("consequence", "alternative"):
                for grp in self._collect_kids([self.tree.child(node.id, part)]):
                    for s in grp:
                        if s not in merged:
                            merged.append(s)
            return groups + ([merged] if merged else [])
        if k == "call_expression":
            fn = self.tree.child(node.id, "function")
            groups = []
            if fn is not None and fn.kind not in ("identifier", "qualified_identifier"):
                groups += self._collect(fn)
            groups += self._collect_kids([self.tree.child(node.id, "arguments")])
            t = self.targets(fn)
            return groups + ([t] if t else [])
        if k == "new_expression":
            groups = self._collect_kids([c for c in self.tree.named_children(node.id)])
            rec = self.table.record_for_type(self.tree.text(self.tree.child(node.id, "type").id)) \
                if self.tree.child(node.id, "type") is not None else None
            args = self.tree.child(node.id, "arguments")
            nargs = len(self.tree.named_children(args.id)) if args is not None else 0
            t = self.constructor_targets(rec, nargs) if rec is not None else []
            return groups + ([t] if t else [])
        groups = self._collect_kids(self.tree.named_children(node.id))
        if node.id in self.table.constructions:
            rec, args = self.table.constructions[node.id]
            t = self.constructor_targets(rec, len(args))
            if t:
                groups.append(t)
        return groups

    def _collect_kids(self, kids: list[SyntaxNode | None]) -> list[list[Symbol]]:
        out: list[list[Symbol]] = []
        for c in kids:
            if c is not None:
                out.extend(self._collect(c))
        return out


def link_interprocedural(fns: list[CfgFunction], table: SymbolTable,
                         diagnostics: list[Diagnostic] | None = None) -> CodeGraph:
    """Merge per-function fragments and add call/return edges."""
    tree = table.tree
    diagnostics = diagnostics if diagnostics is not None else []
    g = CodeGraph({View.CFG}, {"project": tree.unit.name, "lang": tree.lang.value})
    by_def = {f.definition: f for f in fns}
    for f in fns:
        for n in f.graph.nodes.values():
            g.add_node(GraphNode(**{**n.__dict__, "views": set(n.views)}))
        for e in f.graph.edges:
            g.add_edge(e.src, e.dst, e.view, e.label)
    resolver = CallResolver(tree, table, diagnostics)
    sites: dict[int, CallSite] = {}
    intra = g.adjacency(View.CFG)
    for f in fns:
        for s in f.statement_nodes:
            groups = [tuple(t.definition for t in grp if t.definition in by_def)
                      for grp in resolver.groups(f.content.get(s, []))]
            groups = [grp for grp in groups if grp]
            if not groups:
                continue
            sites[s] = CallSite(s, f.definition, tuple(groups))
            succs = [e.dst for e in intra.get(s, [])]
            for callee in groups[0]:
                g.add_edge(s, entry_id(callee), View.CFG, CALL)
            for prev, nxt in zip(groups, groups[1:]):
                for a in prev:
                    for b in nxt:
                        g.add_edge(exit_id(a), entry_id(b), View.CFG, CALL)
            for callee in groups[-1]:
                for t in succs:
                    g.add_edge(exit_id(callee), t, View.CFG, RETURN)
    g.extras["functions"] = {f.definition: f for f in fns}
    g.extras["call_sites"] = sites
    return g


def build_cfg(tree: SyntaxTree, table: SymbolTable) -> tuple[CodeGraph, list[Diagnostic]]:
    """Whole-program CFG; dangling gotos degrade to a diagnostic."""
    diagnostics: list[Diagnostic] = []
    fns: list[CfgFunction] = []
    for fn_def in sorted(table.function_defs):
        if tree.child(fn_def, "body") is None:
            continue
        try:
            fn = build_intraprocedural_cfg(tree, table, fn_def)
        except DanglingGoto as exc:
            path, _, _ = tree.origin(fn_def)
            diagnostics.append(Diagnostic(Category.GotoUnsupportedPattern, path, exc.line, str(exc),
                                          frozenset({View.CFG, View.DFG})))
            fn = build_intraprocedural_cfg(tree, table, fn_def, strict=False)
        fns.append(fn)
        diagnostics.extend(_unreachable(tree, fn))
    g = link_interprocedural(fns, table, diagnostics)
    return g, diagnostics


def _unreachable(tree: SyntaxTree, fn: CfgFunction) -> list[Diagnostic]:
    adj = fn.graph.adjacency(View.CFG)
    seen = {fn.entry}
    stack = [fn.entry]
    while stack:
        for e in adj.get(stack.pop(), []):
            if e.dst not in seen:
                seen.add(e.dst)
                stack.append(e.dst)
    out = []
    for s in fn.statement_nodes:
        if s not in seen:
            path, line, _ = tree.origin(s)
            out.append(Diagnostic(Category.Other, path, line, f"unreachable statement in {fn.name}"))
    return out


# ---- path enumeration --------------------------------------------------------

def back_edges(fn: CfgFunction) -> set[tuple[int, int]]:
    """Edges that close a cycle in a depth-first walk from the entry."""
    adj: dict[int, list[int]] = {}
    for e in fn.graph.edges:
        adj.setdefault(e.src, []).append(e.dst)
    out: set[tuple[int, int]] = set()
    state: dict[int, int] = {}
    stack: list[tuple[int, int]] = [(fn.entry, 0)]
    state[fn.entry] = 1
    while stack:
        node, i = stack[-1]
        succs = sorted(set(adj.get(node, [])))
        if i < len(succs):
            stack[-1] = (node, i + 1)
            nxt = succs[i]
            st = state.get(nxt, 0)
            if st == 1:
                out.add((node, nxt))
            elif st == 0:
                state[nxt] = 1
                stack.append((nxt, 0))
        else:
            state[node] = 2
            stack.pop()
    return out


def find_function(g: CodeGraph, name: str) -> CfgFunction:
    fns: dict[int, CfgFunction] = g.extras.get("functions", {})
    for f in fns.values():
        if f.name == name:
            return f
    for f in fns.values():
        if f.symbol.name == name:
            return f
    raise KeyError(f"function {name!r} is not defined")


def enumerate_paths(g: CodeGraph, fn: str, loop_iterations_max: int = 1, recursion_depth_max: int = 1,
                    cap: int = 10_000) -> PathBundle:
    """Entry-to-exit paths with bounded loops and matched call/return pairs.

    A back edge may be taken ``loop_iterations_max`` times per path. A
    function may be re-entered recursively ``recursion_depth_max`` times
    below its first activation; deeper calls are stepped over.
    """
    start = find_function(g, fn)
    fns: dict[int, CfgFunction] = g.extras["functions"]
    sites: dict[int, CallSite] = g.extras.get("call_sites", {})
    exits = {f.exit: f.definition for f in fns.values()}
    intra: dict[int, list[tuple[str, int]]] = {}
    for e in g.edges_of(View.CFG):
        if e.label not in INTERPROCEDURAL:
            intra.setdefault(e.src, []).append((e.label, e.dst))
    for v in intra.values():
        v.sort()
    backs: set[tuple[int, int]] = set()
    for f in fns.values():
        backs |= back_edges(f)

    bundle = PathBundle(fn, [], loop_iterations_max, recursion_depth_max)
    seen: set[tuple[int, ...]] = set()

    def active(stack: tuple, fdef: int) -> int:
        return (1 if start.definition == fdef else 0) + sum(1 for fr in stack if fr[2] == fdef)

    def call_options(s: int, gi: int, stack: tuple) -> list[tuple[int, tuple, tuple | None]] | None:
        site = sites.get(s)
        if site is None:
            return None
        for idx in range(gi, len(site.groups)):
            allowed = [d for d in site.groups[idx] if active(stack, d) <= recursion_depth_max]
            if allowed:
                return [(entry_id(d), stack + ((s, idx, d),), None) for d in allowed]
        return None

    def moves(node: int, stack: tuple) -> list[tuple[int, tuple, tuple | None]]:
        """Successors as (node, call stack, intra edge being taken)."""
        if node in exits and stack:
            s, gi, _ = stack[-1]
            rest = stack[:-1]
            nxt = call_options(s, gi + 1, rest)
            if nxt is not None:
                return nxt
            return [(t, rest, (s, t)) for _, t in intra.get(s, [])]
        if node in sites:
            opts = call_options(node, 0, stack)
            if opts is not None:
                return opts
        return [(t, stack, (node, t)) for _, t in intra.get(node, [])]

    # explicit DFS stack of (node, call stack, back-edge counts, path)
    work: list[tuple[int, tuple, dict, tuple[int, ...]]] = [(start.entry, (), {}, (start.entry,))]
    while work:
        node, stack, counts, path = work.pop()
        if node == start.exit and not stack:
            if path not in seen:
                seen.add(path)
                bundle.paths.append(path)
                if len(bundle.paths) >= cap:
                    if work:
                        bundle.diagnostics.append(Diagnostic(
                            Category.PathExplosion, "", 0,
                            f"path enumeration for {fn} stopped after {cap} paths"))
                    break
            continue
        nexts = []
        for dst, new_stack, key in moves(node, stack):
            c = counts
            if key in backs:
                if counts.get(key, 0) >= loop_iterations_max:
                    continue
                c = dict(counts)
                c[key] = counts.get(key, 0) + 1
            nexts.append((dst, new_stack, c, path + (dst,)))
        work.extend(reversed(nexts))
    return bundle
