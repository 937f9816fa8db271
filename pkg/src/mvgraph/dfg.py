"""Reaching definitions over the CFG and the def-use graph built from them.

DFG nodes are identifier occurrences (the same ids the AST uses). Within a
function an edge joins a definition to every use it reaches. Across
functions, values flow from arguments to parameters, back through
reference/pointer parameters, from return expressions to the variable
assigned at the call site, and through shared state (globals and class
members) from one function to the next.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .cfg import INTERPROCEDURAL, CallResolver, CfgFunction
from .diagnostics import Category, Diagnostic, View
from .frontend.cst import IDENTIFIER_KINDS, SyntaxNode, SyntaxTree
from .frontend.symbols import VARIABLE_KINDS, Symbol, SymbolTable
from .graph import GLOBAL_INIT_ID, CodeGraph, node_from_cst


@dataclass(frozen=True)
class Definition:
    symbol: Symbol
    site: int
    occurrence: int

    @property
    def sort_key(self) -> tuple[int, int, int]:
        return (self.site, self.occurrence, self.symbol.uid)

    @property
    def is_marker(self) -> bool:
        """Entry placeholder standing for "whatever value the caller left"."""
        return self.site == self.occurrence

    def __repr__(self) -> str:
        return f"Def({self.symbol.name}@{self.site}/{self.occurrence})"


@dataclass
class CallFact:
    node: int  # call_expression / declarator / new_expression
    targets: list[Symbol]
    args: list[list[tuple[Symbol, int]]]  # tracked identifier occurrences per argument


@dataclass
class DefUseFacts:
    gen: dict[int, set[Definition]] = field(default_factory=dict)
    kill: dict[int, set[Definition]] = field(default_factory=dict)
    uses: dict[int, set[tuple[Symbol, int]]] = field(default_factory=dict)
    # defs written by an assignment or declaration (not by argument passing)
    assigned: dict[int, set[Definition]] = field(default_factory=dict)
    calls: dict[int, list[CallFact]] = field(default_factory=dict)
    function_of: dict[int, int] = field(default_factory=dict)  # CFG node -> function definition
    diagnostics: list[Diagnostic] = field(default_factory=list)


def tracked(sym: Symbol | None) -> bool:
    return sym is not None and sym.kind in VARIABLE_KINDS and not sym.external and not sym.constant


def _shared(sym: Symbol, table: SymbolTable) -> bool:
    return sym.kind == "member_variable" or table.is_global(sym)


class _StmtCollector:
    """Reads and writes of one CFG node."""

    def __init__(self, tree: SyntaxTree, table: SymbolTable, resolver: CallResolver,
                 diagnostics: list[Diagnostic]):
        self.tree = tree
        self.table = table
        self.resolver = resolver
        self.diagnostics = diagnostics
        self.strong: list[tuple[Symbol, int]] = []
        self.weak: list[tuple[Symbol, int]] = []
        self.assigned: list[tuple[Symbol, int]] = []
        self.uses: list[tuple[Symbol, int]] = []
        self.calls: list[CallFact] = []
        self._assigning = False

    def sym(self, node: SyntaxNode) -> Symbol | None:
        s = self.table.binding.get(node.id)
        return s if tracked(s) else None

    def text(self, node: SyntaxNode) -> str:
        return self.tree.text(node.id)

    def op(self, node: SyntaxNode) -> str:
        o = self.tree.child(node.id, "operator")
        return self.text(o) if o is not None else ""

    def write(self, sym: Symbol, occ: int, weak: bool) -> None:
        (self.weak if weak else self.strong).append((sym, occ))
        if self._assigning:
            self.assigned.append((sym, occ))

    # ---- roots ------------------------------------------------------------
    def root(self, node: SyntaxNode) -> None:
        if node.field == "declarator" and self.tree[node.parent].kind == "for_range_loop":
            self.declarator(node, with_def=True)
        elif node.kind == "field_initializer_list":
            self.field_initializers(node)
        else:
            self.expr(node, reads=True, writes=None)

    # ---- declarations -----------------------------------------------------------
    def declaration(self, node: SyntaxNode) -> None:
        for d in self.tree.named_children(node.id):
            if d.field != "declarator":
                continue
            if d.kind == "init_declarator":
                value = self.tree.child(d.id, "value")
                if value is not None:
                    self._value(value)
                self.declarator(self.tree.child(d.id, "declarator"), with_def=True, assigning=True)
            else:
                self.declarator(d, with_def=False)

    def _value(self, value: SyntaxNode) -> None:
        self.expr(value, reads=True, writes=None)

    def declarator(self, d: SyntaxNode | None, with_def: bool, assigning: bool = False) -> None:
        cur = d
        while cur is not None:
            k = cur.kind
            if k in ("identifier", "field_identifier"):
                break
            if k == "array_declarator":
                size = self.tree.child(cur.id, "size")
                if size is not None:
                    self.expr(size, reads=True, writes=None)
                cur = self.tree.child(cur.id, "declarator")
            elif k == "function_declarator":
                cur = self.tree.child(cur.id, "declarator")
            elif k in ("pointer_declarator", "init_declarator"):
                cur = self.tree.child(cur.id, "declarator")
            else:
                kids = self.tree.named_children(cur.id)
                cur = kids[0] if kids else None
        if cur is None:
            return
        sym = self.sym(cur)
        if sym is None:
            return
        construction = self.table.constructions.get(cur.id)
        if construction is not None:
            record, args = construction
            arg_occs = []
            for a in args:
                occs = []
                for t in self.tree.walk(a.id):
                    s = self.sym(t) if t.kind in IDENTIFIER_KINDS else None
                    if s is not None:
                        self.uses.append((s, t.id))
                        occs.append((s, t.id))
                arg_occs.append(occs)
            targets = self.resolver.constructor_targets(record, len(args))
            if targets:
                self.calls.append(CallFact(cur.id, targets, arg_occs))
            with_def = True
            assigning = True
        if with_def:
            prev = self._assigning
            self._assigning = assigning
            self.write(sym, cur.id, weak=False)
            self._assigning = prev

    def field_initializers(self, node: SyntaxNode) -> None:
        for fi in self.tree.named_children(node.id):
            for c in self.tree.named_children(fi.id):
                if c.kind == "field_identifier":
                    sym = self.sym(c)
                    if sym is not None:
                        self.write(sym, c.id, weak=False)
                else:
                    self.expr(c, reads=True, writes=None)

    # ---- expressions --------------------------------------------------------
    def is_pointer_operand(self, node: SyntaxNode) -> bool:
        if node.kind == "identifier":
            s = self.sym(node)
            return s is not None and s.is_pointer and s.params is None
        if node.kind == "field_expression":
            f = self.tree.child(node.id, "field")
            s = self.sym(f) if f is not None else None
            return s is not None and s.is_pointer and s.params is None
        return False

    def pointer_arithmetic(self, node: SyntaxNode) -> None:
        path, line, _ = self.tree.origin(node.id)
        self.diagnostics.append(Diagnostic(
            Category.PointerArithmetic, path, line,
            f"pointer arithmetic {' '.join(self.text(node).split())[:40]!r}; only the base pointer is tracked",
            frozenset({View.DFG})))

    def expr(self, node: SyntaxNode, reads: bool, writes: str | None) -> None:
        k = node.kind
        if k in ("identifier", "type_identifier"):
            s = self.sym(node)
            if s is None:
                return
            if reads:
                self.uses.append((s, node.id))
            if writes:
                self.write(s, node.id, weak=writes == "weak")
            return
        if k == "parenthesized_expression":
            for c in self.tree.named_children(node.id):
                self.expr(c, reads, writes)
            return
        if k == "field_expression":
            arg = self.tree.child(node.id, "argument")
            fld = self.tree.child(node.id, "field")
            s = self.sym(fld) if fld is not None else None
            if s is not None:
                if reads:
                    self.uses.append((s, fld.id))
                if writes:
                    strong = arg is not None and arg.kind == "this" and writes == "strong"
                    self.write(s, fld.id, weak=not strong)
            if arg is not None and arg.kind != "this":
                self.expr(arg, reads=True, writes=None)
            return
        if k == "subscript_expression":
            arg = self.tree.child(node.id, "argument")
            if arg is not None:
                self.expr(arg, reads=True, writes="weak" if writes else None)
            for c in self.tree.named_children(node.id):
                if c is not arg:
                    self.expr(c, reads=True, writes=None)
            return
        if k == "pointer_expression":
            arg = self.tree.child(node.id, "argument")
            if arg is None:
                return
            if self.op(node) == "*":
                self.expr(arg, reads=True, writes="weak" if writes else None)
            else:
                self.expr(arg, reads=True, writes=None)
            return
        if k == "assignment_expression":
            right = self.tree.child(node.id, "right")
            left = self.tree.child(node.id, "left")
            if right is not None:
                self.expr(right, reads=True, writes=None)
            if left is not None:
                prev = self._assigning
                self._assigning = True
                self.expr(left, reads=self.op(node) != "=", writes="strong")
                self._assigning = prev
            return
        if k == "update_expression":
            arg = self.tree.child(node.id, "argument")
            if arg is None:
                return
            if self.is_pointer_operand(arg):
                self.pointer_arithmetic(node)
                self.expr(arg, reads=True, writes=None)
                return
            prev = self._assigning
            self._assigning = True
            self.expr(arg, reads=True, writes="strong")
            self._assigning = prev
            return
        if k == "binary_expression" and self.op(node) in ("+", "-"):
            left = self.tree.child(node.id, "left")
            right = self.tree.child(node.id, "right")
            ptrs = [c for c in (left, right) if c is not None and self.is_pointer_operand(c)]
            if ptrs and not (len(ptrs) == 2 and self.op(node) == "-"):
                self.pointer_arithmetic(node)
                for c in ptrs:
                    self.expr(c, reads=True, writes=None)
                return
        if k == "call_expression":
            self.call(node)
            return
        if k == "new_expression":
            args = self.tree.child(node.id, "arguments")
            occs = []
            for a in self.tree.named_children(args.id) if args is not None else []:
                before = len(self.uses)
                self.expr(a, reads=True, writes=None)
                occs.append(self.uses[before:])
            t = self.tree.child(node.id, "type")
            rec = self.table.record_for_type(self.text(t)) if t is not None else None
            targets = self.resolver.constructor_targets(rec, len(occs)) if rec is not None else []
            if targets:
                self.calls.append(CallFact(node.id, targets, occs))
            return
        if k == "declaration":
            self.declaration(node)
            return
        if k in ("lambda_expression", "sizeof_expression", "alignof_expression", "type_descriptor",
                 "function_definition", "struct_specifier", "class_specifier", "union_specifier",
                 "enum_specifier", "type_definition"):
            return
        for c in self.tree.named_children(node.id):
            self.expr(c, reads=True, writes=None)

    def call(self, node: SyntaxNode) -> None:
        fn = self.tree.child(node.id, "function")
        args_node = self.tree.child(node.id, "arguments")
        targets = self.resolver.targets(fn)
        if fn is not None:
            callee = self.table.binding.get(fn.id)
            if not (fn.kind == "identifier" and callee is not None and not tracked(callee)):
                self.expr(fn, reads=True, writes=None)
        args = self.tree.named_children(args_node.id) if args_node is not None else []
        occs: list[list[tuple[Symbol, int]]] = []
        for i, a in enumerate(args):
            before = len(self.uses)
            by_ref = any(t.params is not None and i < len(t.params) and t.params[i].is_reference
                         and not t.params[i].type_text.startswith("const") for t in targets)
            by_ptr = any(t.params is not None and i < len(t.params) and t.params[i].is_pointer for t in targets)
            inner = a
            while inner.kind == "parenthesized_expression" and self.tree.named_children(inner.id):
                inner = self.tree.named_children(inner.id)[0]
            if targets and inner.kind == "pointer_expression" and self.op(inner) == "&":
                target = self.tree.child(inner.id, "argument")
                if target is not None and target.kind in ("identifier", "field_expression", "subscript_expression"):
                    self.expr(target, reads=False, writes="strong")
                    occs.append(self._occs(target))
                    continue
            if by_ref and inner.kind in ("identifier", "field_expression", "subscript_expression"):
                self.expr(inner, reads=True, writes="strong")
            elif by_ptr and inner.kind == "identifier" and self.sym(inner) is not None \
                    and self.sym(inner).is_pointer:
                self.expr(inner, reads=True, writes="weak")
            else:
                self.expr(a, reads=True, writes=None)
            occs.append(self.uses[before:] or self._occs(inner))
        if targets:
            self.calls.append(CallFact(node.id, targets, occs))

    def _occs(self, node: SyntaxNode) -> list[tuple[Symbol, int]]:
        out = []
        for t in self.tree.walk(node.id):
            s = self.sym(t) if t.kind in IDENTIFIER_KINDS else None
            if s is not None:
                out.append((s, t.id))
        return out


def compute_gen_kill(g: CodeGraph, table: SymbolTable) -> DefUseFacts:
    """Per-CFG-node gen, kill and use sets (entries gen parameters and shared state)."""
    tree = table.tree
    facts = DefUseFacts()
    fns: dict[int, CfgFunction] = g.extras.get("functions", {})
    resolver = CallResolver(tree, table, [])
    globals_ = [s for s in table.symbols if table.is_global(s) and tracked(s)]
    global_init = {s.uid: Definition(s, GLOBAL_INIT_ID, s.decl_node) for s in globals_}
    weak_defs: set[Definition] = set()
    for fdef in sorted(fns):
        fn = fns[fdef]
        referenced: dict[int, Symbol] = {}
        for s in fn.statement_nodes:
            col = _StmtCollector(tree, table, resolver, facts.diagnostics)
            for r in fn.content.get(s, []):
                col.root(tree[r])
            facts.function_of[s] = fdef
            gen = {Definition(sym, s, occ) for sym, occ in col.strong}
            weak = {Definition(sym, s, occ) for sym, occ in col.weak}
            weak_defs |= weak - gen
            facts.gen[s] = gen | weak
            facts.uses[s] = set(col.uses)
            facts.assigned[s] = {Definition(sym, s, occ) for sym, occ in col.assigned}
            if col.calls:
                facts.calls[s] = col.calls
            for sym, _ in col.strong + col.weak + col.uses:
                referenced[sym.uid] = sym
        entry_gen: set[Definition] = set()
        fn_sym = fn.symbol
        if fn_sym.inner_scope is not None:
            for p in table.scopes[fn_sym.inner_scope].symbols.values():
                if p.kind == "parameter" and p.decl_node is not None:
                    entry_gen.add(Definition(p, fn.entry, p.decl_node))
        for sym in referenced.values():
            if sym.uid in global_init:
                entry_gen.add(global_init[sym.uid])
            elif sym.kind == "member_variable":
                entry_gen.add(Definition(sym, fn.entry, fn.entry))
        facts.gen[fn.entry] = entry_gen
        facts.uses.setdefault(fn.entry, set())
        facts.gen.setdefault(fn.exit, set())
        facts.uses.setdefault(fn.exit, set())
        facts.function_of[fn.entry] = fdef
        facts.function_of[fn.exit] = fdef
    by_symbol: dict[int, set[Definition]] = {}
    for defs in facts.gen.values():
        for d in defs:
            by_symbol.setdefault(d.symbol.uid, set()).add(d)
    for n, defs in facts.gen.items():
        strong_syms = {d.symbol.uid for d in defs if d not in weak_defs}
        kill: set[Definition] = set()
        for uid in strong_syms:
            kill |= by_symbol[uid]
        facts.kill[n] = kill - defs
    return facts


def reaching_definitions(g: CodeGraph, facts: DefUseFacts) -> dict[int, frozenset[Definition]]:
    """IN sets of the forward may-analysis, by worklist to the least fixpoint.

    Only intra-procedural CFG edges carry facts; call and return edges are
    handled when the def-use graph is assembled.
    """
    nodes = sorted(set(g.view_nodes(View.CFG)) | set(facts.gen) | set(facts.kill))
    preds: dict[int, list[int]] = {n: [] for n in nodes}
    succs: dict[int, list[int]] = {n: [] for n in nodes}
    for e in g.edges_of(View.CFG):
        if e.label in INTERPROCEDURAL:
            continue
        preds.setdefault(e.dst, []).append(e.src)
        succs.setdefault(e.src, []).append(e.dst)
        for n in (e.src, e.dst):
            if n not in preds:
                preds[n] = []
                succs.setdefault(n, [])
                nodes.append(n)
    all_defs = sorted({d for defs in facts.gen.values() for d in defs} |
                      {d for defs in facts.kill.values() for d in defs}, key=lambda d: d.sort_key)
    bit = {d: 1 << i for i, d in enumerate(all_defs)}

    def mask(defs: Iterable[Definition]) -> int:
        m = 0
        for d in defs:
            m |= bit[d]
        return m

    gen = {n: mask(facts.gen.get(n, ())) for n in nodes}
    keep = {n: ~mask(facts.kill.get(n, ())) for n in nodes}
    out = {n: 0 for n in nodes}
    inn = {n: 0 for n in nodes}
    work = deque(nodes)
    queued = set(nodes)
    while work:
        n = work.popleft()
        queued.discard(n)
        m = 0
        for p in preds[n]:
            m |= out[p]
        inn[n] = m
        new = gen[n] | (m & keep[n])
        if new != out[n]:
            out[n] = new
            for s in succs[n]:
                if s not in queued:
                    queued.add(s)
                    work.append(s)
    result: dict[int, frozenset[Definition]] = {}
    for n in nodes:
        m = inn[n]
        result[n] = frozenset(d for d in all_defs if m & bit[d])
    return result


def build_dfg(g: CodeGraph, rd: dict[int, frozenset[Definition]], facts: DefUseFacts,
              table: SymbolTable) -> CodeGraph:
    """Materialize def-use edges, within and across functions."""
    tree = table.tree
    out = CodeGraph({View.DFG}, {"project": tree.unit.name, "lang": tree.lang.value})
    fns: dict[int, CfgFunction] = g.extras.get("functions", {})
    by_def = {f.definition: f for f in fns.values()}

    def node(occ: int) -> None:
        if occ not in out.nodes:
            out.add_node(node_from_cst(tree, occ, View.DFG))

    def edge(d: Definition, use_occ: int, label: str) -> None:
        node(d.occurrence)
        node(use_occ)
        out.add_edge(d.occurrence, use_occ, View.DFG, label)

    for n in sorted(facts.gen):
        for d in sorted(facts.gen[n], key=lambda d: d.sort_key):
            if not d.is_marker:
                node(d.occurrence)
    for n in sorted(facts.uses):
        for sym, occ in sorted(facts.uses[n], key=lambda u: u[1]):
            node(occ)

    # definitions reaching each use inside its function
    for n in sorted(facts.uses):
        reach = rd.get(n, frozenset())
        for sym, occ in sorted(facts.uses[n], key=lambda u: u[1]):
            for d in sorted(reach, key=lambda d: d.sort_key):
                if d.symbol is sym and not d.is_marker:
                    edge(d, occ, sym.name)

    # upward-exposed uses per function: uses reached by an entry definition
    def exposed(fdef: int, sym: Symbol, entry_def) -> list[int]:
        res = []
        for n in by_def[fdef].statement_nodes:
            if entry_def in rd.get(n, frozenset()):
                res.extend(occ for s, occ in facts.uses.get(n, ()) if s is sym)
        return sorted(res)

    def param_def(fdef: int, index: int) -> Definition | None:
        f = by_def[fdef]
        params = [d for d in facts.gen.get(f.entry, ()) if d.symbol.kind == "parameter"]
        params.sort(key=lambda d: d.occurrence)
        return params[index] if index < len(params) else None

    for s in sorted(facts.calls):
        reach = rd.get(s, frozenset())
        fdef_caller = facts.function_of.get(s)
        for call in facts.calls[s]:
            for target in call.targets:
                if target.definition not in by_def:
                    continue
                callee = by_def[target.definition]
                params = target.params or []
                for i, arg in enumerate(call.args):
                    pd = param_def(target.definition, i)
                    if pd is None or i >= len(params):
                        continue
                    up = exposed(target.definition, pd.symbol, pd)
                    arg_syms = {sym.uid: sym for sym, _ in arg}
                    # caller definitions of the argument reach the parameter's first uses
                    for d in sorted(reach, key=lambda d: d.sort_key):
                        if d.symbol.uid in arg_syms and not d.is_marker:
                            for u in up:
                                edge(d, u, pd.symbol.name)
                    if not (params[i].is_reference or params[i].is_pointer):
                        continue
                    # callee writes through the alias flow back to the caller
                    back = [d for d in rd.get(callee.exit, frozenset())
                            if d.symbol is pd.symbol and d.site != callee.entry]
                    if not back:
                        continue
                    call_defs = [d for d in facts.gen.get(s, ()) if d.symbol.uid in arg_syms]
                    for n in by_def[fdef_caller].statement_nodes if fdef_caller in by_def else []:
                        if n == s:
                            continue
                        r = rd.get(n, frozenset())
                        if not any(cd in r for cd in call_defs):
                            continue
                        for sym, occ in facts.uses.get(n, ()):
                            if sym.uid in arg_syms:
                                for d in back:
                                    edge(d, occ, sym.name)
                # return values flow to the variable assigned at the call site
                assigned = sorted(facts.assigned.get(s, ()), key=lambda d: d.sort_key)
                if not assigned:
                    continue
                for r in callee.statement_nodes:
                    if tree[r].kind != "return_statement":
                        continue
                    rr = rd.get(r, frozenset())
                    for sym, occ in facts.uses.get(r, ()):
                        for d in rr:
                            if d.symbol is sym and not d.is_marker:
                                for a in assigned:
                                    edge(d, a.occurrence, a.symbol.name)

    # shared state (globals, members): a definition that survives to a
    # function's exit, or reaches a call, flows to upward-exposed uses elsewhere
    leaving: dict[int, set[tuple[int, Definition]]] = {}  # symbol -> (writer fn, def)
    passed: dict[int, set[tuple[int, Definition]]] = {}   # symbol -> (callee fn, def)

    def shared_def(d: Definition) -> bool:
        return _shared(d.symbol, table) and not d.is_marker and d.site != GLOBAL_INIT_ID

    for fdef, f in by_def.items():
        for d in rd.get(f.exit, frozenset()):
            if shared_def(d):
                leaving.setdefault(d.symbol.uid, set()).add((fdef, d))
        for s in f.statement_nodes:
            for call in facts.calls.get(s, []):
                for target in call.targets:
                    for d in rd.get(s, frozenset()):
                        if shared_def(d) and target.definition != fdef:
                            passed.setdefault(d.symbol.uid, set()).add((target.definition, d))
    for uid in sorted(set(leaving) | set(passed)):
        for hdef in sorted(by_def):
            h = by_def[hdef]
            marker = next((d for d in facts.gen.get(h.entry, ()) if d.symbol.uid == uid), None)
            if marker is None:
                continue
            up = exposed(hdef, marker.symbol, marker)
            if not up:
                continue
            sources = {d for writer, d in leaving.get(uid, ()) if writer != hdef}
            sources |= {d for callee, d in passed.get(uid, ()) if callee == hdef}
            for d in sorted(sources, key=lambda d: d.sort_key):
                for u in up:
                    edge(d, u, d.symbol.name)
    return out


def build_dfg_view(cfg: CodeGraph, table: SymbolTable) -> tuple[CodeGraph, DefUseFacts,
                                                                dict[int, frozenset[Definition]]]:
    facts = compute_gen_kill(cfg, table)
    rd = reaching_definitions(cfg, facts)
    return build_dfg(cfg, rd, facts, table), facts, rd
