"""Scopes, typed symbols and declaration-use links over a :class:`SyntaxTree`."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NamedTuple

from ..diagnostics import Category, Diagnostic
from .cst import IDENTIFIER_KINDS, SyntaxNode, SyntaxTree

SYMBOL_KINDS = frozenset({
    "variable", "parameter", "function", "struct", "enum", "union", "typedef",
    "class", "member_variable", "member_function", "namespace", "label",
})
FUNCTION_KINDS = frozenset({"function", "member_function"})
RECORD_KINDS = frozenset({"struct", "union", "class", "enum"})
VARIABLE_KINDS = frozenset({"variable", "parameter", "member_variable"})
EXTERNAL = "external"

_RECORD_SPECIFIERS = {
    "struct_specifier": "struct",
    "union_specifier": "union",
    "enum_specifier": "enum",
    "class_specifier": "class",
}
_TYPE_NOISE_RE = re.compile(r"\b(const|volatile|struct|class|union|enum|typename|unsigned|signed|static|inline|register)\b")


class Param(NamedTuple):
    name: str
    type_text: str
    is_reference: bool
    is_pointer: bool


@dataclass
class Scope:
    id: int
    kind: str  # global | namespace | class | function | block
    parent: int | None
    node: int
    name: str = ""
    symbols: dict[str, "Symbol"] = field(default_factory=dict)
    tags: dict[str, "Symbol"] = field(default_factory=dict)
    labels: dict[str, "Symbol"] = field(default_factory=dict)


@dataclass(eq=False)
class Symbol:
    uid: int
    name: str
    kind: str
    type_text: str
    decl_node: int | None
    scope: int
    use_nodes: list[int] = field(default_factory=list)
    params: list[Param] | None = None
    address_taken: bool = False
    definition: int | None = None
    record: "Symbol | None" = None  # owning class/struct for members
    inner_scope: int | None = None  # body scope of records, namespaces and functions
    bases: list[str] = field(default_factory=list)
    constructor: bool = False
    constant: bool = False

    def __repr__(self) -> str:
        return f"Symbol({self.name!r}, {self.kind}, {self.type_text!r}, decl={self.decl_node})"

    @property
    def external(self) -> bool:
        return self.decl_node is None

    @property
    def is_pointer(self) -> bool:
        t = self.type_text
        return "*" in t or t.endswith("]")

    @property
    def is_function_pointer(self) -> bool:
        return self.kind in VARIABLE_KINDS and self.params is not None


class _DeclInfo(NamedTuple):
    name: SyntaxNode | None
    suffix: str
    is_reference: bool
    is_pointer: bool
    is_function: bool
    is_function_pointer: bool
    params: SyntaxNode | None
    value: SyntaxNode | None
    extras: list[SyntaxNode]
    return_suffix: str


class SymbolTable:
    def __init__(self, tree: SyntaxTree):
        self.tree = tree
        self.scopes: list[Scope] = [Scope(0, "global", None, 0)]
        self.symbols: list[Symbol] = []
        self.typedefs: dict[str, str] = {}
        self.typedef_params: dict[str, list[Param]] = {}
        self.binding: dict[int, Symbol] = {}
        self.externals: dict[str, Symbol] = {}
        self.records: dict[str, Symbol] = {}
        self.function_defs: dict[int, Symbol] = {}
        self.scope_of: dict[int, int] = {0: 0}
        self.unresolved: set[int] = set()
        # declarator identifier -> (class symbol, constructor argument nodes)
        self.constructions: dict[int, tuple[Symbol, list[SyntaxNode]]] = {}
        self.diagnostics: list[Diagnostic] = []

    # ---- queries -----------------------------------------------------
    def lookup(self, name: str, scope: int) -> Symbol | None:
        s: int | None = scope
        while s is not None:
            sc = self.scopes[s]
            if name in sc.symbols:
                return sc.symbols[name]
            if sc.kind == "class":
                found = self.member(self._record_of_scope(s), name)
                if found is not None:
                    return found
            s = sc.parent
        return None

    def lookup_tag(self, name: str, scope: int) -> Symbol | None:
        s: int | None = scope
        while s is not None:
            if name in self.scopes[s].tags:
                return self.scopes[s].tags[name]
            s = self.scopes[s].parent
        return self.records.get(name)

    def lookup_label(self, name: str, scope: int) -> Symbol | None:
        fn = self.function_scope(scope)
        return self.scopes[fn].labels.get(name) if fn is not None else None

    def function_scope(self, scope: int) -> int | None:
        s: int | None = scope
        while s is not None and self.scopes[s].kind != "function":
            s = self.scopes[s].parent
        return s

    def class_scope(self, scope: int) -> int | None:
        s: int | None = scope
        while s is not None and self.scopes[s].kind != "class":
            s = self.scopes[s].parent
        return s

    def _record_of_scope(self, scope: int) -> Symbol | None:
        node = self.scopes[scope].node
        for sym in self.records.values():
            if sym.inner_scope == scope:
                return sym
        return None if node is None else None

    def member(self, record: Symbol | None, name: str, _seen: frozenset = frozenset()) -> Symbol | None:
        if record is None or record.inner_scope is None or record.uid in _seen:
            return None
        sym = self.scopes[record.inner_scope].symbols.get(name)
        if sym is not None:
            return sym
        for base in record.bases:
            found = self.member(self.records.get(base), name, _seen | {record.uid})
            if found is not None:
                return found
        return None

    def symbol_of(self, nid: int) -> Symbol | None:
        return self.binding.get(nid)

    def record_for_type(self, type_text: str) -> Symbol | None:
        return self.records.get(record_name(type_text))

    def defined_functions(self) -> list[Symbol]:
        return [self.function_defs[k] for k in sorted(self.function_defs)]

    def is_global(self, sym: Symbol) -> bool:
        return sym.kind == "variable" and not sym.external and self.scopes[sym.scope].kind in ("global", "namespace")

    def compatible(self, fn: Symbol, pointer_params: list[Param] | None) -> bool:
        """Same arity and equal parameter types (or an external side)."""
        if fn.params is None or pointer_params is None:
            return False
        if len(fn.params) != len(pointer_params):
            return False
        for a, b in zip(fn.params, pointer_params):
            if EXTERNAL in (a.type_text, b.type_text):
                continue
            if normalize_type(a.type_text) != normalize_type(b.type_text):
                return False
        return True

    def address_taken_functions(self) -> list[Symbol]:
        return [s for s in self.defined_functions() if s.address_taken]

    def constructors(self, record: Symbol) -> list[Symbol]:
        if record.inner_scope is None:
            return []
        out = [s for s in self.symbols if s.constructor and s.record is record and s.definition is not None]
        return sorted(out, key=lambda s: s.definition)


def normalize_type(text: str) -> str:
    return re.sub(r"\s+", "", text)


def record_name(type_text: str) -> str:
    t = _TYPE_NOISE_RE.sub(" ", type_text)
    t = re.sub(r"<.*>", "", t)
    t = re.sub(r"[\*&\[\]0-9()]", " ", t)
    words = t.split()
    if not words:
        return ""
    return words[-1].split("::")[-1]


def _squash(text: str) -> str:
    return re.sub(r"\s+", "", text)


class _Binder:
    def __init__(self, tree: SyntaxTree):
        self.tree = tree
        self.table = SymbolTable(tree)
        self.pending: list[tuple[int, int, str]] = []  # (node, scope, role)
        self.current_function: list[Symbol] = []

    # ---- scope / symbol helpers -------------------------------------
    def new_scope(self, kind: str, parent: int, node: int, name: str = "") -> int:
        sid = len(self.table.scopes)
        self.table.scopes.append(Scope(sid, kind, parent, node, name))
        self.table.scope_of[node] = sid
        return sid

    def declare(self, name: str, kind: str, type_text: str, node: SyntaxNode | None, scope: int, *,
                where: str = "symbols", **extra) -> Symbol:
        sym = Symbol(len(self.table.symbols), name, kind, type_text,
                     node.id if node is not None else None, scope, **extra)
        self.table.symbols.append(sym)
        getattr(self.table.scopes[scope], where)[name] = sym
        if node is not None:
            self.table.binding[node.id] = sym
        return sym

    def use(self, sym: Symbol, node: SyntaxNode) -> None:
        if node.id in self.table.binding:
            return
        sym.use_nodes.append(node.id)
        self.table.binding[node.id] = sym

    def text(self, node: SyntaxNode) -> str:
        return self.tree.text(node.id)

    def child(self, node: SyntaxNode, name: str) -> SyntaxNode | None:
        return self.tree.child(node.id, name)

    def named(self, node: SyntaxNode) -> list[SyntaxNode]:
        return self.tree.named_children(node.id)

    # ---- types ---------------------------------------------------------
    def base_type(self, owner: SyntaxNode, scope: int) -> tuple[str, list[Param] | None]:
        """Type text of a declaration's specifier part, typedefs resolved."""
        quals = [self.text(c) for c in self.named(owner) if c.kind == "type_qualifier" and c.field is None]
        tnode = self.child(owner, "type")
        params = None
        if tnode is None:
            base = ""
        elif tnode.kind == "type_identifier":
            name = self.text(tnode)
            base = self.table.typedefs.get(name, name)
            params = self.table.typedef_params.get(name)
        elif tnode.kind in _RECORD_SPECIFIERS:
            base = f"{_RECORD_SPECIFIERS[tnode.kind]} {self.record_tag(tnode)}"
        else:
            base = " ".join(self.text(tnode).split())
        if quals:
            base = " ".join(quals + [base])
        return base, params

    def record_tag(self, spec: SyntaxNode) -> str:
        name = self.child(spec, "name")
        return self.text(name) if name is not None else f"anon${spec.id}"

    def declarator(self, d: SyntaxNode | None) -> _DeclInfo:
        mods: list[str] = []
        value = None
        params = None
        extras: list[SyntaxNode] = []
        cur = d
        name = None
        while cur is not None:
            k = cur.kind
            if k == "init_declarator":
                value = self.child(cur, "value")
                cur = self.child(cur, "declarator")
            elif k in ("pointer_declarator", "abstract_pointer_declarator"):
                mods.append("*")
                cur = self.child(cur, "declarator")
            elif k in ("reference_declarator", "abstract_reference_declarator"):
                mods.append("&")
                inner = self.named(cur)
                cur = inner[0] if inner else None
            elif k in ("array_declarator", "abstract_array_declarator"):
                mods.append("[]")
                size = self.child(cur, "size")
                if size is not None:
                    extras.append(size)
                cur = self.child(cur, "declarator")
            elif k in ("function_declarator", "abstract_function_declarator"):
                mods.append("fn")
                if params is None:
                    params = self.child(cur, "parameters")
                cur = self.child(cur, "declarator")
            elif k in ("parenthesized_declarator", "abstract_parenthesized_declarator", "attributed_declarator"):
                mods.append("()" if k != "attributed_declarator" else "")
                inner = [c for c in self.named(cur) if c.kind not in ("attribute_declaration", "attribute_specifier")]
                cur = inner[0] if inner else None
            else:
                name = cur
                break
        if d is None:
            suffix = ""
        else:
            core = self.child(d, "declarator") if d.kind == "init_declarator" else d
            suffix = self._suffix(core, name)
        is_function = bool(mods) and mods[0] == "fn" and not ("()" in mods[1:] and "*" in mods[1:])
        is_fnptr = "fn" in mods and not is_function and "*" in mods
        first = next((m for m in mods if m), "")
        ret_suffix = ""
        if is_function:
            ret_suffix = "*" * sum(1 for m in mods[1:] if m == "*")
        return _DeclInfo(name, suffix, first == "&", first in ("*", "[]"), is_function, is_fnptr,
                         params, value, extras, ret_suffix)

    def _suffix(self, core: SyntaxNode | None, name: SyntaxNode | None) -> str:
        if core is None:
            return ""
        src = self.tree.sources[core.file]
        if name is None:
            return _squash(src[core.start_byte:core.end_byte].decode("utf-8", "replace"))
        before = src[core.start_byte:name.start_byte].decode("utf-8", "replace")
        after = src[name.end_byte:core.end_byte].decode("utf-8", "replace")
        return _squash(before + after)

    def param_list(self, plist: SyntaxNode | None, scope: int) -> list[Param]:
        if plist is None:
            return []
        out: list[Param] = []
        for p in self.named(plist):
            if p.kind not in ("parameter_declaration", "optional_parameter_declaration"):
                continue
            base, _ = self.base_type(p, scope)
            info = self.declarator(self.child(p, "declarator"))
            if base == "void" and info.name is None and not info.suffix:
                continue
            out.append(Param(self.text(info.name) if info.name is not None else "",
                             base + info.suffix, info.is_reference, info.is_pointer))
        return out

    # ---- walking -------------------------------------------------------
    def run(self) -> SymbolTable:
        for c in self.named(self.tree.root):
            self.visit(c, 0)
        self.resolve_pending()
        return self.table

    def visit(self, node: SyntaxNode, scope: int) -> None:
        handler = getattr(self, "visit_" + node.kind, None)
        if handler is not None:
            handler(node, scope)
        else:
            self.visit_children(node, scope)

    def visit_children(self, node: SyntaxNode, scope: int) -> None:
        for c in self.named(node):
            self.visit(c, scope)

    def visit_namespace_definition(self, node: SyntaxNode, scope: int) -> None:
        name_node = self.child(node, "name")
        name = self.text(name_node) if name_node is not None else f"anon${node.id}"
        existing = self.table.scopes[scope].symbols.get(name)
        if existing is not None and existing.kind == "namespace":
            self.use(existing, name_node) if name_node is not None else None
            inner = existing.inner_scope
        else:
            inner = self.new_scope("namespace", scope, node.id, name)
            self.declare(name, "namespace", "namespace", name_node, scope, inner_scope=inner)
        self.table.scope_of[node.id] = inner
        body = self.child(node, "body")
        if body is not None:
            self.visit_children(body, inner)

    def visit_compound_statement(self, node: SyntaxNode, scope: int) -> None:
        self.visit_children(node, self.new_scope("block", scope, node.id))

    def _scoped(self, node: SyntaxNode, scope: int) -> None:
        self.visit_children(node, self.new_scope("block", scope, node.id))

    visit_for_statement = _scoped
    visit_if_statement = _scoped
    visit_while_statement = _scoped
    visit_switch_statement = _scoped
    visit_catch_clause = _scoped

    def visit_for_range_loop(self, node: SyntaxNode, scope: int) -> None:
        inner = self.new_scope("block", scope, node.id)
        base, _ = self.base_type(node, inner)
        self.visit_type(self.child(node, "type"), inner)
        info = self.declarator(self.child(node, "declarator"))
        right = self.child(node, "right")
        if right is not None:
            self.visit(right, inner)
        if info.name is not None:
            self.declare(self.text(info.name), "variable", base + info.suffix, info.name, inner)
        body = self.child(node, "body")
        if body is not None:
            self.visit(body, inner)

    def visit_labeled_statement(self, node: SyntaxNode, scope: int) -> None:
        for c in self.named(node):
            if c.field == "label":
                continue
            self.visit(c, scope)

    def visit_goto_statement(self, node: SyntaxNode, scope: int) -> None:
        label = self.child(node, "label")
        if label is None:
            return
        sym = self.table.lookup_label(self.text(label), scope)
        if sym is not None:
            self.use(sym, label)
        else:
            self.table.unresolved.add(label.id)

    def visit_type(self, tnode: SyntaxNode | None, scope: int) -> None:
        if tnode is None:
            return
        if tnode.kind in _RECORD_SPECIFIERS:
            self.visit_record(tnode, scope)
        elif tnode.kind == "type_identifier":
            self.bind_type_name(tnode, scope)
        else:
            for c in self.tree.walk(tnode.id):
                if c.kind == "type_identifier":
                    self.bind_type_name(c, scope)

    def bind_type_name(self, node: SyntaxNode, scope: int) -> None:
        name = self.text(node)
        sym = self.table.lookup(name, scope)
        if sym is None or sym.kind not in ("typedef", "class", "struct", "union", "enum"):
            sym = self.table.lookup_tag(name, scope)
        if sym is not None:
            self.use(sym, node)
        else:
            self.table.unresolved.add(node.id)

    visit_type_identifier = bind_type_name

    def visit_record(self, spec: SyntaxNode, scope: int) -> Symbol | None:
        kind = _RECORD_SPECIFIERS[spec.kind]
        name_node = self.child(spec, "name")
        body = self.child(spec, "body")
        tag = self.record_tag(spec)
        if name_node is not None and name_node.kind != "type_identifier":
            # qualified or templated names: bind what we can, do not model
            self.visit_children(name_node, scope)
        if body is None:
            existing = self.table.lookup_tag(tag, scope)
            if existing is not None and name_node is not None:
                self.use(existing, name_node)
                return existing
            if name_node is None:
                return None
            sym = self.declare(tag, kind, f"{kind} {tag}", name_node, scope, where="tags")
            self.table.records.setdefault(tag, sym)
            return sym
        existing = self.table.scopes[scope].tags.get(tag)
        if existing is not None and existing.inner_scope is None:
            sym = existing
            if name_node is not None:
                self.use(sym, name_node)
        else:
            sym = self.declare(tag, kind, f"{kind} {tag}", name_node if name_node is not None and name_node.kind == "type_identifier" else None,
                               scope, where="tags")
            if name_node is None or name_node.kind != "type_identifier":
                sym.decl_node = spec.id  # anonymous records are addressed by their specifier
        self.table.records[tag] = sym
        if self.tree.lang.value == "cpp" and kind in ("class", "struct", "union"):
            self.table.scopes[scope].symbols.setdefault(tag, sym)
        inner = self.new_scope("class", scope, spec.id, tag)
        sym.inner_scope = inner
        for c in self.named(spec):
            if c.kind == "base_class_clause":
                for t in self.tree.walk(c.id):
                    if t.kind == "type_identifier":
                        sym.bases.append(self.text(t))
                        self.bind_type_name(t, scope)
        if kind == "enum":
            self.visit_enum_body(body, scope, sym)
            return sym
        members = self.named(body)
        for m in members:
            if m.kind == "function_definition":
                self.predeclare_method(m, inner, sym)
            else:
                self.visit_member(m, inner, sym)
        for m in members:
            if m.kind == "function_definition":
                self.visit_function_definition(m, inner)
        return sym

    visit_struct_specifier = visit_record
    visit_union_specifier = visit_record
    visit_class_specifier = visit_record
    visit_enum_specifier = visit_record

    def visit_enum_body(self, body: SyntaxNode, scope: int, enum_sym: Symbol) -> None:
        for e in self.named(body):
            if e.kind != "enumerator":
                continue
            name = self.child(e, "name")
            value = self.child(e, "value")
            if value is not None:
                self.visit(value, scope)
            if name is not None:
                self.declare(self.text(name), "variable", enum_sym.type_text, name, scope, constant=True)

    def visit_member(self, m: SyntaxNode, inner: int, record: Symbol) -> None:
        if m.kind not in ("field_declaration", "declaration"):
            self.visit(m, inner)
            return
        tnode = self.child(m, "type")
        self.visit_type(tnode, inner)
        base, tparams = self.base_type(m, inner)
        for d in (c for c in self.named(m) if c.field == "declarator"):
            info = self.declarator(d)
            if info.name is None:
                continue
            name = self.text(info.name)
            if info.is_function:
                params = self.param_list(info.params, inner)
                self.visit_param_types(info.params, inner)
                existing = self.table.scopes[inner].symbols.get(name)
                if existing is not None and existing.kind == "member_function":
                    self.use(existing, info.name)
                    continue
                self.declare(name, "member_function", base + info.return_suffix, info.name, inner,
                             params=params, record=record, constructor=(name == record.name and not base))
            else:
                params = self.param_list(info.params, inner) if info.is_function_pointer else tparams
                self.declare(name, "member_variable", base + info.suffix, info.name, inner,
                             params=params, record=record)
            for x in info.extras:
                self.visit(x, inner)
            if info.value is not None:
                self.visit(info.value, inner)
        dv = self.child(m, "default_value")
        if dv is not None:
            self.visit(dv, inner)

    def visit_param_types(self, plist: SyntaxNode | None, scope: int) -> None:
        if plist is None:
            return
        for p in self.named(plist):
            self.visit_type(self.child(p, "type"), scope)

    def function_name(self, decl: SyntaxNode | None, scope: int) -> tuple[SyntaxNode | None, int]:
        """Innermost name node of a function declarator and the scope that owns it."""
        info = self.declarator(decl)
        name = info.name
        owner = scope
        while name is not None and name.kind == "qualified_identifier":
            scope_node = self.child(name, "scope")
            if scope_node is not None:
                target = self.resolve_scope_name(self.text(scope_node), owner)
                if target is not None:
                    owner = target
            name = self.child(name, "name")
        return name, owner

    def resolve_scope_name(self, name: str, scope: int) -> int | None:
        sym = self.table.lookup(name, scope)
        if sym is None or sym.inner_scope is None:
            sym = self.table.lookup_tag(name, scope)
        if sym is not None and sym.inner_scope is not None:
            return sym.inner_scope
        return None

    def predeclare_method(self, node: SyntaxNode, inner: int, record: Symbol) -> None:
        decl = self.child(node, "declarator")
        info = self.declarator(decl)
        name_node, _ = self.function_name(decl, inner)
        if name_node is None:
            return
        name = self.text(name_node)
        if name in self.table.scopes[inner].symbols:
            return
        base, _ = self.base_type(node, inner)
        sym = self.declare(name, "member_function", base + info.return_suffix, None, inner,
                           params=self.param_list(info.params, inner), record=record,
                           constructor=(name == record.name and not base))
        sym.decl_node = name_node.id
        self.table.binding[name_node.id] = sym

    def visit_function_definition(self, node: SyntaxNode, scope: int) -> None:
        decl = self.child(node, "declarator")
        info = self.declarator(decl)
        name_node, owner = self.function_name(decl, scope)
        if name_node is None:
            self.visit_children(node, scope)
            return
        if decl is not None:
            for q in self.tree.walk(decl.id):
                if q.kind == "namespace_identifier" or (q.kind == "type_identifier" and q.parent is not None
                                                         and self.tree[q.parent].kind == "qualified_identifier"):
                    self.bind_type_name(q, scope) if q.kind == "type_identifier" else self._bind_scope_ident(q, scope)
        name = self.text(name_node)
        self.visit_type(self.child(node, "type"), scope)
        base, _ = self.base_type(node, scope)
        owner_scope = self.table.scopes[owner]
        record = self.table._record_of_scope(owner) if owner_scope.kind == "class" else None
        params = self.param_list(info.params, owner)
        existing = owner_scope.symbols.get(name)
        if existing is not None and existing.kind in FUNCTION_KINDS and existing.definition is None \
                and (existing.params is None or len(existing.params) == len(params)):
            sym = existing
            if name_node.id not in self.table.binding:
                self.use(sym, name_node)
            sym.params = params
        elif existing is not None and existing.kind in FUNCTION_KINDS and existing.external:
            sym = existing
        else:
            kind = "member_function" if record is not None else "function"
            sym = Symbol(len(self.table.symbols), name, kind, base + info.return_suffix, name_node.id, owner,
                         params=params, record=record,
                         constructor=record is not None and name == record.name and not base)
            self.table.symbols.append(sym)
            if existing is None:
                owner_scope.symbols[name] = sym
            self.table.binding[name_node.id] = sym
        sym.definition = node.id
        self.table.function_defs[node.id] = sym
        fscope = self.new_scope("function", owner if record is not None or owner != scope else scope, node.id, name)
        sym.inner_scope = fscope
        plist = info.params
        if plist is not None:
            for p in self.named(plist):
                if p.kind not in ("parameter_declaration", "optional_parameter_declaration"):
                    continue
                self.visit_type(self.child(p, "type"), fscope)
                pbase, tparams = self.base_type(p, fscope)
                pinfo = self.declarator(self.child(p, "declarator"))
                if pinfo.name is None:
                    continue
                pparams = self.param_list(pinfo.params, fscope) if pinfo.is_function_pointer else tparams
                self.declare(self.text(pinfo.name), "parameter", pbase + pinfo.suffix, pinfo.name, fscope,
                             params=pparams)
                dv = self.child(p, "default_value")
                if dv is not None:
                    self.visit(dv, fscope)
        body = self.child(node, "body")
        if body is not None:
            self.table.scope_of[body.id] = fscope
            for lab in self.tree.walk(body.id):
                if lab.kind == "labeled_statement":
                    lname = self.child(lab, "label")
                    if lname is not None and self.text(lname) not in self.table.scopes[fscope].labels:
                        self.declare(self.text(lname), "label", "label", lname, fscope, where="labels")
        self.current_function.append(sym)
        for c in self.named(node):
            if c.kind == "field_initializer_list":
                self.visit_field_initializers(c, fscope, record)
        if body is not None:
            self.visit_children(body, fscope)
        self.current_function.pop()

    def _bind_scope_ident(self, node: SyntaxNode, scope: int) -> None:
        name = self.text(node)
        sym = self.table.lookup(name, scope)
        if sym is None or sym.kind not in ("namespace", "class", "struct", "union", "enum"):
            sym = self.table.lookup_tag(name, scope)
        if sym is not None:
            self.use(sym, node)
        else:
            self.table.unresolved.add(node.id)

    def visit_field_initializers(self, node: SyntaxNode, scope: int, record: Symbol | None) -> None:
        for fi in self.named(node):
            for c in self.named(fi):
                if c.kind == "field_identifier":
                    member = self.table.member(record, self.text(c))
                    if member is not None:
                        self.use(member, c)
                    else:
                        self.table.unresolved.add(c.id)
                else:
                    self.visit(c, scope)

    def visit_declaration(self, node: SyntaxNode, scope: int) -> None:
        tnode = self.child(node, "type")
        self.visit_type(tnode, scope)
        base, tparams = self.base_type(node, scope)
        scope_kind = self.table.scopes[scope].kind
        for d in (c for c in self.named(node) if c.field == "declarator"):
            info = self.declarator(d)
            for x in info.extras:
                self.visit(x, scope)
            if info.name is None:
                if info.value is not None:
                    self.visit(info.value, scope)
                continue
            if info.name.kind == "qualified_identifier":
                # out-of-class static member definitions and the like
                self.visit(info.name, scope)
                if info.value is not None:
                    self.visit(info.value, scope)
                continue
            name = self.text(info.name)
            record = self.table.record_for_type(base) if not info.suffix.startswith("*") else None
            if info.is_function and scope_kind in ("function", "block") and record is not None:
                # `A obj(k);` parses as a prototype; inside a body it constructs an object
                args = self.named(info.params) if info.params is not None else []
                for a in args:
                    for t in self.tree.walk(a.id):
                        if t.kind in ("identifier", "type_identifier"):
                            self.visit_identifier(t, scope)
                self.declare(name, "variable", base, info.name, scope)
                self.table.constructions[info.name.id] = (record, args)
                continue
            if info.is_function:
                params = self.param_list(info.params, scope)
                self.visit_param_types(info.params, scope)
                existing = self.table.scopes[scope].symbols.get(name)
                if existing is not None and existing.kind in FUNCTION_KINDS:
                    self.use(existing, info.name)
                    continue
                record = self.table._record_of_scope(scope) if scope_kind == "class" else None
                kind = "member_function" if record is not None else "function"
                self.declare(name, kind, base + info.return_suffix, info.name, scope, params=params,
                             record=record, constructor=record is not None and name == record.name and not base)
                continue
            params = self.param_list(info.params, scope) if info.is_function_pointer else tparams
            existing = self.table.scopes[scope].symbols.get(name)
            if existing is not None and existing.kind == "variable" and scope_kind in ("global", "namespace"):
                # extern declaration followed by the definition
                self.use(existing, info.name)
            else:
                self.declare(name, "variable", base + info.suffix, info.name, scope, params=params)
                if record is not None and not info.suffix and self.tree.lang.value == "cpp" \
                        and record.kind in ("class", "struct"):
                    args = []
                    if info.value is not None and info.value.kind in ("argument_list", "initializer_list"):
                        args = self.named(info.value)
                    if info.value is None or info.value.kind in ("argument_list", "initializer_list"):
                        self.table.constructions[info.name.id] = (record, args)
            if info.value is not None:
                self.visit(info.value, scope)

    def visit_type_definition(self, node: SyntaxNode, scope: int) -> None:
        tnode = self.child(node, "type")
        self.visit_type(tnode, scope)
        base, tparams = self.base_type(node, scope)
        for d in (c for c in self.named(node) if c.field == "declarator"):
            info = self.declarator(d)
            if info.name is None:
                continue
            name = self.text(info.name)
            resolved = base + info.suffix
            self.table.typedefs[name] = resolved
            if info.is_function_pointer or (info.is_function and info.params is not None):
                self.table.typedef_params[name] = self.param_list(info.params, scope)
            elif tparams is not None:
                self.table.typedef_params[name] = tparams
            self.declare(name, "typedef", resolved, info.name, scope)
            rec = self.table.records.get(record_name(base))
            if rec is not None and base.startswith(("struct ", "union ", "class ", "enum ")):
                self.table.records.setdefault(name, rec)

    def visit_alias_declaration(self, node: SyntaxNode, scope: int) -> None:
        name = self.child(node, "name")
        tdesc = self.child(node, "type")
        if tdesc is not None:
            self.visit_type(self.child(tdesc, "type"), scope)
        if name is not None:
            resolved = " ".join(self.text(tdesc).split()) if tdesc is not None else EXTERNAL
            self.table.typedefs[self.text(name)] = resolved
            self.declare(self.text(name), "typedef", resolved, name, scope)

    def visit_using_declaration(self, node: SyntaxNode, scope: int) -> None:
        # `using namespace std;` names a namespace we never see
        return None

    def visit_lambda_expression(self, node: SyntaxNode, scope: int) -> None:
        inner = self.new_scope("function", scope, node.id, "lambda")
        decl = self.child(node, "declarator")
        if decl is not None:
            plist = self.child(decl, "parameters")
            if plist is not None:
                for p in self.named(plist):
                    pbase, _ = self.base_type(p, inner)
                    pinfo = self.declarator(self.child(p, "declarator"))
                    if pinfo.name is not None:
                        self.declare(self.text(pinfo.name), "parameter", pbase + pinfo.suffix, pinfo.name, inner)
        body = self.child(node, "body")
        if body is not None:
            self.visit_children(body, inner)

    # ---- expressions ---------------------------------------------------
    def visit_identifier(self, node: SyntaxNode, scope: int) -> None:
        role = "value"
        parent = self.tree[node.parent] if node.parent is not None else None
        if parent is not None and parent.kind == "call_expression" and node.field == "function":
            role = "callee"
        name = self.text(node)
        sym = self.table.lookup(name, scope)
        if sym is None:
            self.pending.append((node.id, scope, role))
            return
        self.use(sym, node)
        if role == "value" and sym.kind in FUNCTION_KINDS:
            sym.address_taken = True

    def visit_field_expression(self, node: SyntaxNode, scope: int) -> None:
        arg = self.child(node, "argument")
        fld = self.child(node, "field")
        if arg is not None:
            self.visit(arg, scope)
        if fld is None or fld.kind != "field_identifier":
            if fld is not None:
                self.visit(fld, scope)
            return
        record = self.record_of_expr(arg, scope) if arg is not None else None
        member = self.table.member(record, self.text(fld)) if record is not None else None
        if member is None:
            candidates = [s for s in self.table.symbols
                          if s.name == self.text(fld) and s.kind in ("member_variable", "member_function")]
            if len(candidates) == 1:
                member = candidates[0]
        if member is not None:
            self.use(member, fld)
            parent = self.tree[node.parent] if node.parent is not None else None
            if member.kind == "member_function" and not (parent is not None and parent.kind == "call_expression"
                                                         and node.field == "function"):
                member.address_taken = True
        else:
            self.table.unresolved.add(fld.id)

    def record_of_expr(self, expr: SyntaxNode | None, scope: int) -> Symbol | None:
        t = self.type_of_expr(expr, scope)
        return self.table.record_for_type(t) if t else None

    def type_of_expr(self, expr: SyntaxNode | None, scope: int) -> str | None:
        if expr is None:
            return None
        k = expr.kind
        if k == "this":
            cs = self.table.class_scope(scope)
            rec = self.table._record_of_scope(cs) if cs is not None else None
            return rec.type_text + "*" if rec is not None else None
        if k == "identifier":
            sym = self.table.binding.get(expr.id) or self.table.lookup(self.text(expr), scope)
            return sym.type_text if sym is not None else None
        if k == "field_expression":
            fld = self.child(expr, "field")
            sym = self.table.binding.get(fld.id) if fld is not None else None
            return sym.type_text if sym is not None else None
        if k in ("parenthesized_expression", "pointer_expression"):
            inner = self.child(expr, "argument") or (self.named(expr)[0] if self.named(expr) else None)
            return self.type_of_expr(inner, scope)
        if k == "subscript_expression":
            return self.type_of_expr(self.child(expr, "argument"), scope)
        if k == "call_expression":
            fn = self.child(expr, "function")
            sym = self.table.binding.get(fn.id) if fn is not None else None
            if fn is not None and fn.kind == "field_expression":
                fld = self.child(fn, "field")
                sym = self.table.binding.get(fld.id) if fld is not None else None
            return sym.type_text if sym is not None else None
        return None

    def visit_qualified_identifier(self, node: SyntaxNode, scope: int) -> None:
        owner = scope
        cur: SyntaxNode | None = node
        ok = True
        while cur is not None and cur.kind == "qualified_identifier":
            sn = self.child(cur, "scope")
            if sn is not None:
                target = self.resolve_scope_name(self.text(sn), owner) if ok else None
                if target is None:
                    ok = False
                    self.table.unresolved.add(sn.id)
                else:
                    self._bind_scope_ident(sn, owner)
                    owner = target
            cur = self.child(cur, "name")
        if cur is None:
            return
        if not ok or cur.kind not in IDENTIFIER_KINDS:
            if cur.kind in IDENTIFIER_KINDS:
                self.table.unresolved.add(cur.id)
            else:
                self.visit(cur, scope)
            return
        sym = self.table.scopes[owner].symbols.get(self.text(cur)) or self.table.scopes[owner].tags.get(self.text(cur))
        if sym is None and self.table.scopes[owner].kind == "class":
            sym = self.table.member(self.table._record_of_scope(owner), self.text(cur))
        if sym is not None:
            self.use(sym, cur)
            parent = self.tree[node.parent] if node.parent is not None else None
            if sym.kind in FUNCTION_KINDS and not (parent is not None and parent.kind == "call_expression"
                                                   and node.field == "function"):
                sym.address_taken = True
        else:
            self.pending.append((cur.id, owner, "qualified"))

    def visit_template_function(self, node: SyntaxNode, scope: int) -> None:
        name = self.child(node, "name")
        if name is not None:
            self.visit(name, scope)

    def visit_sizeof_expression(self, node: SyntaxNode, scope: int) -> None:
        for c in self.named(node):
            if c.kind == "type_descriptor":
                self.visit_type(self.child(c, "type"), scope)
            else:
                self.visit(c, scope)

    def visit_type_descriptor(self, node: SyntaxNode, scope: int) -> None:
        self.visit_type(self.child(node, "type"), scope)

    def visit_new_expression(self, node: SyntaxNode, scope: int) -> None:
        self.visit_type(self.child(node, "type"), scope)
        for c in self.named(node):
            if c.field != "type":
                self.visit(c, scope)

    def visit_statement_identifier(self, node: SyntaxNode, scope: int) -> None:
        sym = self.table.lookup_label(self.text(node), scope)
        if sym is not None:
            self.use(sym, node)

    def resolve_pending(self) -> None:
        reported: set[str] = set()
        for nid, scope, role in self.pending:
            node = self.tree[nid]
            name = self.text(node)
            sym = self.table.lookup(name, scope) if role != "qualified" else \
                self.table.scopes[scope].symbols.get(name)
            if sym is not None:
                self.use(sym, node)
                if role == "value" and sym.kind in FUNCTION_KINDS:
                    sym.address_taken = True
                continue
            ext = self.table.externals.get(name)
            if ext is None:
                kind = "function" if role == "callee" else "variable"
                ext = Symbol(len(self.table.symbols), name, kind, EXTERNAL, None, 0)
                self.table.symbols.append(ext)
                self.table.externals[name] = ext
            elif role == "callee" and ext.kind != "function":
                ext.kind = "function"
            ext.use_nodes.append(nid)
            self.table.binding[nid] = ext
            if name not in reported:
                reported.add(name)
                path, line, _ = self.tree.origin(nid)
                self.table.diagnostics.append(Diagnostic(
                    Category.Other, path, line, f"unresolved identifier {name!r} treated as external"))


def build_symbol_table(tree: SyntaxTree) -> SymbolTable:
    """Bind every declaration and identifier use in ``tree``."""
    return _Binder(tree).run()
