"""Turn one file or a whole project directory into a single normalized unit.

The preprocessor is deliberately small: comments and blank lines go, quoted
local headers are inlined once, object-like macros are substituted, and the
first branch of every conditional block is kept. Every surviving line keeps a
pointer back to the file and line it came from.
"""

from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple

from .diagnostics import Category, CyclicInclude, Diagnostic, EmptyProject, UnterminatedComment, View

log = logging.getLogger(__name__)


class Lang(str, enum.Enum):
    C = "c"
    CPP = "cpp"

    @classmethod
    def parse(cls, text: str) -> "Lang":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown language {text!r}; expected c or cpp") from None


EXTENSIONS = {
    Lang.C: (".c", ".h"),
    Lang.CPP: (".cpp", ".cc", ".cxx", ".hpp", ".hh", ".hxx", ".h"),
}

_INCLUDE_RE = re.compile(r'^\s*#\s*include\s*(?:"([^"]+)"|<([^>]+)>)')
_DIRECTIVE_RE = re.compile(r"^\s*#\s*([A-Za-z_]\w*)?(.*)$")
_DEFINE_RE = re.compile(r"^([A-Za-z_]\w*)(\()?(.*)$", re.S)
_TOKEN_RE = re.compile(r'"(?:\\.|[^"\\])*"|\'(?:\\.|[^\'\\])*\'|[A-Za-z_]\w*')


@dataclass
class SourceFile:
    path: str
    text: str
    # line_map[i] is the (original file, original 1-based line) of normalized line i + 1
    line_map: list[tuple[str, int]]

    @property
    def lines(self) -> list[str]:
        return self.text.split("\n") if self.text else []

    def origin(self, line: int) -> tuple[str, int]:
        if not self.line_map:
            return (self.path, line)
        line = min(max(line, 1), len(self.line_map))
        return self.line_map[line - 1]


@dataclass
class SourceUnit:
    files: list[SourceFile]
    lang: Lang
    macro_table: dict[str, str] = field(default_factory=dict)
    external_includes: list[str] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    name: str = ""

    @property
    def text(self) -> str:
        return "\n".join(f.text for f in self.files if f.text)


class Stripped(NamedTuple):
    text: str
    line_map: list[int]


def _raw_prefix_ok(text: str, i: int) -> bool:
    if i == 0:
        return True
    prev = text[i - 1]
    return prev in "uUL8" or not (prev.isalnum() or prev == "_")


def strip_non_semantic(text: str) -> Stripped:
    """Remove comments and blank lines.

    Comment characters are overwritten with spaces rather than deleted, so a
    surviving line keeps the column layout of its original. Trailing
    whitespace is dropped. ``line_map[i]`` is the original line number of
    output line ``i + 1``.
    """
    out: list[str] = []
    i, n = 0, len(text)
    line = 1
    comment_start = 0
    state = "code"
    raw_end = ""
    while i < n:
        c = text[i]
        if state == "code":
            if c == "/" and i + 1 < n and text[i + 1] == "/":
                state = "line_comment"
                out.append("  ")
                i += 2
                continue
            if c == "/" and i + 1 < n and text[i + 1] == "*":
                state = "block_comment"
                comment_start = line
                out.append("  ")
                i += 2
                continue
            if c == "R" and text.startswith('R"', i) and _raw_prefix_ok(text, i):
                close = text.find("(", i + 2)
                if close != -1 and close - i - 2 <= 16:
                    raw_end = ")" + text[i + 2:close] + '"'
                    state = "raw_string"
                    out.append(text[i:close + 1])
                    line += text.count("\n", i, close + 1)
                    i = close + 1
                    continue
            if c == '"':
                state = "string"
            elif c == "'":
                state = "char"
            elif c == "\n":
                line += 1
            out.append(c)
            i += 1
        elif state == "line_comment":
            if c == "\\" and text.startswith("\n", i + 1):
                # a spliced line continues the comment
                out.append(" \n")
                line += 1
                i += 2
                continue
            if c == "\n":
                state = "code"
                line += 1
                out.append(c)
            else:
                out.append(" ")
            i += 1
        elif state == "block_comment":
            if c == "*" and i + 1 < n and text[i + 1] == "/":
                state = "code"
                out.append("  ")
                i += 2
                continue
            if c == "\n":
                line += 1
                out.append(c)
            else:
                out.append(" ")
            i += 1
        elif state in ("string", "char"):
            quote = '"' if state == "string" else "'"
            if c == "\\" and i + 1 < n:
                out.append(text[i:i + 2])
                if text[i + 1] == "\n":
                    line += 1
                i += 2
                continue
            if c == quote or c == "\n":
                # an unterminated literal ends at the line break, as compilers recover
                state = "code"
                if c == "\n":
                    line += 1
            out.append(c)
            i += 1
        else:  # raw_string
            if text.startswith(raw_end, i):
                out.append(raw_end)
                i += len(raw_end)
                state = "code"
                continue
            if c == "\n":
                line += 1
            out.append(c)
            i += 1
    if state == "block_comment":
        raise UnterminatedComment(comment_start)

    kept: list[str] = []
    line_map: list[int] = []
    for lineno, raw in enumerate("".join(out).split("\n"), start=1):
        raw = raw.rstrip()
        if raw.strip():
            kept.append(raw)
            line_map.append(lineno)
    return Stripped("\n".join(kept), line_map)


def _read_text(path: Path, rel: str, diagnostics: list[Diagnostic]) -> str:
    data = path.read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = data[: exc.start].count(b"\n") + 1
        diagnostics.append(Diagnostic(Category.Other, rel, line, "invalid UTF-8 bytes replaced"))
        return data.decode("utf-8", errors="replace")


class _Consolidator:
    def __init__(self, root: Path, lang: Lang):
        self.root = root
        self.lang = lang
        self.emitted: set[Path] = set()
        self.external: list[str] = []
        self.diagnostics: list[Diagnostic] = []

    def rel(self, path: Path) -> str:
        try:
            return path.relative_to(self.root).as_posix()
        except ValueError:
            return path.as_posix()

    def resolve(self, including: Path, name: str) -> Path | None:
        for base in (including.parent, self.root):
            candidate = (base / name).resolve()
            if candidate.is_file():
                try:
                    candidate.relative_to(self.root)
                except ValueError:
                    continue
                return candidate
        return None

    def expand(self, path: Path, stack: list[Path]) -> list[tuple[str, tuple[str, int]]]:
        self.emitted.add(path)
        rel = self.rel(path)
        try:
            stripped = strip_non_semantic(_read_text(path, rel, self.diagnostics))
        except UnterminatedComment as exc:
            raise UnterminatedComment(exc.line, rel) from None
        result: list[tuple[str, tuple[str, int]]] = []
        for text, orig in zip(stripped.text.split("\n") if stripped.text else [], stripped.line_map):
            m = _INCLUDE_RE.match(text)
            if not m:
                result.append((text, (rel, orig)))
                continue
            local, system = m.groups()
            if system:
                if system not in self.external:
                    self.external.append(system)
                continue
            target = self.resolve(path, local)
            if target is None:
                if local not in self.external:
                    self.external.append(local)
                continue
            chain = stack + [path]
            if target in chain:
                cycle = chain[chain.index(target):] + [target]
                raise CyclicInclude([self.rel(p) for p in cycle])
            if target in self.emitted:
                continue
            result.extend(self.expand(target, chain))
        return result

    def add_file(self, path: Path, files: list[SourceFile]) -> None:
        if path in self.emitted:
            return
        lines = self.expand(path, [])
        files.append(SourceFile(self.rel(path), "\n".join(t for t, _ in lines), [o for _, o in lines]))


def consolidate_project(root: str | Path, lang: Lang | str) -> SourceUnit:
    """Collect every file of ``lang`` under ``root`` into one unit.

    Files are visited in lexicographic order of their relative path; a quoted
    local header is inlined where it is first included and never again.
    """
    lang = Lang.parse(lang) if isinstance(lang, str) else lang
    root = Path(root).resolve()
    if not root.is_dir():
        raise EmptyProject(f"{root} is not a directory")
    exts = EXTENSIONS[lang]
    paths = sorted(
        (p for p in root.rglob("*") if p.is_file() and p.suffix.lower() in exts),
        key=lambda p: p.relative_to(root).as_posix(),
    )
    if not paths:
        raise EmptyProject(f"no {'/'.join(exts)} files under {root}")
    cons = _Consolidator(root, lang)
    files: list[SourceFile] = []
    for path in paths:
        cons.add_file(path.resolve(), files)
    return SourceUnit(files, lang, external_includes=cons.external, diagnostics=cons.diagnostics, name=root.name)


def load_file(path: str | Path, lang: Lang | str) -> SourceUnit:
    """Single-file variant of :func:`consolidate_project`."""
    lang = Lang.parse(lang) if isinstance(lang, str) else lang
    path = Path(path).resolve()
    if not path.is_file():
        raise EmptyProject(f"{path} does not exist")
    cons = _Consolidator(path.parent, lang)
    files: list[SourceFile] = []
    cons.add_file(path, files)
    return SourceUnit(files, lang, external_includes=cons.external, diagnostics=cons.diagnostics, name=path.stem)


def unit_from_text(text: str, lang: Lang | str = Lang.C, path: str = "input.c") -> SourceUnit:
    """Build a stripped unit from an in-memory string (no include resolution)."""
    lang = Lang.parse(lang) if isinstance(lang, str) else lang
    stripped = strip_non_semantic(text)
    src = SourceFile(path, stripped.text, [(path, ln) for ln in stripped.line_map])
    return SourceUnit([src], lang, name=Path(path).stem)


def _substitute(line: str, table: dict[str, str], func_macros: set[str]) -> tuple[str, list[str]]:
    flagged: list[str] = []

    def repl(m: re.Match) -> str:
        tok = m.group(0)
        if tok[0] in "\"'":
            return tok
        if tok in table:
            return table[tok]
        if tok in func_macros:
            rest = line[m.end():].lstrip()
            if rest.startswith("("):
                flagged.append(tok)
        return tok

    return _TOKEN_RE.sub(repl, line), flagged


def expand_macros(unit: SourceUnit) -> SourceUnit:
    """Apply object-like macros and strip every preprocessor directive.

    Function-like macros stay in the text (their uses parse as calls) and
    each use is reported. Of every ``#if``/``#ifdef``/``#ifndef`` block only
    the first branch survives.
    """
    table = dict(unit.macro_table)
    func_macros: set[str] = set()
    diagnostics = list(unit.diagnostics)
    # one frame per open conditional: [parent_active, in_first_branch]
    cond: list[list[bool]] = []
    new_files: list[SourceFile] = []

    def active() -> bool:
        return all(p and first for p, first in cond)

    for src in unit.files:
        lines = src.lines
        out_text: list[str] = []
        out_map: list[tuple[str, int]] = []
        i = 0
        while i < len(lines):
            text, origin = lines[i], src.line_map[i]
            i += 1
            d = _DIRECTIVE_RE.match(text)
            if not d:
                if not active():
                    continue
                new, flagged = _substitute(text, table, func_macros)
                for name in flagged:
                    diagnostics.append(Diagnostic(
                        Category.UnsupportedMacro, origin[0], origin[1],
                        f"function-like macro {name} left unexpanded"))
                if new.strip():
                    out_text.append(new)
                    out_map.append(origin)
                continue
            body = d.group(2)
            while body.endswith("\\") and i < len(lines):
                body = body[:-1] + " " + lines[i].strip()
                i += 1
            name = d.group(1) or ""
            if name in ("if", "ifdef", "ifndef"):
                cond.append([active(), True])
            elif name in ("elif", "else"):
                if cond:
                    if cond[-1][0] and cond[-1][1]:
                        diagnostics.append(Diagnostic(
                            Category.DroppedConditionalBranch, origin[0], origin[1],
                            f"#{name} branch dropped; first branch kept"))
                    cond[-1][1] = False
            elif name == "endif":
                if cond:
                    cond.pop()
            elif not active():
                continue
            elif name == "define":
                m = _DEFINE_RE.match(body.strip())
                if m:
                    macro, paren, value = m.groups()
                    if paren:
                        func_macros.add(macro)
                        table.pop(macro, None)
                    else:
                        table[macro] = _substitute(value.strip(), table, set())[0]
                        func_macros.discard(macro)
            elif name == "undef":
                table.pop(body.strip(), None)
                func_macros.discard(body.strip())
            elif name == "pragma" and body.split()[:1] == ["omp"]:
                diagnostics.append(Diagnostic(
                    Category.Multithreading, origin[0], origin[1], "OpenMP pragma",
                    frozenset({View.CFG, View.DFG})))
        new_files.append(SourceFile(src.path, "\n".join(out_text), out_map))
    return replace(unit, files=new_files, macro_table=table, diagnostics=diagnostics)


def preprocess(source: str | Path, lang: Lang | str) -> SourceUnit:
    """File or directory in, fully normalized unit out."""
    source = Path(source)
    unit = consolidate_project(source, lang) if source.is_dir() else load_file(source, lang)
    return expand_macros(unit)
