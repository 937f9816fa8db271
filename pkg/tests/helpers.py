"""Shared fixtures-by-function for the test modules."""

from __future__ import annotations

from pathlib import Path

from mvgraph.cfg import CfgFunction, find_function
from mvgraph.diagnostics import View
from mvgraph.graph import CodeGraph
from mvgraph.multiview import ProgramViews, analyze
from mvgraph.preprocessor import expand_macros, preprocess, unit_from_text

CORPUS = Path(__file__).parent / "corpus"
ALGORITHMS = CORPUS / "algorithms"
UNSUPPORTED = CORPUS / "unsupported"
ALL = (View.AST, View.CFG, View.DFG)


def lang_of(path: Path) -> str:
    return "cpp" if path.suffix in (".cpp", ".cc", ".hpp") else "c"


def views_of(code: str, lang: str = "c", views=ALL) -> ProgramViews:
    path = "input.cpp" if lang == "cpp" else "input.c"
    return analyze(expand_macros(unit_from_text(code, lang, path)), views)


def views_of_file(path: Path, views=ALL) -> ProgramViews:
    return analyze(preprocess(path, lang_of(path)), views)


def cfg_of(code: str, lang: str = "c") -> CodeGraph:
    return views_of(code, lang, (View.CFG,)).graphs[View.CFG]


def function(g: CodeGraph, name: str) -> CfgFunction:
    return find_function(g, name)


def stmt(g: CodeGraph, fn: CfgFunction, text: str) -> int:
    """The unique statement node of ``fn`` whose label starts with ``text``."""
    hits = [n for n in fn.statement_nodes if g.nodes[n].label.startswith(text)]
    assert len(hits) == 1, (text, [g.nodes[n].label for n in fn.statement_nodes])
    return hits[0]


def labels_from(g: CodeGraph, src: int) -> list[str]:
    return sorted(e.label for e in g.successors(src, View.CFG))


def occurrences(g: CodeGraph, name: str, line: int | None = None) -> list[int]:
    return sorted(n.id for n in g.nodes.values()
                  if n.label == name and (line is None or n.line_start == line))
