from __future__ import annotations

import json
import os
import re
import stat
from pathlib import Path

import pydot
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvgraph.diagnostics import RenderFailed, RendererMissing, View
from mvgraph.exporter import BUILTIN, dot_escape, from_json, node_label, render_png, to_dict, to_dot, to_json
from mvgraph.graph import CodeGraph, GraphNode
from mvgraph.multiview import combine

from helpers import CORPUS, views_of_file

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _node(i: int, label: str = "x", views=(View.AST,)) -> GraphNode:
    return GraphNode(i, "identifier", label, "a.c", 1, 0, 1, 1, set(views))


def test_empty_graph_json():
    doc = json.loads(to_json(CodeGraph(meta={"project": "p", "lang": "c"})))
    assert doc == {"schema_version": 1, "project": "p", "lang": "c", "views": [], "nodes": [], "edges": []}


def test_json_is_canonical():
    g = CodeGraph(meta={"project": "p", "lang": "c"})
    for i in (5, 1, 3):
        g.add_node(_node(i, views=(View.CFG, View.AST)))
    g.add_edge(5, 1, View.CFG, "true")
    g.add_edge(1, 3, View.AST, "child")
    g.add_edge(3, 5, View.CFG, "false")
    doc = to_dict(g)
    assert [n["id"] for n in doc["nodes"]] == [1, 3, 5]
    assert doc["nodes"][0]["views"] == ["AST", "CFG"]
    assert [(e["view"], e["src"]) for e in doc["edges"]] == [("AST", 1), ("CFG", 3), ("CFG", 5)]
    assert to_json(g).endswith(b"\n")
    assert b"." not in to_json(g).replace(b"a.c", b"")


def test_factorial_nodes_carry_original_lines():
    pv = views_of_file(CORPUS / "factorial.cpp", (View.CFG,))
    doc = json.loads(to_json(pv.graphs[View.CFG]))
    lines = {n["label"]: n["line_start"] for n in doc["nodes"]}
    assert lines["result *= i;"] == 9
    assert lines["int num = 5;"] == 15
    assert all(n["file"] == "factorial.cpp" for n in doc["nodes"])


_labels = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=30)


@st.composite
def graphs(draw):
    g = CodeGraph(draw(st.sets(st.sampled_from(list(View)))), {"project": draw(_labels), "lang": "c"})
    ids = draw(st.lists(st.integers(0, 3_000_000_001), min_size=0, max_size=8, unique=True))
    for i in ids:
        views = draw(st.sets(st.sampled_from(list(View)), min_size=1))
        g.add_node(GraphNode(i, draw(st.sampled_from(["identifier", "if_statement", "function_entry"])),
                             draw(_labels), draw(_labels), draw(st.integers(0, 500)), draw(st.integers(0, 80)),
                             draw(st.integers(0, 500)), draw(st.integers(0, 80)), views))
    if ids:
        for _ in range(draw(st.integers(0, 10))):
            g.add_edge(draw(st.sampled_from(ids)), draw(st.sampled_from(ids)),
                       draw(st.sampled_from(list(View))), draw(_labels))
    return g


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_json_round_trip(g):
    back = from_json(to_json(g))
    assert back == g
    assert to_json(back) == to_json(g)


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_dot_is_always_parseable(g):
    parsed = pydot.graph_from_dot_data(to_dot(g))
    assert parsed and len(parsed) == 1
    assert len(parsed[0].get_edges()) == len(g.edges)


@settings(max_examples=300, deadline=None)
@given(_labels)
def test_escaped_label_survives_dot_parse(text):
    dot = f'digraph g {{ "1" [label="{dot_escape(text)}"]; }}'
    (parsed,) = pydot.graph_from_dot_data(dot)
    raw = parsed.get_nodes()[0].get_label()
    assert raw == f'"{dot_escape(text)}"'


def test_namespace_and_template_label():
    g = CodeGraph(meta={"project": "std::vector<int>", "lang": "cpp"})
    g.add_node(_node(1, 'std::vector<int> v = {"a\\b"};'))
    dot = to_dot(g)
    (parsed,) = pydot.graph_from_dot_data(dot)
    assert 'std::vector<int>' in parsed.get_nodes()[-1].get_label()


_QUOTED = r'"(?:[^"\\\n]|\\.)*"'
_NODE_LINE = re.compile(rf"^  {_QUOTED} \[label={_QUOTED}\];$")
_EDGE_LINE = re.compile(rf"^  {_QUOTED} -> {_QUOTED} \[color=\w+(, label={_QUOTED}, fontcolor=\w+)?\];$")


def test_every_corpus_label_escapes_cleanly():
    for path in sorted(CORPUS.rglob("*.c*")):
        dot = to_dot(combine(views_of_file(path), View))
        body = dot.splitlines()[2:-1]
        assert all(_NODE_LINE.match(line) or _EDGE_LINE.match(line) for line in body), path.name
        if path.stat().st_size < 400:
            (parsed,) = pydot.graph_from_dot_data(dot)
            assert len(parsed.get_edges()) == dot.count(" -> ")


def test_single_node_dot():
    g = CodeGraph(meta={"project": "one", "lang": "c"})
    g.add_node(_node(7, "x"))
    assert to_dot(g).splitlines()[2] == '  "7" [label="L1: x"];'
    assert "->" not in to_dot(g)


def test_label_truncated_to_sixty():
    label = node_label(_node(1, "y" * 100))
    assert len(label) == 60 and label.endswith("...")


def test_combined_dot_colors():
    pv = views_of_file(CORPUS / "bubble_sort.c")
    dot = to_dot(combine(pv, [View.CFG, View.DFG]))
    assert "color=red" in dot and "color=blue" in dot and "color=black" not in dot
    assert 'label="true"' in dot and 'label="loop_update"' in dot
    ast = to_dot(combine(pv, [View.AST]))
    assert "color=black" in ast and "label=\"child\"" not in ast


def test_dot_is_deterministic():
    pv = views_of_file(CORPUS / "member_flow.cpp")
    assert to_dot(combine(pv, View)) == to_dot(combine(views_of_file(CORPUS / "member_flow.cpp"), View))


def _fake_renderer(tmp_path: Path, body: str) -> str:
    exe = tmp_path / "fakedot"
    exe.write_text("#!/bin/sh\n" + body)
    exe.chmod(exe.stat().st_mode | stat.S_IEXEC)
    return str(exe)


def test_external_renderer_success(tmp_path):
    # writes its input next to the requested output so arguments can be checked
    exe = _fake_renderer(tmp_path, 'test "$1" = -Tpng || exit 9\ntest "$2" = -o || exit 9\ncp "$4" "$3"\n')
    out = render_png("digraph g { a -> b; }\n", tmp_path / "g.png", exe)
    assert out.read_text() == "digraph g { a -> b; }\n"


def test_external_renderer_failure_is_relayed(tmp_path):
    exe = _fake_renderer(tmp_path, 'echo "syntax error in line 1" >&2\nexit 3\n')
    with pytest.raises(RenderFailed, match="syntax error in line 1"):
        render_png("digraph {", tmp_path / "g.png", exe)


def test_missing_renderer(tmp_path, monkeypatch):
    monkeypatch.setenv("PATH", str(tmp_path))
    with pytest.raises(RendererMissing):
        render_png("digraph g {}", tmp_path / "g.png", "dot")


def test_builtin_renderer_writes_png(tmp_path):
    pv = views_of_file(CORPUS / "factorial.cpp", (View.CFG,))
    out = render_png(to_dot(pv.graphs[View.CFG]), tmp_path / "f.png", BUILTIN)
    data = out.read_bytes()
    assert data.startswith(PNG_MAGIC) and len(data) > 1000


@pytest.mark.parametrize("dot", ['digraph { "a" -> ', 'digraph { "unterminated }', "not a graph at all {"])
def test_builtin_renderer_rejects_malformed_dot(tmp_path, dot):
    with pytest.raises(RenderFailed):
        render_png(dot, tmp_path / "bad.png", BUILTIN)
    assert not (tmp_path / "bad.png").exists()


def test_renderers_exit_status_reaches_caller(tmp_path):
    exe = _fake_renderer(tmp_path, "exit 0\n")
    render_png("digraph g {}", tmp_path / "x.png", exe)
    assert not os.path.exists(tmp_path / "x.png")
