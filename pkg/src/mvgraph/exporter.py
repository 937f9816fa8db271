"""JSON, DOT and PNG output for any CodeGraph."""

from __future__ import annotations

import json
import os
import shutil
import subprocess
import tempfile
from pathlib import Path

from .diagnostics import RenderFailed, RendererMissing, View
from .graph import CodeGraph, GraphEdge, GraphNode

SCHEMA_VERSION = 1
EDGE_COLORS = {View.AST: "black", View.CFG: "red", View.DFG: "blue"}
LABEL_LIMIT = 60
BUILTIN = "builtin"


def to_dict(g: CodeGraph) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "project": g.meta.get("project", ""),
        "lang": g.meta.get("lang", ""),
        "views": sorted(v.value for v in g.views),
        "nodes": [
            {
                "id": n.id, "kind": n.kind, "label": n.label, "file": n.file,
                "line_start": n.line_start, "col_start": n.col_start,
                "line_end": n.line_end, "col_end": n.col_end,
                "views": sorted(v.value for v in n.views),
            }
            for n in (g.nodes[i] for i in sorted(g.nodes))
        ],
        "edges": [
            {"src": e.src, "dst": e.dst, "view": e.view.value, "label": e.label}
            for e in g.sorted_edges()
        ],
    }


def to_json(g: CodeGraph) -> bytes:
    """Canonical UTF-8 JSON; identical graphs give identical bytes."""
    return (json.dumps(to_dict(g), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def from_json(data: bytes | str) -> CodeGraph:
    doc = json.loads(data)
    g = CodeGraph((View(v) for v in doc["views"]), {"project": doc["project"], "lang": doc["lang"]})
    for n in doc["nodes"]:
        g.add_node(GraphNode(n["id"], n["kind"], n["label"], n["file"], n["line_start"], n["col_start"],
                             n["line_end"], n["col_end"], {View(v) for v in n["views"]}))
    for e in doc["edges"]:
        g.add_edge(e["src"], e["dst"], View(e["view"]), e["label"])
    return g


def dot_escape(text: str) -> str:
    """Body of a double-quoted DOT string."""
    out = []
    for ch in text:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch in "\r\t\f\v":
            out.append(" ")
        else:
            out.append(ch)
    return "".join(out)


def node_label(n: GraphNode) -> str:
    text = f"L{n.line_start}: {n.label}"
    if len(text) > LABEL_LIMIT:
        text = text[:LABEL_LIMIT - 3] + "..."
    return text


def _edge_attrs(e: GraphEdge) -> str:
    attrs = [f"color={EDGE_COLORS[e.view]}"]
    if e.view is not View.AST and e.label:
        attrs.append(f'label="{dot_escape(e.label)}"')
        attrs.append(f"fontcolor={EDGE_COLORS[e.view]}")
    return ", ".join(attrs)


def to_dot(g: CodeGraph) -> str:
    name = dot_escape(g.meta.get("project", "") or "graph")
    lines = [f'digraph "{name}" {{', '  node [shape=box, fontname="monospace"];']
    for i in sorted(g.nodes):
        n = g.nodes[i]
        lines.append(f'  "{n.id}" [label="{dot_escape(node_label(n))}"];')
    for e in g.sorted_edges():
        lines.append(f'  "{e.src}" -> "{e.dst}" [{_edge_attrs(e)}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_png(dot_text: str, out_path: str | Path, renderer: str = "dot") -> Path:
    """Render DOT text to a PNG.

    ``renderer`` names an executable taking ``-Tpng -o <out> <in>`` (Graphviz
    ``dot`` by default) or ``"builtin"`` for the bundled matplotlib drawing.
    """
    out_path = Path(out_path)
    if renderer == BUILTIN:
        return _render_builtin(dot_text, out_path)
    exe = shutil.which(renderer)
    if exe is None:
        raise RendererMissing(
            f"renderer {renderer!r} not found on PATH; install Graphviz or use the builtin renderer")
    with tempfile.NamedTemporaryFile("w", suffix=".dot", delete=False, encoding="utf-8") as fh:
        fh.write(dot_text)
        src = fh.name
    try:
        proc = subprocess.run([exe, "-Tpng", "-o", str(out_path), src], capture_output=True, text=True)
    finally:
        os.unlink(src)
    if proc.returncode != 0:
        raise RenderFailed(f"{renderer} exited with {proc.returncode}: {proc.stderr.strip()}")
    return out_path


def default_renderer() -> str:
    return "dot" if shutil.which("dot") else BUILTIN


def _render_builtin(dot_text: str, out_path: Path) -> Path:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import networkx as nx
    import pydot

    try:
        parsed = pydot.graph_from_dot_data(dot_text)
    except Exception as exc:  # pydot surfaces pyparsing errors directly
        raise RenderFailed(f"malformed DOT: {exc}") from exc
    if not parsed:
        raise RenderFailed("malformed DOT: nothing parsed")
    dot = parsed[0]
    g = nx.DiGraph()
    labels: dict[str, str] = {}
    for n in dot.get_nodes():
        name = n.get_name().strip('"')
        if name in ("node", "edge", "graph"):
            continue
        g.add_node(name)
        labels[name] = (n.get_label() or name).strip('"').replace('\\"', '"').replace("\\\\", "\\")
    colors = []
    edge_labels: dict[tuple[str, str], str] = {}
    for e in dot.get_edges():
        s, d = e.get_source().strip('"'), e.get_destination().strip('"')
        g.add_edge(s, d)
        colors.append((s, d, (e.get("color") or "black").strip('"')))
        if e.get("label"):
            edge_labels[(s, d)] = e.get("label").strip('"')
    pos = nx.spring_layout(g, seed=0) if g.number_of_nodes() else {}
    size = max(6.0, min(40.0, 1.2 * g.number_of_nodes() ** 0.5 * 3))
    fig, ax = plt.subplots(figsize=(size, size))
    ax.set_axis_off()
    if g.number_of_nodes():
        nx.draw_networkx_nodes(g, pos, ax=ax, node_size=80, node_color="#dddddd")
        by_color: dict[str, list[tuple[str, str]]] = {}
        for s, d, c in colors:
            by_color.setdefault(c, []).append((s, d))
        for c in sorted(by_color):
            nx.draw_networkx_edges(g, pos, edgelist=by_color[c], edge_color=c, ax=ax, arrows=True)
        nx.draw_networkx_labels(g, pos, labels=labels, font_size=6, ax=ax)
        if edge_labels:
            nx.draw_networkx_edge_labels(g, pos, edge_labels=edge_labels, font_size=5, ax=ax)
    fig.savefig(out_path, format="png", dpi=100)
    plt.close(fig)
    return out_path
