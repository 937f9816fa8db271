"""Command-line entry point."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from pathlib import Path

from . import exporter
from .cfg import enumerate_paths
from .diagnostics import (AnalysisError, BadArguments, Category, Diagnostic, RenderFailed, RendererMissing,
                          UnknownVariable, View)
from .multiview import ALL, analyze, combine
from .preprocessor import Lang, consolidate_project, expand_macros, load_file

log = logging.getLogger("mvgraph")

EXIT_OK, EXIT_PARTIAL, EXIT_FAILED = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit; surface it instead
        raise BadArguments(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mvgraph", description="Extract aligned AST/CFG/DFG graphs from C and C++ code.")
    p.add_argument("--lang", required=True, help="c or cpp")
    src = p.add_argument_group("input")
    src.add_argument("--code-file", type=Path, help="single source file")
    src.add_argument("--code-folder", type=Path, help="project directory, consolidated into one unit")
    p.add_argument("--combined-name", help="output base name for --code-folder")
    p.add_argument("--graphs", default="cfg", help="comma-separated subset of ast,cfg,dfg")
    p.add_argument("--output", default="all", choices=["json", "dot", "png", "all"])
    p.add_argument("--collapse", help="'all' or comma-separated variable names")
    p.add_argument("--blacklist", default="", help="comma-separated node kinds to drop")
    p.add_argument("--paths", metavar="FN", help="also write entry-to-exit paths of FN")
    p.add_argument("--max-loop-iters", type=int, default=1)
    p.add_argument("--max-recursion-depth", type=int, default=1)
    p.add_argument("--max-paths", type=int, default=10_000)
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.add_argument("--renderer", default="auto", help="'auto', 'builtin' or a DOT executable (default: auto)")
    p.add_argument("--no-prune", action="store_true", help="keep every CST token in the AST view")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _views(text: str) -> list[View]:
    parts = [t for t in text.split(",") if t.strip()]
    if not parts:
        raise BadArguments("--graphs needs at least one of ast, cfg, dfg")
    try:
        return sorted({View.parse(t) for t in parts}, key=lambda v: v.value)
    except ValueError as exc:
        raise BadArguments(str(exc)) from None


def _parse_args(argv: list[str] | None) -> argparse.Namespace:
    args = build_parser().parse_args(argv)
    if args.code_file and args.code_folder:
        raise BadArguments("--code-file and --code-folder are mutually exclusive")
    if not args.code_file and not args.code_folder:
        raise BadArguments("one of --code-file or --code-folder is required")
    if args.code_folder and not args.combined_name:
        raise BadArguments("--combined-name is required with --code-folder")
    try:
        args.lang = Lang.parse(args.lang)
    except ValueError as exc:
        raise BadArguments(str(exc)) from None
    args.views = _views(args.graphs)
    if args.max_loop_iters < 0 or args.max_recursion_depth < 0 or args.max_paths < 1:
        raise BadArguments("path bounds must be non-negative")
    return args


def summary_table(diagnostics: list[Diagnostic]) -> str:
    counts = Counter(d.category for d in diagnostics)
    fatal = Counter(d.category for d in diagnostics if d.fatal_for)
    rows = [f"{'category':<26}{'count':>7}{'fatal':>7}"]
    for cat in Category:
        if counts[cat]:
            rows.append(f"{cat.value:<26}{counts[cat]:>7}{fatal[cat]:>7}")
    rows.append(f"{'total':<26}{sum(counts.values()):>7}{sum(fatal.values()):>7}")
    return "\n".join(rows)


def run(argv: list[str] | None = None) -> int:
    try:
        args = _parse_args(argv)
    except BadArguments as exc:
        print(f"mvgraph: error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    diagnostics: list[Diagnostic] = []
    try:
        if args.code_folder:
            unit = consolidate_project(args.code_folder, args.lang)
            name = args.combined_name
        else:
            unit = load_file(args.code_file, args.lang)
            name = args.code_file.stem
        unit = expand_macros(unit)
        pv = analyze(unit, args.views, full_cst=args.no_prune)
    except AnalysisError as exc:
        print(f"mvgraph: error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    diagnostics.extend(pv.diagnostics)
    if not pv.tree.file_paths:
        print(summary_table(diagnostics), file=sys.stderr)
        print("mvgraph: error: no file could be parsed", file=sys.stderr)
        return EXIT_FAILED

    collapse = None
    if args.collapse:
        collapse = ALL if args.collapse.strip().lower() == ALL else [c.strip() for c in args.collapse.split(",") if c.strip()]
    blacklist = [b.strip() for b in args.blacklist.split(",") if b.strip()]
    try:
        graph = combine(pv, args.views, collapse=collapse, blacklist=blacklist,
                        full_cst=args.no_prune, diagnostics=diagnostics)
    except UnknownVariable as exc:
        print(f"mvgraph: error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    graph.meta["project"] = name

    out_dir = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    partial = False
    dot_text = exporter.to_dot(graph)
    if args.output in ("json", "all"):
        (out_dir / f"{name}.json").write_bytes(exporter.to_json(graph))
    if args.output in ("dot", "all"):
        (out_dir / f"{name}.dot").write_text(dot_text, encoding="utf-8")
    if args.output in ("png", "all"):
        renderer = exporter.default_renderer() if args.renderer == "auto" else args.renderer
        try:
            exporter.render_png(dot_text, out_dir / f"{name}.png", renderer)
        except (RendererMissing, RenderFailed) as exc:
            print(f"mvgraph: {exc}", file=sys.stderr)
            partial = True

    if args.paths:
        if View.CFG not in pv.graphs:
            print("mvgraph: --paths needs the cfg view", file=sys.stderr)
            partial = True
        else:
            try:
                bundle = enumerate_paths(pv.graphs[View.CFG], args.paths, args.max_loop_iters,
                                         args.max_recursion_depth, args.max_paths)
            except KeyError as exc:
                print(f"mvgraph: {exc.args[0]}", file=sys.stderr)
                partial = True
            else:
                diagnostics.extend(bundle.diagnostics)
                text = json.dumps(bundle.to_dict(), indent=2) + "\n"
                (out_dir / f"{name}_paths.json").write_text(text, encoding="utf-8")

    print(summary_table(diagnostics), file=sys.stderr)
    for d in diagnostics:
        log.info("%s", d)
    if any(d.fatal_for & set(args.views) for d in diagnostics) or partial:
        return EXIT_PARTIAL
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
