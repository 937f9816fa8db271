from __future__ import annotations

import json
import subprocess
import sys

import pytest

from mvgraph.cli import run

from helpers import CORPUS, UNSUPPORTED


def _run(tmp_path, *args, renderer="builtin"):
    return run([*args, "--out-dir", str(tmp_path), "--renderer", renderer])


def test_factorial_command(tmp_path):
    code = _run(tmp_path, "--lang", "cpp", "--code-file", str(CORPUS / "factorial.cpp"),
                "--graphs", "cfg", "--output", "all")
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["factorial.dot", "factorial.json", "factorial.png"]


def test_bubble_sort_combined_command(tmp_path):
    code = _run(tmp_path, "--lang", "c", "--code-file", str(CORPUS / "bubble_sort.c"),
                "--graphs", "cfg,dfg", "--output", "all")
    assert code == 0
    doc = json.loads((tmp_path / "bubble_sort.json").read_text())
    assert doc["views"] == ["CFG", "DFG"]
    assert {e["view"] for e in doc["edges"]} == {"CFG", "DFG"}


def test_project_command(tmp_path):
    code = _run(tmp_path, "--lang", "c", "--code-folder", str(CORPUS / "math_project"),
                "--combined-name", "math_analysis", "--graphs", "cfg", "--output", "all")
    assert code == 0
    doc = json.loads((tmp_path / "math_analysis.json").read_text())
    entries = sorted(n["label"] for n in doc["nodes"] if n["kind"] == "function_entry")
    assert entries == ["ENTRY:add", "ENTRY:factorial", "ENTRY:main", "ENTRY:multiply"]
    assert {n["file"] for n in doc["nodes"]} == {"main.c", "math_utils.c"}


@pytest.mark.parametrize("output,files", [("json", ["f.json"]), ("dot", ["f.dot"]), ("png", ["f.png"])])
def test_single_output_kinds(tmp_path, output, files):
    src = tmp_path / "src"
    src.mkdir()
    (src / "f.c").write_text("int main(void) { return 0; }\n")
    out = tmp_path / "out"
    assert run(["--lang", "c", "--code-file", str(src / "f.c"), "--output", output, "--out-dir", str(out),
                "--renderer", "builtin"]) == 0
    assert sorted(p.name for p in out.iterdir()) == files


@pytest.mark.parametrize("argv", [
    ["--lang", "c", "--code-file", "x.c", "--graphs", "xyz"],
    ["--lang", "rust", "--code-file", "x.c"],
    ["--lang", "c"],
    ["--lang", "c", "--code-file", "x.c", "--code-folder", "."],
    ["--lang", "c", "--code-folder", "."],
    ["--lang", "c", "--code-file", "x.c", "--output", "svg"],
    ["--lang", "c", "--code-file", "x.c", "--graphs", ","],
    ["--lang", "c", "--code-file", "x.c", "--max-loop-iters", "-1"],
    ["--code-file", "x.c"],
])
def test_bad_arguments_exit_two(argv, capsys):
    assert run(argv) == 2
    assert "error" in capsys.readouterr().err


def test_missing_input_exits_two(tmp_path):
    assert _run(tmp_path, "--lang", "c", "--code-file", str(tmp_path / "none.c")) == 2
    assert _run(tmp_path, "--lang", "c", "--code-folder", str(tmp_path), "--combined-name", "x") == 2


def test_unparseable_project_exits_two(tmp_path):
    src = tmp_path / "src"
    src.mkdir()
    (src / "bad.c").write_text("}}}} ((( ;;; ]]]\n")
    assert _run(tmp_path, "--lang", "c", "--code-folder", str(src), "--combined-name", "bad") == 2


def test_fatal_diagnostic_gives_partial(tmp_path, capsys):
    code = _run(tmp_path, "--lang", "c", "--code-file", str(UNSUPPORTED / "pthreads.c"), "--output", "json")
    assert code == 1
    err = capsys.readouterr().err
    assert "Multithreading" in err and "total" in err
    assert (tmp_path / "pthreads.json").exists()


def test_fatality_depends_on_requested_views(tmp_path):
    args = ["--lang", "c", "--code-file", str(UNSUPPORTED / "pointer_arith.c"), "--output", "json"]
    assert _run(tmp_path, *args, "--graphs", "cfg") == 0
    assert _run(tmp_path, *args, "--graphs", "dfg") == 1


def test_missing_renderer_keeps_text_outputs(tmp_path, capsys):
    code = _run(tmp_path, "--lang", "cpp", "--code-file", str(CORPUS / "factorial.cpp"),
                renderer="no-such-renderer-binary")
    assert code == 1
    assert (tmp_path / "factorial.json").exists() and (tmp_path / "factorial.dot").exists()
    assert not (tmp_path / "factorial.png").exists()
    assert "not found" in capsys.readouterr().err


def test_paths_output(tmp_path):
    code = _run(tmp_path, "--lang", "cpp", "--code-file", str(CORPUS / "factorial.cpp"), "--output", "json",
                "--paths", "factorial", "--max-loop-iters", "1")
    assert code == 0
    doc = json.loads((tmp_path / "factorial_paths.json").read_text())
    assert doc["bounds"] == {"loop_iterations_max": 1, "recursion_depth_max": 1}
    assert len(doc["paths"]) == 3


def test_paths_for_unknown_function(tmp_path):
    code = _run(tmp_path, "--lang", "cpp", "--code-file", str(CORPUS / "factorial.cpp"), "--output", "json",
                "--paths", "nope")
    assert code == 1


def test_collapse_and_blacklist_flags(tmp_path):
    base = ["--lang", "cpp", "--code-file", str(CORPUS / "factorial.cpp"), "--graphs", "ast", "--output", "json"]
    assert _run(tmp_path, *base) == 0
    plain = json.loads((tmp_path / "factorial.json").read_text())
    assert _run(tmp_path, *base, "--collapse", "result", "--blacklist", "parameter_list") == 0
    doc = json.loads((tmp_path / "factorial.json").read_text())
    assert len(doc["nodes"]) < len(plain["nodes"])
    assert [n for n in doc["nodes"] if n["label"] == "result" and n["id"] >= 10**9]
    assert _run(tmp_path, *base, "--collapse", "ghost") == 2


def test_reruns_are_byte_identical(tmp_path):
    outs = []
    for i in range(2):
        d = tmp_path / str(i)
        assert run(["--lang", "cpp", "--code-file", str(CORPUS / "member_flow.cpp"), "--graphs", "ast,cfg,dfg",
                    "--output", "json", "--out-dir", str(d)]) == 0
        outs.append((d / "member_flow.json").read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "mvgraph", "--lang", "c", "--code-file", str(CORPUS / "pointer_dispatch.c"),
                           "--output", "dot", "--out-dir", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "pointer_dispatch.dot").read_text().startswith('digraph "pointer_dispatch"')
