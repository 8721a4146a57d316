"""End-to-end command line behaviour, including the documented exit codes."""

import contextlib
import io
import json
import shutil
import subprocess
import sys

import pytest

from helpers import parse_dot

from setforge import GraphDocument, quine_atoms, serialize
from setforge.cli import main


def invoke(argv, stdin_text=""):
    """Run main() in-process with captured streams."""
    old_stdin = sys.stdin
    sys.stdin = io.StringIO(stdin_text)
    out, err = io.StringIO(), io.StringIO()
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = main(argv)
    finally:
        sys.stdin = old_stdin
    return code, out.getvalue(), err.getvalue()


def seed(kind, arg=None):
    argv = ["seed", kind] + ([arg] if arg is not None else [])
    code, out, _ = invoke(argv)
    assert code == 0
    return out


CHAIN_SPEC_JSON = {
    "atoms": [{"label": "a", "kind": "chain", "length": 2}],
    "naturals_up_to": 2,
    "tuples": [{"tag": 0, "components": ["a"]}],
    "code_style": "chain",
    "code_length": 2,
    "formulas": {"selfmember": "x in x"},
}


@pytest.fixture
def chain_spec_file(tmp_path):
    path = tmp_path / "chain.json"
    path.write_text(json.dumps(CHAIN_SPEC_JSON))
    return str(path)


# -- seeding -----------------------------------------------------------------


def test_seed_empty_golden():
    assert seed("empty") == '{"edges":[],"format_version":1,"nodes":[]}\n'


def test_seed_von_neumann():
    doc = json.loads(seed("vN", "3"))
    assert len(doc["nodes"]) == 4


def test_seed_quine_atom_count():
    doc = json.loads(seed("quine", "2"))
    assert len(doc["nodes"]) == 2
    assert len(doc["edges"]) == 2


def test_seed_spec_file(chain_spec_file):
    doc = json.loads(seed("spec", chain_spec_file))
    assert "depth" in doc and "ranks" in doc
    assert doc["formulas"] == {"selfmember": "x in x"}


def test_seed_spec_file_invalid(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"atoms": "nope"}')
    code, _, _ = invoke(["seed", "spec", str(bad)])
    assert code == 3


def test_seed_vn_needs_stage():
    code, _, _ = invoke(["seed", "vN"])
    assert code == 3


def test_seed_vn_stage_out_of_reach():
    code, _, _ = invoke(["seed", "vN", "9"])
    assert code == 4


def test_seed_vn_non_numeric_stage():
    code, _, _ = invoke(["seed", "vN", "three"])
    assert code == 4


# -- documented pipeline examples --------------------------------------------


def test_pipeline_witness_report_passes():
    doc = seed("empty")
    code, doc2, _ = invoke(["complete", "--levels", "4"], doc)
    assert code == 0
    code, out, _ = invoke(["check", "--witness-report"], doc2)
    assert code == 0, out


def test_pipeline_quine_fails_foundation():
    doc = seed("quine", "1")
    code, out, _ = invoke(["check", "--axiom", "foundation_minimal"], doc)
    assert code == 1
    assert "fails" in out  # counterexample goes to stdout


def test_pipeline_tower_hits_budget():
    doc = seed("vN", "3")
    code, _, err = invoke(["complete", "--levels", "3", "--budget", "1000000"], doc)
    assert code == 2
    assert "budget exceeded" in err


def test_budget_env_variable(monkeypatch):
    monkeypatch.setenv("SETFORGE_BUDGET", "1000000")
    doc = seed("vN", "3")
    code, _, err = invoke(["complete", "--levels", "3"], doc)
    assert code == 2
    monkeypatch.setenv("SETFORGE_BUDGET", "not-a-number")
    code, _, _ = invoke(["complete", "--levels", "1"], doc)
    assert code == 3


# -- check variants ----------------------------------------------------------


def test_axiom_porcelain_fields():
    doc = seed("quine", "1")
    node = json.loads(doc)["nodes"][0]["id"]
    code, out, _ = invoke(
        ["check", "--axiom", "foundation_minimal", "--porcelain"], doc
    )
    assert code == 1
    assert out == f"axiom\tfoundation_minimal\tfail\t{node}\n"


def test_axiom_pass_exit_zero():
    doc = seed("vN", "3")
    code, out, _ = invoke(["check", "--axiom", "extensionality"], doc)
    assert code == 0
    assert "holds" in out


def test_witness_report_porcelain_shape():
    doc = seed("empty")
    _, doc2, _ = invoke(["complete", "--levels", "3"], doc)
    code, out, _ = invoke(["check", "--witness-report", "--porcelain"], doc2)
    assert code == 0
    lines = out.splitlines()
    assert lines
    for line in lines:
        fields = line.split("\t")
        assert fields[0] == "witness"
        assert fields[1].isdigit()
        assert fields[3] in {"pass", "fail"}
        assert len(fields) == 5


def test_witness_report_needs_levels():
    doc = seed("vN", "2")
    code, _, err = invoke(["check", "--witness-report"], doc)
    assert code == 3
    assert "levels" in err


def test_dred_conditions_pass(chain_spec_file):
    doc = seed("spec", chain_spec_file)
    code, out, _ = invoke(["check", "--dred-conditions"], doc)
    assert code == 0
    assert "hold" in out
    code, out, _ = invoke(["check", "--dred-conditions", "--porcelain"], doc)
    assert out == "dred\tok\t\n"


def test_dred_conditions_need_annotations():
    code, _, err = invoke(["check", "--dred-conditions"], seed("vN", "2"))
    assert code == 3
    assert "depth" in err


def test_dred_completion_pipeline(chain_spec_file):
    doc = seed("spec", chain_spec_file)
    code, doc2, _ = invoke(["complete", "--levels", "1", "--dred"], doc)
    assert code == 0
    code, out, _ = invoke(["check", "--dred-conditions"], doc2)
    assert code == 0, out
    assert "levels" in json.loads(doc2)


def test_dred_completion_needs_annotations():
    code, _, err = invoke(["complete", "--levels", "1", "--dred"], seed("vN", "2"))
    assert code == 3
    assert "depth" in err


# -- formula commands --------------------------------------------------------


def test_eval_true_and_false():
    doc = seed("vN", "2")
    code, out, _ = invoke(["eval", "--formula", "exists x. all y. !(y in x)"], doc)
    assert (code, out) == (0, "true\n")
    code, out, _ = invoke(["eval", "--formula", "all x. x in x"], doc)
    assert (code, out) == (1, "false\n")


def test_eval_porcelain():
    doc = seed("vN", "2")
    code, out, _ = invoke(["eval", "--formula", "x = x", "--bind", "x=vN:0", "--porcelain"], doc)
    # binding uses whatever id the document carries; recover it first
    if code != 0:
        node = json.loads(doc)["nodes"][0]["id"]
        code, out, _ = invoke(
            ["eval", "--formula", "x = x", "--bind", f"x={node}", "--porcelain"], doc
        )
    assert code == 0
    assert out == "eval\ttrue\n"


def test_eval_binding_syntax():
    doc = seed("quine", "1")
    code, _, _ = invoke(["eval", "--formula", "x = x", "--bind", "x"], doc)
    assert code == 3  # malformed binding is a data error, like a bad spec file


def test_eval_unbound_variable_is_data_error():
    doc = seed("quine", "1")
    code, _, _ = invoke(["eval", "--formula", "x in y", "--bind", "x=zz"], doc)
    assert code == 3


def test_eval_parse_error():
    doc = seed("quine", "1")
    code, _, err = invoke(["eval", "--formula", "x in"], doc)
    assert code == 3
    assert "parse error" in err


def test_define_lists_class():
    doc = seed("quine", "2")
    node_ids = sorted(n["id"] for n in json.loads(doc)["nodes"])
    code, out, err = invoke(["define", "--formula", "x in x"], doc)
    assert code == 0
    assert out.splitlines() == node_ids
    assert "2 nodes" in err


def test_define_porcelain():
    doc = seed("quine", "1")
    node = json.loads(doc)["nodes"][0]["id"]
    code, out, _ = invoke(["define", "--formula", "x in x", "--porcelain"], doc)
    assert out == f"define\t{node}\n"


def test_formula_reference_lookup(chain_spec_file):
    doc = seed("spec", chain_spec_file)
    code, out, _ = invoke(["define", "--formula", "@selfmember"], doc)
    assert code == 0
    assert out == ""  # chain-style graphs are loop-free
    code, _, err = invoke(["define", "--formula", "@missing"], doc)
    assert code == 3
    assert "missing" in err


# -- oracle comparison -------------------------------------------------------


def test_oracle_compare_agrees():
    doc = seed("quine", "1")
    code, out, _ = invoke(["oracle-compare", "--levels", "2"], doc)
    assert code == 0
    assert out == "isomorphic\n"


def test_oracle_compare_porcelain():
    doc = seed("empty")
    code, out, _ = invoke(["oracle-compare", "--levels", "3", "--porcelain"], doc)
    assert code == 0
    assert out == "oracle\tisomorphic\tisomorphic\n"


# -- export ------------------------------------------------------------------


def test_export_dot_stdout():
    doc = seed("quine", "1")
    node = json.loads(doc)["nodes"][0]["id"]
    code, out, _ = invoke(["export", "--dot", "-"], doc)
    assert code == 0
    name, nodes, edges = parse_dot(out)
    assert node in nodes
    assert (node, node) in edges


def test_export_dot_file(tmp_path, chain_spec_file):
    doc = seed("spec", chain_spec_file)
    target = tmp_path / "out.dot"
    code, out, _ = invoke(["export", "--dot", str(target)], doc)
    assert code == 0
    assert out == ""
    name, nodes, edges = parse_dot(target.read_text())
    assert edges


# -- diff --------------------------------------------------------------------


def write_doc(path, text):
    path.write_text(text)
    return str(path)


def test_diff_identical(tmp_path):
    doc = seed("vN", "2")
    a = write_doc(tmp_path / "a.json", doc)
    b = write_doc(tmp_path / "b.json", doc)
    code, out, _ = invoke(["diff", a, b])
    assert (code, out) == (0, "identical\n")


def test_diff_isomorphic(tmp_path):
    a = write_doc(
        tmp_path / "a.json",
        serialize(GraphDocument.from_graph(quine_atoms(["left"]))),
    )
    b = write_doc(
        tmp_path / "b.json",
        serialize(GraphDocument.from_graph(quine_atoms(["right"]))),
    )
    code, out, _ = invoke(["diff", a, b])
    assert code == 0
    assert out.startswith("isomorphic")


def test_diff_different(tmp_path):
    a = write_doc(tmp_path / "a.json", seed("vN", "2"))
    b = write_doc(tmp_path / "b.json", seed("vN", "3"))
    code, out, _ = invoke(["diff", a, b])
    assert code == 1
    assert out.startswith("different:")
    assert "node counts" in out


def test_diff_missing_file(tmp_path):
    a = write_doc(tmp_path / "a.json", seed("vN", "2"))
    code, _, _ = invoke(["diff", a, str(tmp_path / "absent.json")])
    assert code == 3


# -- stream and usage behaviour ----------------------------------------------


def test_garbage_stdin_is_schema_error():
    code, _, err = invoke(["check", "--axiom", "extensionality"], "not json")
    assert code == 3


def test_unknown_subcommand_is_usage_error():
    code, _, _ = invoke(["frobnicate"])
    assert code == 4


def test_missing_required_flag_is_usage_error():
    code, _, _ = invoke(["complete"], seed("empty"))
    assert code == 4


def test_help_exits_zero():
    code, out, _ = invoke(["--help"])
    assert code == 0
    assert "seed" in out


def test_check_flags_are_exclusive():
    doc = seed("vN", "2")
    code, _, _ = invoke(
        ["check", "--axiom", "extensionality", "--witness-report"], doc
    )
    assert code == 4


# -- console script parity ---------------------------------------------------


def test_console_script_pipe_matches_in_process():
    exe = shutil.which("setforge")
    assert exe, "console script should be installed"
    piped = subprocess.run(
        "setforge seed vN 3 | setforge complete --levels 1",
        shell=True,
        capture_output=True,
        text=True,
    )
    assert piped.returncode == 0, piped.stderr
    doc = seed("vN", "3")
    code, out, _ = invoke(["complete", "--levels", "1"], doc)
    assert code == 0
    assert piped.stdout == out


def test_console_script_exit_code_budget():
    piped = subprocess.run(
        "setforge seed vN 3 | setforge complete --levels 3 --budget 1000000",
        shell=True,
        capture_output=True,
        text=True,
    )
    assert piped.returncode == 2
    assert "budget exceeded" in piped.stderr
