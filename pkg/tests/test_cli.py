"""End-to-end command-line checks, run in-process through main()."""

import json
import shutil
import subprocess
from fractions import Fraction

import pytest

from hilbertcube import first_attempt_partial, make_point, metric_d
from hilbertcube.cli import main

F = Fraction


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def points(tmp_path):
    def write(name, prefix, tail):
        path = tmp_path / name
        path.write_text(json.dumps({"prefix": prefix, "tail": tail}))
        return str(path)

    return {
        "ones": write("ones.json", [], "1"),
        "origin": write("origin.json", [], "0"),
        "int_a": write("int_a.json", ["1/3", "-1/2"], "1/5"),
        "int_b": write("int_b.json", ["2/7"], "-3/8"),
        "neg_ones": write("neg_ones.json", [], "-1"),
        "dir": tmp_path,
    }


def test_solve_eval_inverse_verify_pipeline(capsys, points, tmp_path):
    code, out, _ = run(capsys, "solve", "--p", points["int_a"], "--q", points["int_b"],
                       "--tau", "1/1024")
    assert code == 0
    obj = json.loads(out)
    assert obj["summary"]["case"] == "interior-interior"
    assert obj["summary"]["verified"] is True
    plan_file = tmp_path / "plan.json"
    plan_file.write_text(out)

    # interior-interior evaluation is exact: radius 0, lands on q
    code, out, _ = run(capsys, "eval", "--plan", str(plan_file),
                       "--x", points["int_a"], "--tau", "1/1024")
    assert code == 0
    cp = json.loads(out)
    assert cp["radius"] == "0"
    assert cp["value"] == {"prefix": ["2/7"], "tail": "-3/8"}

    code, out, _ = run(capsys, "inverse-eval", "--plan", str(plan_file),
                       "--x", points["int_b"], "--tau", "1/1024")
    assert code == 0
    cp = json.loads(out)
    assert cp["radius"] == "0"
    assert cp["value"] == {"prefix": ["1/3", "-1/2"], "tail": "1/5"}

    code, out, _ = run(capsys, "verify", "--plan", str(plan_file),
                       "--p", points["int_a"], "--q", points["int_b"], "--tau", "1/1024")
    assert code == 0
    assert json.loads(out)["verified"] is True


def test_verify_exit_1_on_wrong_target(capsys, points, tmp_path):
    code, out, _ = run(capsys, "solve", "--p", points["int_a"], "--q", points["int_b"],
                       "--tau", "1/1024")
    assert code == 0
    plan_file = tmp_path / "plan.json"
    plan_file.write_text(out)
    code, out, _ = run(capsys, "verify", "--plan", str(plan_file),
                       "--p", points["int_a"], "--q", points["neg_ones"], "--tau", "1/1024")
    assert code == 1
    assert json.loads(out)["verified"] is False


def test_solve_boundary_case_verifies(capsys, points):
    code, out, _ = run(capsys, "solve", "--p", points["ones"], "--q", points["int_b"],
                       "--tau", "1/1024")
    assert code == 0
    obj = json.loads(out)
    assert obj["summary"]["case"] == "boundary-interior"
    assert obj["summary"]["verified"] is True
    assert obj["source_schedule"] is not None and obj["target_schedule"] is None


def test_exit_2_on_malformed_point(capsys, points, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("not json at all")
    code, _, err = run(capsys, "solve", "--p", str(bad), "--q", points["int_b"],
                       "--tau", "1/4")
    assert code == 2
    assert err.startswith("error:")


def test_exit_2_on_decimal_tolerance(capsys, points):
    code, _, err = run(capsys, "solve", "--p", points["int_a"], "--q", points["int_b"],
                       "--tau", "0.01")
    assert code == 2
    assert "decimals forbidden" in err


def test_exit_2_on_missing_file(capsys, points):
    code, _, err = run(capsys, "metrics", "--p", "/nonexistent/p.json",
                       "--q", points["origin"])
    assert code == 2
    assert "cannot read" in err


def test_exit_3_on_horizon(capsys, points):
    code, _, err = run(capsys, "solve", "--p", points["ones"], "--q", points["int_b"],
                       "--tau", "1/1099511627776", "--horizon", "3")
    assert code == 3
    assert "error:" in err


def test_demo_table(capsys):
    code, out, _ = run(capsys, "demo-first-attempt", "--t", "1/2", "--n", "5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("stage")
    assert "image of all-1/2" in lines[0] and "distance" in lines[0]
    assert len(lines) == 7  # header + stages 0..5
    ones, half = make_point([], 1), make_point([], F(1, 2))
    want = metric_d(first_attempt_partial(ones, 5), first_attempt_partial(half, 5))
    assert want == F(1, 64)
    assert lines[-1].split()[-1] == "1/64"


def test_diagnose_corrected_clean(capsys):
    code, out, _ = run(capsys, "diagnose", "--variant", "corrected",
                       "--n", "1", "--m", "2", "--grid", "1/16")
    assert code == 0
    obj = json.loads(out)
    assert obj["ok"] is True and obj["findings"] == []
    assert obj["points_checked"] > 0


def test_diagnose_verbatim_reports(capsys):
    code, out, _ = run(capsys, "diagnose", "--variant", "verbatim",
                       "--n", "1", "--m", "2", "--grid", "1/16")
    assert code == 0
    obj = json.loads(out)
    assert obj["ok"] is False and len(obj["findings"]) > 0
    checks = {f["check"] for f in obj["findings"]}
    assert "range-containment" in checks


def test_diagnose_rejects_coarse_grid(capsys):
    code, _, err = run(capsys, "diagnose", "--variant", "corrected",
                       "--n", "1", "--m", "2", "--grid", "1/8")
    assert code == 2
    assert "grid step" in err


def test_metrics(capsys, points):
    code, out, _ = run(capsys, "metrics", "--p", points["ones"], "--q", points["origin"])
    assert code == 0
    obj = json.loads(out)
    assert obj["distance"] == "1"
    assert obj["p_profile"]["tail_is_boundary"] is True
    assert obj["q_profile"]["tail_is_boundary"] is False


def test_schedule_record(capsys, points):
    code, out, _ = run(capsys, "schedule", "--p", points["ones"], "--count", "4")
    assert code == 0
    obj = json.loads(out)
    assert obj["stages"] == [[1, 4], [2, 8], [3, 12], [4, 16]]
    assert obj["budget_ok"] is True
    assert obj["forward_tail_bound"] == "1/5"
    assert obj["reverse_tail_bound"] == "3/8"


def test_render_writes_deterministic_svg(capsys, tmp_path):
    a, b = str(tmp_path / "a.svg"), str(tmp_path / "b.svg")
    for path in (a, b):
        code, _, _ = run(capsys, "render", "--map", "ccw", "--n", "1", "--m", "2",
                         "--grid", "16", "--out", path)
        assert code == 0
    data = (tmp_path / "a.svg").read_bytes()
    assert data == (tmp_path / "b.svg").read_bytes()
    text = data.decode()
    assert text.startswith("<svg")
    assert text.count("<polyline") == 2 * (16 + 1)


def test_render_with_trace(capsys, points, tmp_path):
    out_path = str(tmp_path / "t.svg")
    code, _, _ = run(capsys, "render", "--map", "ccw-cubed", "--n", "1", "--m", "4",
                     "--grid", "8", "--trace", points["ones"], "--stages", "2",
                     "--out", out_path)
    assert code == 0
    assert "<path" in (tmp_path / "t.svg").read_text()


def test_render_rejects_bad_grid(capsys, tmp_path):
    code, _, err = run(capsys, "render", "--map", "ccw", "--n", "1", "--m", "2",
                       "--grid", "12", "--out", str(tmp_path / "x.svg"))
    assert code == 2
    assert "power of two" in err


def test_console_script(points):
    exe = shutil.which("hilbertcube")
    assert exe, "console script not installed"
    proc = subprocess.run(
        [exe, "schedule", "--p", points["ones"], "--count", "2"],
        capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["stages"] == [[1, 4], [2, 8]]
