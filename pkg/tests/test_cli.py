import json

import pytest

from equity_audit.cli import main


def run_cli(*argv) -> int:
    return main(list(argv))


@pytest.fixture()
def audit_csv(tmp_path):
    path = tmp_path / "audit.csv"
    path.write_text(
        "pred,label,group,y_tt\n"
        "1,1,0,1\n0,0,0,1\n1,0,0,0\n0,1,0,1\n"
        "1,1,1,1\n0,0,1,1\n1,0,1,1\n1,1,1,0\n"
    )
    return path


@pytest.fixture()
def spaces_json(tmp_path):
    pop_csv = tmp_path / "pop.csv"
    lines = ["id,group,y,y_prime,x_a,z_a"]
    for k in range(40):
        grp = k % 2
        positive = (k // 2) % 2 == 0
        x = 3.0 if positive else 1.0
        y = 1 if positive else 0
        lines.append(f"i{k},{grp},{y},{y},{x},{x}")
    pop_csv.write_text("\n".join(lines) + "\n")
    doc = {
        "proxy": {
            "dataset": str(pop_csv),
            "alpha": [0.0],
            "specs": [
                {"features": ["a"], "function_class": "norm_threshold",
                 "hyperparams": {"threshold": 2.0}}
            ],
            "policies": [0],
        },
        "intended": {
            "dataset": str(pop_csv),
            "alpha": [0.0],
            "specs": [
                {"features": ["a"], "function_class": "norm_threshold",
                 "hyperparams": {"threshold": 1.0}}
            ],
            "policies": ["inf"],
        },
    }
    path = tmp_path / "spaces.json"
    path.write_text(json.dumps(doc))
    return path


class TestQuestions:
    def test_exit_zero_and_content(self, capsys):
        assert run_cli("questions") == 0
        out = capsys.readouterr().out
        assert out.count(")") >= 21
        assert "Curation of ground truth" in out

    def test_byte_identical_output(self, capsys):
        run_cli("questions")
        first = capsys.readouterr().out
        run_cli("questions")
        assert capsys.readouterr().out == first


class TestAudit:
    def test_writes_report(self, audit_csv, tmp_path, capsys):
        out = tmp_path / "reports"
        assert run_cli("--out", str(out), "audit", str(audit_csv)) == 0
        doc = json.loads((out / "audit.json").read_text())
        assert "outcome" in doc and "utilization" in doc
        assert doc["outcome"]["eo_violation"] == pytest.approx(0.5)

    def test_missing_file_exit_2(self, tmp_path):
        assert run_cli("--out", str(tmp_path), "audit", str(tmp_path / "nope.csv")) == 2

    def test_degenerate_group_exit_3(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("pred,label,group\n1,1,0\n0,0,0\n1,1,1\n0,1,1\n")
        assert run_cli("--out", str(tmp_path / "r"), "audit", str(path)) == 3

    def test_usage_error_exit_1(self):
        assert run_cli("audit") == 1
        assert run_cli("definitely-not-a-command") == 1


class TestScore:
    def test_perfect_space_scores_three(self, spaces_json, tmp_path, capsys):
        out = tmp_path / "reports"
        code = run_cli(
            "--out", str(out), "--format", "csv", "score", str(spaces_json),
            "--tau", "0.85", "--tau-o", "0.15",
        )
        assert code == 0
        printed = capsys.readouterr().out
        assert "converged" in printed
        trace_csv = (out / "scoring_trace.csv").read_text()
        assert trace_csv.splitlines()[0].startswith("iter,spec_id,policy_id")

    def test_bad_spaces_doc_exit_2(self, tmp_path):
        path = tmp_path / "spaces.json"
        path.write_text('{"proxy": {}}')
        assert run_cli("--out", str(tmp_path / "r"), "score", str(path)) == 2


class TestCasestudy:
    def test_runs_and_is_byte_stable(self, student_path, tmp_path, capsys):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        for out in (out_a, out_b):
            code = run_cli(
                "--seed", "7", "--out", str(out), "--format", "json",
                "casestudy", str(student_path),
            )
            assert code == 0
        assert (out_a / "casestudy.json").read_bytes() == (out_b / "casestudy.json").read_bytes()
        doc = json.loads((out_a / "casestudy.json").read_text())
        assert len(doc["regimes"]) == 8

    def test_csv_output(self, student_path, tmp_path):
        out = tmp_path / "r"
        code = run_cli(
            "--seed", "7", "--out", str(out), "--format", "csv",
            "casestudy", str(student_path),
        )
        assert code == 0
        lines = (out / "casestudy.csv").read_text().splitlines()
        assert lines[0] == "regime,metric,group,value"
        assert any("admission_rate" in line for line in lines)


class TestSimulateLoop:
    def test_writes_trajectory(self, tmp_path, capsys):
        out = tmp_path / "r"
        code = run_cli(
            "--seed", "5", "--out", str(out),
            "simulate-loop", "--regime", "no_equity", "--rounds", "1",
        )
        assert code == 0
        text = (out / "trajectory_no_equity.csv").read_text()
        assert text.splitlines()[0].startswith("round,regime,psi")
        assert len(text.splitlines()) == 2


class TestGaps:
    def test_gap_report(self, tmp_path, capsys):
        proxy = tmp_path / "proxy.json"
        proxy.write_text(json.dumps({
            "feature_names": ["code experience", "team player", "references", "gender", "race"],
            "importance": [0.5, 0.2, 0.2, 0.05, 0.05],
        }))
        intended = tmp_path / "intended.json"
        intended.write_text(json.dumps({
            "feature_names": ["accomplished tasks", "team player", "manager ratings", "gender", "race"],
            "importance": [0.5, 0.2, 0.2, 0.05, 0.05],
        }))
        out = tmp_path / "r"
        assert run_cli("--out", str(out), "gaps", str(proxy), str(intended)) == 0
        doc = json.loads((out / "gaps.json").read_text())
        assert doc["gamma_x"] == [1, 0, 1, 0, 0]
        assert doc["gamma_l"] == pytest.approx([0.5, 0.0, 0.2, 0.0, 0.0])
        assert doc["notes"]

    def test_saved_case_study_models_feed_gaps(self, tmp_path, student_path):
        out = tmp_path / "r"
        assert run_cli("--seed", "7", "--out", str(out), "casestudy", str(student_path)) == 0
        proxy_doc = out / "proxy_model.json"
        intended_doc = out / "intended_model.json"
        assert proxy_doc.exists() and intended_doc.exists()
        code = run_cli("--out", str(out), "gaps", str(proxy_doc), str(intended_doc))
        assert code == 0
        doc = json.loads((out / "gaps.json").read_text())
        assert doc["gamma_x"] == [0, 1, 1, 1, 1, 1, 1, 1, 1, 1]

    def test_config_file_round_trip(self, tmp_path, student_path):
        config = tmp_path / "run.toml"
        config.write_text('seed = 7\nformats = ["json"]\n')
        out = tmp_path / "r"
        code = run_cli(
            "--config", str(config), "--out", str(out), "casestudy", str(student_path)
        )
        assert code == 0
        assert (out / "casestudy.json").exists()
