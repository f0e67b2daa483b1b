import io
import json
from pathlib import Path

import pandas as pd
import pytest

from hyperpoly import main, weight_grid
from hyperpolygon import is_in_level_set, point_from_dict

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def golden(name):
    return json.loads((GOLDEN / name).read_text())


def assert_matches_golden(request, name, data):
    """Compare with tests/golden/name; --update-golden (or a missing file) rewrites it."""
    path = GOLDEN / name
    if request.config.getoption("--update-golden") or not path.exists():
        path.write_text(json.dumps(data, indent=2) + "\n")
        pytest.skip(f"golden file {name} written")
    assert data == golden(name)


@pytest.fixture
def hand_point_file():
    return str(GOLDEN / "hand_point.json")


class TestSample:
    def test_sample_is_on_level_set(self, capsys):
        code, out, _ = run(capsys, "sample", "--n", "5", "--seed", "7")
        assert code == 0
        point = point_from_dict(json.loads(out))
        assert point.n == 5
        assert is_in_level_set(point)

    def test_same_seed_same_bytes(self, capsys):
        _, first, _ = run(capsys, "sample", "--n", "5", "--seed", "11", "--quiet")
        _, second, _ = run(capsys, "sample", "--n", "5", "--seed", "11", "--quiet")
        assert first == second

    def test_golden(self, capsys, request):
        code, out, _ = run(capsys, "sample", "--n", "5", "--seed", "7", "--quiet")
        assert code == 0
        data = json.loads(out)
        assert is_in_level_set(point_from_dict(data))
        assert_matches_golden(request, "sample_n5_seed7.json", data)

    def test_quiet_keeps_stderr_empty(self, capsys):
        code, out, err = run(capsys, "sample", "--quiet")
        assert code == 0
        assert err == ""
        assert json.loads(out)["n"] == 4

    def test_n3_exits_2(self, capsys):
        code, out, err = run(capsys, "sample", "--n", "3")
        assert code == 2
        assert out == ""
        assert "n >= 4" in err

    def test_collinear(self, capsys):
        code, out, _ = run(capsys, "sample", "--collinear", "--n", "3", "--seed", "2")
        assert code == 0
        assert is_in_level_set(point_from_dict(json.loads(out)))

    def test_bad_mode_exits_3(self, capsys):
        code, _, err = run(capsys, "sample", "--mode", "fuzzy")
        assert code == 3
        assert "unknown mode" in err

    def test_mode_from_environment(self, capsys, monkeypatch):
        monkeypatch.setenv("HYPERPOLY_MODE", "approx")
        code, out, _ = run(capsys, "sample", "--quiet")
        assert code == 0
        assert json.loads(out)["mode"] == "approx"


class TestCheck:
    def test_hand_point_is_stable(self, capsys, hand_point_file):
        code, out, _ = run(capsys, "check", hand_point_file, "--alpha", "1/3,1/3,1/3,1/3")
        assert code == 0
        report = json.loads(out)
        assert report["level_set"]
        assert report["strong_parabolicity"]
        assert report["regular_at_infinity"]
        assert report["stable"] is True
        assert report["stability"]["threshold"] == "2/3"

    def test_collinear_is_unstable(self, capsys, tmp_path):
        _, out, _ = run(capsys, "sample", "--collinear", "--n", "4", "--seed", "5", "--quiet")
        path = tmp_path / "collinear.json"
        path.write_text(out)
        for alpha in ("1/3,1/3,1/3,1/3", "1/10,1/5,1/2,9/10"):
            code, out, _ = run(capsys, "check", str(path), "--alpha", alpha)
            assert code == 0
            assert json.loads(out)["stable"] is False

    def test_off_level_set_point(self, capsys, tmp_path):
        data = golden("hand_point.json")
        data["y"][0] = [["1/1", "0/1"], ["2/1", "0/1"]]
        path = tmp_path / "off.json"
        path.write_text(json.dumps(data))
        code, out, _ = run(capsys, "check", str(path))
        assert code == 0
        report = json.loads(out)
        assert report["level_set"] is False
        assert report["stable"] is None

    def test_corrupted_json_exits_3(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"n": 4, "z": [')
        code, out, _ = run(capsys, "check", str(path))
        assert code == 3
        assert out == ""

    def test_missing_file_exits_3(self, capsys, tmp_path):
        code, _, _ = run(capsys, "check", str(tmp_path / "absent.json"))
        assert code == 3

    def test_approx_point_exits_4(self, capsys, tmp_path):
        _, out, _ = run(capsys, "sample", "--mode", "approx", "--quiet")
        path = tmp_path / "approx.json"
        path.write_text(out)
        code, _, err = run(capsys, "check", str(path))
        assert code == 4
        assert "exact" in err

    def test_weight_count_mismatch_exits_3(self, capsys, hand_point_file):
        code, _, _ = run(capsys, "check", hand_point_file, "--alpha", "1/3,1/3,1/3")
        assert code == 3

    def test_stdin(self, capsys, monkeypatch, hand_point_file):
        monkeypatch.setattr("sys.stdin", io.StringIO(Path(hand_point_file).read_text()))
        code, out, _ = run(capsys, "check", "-", "--quiet")
        assert code == 0
        assert json.loads(out)["stable"] is True


class TestMap:
    def test_golden(self, capsys, hand_point_file):
        code, out, _ = run(capsys, "map", hand_point_file, "--quiet")
        assert code == 0
        assert json.loads(out) == golden("hand_point_higgs.json")

    def test_deterministic(self, capsys, hand_point_file):
        _, first, _ = run(capsys, "map", hand_point_file, "--quiet")
        _, second, _ = run(capsys, "map", hand_point_file, "--quiet")
        assert first == second

    def test_off_level_set_exits_2(self, capsys, tmp_path):
        data = golden("hand_point.json")
        data["y"][0] = [["1/1", "0/1"], ["2/1", "0/1"]]
        path = tmp_path / "off.json"
        path.write_text(json.dumps(data))
        code, out, err = run(capsys, "map", str(path))
        assert code == 2
        assert "not on moment level set" in err

    def test_group_action_preserves_det(self, capsys, tmp_path, hand_point_file):
        g = {
            "A": [[["1/1", "0/1"], ["1/1", "0/1"]], [["0/1", "0/1"], ["1/1", "0/1"]]],
            "lambda": [["2/1", "0/1"], ["1/1", "0/1"], ["-1/1", "0/1"], ["1/2", "0/1"]],
        }
        path = tmp_path / "g.json"
        path.write_text(json.dumps(g))
        code, out, _ = run(capsys, "map", hand_point_file, "--act", str(path), "--quiet")
        assert code == 0
        data = json.loads(out)
        assert data["det"] == golden("hand_point_higgs.json")["det"]
        assert data["lines"][0] == [["2/1", "0/1"], ["0/1", "0/1"]]

    def test_group_element_of_wrong_size(self, capsys, tmp_path, hand_point_file):
        g = {"A": [[["1/1", "0/1"], ["0/1", "0/1"]], [["0/1", "0/1"], ["1/1", "0/1"]]], "lambda": [["1/1", "0/1"]]}
        path = tmp_path / "g.json"
        path.write_text(json.dumps(g))
        code, _, _ = run(capsys, "map", hand_point_file, "--act", str(path))
        assert code == 3

    def test_custom_points(self, capsys, hand_point_file):
        code, out, _ = run(capsys, "map", hand_point_file, "--points", "0,1,2,5", "--quiet")
        assert code == 0
        assert json.loads(out)["points"][3] == ["5/1", "0/1"]


class TestVerify:
    def test_exact_passes_with_zero_residuals(self, capsys):
        code, out, err = run(capsys, "verify", "--n", "4", "--seed", "3", "--trials", "3")
        assert code == 0
        report = json.loads(out)
        assert report["pass"] is True
        assert report["failed"] is None
        names = [s["name"] for s in report["suites"]]
        assert names == [
            "level-set", "higgs-invariants", "theorem1", "two-form",
            "descent", "equivariance", "dimension", "rank",
        ]
        by_name = {s["name"]: s for s in report["suites"]}
        assert by_name["theorem1"]["max_residual"] == "0"
        assert by_name["two-form"]["max_residual"] == "0"
        assert by_name["rank"]["got"] == 2
        assert "All suites passed" in err

    def test_golden_at_hand_point(self, capsys, request, hand_point_file):
        code, out, _ = run(capsys, "verify", hand_point_file, "--seed", "7", "--trials", "3", "--quiet")
        assert code == 0
        assert_matches_golden(request, "verify_hand_point_seed7.json", json.loads(out))

    def test_point_from_file_off_level_set(self, capsys, tmp_path):
        data = golden("hand_point.json")
        data["y"][0] = [["1/1", "0/1"], ["2/1", "0/1"]]
        path = tmp_path / "off.json"
        path.write_text(json.dumps(data))
        code, out, err = run(capsys, "verify", str(path), "--trials", "2")
        assert code == 1
        assert json.loads(out)["failed"] == "level-set"
        assert "FAILED: level-set" in err

    def test_unstable_point_from_file(self, capsys, tmp_path):
        _, out, _ = run(capsys, "sample", "--collinear", "--n", "4", "--seed", "5", "--quiet")
        path = tmp_path / "collinear.json"
        path.write_text(out)
        code, out, err = run(capsys, "verify", str(path), "--trials", "2")
        assert code == 1
        assert out == ""
        assert "stable locus required" in err

    @pytest.mark.slow
    def test_approx_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--mode", "approx", "--n", "6", "--trials", "20", "--quiet")
        assert code == 0
        report = json.loads(out)
        assert report["mode"] == "approx"
        assert all(s["pass"] for s in report["suites"])

    def test_perturbation_names_level_set(self, capsys):
        code, out, err = run(capsys, "verify", "--perturb", "1e-3", "--trials", "2")
        assert code == 1
        report = json.loads(out)
        assert report["failed"] == "level-set"
        assert report["suites"][1] == {"name": "higgs-invariants", "pass": None, "skipped": True}
        assert "FAILED: level-set" in err

    def test_deterministic(self, capsys):
        _, first, _ = run(capsys, "verify", "--seed", "9", "--trials", "2", "--quiet")
        _, second, _ = run(capsys, "verify", "--seed", "9", "--trials", "2", "--quiet")
        assert first == second


class TestScan:
    def test_grid_one_is_single_row(self, capsys):
        code, out, _ = run(capsys, "scan", "--grid", "1", "--trials", "5", "--quiet")
        assert code == 0
        frame = pd.read_csv(io.StringIO(out))
        assert list(frame.columns) == ["alpha", "samples", "stable_count"]
        assert len(frame) == 1
        assert frame.loc[0, "alpha"] == "1/2;1/2;1/2;1/2"

    def test_generic_samples_all_stable_at_one_third(self, capsys):
        code, out, _ = run(capsys, "scan", "--grid", "2", "--trials", "10", "--quiet")
        assert code == 0
        frame = pd.read_csv(io.StringIO(out))
        assert len(frame) == 16
        row = frame[frame["alpha"] == "1/3;1/3;1/3;1/3"].iloc[0]
        assert row["samples"] == 10
        assert row["stable_count"] == 10

    def test_collinear_never_stable(self, capsys):
        code, out, _ = run(capsys, "scan", "--collinear", "--grid", "2", "--trials", "4", "--quiet")
        assert code == 0
        frame = pd.read_csv(io.StringIO(out))
        assert (frame["stable_count"] == 0).all()

    def test_approx_exits_4(self, capsys):
        code, _, _ = run(capsys, "scan", "--mode", "approx", "--quiet")
        assert code == 4

    def test_weight_grid(self):
        grid = weight_grid(4, 3)
        assert len(grid) == 81
        assert grid[0].to_json() == ["1/4"] * 4
