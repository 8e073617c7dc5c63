import json
import os

import pytest

from scripts.cli import (
    EXIT_FAIL,
    EXIT_INPUT,
    EXIT_OK,
    PointTask,
    SamplingExhaustedError,
    main,
    parse_args,
    parse_range,
    run_point,
    sample_stable_pair,
)
from scripts.shared_utils import PAIRS_DIR, manifest_path_for


def sample_path(name):
    return os.path.join(PAIRS_DIR, f"{name}.json")


def read_json(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


# ================================
# argument parsing
# ================================
@pytest.mark.parametrize("text, expected", [("2", (2,)), ("1-3", (1, 2, 3)), ("1,3", (1, 3)), ("", ())])
def test_parse_range(text, expected):
    assert parse_range(text) == expected


def test_descending_range_is_rejected():
    with pytest.raises(ValueError):
        parse_range("3-1")


def test_suite_defaults():
    cfg = parse_args(["suite", "--seed", "4"])
    assert cfg.seed == 4
    assert cfg.r_values == (1, 2)
    assert cfg.n_values == (1, 2)
    assert not cfg.inject_sign_fault


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "--n", "0"],
        ["gen", "--r", "1-2"],
        ["suite", "--samples", "0"],
        ["nonsense"],
        ["gen", "--seed", "-1"],
        ["suite", "--r", "3-1"],
        ["suite", "--n", "2-1"],
    ],
)
def test_bad_flags_exit_with_input_error(argv):
    assert main(argv) == EXIT_INPUT


# ================================
# gen
# ================================
def test_gen_is_deterministic(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["gen", "--seed", "1", "--r", "2", "--n", "1"]
    assert main(argv + ["--out", str(first)]) == EXIT_OK
    assert main(argv + ["--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    assert os.path.exists(manifest_path_for(str(first)))


def test_rank_one_needs_one_attempt():
    _, _, attempts = sample_stable_pair(seed=9, r=1, n=3, bound=5, max_tries=1)
    assert attempts == 1


def test_zero_bound_exhausts(tmp_path):
    with pytest.raises(SamplingExhaustedError):
        sample_stable_pair(seed=1, r=2, n=1, bound=0, max_tries=3)
    argv = ["gen", "--r", "2", "--n", "1", "--bound", "0", "--max-tries", "3", "--out", str(tmp_path / "x.json")]
    assert main(argv) == EXIT_INPUT


def test_gen_sigma_override(tmp_path):
    out = tmp_path / "pair.json"
    assert main(["gen", "--r", "1", "--n", "1", "--sigma0", "1,0,0,1", "--out", str(out)]) == EXIT_OK
    assert read_json(out)["sigma0"] == ["1", "0", "0", "1"]


# ================================
# analyze
# ================================
def test_analyze_smooth_sample(tmp_path):
    out = tmp_path / "analysis.json"
    assert main(["analyze", "--input", sample_path("r2_n1_smooth"), "--out", str(out)]) == EXIT_OK
    result = read_json(out)
    assert result["dims"] == {"H0": 1, "H1": 5, "H2": 0}
    assert result["genus"] == 0
    assert result["euler_characteristic"] == 2
    assert result["stability"] == "SmoothSpectralCurve"
    assert result["serre_pairing_det_nonzero"] is True


def test_analyze_malformed_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"splitting": [0], "n": 1,, }', encoding="utf-8")
    assert main(["analyze", "--input", str(bad), "--out", str(tmp_path / "o.json")]) == EXIT_INPUT


def test_analyze_schema_violation(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"splitting": [0], "n": 0, "theta": [[["1"]]]}), encoding="utf-8")
    assert main(["analyze", "--input", str(bad), "--out", str(tmp_path / "o.json")]) == EXIT_INPUT


def test_analyze_missing_file(tmp_path):
    assert main(["analyze", "--input", str(tmp_path / "nope.json")]) == EXIT_INPUT


# ================================
# verify
# ================================
def test_verify_smooth_sample(tmp_path):
    out = tmp_path / "verify.json"
    assert main(["verify", "--input", sample_path("r2_n1_smooth"), "--out", str(out)]) == EXIT_OK
    report = read_json(out)
    assert report["passed"] is True
    assert report["dims"]["H1"] == 5
    assert all(v == "0" for row in report["difference"] for v in row)


def test_verify_sign_fault_fails(tmp_path):
    out = tmp_path / "verify.json"
    argv = ["verify", "--input", sample_path("r2_n2_genus1"), "--inject-sign-fault", "--out", str(out)]
    assert main(argv) == EXIT_FAIL
    report = read_json(out)
    assert report["fault_injected"] is True
    assert report["checks"]["theorem"] is False


def test_verify_unstable_input(tmp_path):
    zero = tmp_path / "zero.json"
    zero.write_text(
        json.dumps({"splitting": [0, 0], "n": 1, "theta": [[["0", "0"], ["0", "0"]], [["0", "0"], ["0", "0"]]]}),
        encoding="utf-8",
    )
    assert main(["verify", "--input", str(zero), "--out", str(tmp_path / "o.json")]) == EXIT_INPUT


# ================================
# suite
# ================================
def test_empty_grid_passes(tmp_path):
    out = tmp_path / "suite.json"
    assert main(["suite", "--r=", "--out", str(out)]) == EXIT_OK
    assert read_json(out)["points"] == []


def test_small_suite(tmp_path):
    out = tmp_path / "suite.json"
    argv = ["suite", "--r", "1", "--n", "1-2", "--samples", "2", "--out", str(out)]
    assert main(argv) == EXIT_OK
    result = read_json(out)
    assert result["all_passed"] is True
    assert len(result["points"]) == 4
    assert (tmp_path / "suite.csv").exists()

    again = tmp_path / "again.json"
    assert main(argv[:-1] + [str(again)]) == EXIT_OK
    assert out.read_bytes() == again.read_bytes()


def test_suite_with_nonzero_bracket_is_deterministic(tmp_path):
    out = tmp_path / "suite.json"
    argv = ["suite", "--seed", "5", "--r", "2", "--n", "2", "--samples", "1", "--out", str(out)]
    assert main(argv) == EXIT_OK
    result = read_json(out)
    assert result["all_passed"] is True
    (row,) = result["points"]
    assert row["H1"] == 9
    assert row["poisson_rank"] > 0

    again = tmp_path / "again.json"
    assert main(argv[:-1] + [str(again)]) == EXIT_OK
    assert out.read_bytes() == again.read_bytes()


@pytest.mark.parametrize("extra", ["1", "2"])
def test_verify_with_wider_window(extra, tmp_path):
    out = tmp_path / "verify.json"
    argv = ["verify", "--input", sample_path("r2_n2_genus1"), "--window-extra", extra, "--out", str(out)]
    assert main(argv) == EXIT_OK
    report = read_json(out)
    assert report["dims"]["window"] == [9, 9, 9]
    assert report["checks"]["hamiltonians_commute"] is True


GRID = [(r, n, k) for r in (1, 2, 3) for n in (1, 2, 3) for k in range(3) if r < 3 or k == 0]


@pytest.mark.slow
@pytest.mark.parametrize("r, n, k", GRID)
def test_seeded_grid_verifies(r, n, k):
    task = PointTask(seed=11, r=r, n=n, k=k, bound=5, max_tries=200, window_extra=0, inject_sign_fault=False)
    row, _ = run_point(task)
    assert row["error"] is None
    assert row["passed"] is True
    assert (row["H0"], row["H1"], row["H2"]) == (1, r * r * n + 1, 0)
    assert row["poisson_rank"] % 2 == 0
