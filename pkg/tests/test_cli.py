import json
from pathlib import Path

import pytest

from regretgames import game_to_json, save_game
from regretgames.cli import run
from support import anchor_game


@pytest.fixture()
def game_file(tmp_path):
    path = tmp_path / "game.json"
    save_game(anchor_game(), path)
    return path


def run_capture(capsys, argv):
    code = run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_solve_reports_anchor(game_file, capsys):
    code, out, _ = run_capture(
        capsys, ["solve", "--game", str(game_file), "--player", "0", "--mode", "full"]
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["reports"] == [
        {
            "player": 0,
            "restriction": "full",
            "minimax_regret": "1",
            "argmin": [1],
            "worst_regret_per_strategy": ["3", "1"],
        }
    ]
    assert payload["input"]["game"] == game_to_json(anchor_game())


def test_solve_canonical_pick_with_labels(tmp_path, capsys):
    from regretgames import make_dense_game

    labeled = make_dense_game(
        (2, 2),
        [[[4, 0], [0, 3]], [[3, 1], [3, 2]]],
        labels=[["up", "down"], ["left", "right"]],
    )
    path = tmp_path / "labeled.json"
    save_game(labeled, path)
    code, out, _ = run_capture(capsys, ["solve", "--game", str(path), "--player", "0"])
    assert code == 0
    assert json.loads(out)["canonical_picks"] == [
        {"player": 0, "restriction": "full", "canonical_pick": 1, "label": "down"}
    ]


def test_solve_byte_identical_runs(game_file, capsys):
    _, first, _ = run_capture(capsys, ["solve", "--game", str(game_file)])
    _, second, _ = run_capture(capsys, ["solve", "--game", str(game_file)])
    assert first == second


def test_solve_output_file_and_csv(game_file, tmp_path, capsys):
    out_path = tmp_path / "report.csv"
    code, _, _ = run_capture(
        capsys,
        ["solve", "--game", str(game_file), "--format", "csv", "--output", str(out_path)],
    )
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "player,restriction,minimax_regret,argmin,worst_regret_per_strategy"
    assert lines[1] == "0,full,1,1,3;1"


def test_dominance_command(game_file, capsys):
    code, out, _ = run_capture(capsys, ["dominance", "--game", str(game_file)])
    assert code == 0
    payload = json.loads(out)
    assert payload["rational_sets"][1]["allowed"] == [1]


def test_bidding_verify_strict_second_price(capsys):
    code, out, _ = run_capture(
        capsys, ["bidding", "--l", "6,4", "--T", "10", "--k", "2", "--verify", "--strict"]
    )
    assert code == 0
    assert json.loads(out)["verification"]["all_match"] is True


def test_bidding_verify_strict_divergence_exit(capsys):
    code, out, _ = run_capture(
        capsys, ["bidding", "--l", "6,4", "--T", "10", "--k", "1", "--verify", "--strict"]
    )
    assert code == 1
    assert json.loads(out)["verification"]["all_match"] is False


def test_bidding_invalid_spec_exit_two(capsys):
    code, _, err = run_capture(capsys, ["bidding", "--l", "6,4", "--T", "3", "--k", "1"])
    assert code == 2
    assert "valuation < grid size" in err


def test_unknown_flag_exit_two(capsys):
    code, _, err = run_capture(capsys, ["solve", "--nonsense"])
    assert code == 2
    assert "usage" in err


def test_schema_flag(capsys):
    code, out, _ = run_capture(capsys, ["--schema"])
    assert code == 0
    schemas = json.loads(out)
    assert set(schemas) == {"game", "sequence", "random_game", "announcements", "manifest"}


def test_no_command_exit_two(capsys):
    code, _, err = run_capture(capsys, [])
    assert code == 2


def test_repeated_sequence(tmp_path, capsys):
    stage = {
        "players": 2,
        "strategy_counts": [2, 2],
        "payoffs": [[[10, 9], [0, 0]], [[1, 3], [2, 1]]],
    }
    stage_path = tmp_path / "stage.json"
    stage_path.write_text(json.dumps(stage))
    seq_path = tmp_path / "seq.json"
    seq_path.write_text(json.dumps({"stages": ["stage.json", stage]}))
    code, out, _ = run_capture(capsys, ["repeated", "--sequence", str(seq_path)])
    assert code == 0
    payload = json.loads(out)
    assert payload["report"]["all_pass"] is True


def test_repeated_random_sampled_requires_seed(tmp_path, capsys):
    stage = {
        "players": 2,
        "strategy_counts": [2, 2],
        "payoffs": [[[10, 9], [0, 0]], [[1, 3], [2, 1]]],
    }
    spec_path = tmp_path / "random.json"
    spec_path.write_text(json.dumps({"pool": [stage], "length": 2, "mode": "sampled"}))
    code, _, err = run_capture(capsys, ["repeated", "--random", str(spec_path)])
    assert code == 2
    assert "seed" in err


def test_repeated_size_cap_exit_three(tmp_path, capsys):
    values0 = [20, 1, 2, 3, 4, 5, 6, 7, 0]
    values1 = [0, 1, 2, 3, 4, 5, 6, 7, 22]
    stage = {
        "players": 2,
        "strategy_counts": [3, 3],
        "payoffs": [
            [[values0[a * 3 + b], values1[a * 3 + b]] for b in range(3)]
            for a in range(3)
        ],
    }
    seq_path = tmp_path / "seq.json"
    seq_path.write_text(json.dumps({"stages": [stage, stage, stage]}))
    code, _, err = run_capture(capsys, ["repeated", "--sequence", str(seq_path)])
    assert code == 3
    assert "history strategies" in err


def test_repeated_exactly_one_input(capsys):
    code, _, _ = run_capture(capsys, ["repeated"])
    assert code == 2


def test_trading_describe(capsys):
    code, out, _ = run_capture(
        capsys,
        ["trading", "--m1", "2", "--M1", "6", "--m2", "2", "--M2", "6", "--t", "3", "--K", "1"],
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["single_agent_thresholds"] == ["2", "2"]
    assert payload["strategies"][0]["params"]["early_threshold"] == "7/2"


def test_trading_simulate_jsonl(tmp_path, capsys):
    ann_path = tmp_path / "ann.json"
    ann_path.write_text(json.dumps([[3, 2], [5, 6], [4, 3]]))
    code, out, _ = run_capture(
        capsys,
        ["trading", "--m1", "2", "--M1", "6", "--m2", "2", "--M2", "6", "--t", "3",
         "--K", "1", "--mode", "full", "--simulate", str(ann_path), "--format", "text"],
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 4  # one record per iteration plus the outcome
    first = json.loads(lines[0])
    assert first["iteration"] == 1
    assert json.loads(lines[-1])["outcome"]["payoffs"] == ["5", "6"]


def test_trading_oracle_with_sweep(capsys):
    code, out, _ = run_capture(
        capsys,
        ["trading", "--m1", "1", "--M1", "4", "--m2", "1", "--M2", "4", "--t", "3",
         "--K", "1", "--mode", "full", "--oracle", "--sweep"],
    )
    assert code == 0
    payload = json.loads(out)
    entry = payload["oracle"][0]
    assert entry["worst_case_regret"] == "4"
    assert entry["sweep"]["reference_optimal"] is True


def test_trading_enum_cap_exit_three(capsys):
    code, _, err = run_capture(
        capsys,
        ["trading", "--m1", "1", "--M1", "60", "--m2", "1", "--M2", "60", "--t", "4",
         "--K", "1", "--oracle"],
    )
    assert code == 3


def test_trading_audit_single(capsys):
    code, out, _ = run_capture(
        capsys, ["trading", "--audit-single", "--m1", "2", "--M1", "10", "--t", "3"]
    )
    assert code == 0
    audit = json.loads(out)["single_agent_audit"]
    assert audit["closed_form_threshold"] == "4"
    assert audit["best_stationary_thresholds"] == ["6", "7"]


def test_verify_manifest(tmp_path, capsys):
    manifest = {"specs": [{"l": [6, 4], "T": 10, "k": 2}, {"l": [5, 3], "T": 8, "k": 2}]}
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(manifest))
    code, out, _ = run_capture(capsys, ["verify", "--manifest", str(path), "--strict"])
    assert code == 0
    payload = json.loads(out)
    assert payload["mismatch_count"] == 0
    assert len(payload["reports"]) == 2


def test_verify_manifest_strict_divergence(tmp_path, capsys):
    manifest = {"specs": [{"l": [6, 4], "T": 10, "k": 1}]}
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(manifest))
    code, out, _ = run_capture(capsys, ["verify", "--manifest", str(path), "--strict"])
    assert code == 1
    assert json.loads(out)["mismatch_count"] > 0


def test_text_format_renders(game_file, capsys):
    code, out, _ = run_capture(capsys, ["solve", "--game", str(game_file), "--format", "text"])
    assert code == 0
    assert "minimax_regret: 1" in out
