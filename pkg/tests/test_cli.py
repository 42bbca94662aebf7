import json

import pytest

from cfcsi.cli import main
from cfcsi.quantizer import load_codebook


@pytest.fixture()
def config_path(tmp_path):
    cfg = {
        "m_total": 4,
        "n_antennas": 2,
        "k_users": 2,
        "tau": 2,
        "bits_per_dim": 1,
        "trials": 2,
        "large_scale_realizations": 1,
        "n_training": 20,
        "master_seed": 3,
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


def test_run_writes_deterministic_csv(config_path, tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(["run", "--config", str(config_path), "--out", str(out1)]) == 0
    assert main(["run", "--config", str(config_path), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    lines = out1.read_text().strip().split("\n")
    assert len(lines) == 1 + 5  # header + one row per scheme


def test_run_seed_override_changes_results(config_path, tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    main(["run", "--config", str(config_path), "--out", str(out1)])
    main(["run", "--config", str(config_path), "--seed", "99", "--out", str(out2)])
    assert out1.read_bytes() != out2.read_bytes()


def test_sweep_csv_rows(config_path, tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(
        ["sweep", "--config", str(config_path), "--axis", "tx_power", "--values=-30,-20", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert len(lines) == 1 + 2 * 5


def test_invalid_config_exits_one(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"m_total": 5, "n_antennas": 2}))
    assert main(["run", "--config", str(bad)]) == 1


def test_missing_or_malformed_config_exits_one(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "absent.json")]) == 1
    garbled = tmp_path / "garbled.json"
    garbled.write_text("{not json")
    assert main(["run", "--config", str(garbled)]) == 1
    assert "error:" in capsys.readouterr().err


def test_invalid_sweep_value_exits_one(config_path):
    assert main(["sweep", "--config", str(config_path), "--axis", "antennas_per_ap", "--values", "3"]) == 1


def test_validate_exits_zero(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 4


def test_train_codebook(config_path, tmp_path):
    out = tmp_path / "cb.json"
    assert main(["train-codebook", "--config", str(config_path), "--out", str(out), "--kind", "qe"]) == 0
    book = load_codebook(out)
    assert book.dim == 2
    assert book.size == 2 ** (1 * 2)
