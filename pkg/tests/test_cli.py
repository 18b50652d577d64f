import json

import numpy as np
import pytest

from masc.cli import main
from masc.data import Dataset, save_dataset, save_gallery


@pytest.fixture
def blob_csv(tmp_path):
    rng = np.random.default_rng(0)
    ds = Dataset(
        labeled=np.vstack([rng.normal(size=(6, 3)), rng.normal(size=(6, 3)) + 9.0]),
        labeled_classes=[1] * 6 + [2] * 6,
        observations=rng.normal(size=(5, 3), scale=0.4) + 9.0,
        c=2,
    )
    path = tmp_path / "blobs.csv"
    save_dataset(ds, path)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestClassify:
    def test_json_schema_and_decision(self, capsys, blob_csv):
        code, out, err = run(capsys, "classify", "--classifier", "masc", "--k", "3",
                             "--input", blob_csv)
        assert code == 0
        payload = json.loads(out)
        assert list(payload) == ["classifier", "decision", "scores", "tie",
                                 "n", "l", "m", "c", "seed"]
        assert payload["decision"] == 2
        assert payload["n"] == 17 and payload["l"] == 12 and payload["m"] == 5
        assert len(payload["scores"]) == 2
        assert "decision" in err

    @pytest.mark.parametrize("name", ["lp", "msm", "kmsm", "kld"])
    def test_all_classifiers_run(self, capsys, blob_csv, name):
        code, out, _ = run(capsys, "classify", "--classifier", name, "--k", "3",
                           "--q", "2", "--input", blob_csv)
        assert code == 0
        assert json.loads(out)["decision"] == 2

    def test_k_zero_is_config_error(self, capsys, blob_csv):
        code, _, err = run(capsys, "classify", "--k", "0", "--input", blob_csv)
        assert code == 2
        assert "k >= 1" in err

    def test_missing_file_is_data_error(self, capsys):
        code, _, _ = run(capsys, "classify", "--input", "/nonexistent.csv")
        assert code == 3

    def test_malformed_file_is_data_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("#d=2,c=1\n1,0.5\n0,1.0,2.0\n", encoding="utf-8")
        code, _, err = run(capsys, "classify", "--input", str(bad))
        assert code == 3
        assert "line" in err

    def test_output_file_matches_stdout(self, capsys, blob_csv, tmp_path):
        out_path = tmp_path / "result.json"
        code, out, _ = run(capsys, "classify", "--input", blob_csv,
                           "--out", str(out_path))
        assert code == 0
        assert out_path.read_text(encoding="utf-8") == out


class TestConfigFile:
    def test_flags_override_file(self, capsys, blob_csv, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"k": 4, "classifier": "lp"}), encoding="utf-8")
        code, out, _ = run(capsys, "classify", "--config", str(cfg),
                           "--classifier", "masc", "--input", blob_csv)
        assert code == 0
        assert json.loads(out)["classifier"] == "masc"

    def test_unknown_field_rejected(self, capsys, blob_csv, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"kk": 4}), encoding="utf-8")
        code, _, err = run(capsys, "classify", "--config", str(cfg),
                           "--input", blob_csv)
        assert code == 2
        assert "unknown config field" in err


class TestSweep:
    def test_deterministic_csv(self, capsys):
        argv = ("sweep", "--fixture", "rotated-rasters", "--classes", "3",
                "--m-values", "4,6", "--trials", "2", "--seed", "0")
        code1, out1, _ = run(capsys, *argv)
        code2, out2, _ = run(capsys, *argv)
        assert code1 == code2 == 0
        assert out1 == out2
        lines = out1.strip().splitlines()
        assert lines[0] == "m,classifier,mean_error,std_error,trials,seed"
        assert len(lines) == 3

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "sweep", "--fixture", "rotated-rasters",
                           "--classes", "3", "--m-values", "4", "--trials", "1",
                           "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload[0]["m"] == 4

    def test_bad_m_values(self, capsys):
        code, _, err = run(capsys, "sweep", "--m-values", "4,x", "--trials", "1")
        assert code == 2
        assert "m-values" in err


class TestSessions:
    def make_session_files(self, tmp_path, seeds=(0, 1, 2)):
        paths = []
        for s in seeds:
            rng = np.random.default_rng(s)
            sets = [8.0 * np.eye(3)[c] + 0.3 * rng.normal(size=(10, 3))
                    for c in range(3)]
            path = tmp_path / f"session{s}.csv"
            save_gallery(sets, path)
            paths.append(str(path))
        return paths

    def test_pairs_mode(self, capsys, tmp_path):
        files = self.make_session_files(tmp_path)
        code, out, err = run(capsys, "sessions", "--classifier", "masc", "--k", "3",
                             "--r", "2", *files)
        assert code == 0
        payload = json.loads(out)
        assert payload["mode"] == "pairs"
        assert len(payload["errors"]) == 6
        assert payload["e_bar"] == 0.0
        assert "e_bar" in err

    def test_split_mode(self, capsys, tmp_path):
        files = self.make_session_files(tmp_path, seeds=(5,))
        code, out, _ = run(capsys, "sessions", "--mode", "split", "--train-count", "5",
                           "--trials", "3", "--k", "3", files[0])
        assert code == 0
        payload = json.loads(out)
        assert payload["mode"] == "split"
        assert payload["trials"] == 3
        assert payload["mean_error"] == 0.0

    def test_split_requires_train_count(self, capsys, tmp_path):
        files = self.make_session_files(tmp_path, seeds=(6,))
        code, _, err = run(capsys, "sessions", "--mode", "split", files[0])
        assert code == 2
        assert "train-count" in err

    def test_pairs_needs_two_files(self, capsys, tmp_path):
        files = self.make_session_files(tmp_path, seeds=(7,))
        code, _, _ = run(capsys, "sessions", files[0])
        assert code == 2


class TestSynthAndGraph:
    def test_synth_then_classify(self, capsys, tmp_path):
        fix = tmp_path / "fix.csv"
        code, out, _ = run(capsys, "synth", "--fixture", "rotated-rasters",
                           "--classes", "4", "--m", "10", "--true-class", "3",
                           "--seed", "1", "--out", str(fix))
        assert code == 0
        assert fix.read_text(encoding="utf-8") == out
        code, out, _ = run(capsys, "classify", "--input", str(fix))
        assert code == 0
        assert json.loads(out)["decision"] == 3

    def test_synth_gallery(self, capsys, tmp_path):
        code, out, _ = run(capsys, "synth", "--fixture", "curved-manifolds",
                           "--gallery", "8", "--seed", "2")
        assert code == 0
        assert out.startswith("#d=20,c=3\n")
        assert len(out.strip().splitlines()) == 1 + 3 * 8

    def test_synth_bad_class(self, capsys):
        code, _, _ = run(capsys, "synth", "--classes", "3", "--true-class", "9")
        assert code == 2

    def test_graph_dump(self, capsys, blob_csv):
        code, out, _ = run(capsys, "graph", "--input", blob_csv, "--k", "2")
        assert code == 0
        first = out.splitlines()[0].split()
        assert int(first[0]) < int(first[1])
        assert float(first[2]) > 0.0

    def test_graph_deterministic(self, capsys, blob_csv):
        _, out1, _ = run(capsys, "graph", "--input", blob_csv, "--k", "3")
        _, out2, _ = run(capsys, "graph", "--input", blob_csv, "--k", "3")
        assert out1 == out2


def test_defaults_pinned():
    from masc.cli import ExperimentConfig
    from masc.fixtures import RotatedRasterConfig

    cfg = ExperimentConfig()
    assert cfg.k == 5
    assert cfg.q == 9
    assert cfg.energy_cutoff == 0.96
    assert cfg.trials == 100
    assert cfg.mu == 1.0
    assert cfg.sigma is None and cfg.sigma_kernel is None  # median heuristic
    assert RotatedRasterConfig().theta_range == (-40.0, 40.0)


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert main(["classify", "--help"]) == 0


def test_unknown_subcommand_exits_two(capsys):
    assert main(["dance"]) == 2
