import json

import pytest

from gibbs_shadows import cli
from gibbs_shadows.config import ConfigError, load_config, parse_config

GOOD = """
experiment = purity-scan
seed = 3
j = 0.5
delta = 0.7
n_grid = 2,3,4
beta_grid = 0.5,1.0
"""


class TestParsing:
    def test_valid_config_resolves_defaults(self):
        cfg = parse_config(GOOD)
        assert cfg["experiment"] == "purity-scan"
        assert cfg["n_grid"] == [2, 3, 4]
        assert cfg["beta_grid"] == [0.5, 1.0]

    def test_unknown_key_is_hard_error_with_line(self):
        text = GOOD + "typo_key = 3\n"
        with pytest.raises(ConfigError, match=r"line 8: unknown key 'typo_key'"):
            parse_config(text)

    def test_type_error_reports_line(self):
        text = GOOD.replace("seed = 3", "seed = three")
        with pytest.raises(ConfigError, match=r"line 3: expected int"):
            parse_config(text)

    def test_missing_required_key(self):
        text = GOOD.replace("beta_grid = 0.5,1.0", "")
        with pytest.raises(ConfigError, match="missing required key 'beta_grid'"):
            parse_config(text)

    def test_unknown_experiment(self):
        with pytest.raises(ConfigError, match="unknown experiment"):
            parse_config("experiment = flux-capacitor\n")

    def test_missing_experiment(self):
        with pytest.raises(ConfigError, match="missing required key 'experiment'"):
            parse_config("seed = 1\n")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate key"):
            parse_config("experiment = purity-scan\nseed = 1\nseed = 2\n")

    def test_bad_choice_value(self):
        text = """
experiment = tpq-degree-sweep
n = 4
beta_grid = 1.0
degree_grid = 4,8
window = guess
"""
        with pytest.raises(ConfigError, match="must be one of"):
            parse_config(text)

    def test_comments_and_blanks_ignored(self):
        cfg = parse_config("# heading\n\n" + GOOD)
        assert cfg["seed"] == 3

    def test_malformed_line(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_config("just some words\n")


class TestCli:
    def _write(self, tmp_path, text):
        path = tmp_path / "cfg.txt"
        path.write_text(text)
        return path

    def test_happy_path_exit_zero(self, tmp_path):
        cfg = self._write(
            tmp_path,
            "experiment = purity-scan\nn_grid = 2,3\nbeta_grid = 0.5,1.0\n",
        )
        rc = cli.main(["purity-scan", "--config", str(cfg), "--out", str(tmp_path / "out")])
        assert rc == 0
        assert (tmp_path / "out" / "purity-scan.csv").exists()
        meta = json.loads((tmp_path / "out" / "purity-scan.meta.json").read_text())
        assert meta["seed"] == 0
        assert meta["config"]["experiment"] == "purity-scan"
        assert "wall_time_s" in meta and "version" in meta

    def test_config_error_exit_two(self, tmp_path):
        cfg = self._write(tmp_path, "experiment = purity-scan\nn_grid = 2\n")
        rc = cli.main(["purity-scan", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_missing_config_file_exit_two(self, tmp_path):
        rc = cli.main(["purity-scan", "--config", str(tmp_path / "nope.cfg")])
        assert rc == 2

    def test_subcommand_experiment_mismatch_exit_two(self, tmp_path):
        cfg = self._write(
            tmp_path, "experiment = purity-scan\nn_grid = 2\nbeta_grid = 1.0\n"
        )
        rc = cli.main(["tpq-sweep", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_seed_override_recorded(self, tmp_path):
        cfg = self._write(
            tmp_path, "experiment = purity-scan\nn_grid = 2\nbeta_grid = 1.0\n"
        )
        rc = cli.main(
            ["purity-scan", "--config", str(cfg), "--seed", "77", "--out", str(tmp_path / "o")]
        )
        assert rc == 0
        meta = json.loads((tmp_path / "o" / "purity-scan.meta.json").read_text())
        assert meta["seed"] == 77
