"""
Unit tests for configuration, the experiment framework, logging helpers and the CLI.
"""

import json
import logging
import math
import sys
import tempfile
import unittest
from pathlib import Path

import numpy as np
from pydantic import ValidationError

# Add the parent directory to the Python path
sys.path.append(str(Path(__file__).parent.parent))

from src.cli import EXIT_INVALID_CONFIG, EXIT_OK, EXIT_RUNTIME, main
from src.config.config_manager import ConfigManager, ExperimentConfig, config_hash
from src.framework import MANIFEST_NAME, SUMMARY_NAME, ExperimentFramework, summarize_runs
from src.utils.episode_log import EPISODE_COLUMNS, EpisodeLog
from src.utils.logging_utils import log_error, log_run_event, setup_logger


def random_search_data(output_dir: str) -> dict:
    return {
        "task": "random-search",
        "problem": {"kind": "vqsd", "state": {"source": "random", "n_qubits": 1, "seed": 3}},
        "env": {"max_steps": 3, "threshold": 1e-4},
        "optimizer": {"method": "simplex", "budget": 40},
        "seeds": [5],
        "episodes": 2,
        "checkpoint_every": 1,
        "output_dir": output_dir,
    }


def write_config(directory: Path, data: dict, name: str = "config.json") -> Path:
    path = directory / name
    path.write_text(json.dumps(data))
    return path


class TestExperimentConfig(unittest.TestCase):
    """Test cases for experiment config validation."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.root = Path(self.temp_dir.name)

    def tearDown(self):
        self.temp_dir.cleanup()

    def test_valid_config(self):
        config = ExperimentConfig.model_validate(random_search_data("runs"))
        self.assertEqual(config.problem_kind, "vqsd")
        self.assertEqual(config.env.depth_slices, 3)

    def test_seeds_must_be_distinct_and_present(self):
        for seeds in ([], [1, 1]):
            data = random_search_data("runs")
            data["seeds"] = seeds
            with self.assertRaises(ValidationError):
                ExperimentConfig.model_validate(data)

    def test_missing_problem_parts(self):
        data = random_search_data("runs")
        data["task"] = "vqe"
        with self.assertRaises(ValidationError):
            ExperimentConfig.model_validate(data)
        data = random_search_data("runs")
        del data["problem"]["kind"]
        with self.assertRaises(ValidationError):
            ExperimentConfig.model_validate(data)

    def test_unknown_presets(self):
        data = random_search_data("runs")
        data["optimizer"] = {"method": "spsa", "preset": "no-such-preset"}
        with self.assertRaises(ValidationError):
            ExperimentConfig.model_validate(data)
        data = random_search_data("runs")
        data["noise"] = {"preset": "no-such-device"}
        with self.assertRaises(ValidationError):
            ExperimentConfig.model_validate(data)

    def test_preset_shots_fill_noise_model(self):
        data = random_search_data("runs")
        data["optimizer"] = {"method": "adam_spsa", "budget": 500, "preset": "H2-2"}
        self.assertIsNone(ExperimentConfig.model_validate(data).noise_spec())
        data["noise"] = {"one_qubit_depolarizing": 0.01}
        self.assertEqual(ExperimentConfig.model_validate(data).noise_spec().shots, 10 ** 3)
        data["noise"]["shots"] = 50
        self.assertEqual(ExperimentConfig.model_validate(data).noise_spec().shots, 50)
        data["optimizer"] = {"method": "simplex", "budget": 40}
        del data["noise"]["shots"]
        self.assertIsNone(ExperimentConfig.model_validate(data).noise_spec().shots)

    def test_relative_paths_resolve_against_config_dir(self):
        (self.root / "h.txt").write_text("1.0 ZZ\n")
        data = random_search_data("runs")
        data["task"] = "vqe"
        data["problem"] = {"hamiltonian": {"source": "file", "path": "h.txt"}}
        config = ConfigManager.load_from_file(write_config(self.root, data))
        self.assertEqual(Path(config.problem.hamiltonian.path), (self.root / "h.txt").resolve())

    def test_missing_referenced_file(self):
        data = random_search_data("runs")
        data["task"] = "vqe"
        data["problem"] = {"hamiltonian": {"source": "file", "path": "absent.txt"}}
        with self.assertRaises(ValidationError):
            ConfigManager.load_from_file(write_config(self.root, data))

    def test_missing_config_file(self):
        with self.assertRaises(FileNotFoundError):
            ConfigManager.load_from_file(self.root / "absent.json")

    def test_config_hash_is_stable(self):
        a = ExperimentConfig.model_validate(random_search_data("runs"))
        b = ExperimentConfig.model_validate(random_search_data("runs"))
        self.assertEqual(config_hash(a), config_hash(b))
        c = ExperimentConfig.model_validate({**random_search_data("runs"), "episodes": 3})
        self.assertNotEqual(config_hash(a), config_hash(c))

    def test_save_and_reload(self):
        manager = ConfigManager(write_config(self.root, random_search_data("runs")))
        path = self.root / "saved.json"
        manager.save_config(path)
        self.assertEqual(config_hash(ConfigManager.load_from_file(path)), config_hash(manager.get_config()))

    def test_shipped_configs_validate(self):
        for path in sorted((Path(__file__).parent.parent / "configs").glob("*.json")):
            with self.subTest(config=path.name):
                ConfigManager.load_from_file(path)


class TestExperimentFramework(unittest.TestCase):
    """Test cases for running experiments end to end."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.root = Path(self.temp_dir.name)

    def tearDown(self):
        self.temp_dir.cleanup()

    def test_random_search_run(self):
        config = ExperimentConfig.model_validate(random_search_data(str(self.root / "out")))
        framework = ExperimentFramework(config)
        summaries = framework.run()
        self.assertEqual(len(summaries), 1)
        out = self.root / "out"
        manifest = json.loads((out / MANIFEST_NAME).read_text())
        self.assertEqual(manifest["config_hash"], config_hash(config))
        self.assertIsNotNone(manifest["finished_at"])
        train = EpisodeLog(out / "seed_5" / "train.csv").read()
        self.assertEqual(list(train["episode"]), [1, 2])
        summary = summarize_runs(out)
        self.assertEqual(list(summary["phase"]), ["train"])
        self.assertTrue((out / SUMMARY_NAME).exists())

    def test_certify_run(self):
        gamma = 0.1
        data = {
            "task": "certify",
            "problem": {
                "ideal": {"kind": "identity", "n_qubits": 1},
                "candidate": {"kind": "depolarizing", "n_qubits": 1, "gamma": gamma},
                "certification": {"engine": "lhea", "layers": 1, "ranks": [1, 4]},
            },
            "optimizer": {"method": "simplex", "budget": 200},
            "seeds": [1],
            "output_dir": str(self.root / "cert"),
        }
        summaries = ExperimentFramework(ExperimentConfig.model_validate(data)).run()
        self.assertAlmostEqual(summaries[0]["exact_fidelity"], math.sqrt(1 - 3 * gamma / 4), places=6)
        report = json.loads((self.root / "cert" / "seed_1" / "certification.json").read_text())
        self.assertEqual([b["m"] for b in report["bounds"]], [1, 4])

    def test_summarize_without_logs(self):
        with self.assertRaises(FileNotFoundError):
            summarize_runs(self.root)


class TestEpisodeLog(unittest.TestCase):
    """Test cases for the episode CSV."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.log = EpisodeLog(Path(self.temp_dir.name) / "seed_1" / "train.csv")

    def tearDown(self):
        self.temp_dir.cleanup()

    def row(self, episode: int) -> dict:
        row = {c: 0 for c in EPISODE_COLUMNS}
        row.update(episode=episode, success=False)
        return row

    def test_append_and_truncate(self):
        for episode in range(1, 5):
            self.log.append(self.row(episode))
        self.assertEqual(self.log.truncate(2), 2)
        self.assertEqual(list(self.log.read()["episode"]), [1, 2])
        self.assertEqual(self.log.truncate(2), 0)

    def test_missing_columns(self):
        with self.assertRaises(ValueError):
            self.log.append({"episode": 1})

    def test_header_only(self):
        self.log.ensure_header()
        self.assertEqual(list(self.log.read().columns), EPISODE_COLUMNS)
        self.assertEqual(len(self.log.read()), 0)


class TestLoggingUtils(unittest.TestCase):
    """Test cases for the logging helpers."""

    def test_setup_logger_levels_and_file(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            log_file = str(Path(temp_dir) / "logs" / "run.log")
            logger = setup_logger("qas_test", level="debug", log_file=log_file)
            self.assertEqual(logger.level, logging.DEBUG)
            self.assertEqual(len(logger.handlers), 2)
            log_run_event(logger, "checkpoint", {"episode": 3})
            log_error(logger, "ValueError", "boom", {"seed": 1})
            for handler in logger.handlers:
                handler.flush()
            text = Path(log_file).read_text()
            self.assertIn("RUN_EVENT", text)
            self.assertIn("boom", text)
            for handler in logger.handlers[:]:
                handler.close()
                logger.removeHandler(handler)

    def test_unknown_level_falls_back_to_info(self):
        logger = setup_logger("qas_test_level", level="chatty")
        self.assertEqual(logger.level, logging.INFO)


class TestCli(unittest.TestCase):
    """Test cases for the command-line interface."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.root = Path(self.temp_dir.name)

    def tearDown(self):
        self.temp_dir.cleanup()

    def test_validate_config(self):
        path = write_config(self.root, random_search_data(str(self.root / "out")))
        self.assertEqual(main(["validate-config", "--config", str(path), "-q"]), EXIT_OK)

    def test_invalid_and_missing_configs(self):
        data = random_search_data("runs")
        data["seeds"] = []
        path = write_config(self.root, data)
        self.assertEqual(main(["validate-config", "--config", str(path), "-q"]), EXIT_INVALID_CONFIG)
        self.assertEqual(main(["run", "--config", str(self.root / "absent.json"), "-q"]), EXIT_INVALID_CONFIG)
        self.assertEqual(main(["run", "-q"]), EXIT_INVALID_CONFIG)
        self.assertEqual(main([]), EXIT_INVALID_CONFIG)

    def test_run_then_report(self):
        path = write_config(self.root, random_search_data(str(self.root / "out")))
        self.assertEqual(main(["run", "--config", str(path), "-q"]), EXIT_OK)
        (self.root / "out" / SUMMARY_NAME).unlink()
        self.assertEqual(main(["report", "--out", str(self.root / "out"), "-q"]), EXIT_OK)
        self.assertTrue((self.root / "out" / SUMMARY_NAME).exists())

    def test_seed_override(self):
        path = write_config(self.root, random_search_data(str(self.root / "out")))
        self.assertEqual(main(["run", "--config", str(path), "--seed-override", "9", "-q"]), EXIT_OK)
        self.assertTrue((self.root / "out" / "seed_9" / "train.csv").exists())
        self.assertFalse((self.root / "out" / "seed_5").exists())

    def test_runtime_error(self):
        np.save(self.root / "bad.npy", np.eye(3))
        data = random_search_data(str(self.root / "out"))
        data["problem"]["state"] = {"source": "file", "path": "bad.npy"}
        path = write_config(self.root, data)
        self.assertEqual(main(["run", "--config", str(path), "-q"]), EXIT_RUNTIME)


if __name__ == "__main__":
    unittest.main()
