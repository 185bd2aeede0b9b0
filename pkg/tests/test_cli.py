"""Tests for the command-line interface."""

import json

import numpy as np
import pytest
from loguru import logger

from aisp import __version__
from aisp import cli
from aisp.cli import EXIT_DOMAIN_ERROR, EXIT_OK, EXIT_USAGE_ERROR, dispatch
from aisp.io.pgm import save_mask, write_pgm
from aisp.masks.raster import BinaryMask

CALIBRATION = """\
[intrinsics]
100 100 2 2
[hand_eye]
1 0 0 0 1 0 0 0 1
0 0 0
[ee_to_base]
1 0 0
0 1 0
0 0 1
0.1 0.2 0.3
"""


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    """Run every command in an empty directory so config and logs stay local."""
    monkeypatch.chdir(tmp_path)
    yield tmp_path
    logger.remove()


@pytest.fixture
def solid_mask(workdir):
    path = workdir / "mask.pgm"
    save_mask(path, BinaryMask(np.ones((5, 5), dtype=bool)))
    return path


def run_json(capsys, *argv):
    outcome = dispatch([*argv, "--json"])
    out = capsys.readouterr().out
    return outcome, json.loads(out)


class TestPickAndLocate:
    """Mask -> pixel -> base frame."""

    def test_pick(self, capsys, solid_mask):
        outcome, result = run_json(capsys, "pick", "--mask", str(solid_mask))
        assert outcome.exit_code == EXIT_OK
        assert result == {"x": 2, "y": 2, "clearance": 3.0}

    def test_pick_with_centroid(self, capsys, solid_mask):
        _, result = run_json(capsys, "pick", "--mask", str(solid_mask), "--centroid")
        assert result["centroid"] == {"x": 2.5, "y": 2.5}

    def test_pick_writes_output_file(self, capsys, solid_mask, workdir):
        outcome = dispatch(["pick", "--mask", str(solid_mask), "--output", "out/pick.json"])
        assert outcome.ok
        assert json.loads((workdir / "out" / "pick.json").read_text())["clearance"] == 3.0

    def test_empty_mask_is_domain_error(self, capsys, workdir):
        path = workdir / "empty.pgm"
        save_mask(path, BinaryMask(np.zeros((4, 4), dtype=bool)))
        outcome, result = run_json(capsys, "pick", "--mask", str(path))
        assert outcome.exit_code == EXIT_DOMAIN_ERROR
        assert result["error"] == "EmptyMaskError"
        assert result["message"]

    def test_missing_file_is_domain_error(self, capsys):
        outcome, result = run_json(capsys, "pick", "--mask", "nope.pgm")
        assert outcome.exit_code == EXIT_DOMAIN_ERROR
        assert result["error"] == "FileNotFoundError"

    def test_locate(self, capsys, workdir):
        (workdir / "cal.txt").write_text(CALIBRATION)
        write_pgm(workdir / "depth.pgm", np.full((5, 5), 500, dtype=np.uint16), maxval=65535)
        outcome, result = run_json(
            capsys, "locate", "--calibration", "cal.txt", "--depth", "depth.pgm", "--x", "2", "--y", "2"
        )
        assert outcome.exit_code == EXIT_OK
        assert result["depth"] == pytest.approx(0.5)
        assert result["depth_fallback"] is False
        base = result["base"]
        assert (base["x"], base["y"], base["z"]) == (
            pytest.approx(0.1),
            pytest.approx(0.2),
            pytest.approx(0.8),
        )
        assert base["frame"] == "base"

    def test_locate_needs_a_pixel(self, capsys, workdir):
        (workdir / "cal.txt").write_text(CALIBRATION)
        write_pgm(workdir / "depth.pgm", np.full((5, 5), 500, dtype=np.uint16), maxval=65535)
        outcome, result = run_json(capsys, "locate", "--calibration", "cal.txt", "--depth", "depth.pgm")
        assert outcome.exit_code == EXIT_DOMAIN_ERROR
        assert result["error"] == "ParameterError"


class TestPlan:
    def test_plan_waypoints(self, capsys):
        outcome, result = run_json(capsys, "plan", "--target", "0.5", "0.0", "0.3", "--samples", "5")
        assert outcome.exit_code == EXIT_OK
        assert set(result["schedule"]) == {"pre_grasp_to_grasp"}
        assert len(result["schedule"]["pre_grasp_to_grasp"]) == 5

    def test_plan_with_home(self, capsys):
        _, result = run_json(capsys, "plan", "--target", "0.5", "0.0", "0.3", "--home", "0.2", "0.0", "0.6")
        assert list(result["schedule"]) == ["home_to_pre_grasp", "pre_grasp_to_grasp"]


class TestReports:
    """harvest-report and correlate."""

    def test_harvest_from_counts(self, capsys):
        outcome, result = run_json(capsys, "harvest-report", "--picked", "50,46,26,12", "--total", "54")
        assert outcome.exit_code == EXIT_OK
        (model,) = result["models"]
        assert [model["per_level"][k]["percent"] for k in ("zero", "low", "medium", "high")] == [
            "92.59",
            "85.18",
            "48.14",
            "22.22",
        ]

    def test_harvest_compare(self, capsys, workdir):
        (workdir / "log.csv").write_text(
            "model,level,n_picked,n_total\n"
            "B,zero,52,54\nB,low,46,54\nB,medium,24,54\nB,high,10,54\n"
            "G-D-A,zero,50,54\nG-D-A,low,46,54\nG-D-A,medium,26,54\nG-D-A,high,12,54\n"
        )
        _, result = run_json(capsys, "harvest-report", "--log", "log.csv", "--compare")
        assert result["compare"]["G-D-A"]["high"] == pytest.approx(200 / 54)
        assert result["compare"]["G-D-A"]["low"] == 0.0

    def test_harvest_wrong_count(self, capsys):
        outcome, result = run_json(capsys, "harvest-report", "--picked", "50,46", "--total", "54")
        assert outcome.exit_code == EXIT_DOMAIN_ERROR
        assert result["error"] == "ParameterError"

    def test_correlate(self, capsys, workdir):
        (workdir / "pairs.json").write_text(
            json.dumps({"x": [0.872, 0.888, 0.569, 0.372], "y": [92.59, 85.18, 48.14, 22.22]})
        )
        outcome, result = run_json(capsys, "correlate", "--pairs", "pairs.json")
        assert outcome.exit_code == EXIT_OK
        assert result["r2"] == pytest.approx(0.986, abs=1e-3)
        assert result["n"] == 4

    def test_correlate_degenerate(self, capsys, workdir):
        (workdir / "pairs.json").write_text(json.dumps({"x": [1, 1, 1], "y": [1, 2, 3]}))
        outcome, result = run_json(capsys, "correlate", "--pairs", "pairs.json")
        assert outcome.exit_code == EXIT_DOMAIN_ERROR
        assert result["error"] == "DegenerateInputError"


class TestDatasetCommands:
    def test_synth_writes_scene(self, capsys, workdir):
        outcome, result = run_json(capsys, "synth", "--output-dir", "scenes", "--seed", "3")
        assert outcome.exit_code == EXIT_OK
        assert [f["level"] for f in result["scenes"][0]["fruits"]] == ["zero", "low", "medium", "high"]
        assert (workdir / "scenes" / "annotations.json").exists()
        assert (workdir / "scenes" / "masks" / "synth_3_0_amodal.pgm").exists()

    def test_augment_synth_scene(self, capsys, workdir):
        dispatch(["synth", "--output-dir", "scenes", "--json"])
        capsys.readouterr()
        outcome, result = run_json(
            capsys, "augment", "--annotations", "scenes/annotations.json", "--output-dir", "aug", "--variants", "1"
        )
        assert outcome.exit_code == EXIT_OK
        assert result["images"] == 2
        assert (workdir / "aug" / "synth_0_aug1.pgm").exists()


class TestNnCheck:
    def test_law_checks_pass(self, capsys):
        outcome, result = run_json(capsys, "nn-check", "--variant", "G-D-A", "--category", "law")
        assert outcome.exit_code == EXIT_OK
        assert result["passed"] is True
        assert [c["name"] for c in result["checks"]] == ["law.asymmetric_loss_ratio"]

    def test_unknown_variant(self, capsys):
        outcome, result = run_json(capsys, "nn-check", "--variant", "X-1")
        assert outcome.exit_code == EXIT_DOMAIN_ERROR
        assert result["error"] == "ParameterError"


class TestDispatch:
    """Exit codes."""

    def test_unknown_command(self, capsys):
        assert dispatch(["frobnicate"]).exit_code == EXIT_USAGE_ERROR

    def test_unknown_flag(self, capsys, solid_mask):
        assert dispatch(["pick", "--mask", str(solid_mask), "--bogus"]).exit_code == EXIT_USAGE_ERROR

    def test_missing_required_option(self, capsys):
        assert dispatch(["pick"]).exit_code == EXIT_USAGE_ERROR

    def test_version(self, capsys):
        outcome = dispatch(["version"])
        assert outcome.exit_code == EXIT_OK
        assert outcome.result == {"version": __version__}
        assert __version__ in capsys.readouterr().out

    def test_help(self, capsys):
        assert dispatch(["--help"]).exit_code == EXIT_OK

    def test_config_is_not_a_flag(self, capsys, solid_mask):
        assert dispatch(["pick", "--mask", str(solid_mask), "--cfg", "x"]).exit_code == EXIT_USAGE_ERROR


class TestConfigLoading:
    """One config load per command, handed to the command body."""

    @pytest.fixture
    def load_calls(self, monkeypatch):
        calls = []
        original = cli.load_config

        def counting(path=None):
            calls.append(path)
            return original(path)

        monkeypatch.setattr(cli, "load_config", counting)
        return calls

    @pytest.mark.parametrize(
        "argv",
        [
            ["plan", "--target", "0.5", "0.0", "0.3"],
            ["nn-check", "--category", "law"],
            ["synth", "--output-dir", "scenes"],
        ],
    )
    def test_loaded_once(self, capsys, load_calls, argv):
        assert dispatch(argv).exit_code == EXIT_OK
        assert len(load_calls) == 1

    def test_loaded_config_reaches_command(self, capsys, load_calls, solid_mask, workdir):
        """A neutral border on a mask without background is rejected."""
        path = workdir / "neutral.yml"
        path.write_text("masks:\n  border_policy: border-is-neutral\n")
        outcome, result = run_json(capsys, "pick", "--mask", str(solid_mask), "--config", str(path))
        assert outcome.exit_code == EXIT_DOMAIN_ERROR
        assert result["error"] == "ParameterError"
        assert load_calls == [path]
