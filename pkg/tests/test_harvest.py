"""Tests for harvest success, harvest log files and correlation."""

from fractions import Fraction

import pandas as pd
import pytest

from aisp.errors import (
    AnnotationParseError,
    ConsistencyError,
    DegenerateInputError,
    ParameterError,
    UndefinedLevelError,
)
from aisp.io.reader import read_harvest_log, read_pairs
from aisp.metrics.correlation import correlate, fit_line
from aisp.metrics.harvest import (
    HarvestCount,
    HarvestLog,
    compare_harvest,
    format_percent,
    harvest_success,
    logs_from_frame,
)
from aisp.metrics.occlusion import OcclusionLevel as L


def make_log(model, picked, total=54):
    return HarvestLog(model, {level: HarvestCount(p, total) for level, p in zip(L, picked)})


@pytest.fixture
def improved():
    return make_log("G-D-A", [50, 46, 26, 12])


@pytest.fixture
def baseline():
    return make_log("B", [52, 46, 24, 10])


class TestHarvestSuccess:
    """Per-level ratios and truncated percentages."""

    def test_field_trial_percentages(self, improved, baseline):
        a = harvest_success(improved)
        b = harvest_success(baseline)
        assert [s.percent for s in a.per_level.values()] == ["92.59", "85.18", "48.14", "22.22"]
        assert [s.percent for s in b.per_level.values()] == ["96.29", "85.18", "44.44", "18.51"]

    def test_overall(self, improved):
        report = harvest_success(improved)
        assert report.overall.ratio == Fraction(134, 216)
        assert report.overall.n_total == 216

    @pytest.mark.parametrize(
        "ratio,text",
        [(Fraction(1), "100.00"), (Fraction(0), "0.00"), (Fraction(1, 3), "33.33"), (Fraction(2, 3), "66.66")],
    )
    def test_percent_is_truncated(self, ratio, text):
        assert format_percent(ratio) == text

    def test_compare(self, improved, baseline):
        delta = compare_harvest(harvest_success(baseline), harvest_success(improved))
        assert delta[L.ZERO] == Fraction(-200, 54)
        assert delta[L.LOW] == 0
        assert delta[L.HIGH] == Fraction(200, 54)

    def test_level_without_trials(self):
        log = HarvestLog("m", {L.ZERO: HarvestCount(3, 4), L.HIGH: HarvestCount(0, 0)})
        with pytest.raises(UndefinedLevelError):
            harvest_success(log)

    def test_empty_log(self):
        with pytest.raises(UndefinedLevelError):
            harvest_success(HarvestLog("m", {}))

    def test_count_validation(self):
        with pytest.raises(ConsistencyError):
            HarvestCount(5, 4)
        with pytest.raises(ParameterError):
            HarvestCount(-1, 4)
        with pytest.raises(ConsistencyError):
            HarvestCount(2, 4, detection_failures=1, localisation_failures=2)
        assert HarvestCount(2, 4, detection_failures=1, localisation_failures=1).ratio == Fraction(1, 2)

    def test_report_frames(self, improved):
        frame = harvest_success(improved).to_frame()
        assert list(frame["level"]) == ["Z", "L", "M", "H"]
        assert list(frame["H (%)"]) == ["92.59", "85.18", "48.14", "22.22"]
        d = harvest_success(improved).as_dict()
        assert d["per_level"]["high"]["percent"] == "22.22"


class TestHarvestLogFrames:
    """Schema-validated tables."""

    def test_frame_round_trip(self, improved):
        logs = logs_from_frame(improved.to_frame())
        assert len(logs) == 1
        assert logs[0].levels[L.MEDIUM] == HarvestCount(26, 54)

    def test_models_keep_order(self, improved, baseline):
        frame = pd.concat([baseline.to_frame(), improved.to_frame()], ignore_index=True)
        assert [log.model for log in logs_from_frame(frame)] == ["B", "G-D-A"]

    def test_read_csv(self, tmp_path):
        path = tmp_path / "log.csv"
        path.write_text(
            "model, level, n_picked, n_total, detection_failures, localisation_failures\n"
            "G-D-A, Zero, 50, 54, 1, 3\n"
            "G-D-A, high, 12, 54, ,\n"
        )
        (log,) = read_harvest_log(path)
        assert log.levels[L.ZERO].detection_failures == 1
        assert log.levels[L.HIGH].localisation_failures is None
        assert harvest_success(log).per_level[L.ZERO].percent == "92.59"

    def test_picked_over_total_rejected(self, tmp_path):
        path = tmp_path / "log.csv"
        path.write_text("model,level,n_picked,n_total\nB,low,9,8\n")
        with pytest.raises(ConsistencyError):
            read_harvest_log(path)

    def test_duplicate_level_rejected(self, tmp_path):
        path = tmp_path / "log.csv"
        path.write_text("model,level,n_picked,n_total\nB,low,1,8\nB,low,2,8\n")
        with pytest.raises(ConsistencyError):
            read_harvest_log(path)

    def test_unknown_level_rejected(self, tmp_path):
        path = tmp_path / "log.csv"
        path.write_text("model,level,n_picked,n_total\nB,partial,1,8\n")
        with pytest.raises(ConsistencyError):
            read_harvest_log(path)

    def test_latin1_fallback(self, tmp_path):
        path = tmp_path / "log.csv"
        path.write_bytes("model,level,n_picked,n_total\nmodèle,low,1,2\n".encode("latin-1"))
        (log,) = read_harvest_log(path)
        assert log.model == "modèle"

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_harvest_log(tmp_path / "nope.csv")


class TestCorrelation:
    """Least squares and R^2."""

    def test_map_vs_harvest(self):
        r2 = correlate([0.872, 0.888, 0.569, 0.372], [92.59, 85.18, 48.14, 22.22])
        assert r2 == pytest.approx(0.986, abs=1e-3)

    def test_perfect_line(self):
        fit = fit_line([0, 1, 2, 3], [1, 3, 5, 7])
        assert (fit.slope, fit.intercept, fit.r2, fit.n) == (2.0, 1.0, 1.0, 4)

    def test_symmetric(self):
        x, y = [1, 2, 4, 7], [2, 1, 5, 6]
        assert correlate(x, y) == pytest.approx(correlate(y, x))

    def test_degenerate(self):
        with pytest.raises(DegenerateInputError):
            fit_line([1, 1, 1], [1, 2, 3])
        with pytest.raises(DegenerateInputError):
            fit_line([1, 2, 3], [4, 4, 4])

    @pytest.mark.parametrize("x,y", [([1, 2], [1]), ([1], [1]), ([1, float("nan")], [1, 2])])
    def test_bad_input(self, x, y):
        with pytest.raises(ParameterError):
            fit_line(x, y)

    @pytest.mark.parametrize(
        "content",
        ['{"x": [1, 2, 3], "y": [2, 4, 7]}', "[[1, 2], [2, 4], [3, 7]]", '{"pairs": [[1, 2], [2, 4], [3, 7]]}'],
    )
    def test_read_pairs_layouts(self, tmp_path, content):
        path = tmp_path / "pairs.json"
        path.write_text(content)
        assert read_pairs(path) == ([1.0, 2.0, 3.0], [2.0, 4.0, 7.0])

    def test_read_pairs_bad_json(self, tmp_path):
        path = tmp_path / "pairs.json"
        path.write_text('{"x": [1, 2,\n  }')
        with pytest.raises(AnnotationParseError) as exc:
            read_pairs(path)
        assert str(path) in exc.value.location

    def test_read_pairs_wrong_layout(self, tmp_path):
        path = tmp_path / "pairs.json"
        path.write_text('{"a": 1}')
        with pytest.raises(AnnotationParseError):
            read_pairs(path)
