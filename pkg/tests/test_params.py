"""Tests for parameter bundles and the flat text tensor format."""

import numpy as np
import pytest

from aisp.errors import AnnotationParseError, ConsistencyError, ParameterError, ShapeError
from aisp.io.tensor_text import format_tensor, load_tensor, parse_tensor, save_tensor
from aisp.io.writer import read_json, write_json
from aisp.nn.attention import GamParams
from aisp.nn.head import DeepHeadConfig
from aisp.nn.params import MANIFEST_NAME, block_name, load_params, save_params
from aisp.nn.sppf import SppfConfig
from aisp.nn.tensor import Tensor


class TestTensorText:
    """Header line plus row-major values."""

    def test_format(self):
        text = format_tensor(Tensor(np.arange(6.0).reshape(2, 3)))
        assert text.splitlines() == ["2 3", "0 1 2 3 4 5"]

    def test_float64_survives_file_round_trip(self, tmp_path):
        data = np.random.default_rng(0).normal(size=(3, 2, 5))
        save_tensor(tmp_path / "t.txt", Tensor(data))
        np.testing.assert_array_equal(load_tensor(tmp_path / "t.txt").data, data)

    def test_scalar(self):
        assert parse_tensor("\n2.5\n").item() == 2.5

    def test_value_count_mismatch(self):
        with pytest.raises(ShapeError):
            parse_tensor("2 2\n1 2 3\n")

    def test_bad_header(self):
        with pytest.raises(AnnotationParseError) as exc:
            parse_tensor("two\n1 2\n", source="w.txt")
        assert "w.txt:1" in str(exc.value)

    def test_bad_value(self):
        with pytest.raises(AnnotationParseError):
            parse_tensor("2\n1 x\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_tensor(tmp_path / "missing.txt")


class TestParams:
    """Manifest plus one text file per tensor."""

    @pytest.mark.parametrize(
        "bundle",
        [
            GamParams.random(32, reduction_ratio=8, seed=1),
            SppfConfig.random(8, 4, 8, kernel=5, seed=2),
            DeepHeadConfig.random(16, 4, 2, seed=3),
        ],
        ids=["gam", "sppf", "deep_head"],
    )
    def test_save_load_round_trip(self, tmp_path, bundle):
        manifest = save_params(bundle, tmp_path, seed=42)
        assert manifest.name == MANIFEST_NAME

        loaded, seed = load_params(tmp_path)
        assert seed == 42
        assert type(loaded) is type(bundle)
        assert loaded.meta() == bundle.meta()
        for key, tensor in bundle.tensors().items():
            np.testing.assert_array_equal(loaded.tensors()[key].data, tensor.data)

    def test_shape_mismatch_is_consistency_error(self, tmp_path):
        save_params(SppfConfig.random(8, 4, 8), tmp_path)
        save_tensor(tmp_path / "entry.bias.txt", Tensor(np.zeros(5)))
        with pytest.raises(ConsistencyError):
            load_params(tmp_path)

    def test_unknown_block(self, tmp_path):
        save_params(SppfConfig.random(8, 4, 8), tmp_path)
        manifest = read_json(tmp_path / MANIFEST_NAME)
        manifest["block"] = "transformer"
        write_json(tmp_path / MANIFEST_NAME, manifest)
        with pytest.raises(ParameterError):
            load_params(tmp_path)

    def test_block_name(self):
        assert block_name(DeepHeadConfig.random(8, 2, 2)) == "deep_head"
        with pytest.raises(ParameterError):
            block_name(object())
