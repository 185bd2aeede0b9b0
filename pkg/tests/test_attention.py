"""Tests for the global attention block."""

import numpy as np
import pytest

from aisp.errors import ParameterError, ShapeError
from aisp.nn.attention import (
    GamParams,
    gam_channel_attention,
    gam_forward,
    gam_spatial_attention,
    hidden_width,
    mlp_channel,
)
from aisp.nn.gradcheck import grad_check
from aisp.nn.tensor import Tensor, combine, sigmoid_map, tensor_sum


@pytest.fixture
def params():
    return GamParams.random(16, reduction_ratio=16, seed=0)


@pytest.fixture
def feature_map():
    return np.random.default_rng(1).normal(size=(16, 6, 6))


class TestHiddenWidth:
    """Bottleneck sizing."""

    def test_regular_ratio(self):
        assert hidden_width(512, 16) == 32
        assert hidden_width(16, 16) == 1

    def test_clamped_when_channels_below_ratio(self):
        assert hidden_width(8, 16, clamp=True) == 1

    def test_rejected_without_clamp(self):
        with pytest.raises(ParameterError):
            hidden_width(8, 16, clamp=False)


class TestGamForward:
    """Channel then spatial attention."""

    def test_shape_preserved(self, params, feature_map):
        out = gam_forward(Tensor(feature_map), params)
        assert out.shape == feature_map.shape

    def test_attention_weights_in_unit_interval(self, params, feature_map):
        f = Tensor(feature_map)
        mc = gam_channel_attention(f, params)
        ms = gam_spatial_attention(f, params)
        assert mc.shape == (16,)
        assert ms.shape == (1, 6, 6)
        assert np.all((mc.data > 0) & (mc.data < 1))
        assert np.all((ms.data > 0) & (ms.data < 1))

    @pytest.mark.parametrize("level", [1e4, -1e4])
    def test_attention_on_saturating_input_stays_inside_unit_interval(self, params, level):
        """Huge activations drive the logits into the range where the logistic rounds."""
        f = Tensor(np.full((16, 6, 6), level))
        mc = gam_channel_attention(f, params)
        ms = gam_spatial_attention(f, params)
        assert np.all((mc.data > 0) & (mc.data < 1))
        assert np.all((ms.data > 0) & (ms.data < 1))

    def test_output_never_amplifies(self, params, feature_map):
        """Both attention maps are gates, so |F3| <= |F1| everywhere."""
        out = gam_forward(Tensor(feature_map), params)
        assert np.all(np.abs(out.data) <= np.abs(feature_map) + 1e-15)

    def test_shared_mlp_on_constant_map(self, params):
        """Avg and max descriptors coincide on a constant map; the same MLP sees both."""
        f = Tensor(np.full((16, 4, 4), 0.3))
        z = Tensor(np.full(16, 0.3))
        mlp_out = mlp_channel(z, params.mlp)
        expected = sigmoid_map(combine(mlp_out, mlp_out, "add")).data
        np.testing.assert_allclose(gam_channel_attention(f, params).data, expected)

    def test_wrong_channel_count(self, params):
        with pytest.raises(ShapeError):
            gam_forward(Tensor(np.zeros((8, 6, 6))), params)

    def test_gradient_check(self, params, feature_map):
        weights = np.random.default_rng(2).normal(size=feature_map.shape)
        report = grad_check(
            lambda x: tensor_sum(combine(gam_forward(x, params), Tensor(weights), "mul")),
            feature_map,
        )
        assert report.passed, report.as_dict()


class TestGamParams:
    """Initialisation and tensor bundles."""

    def test_seeded_random_is_deterministic(self):
        a = GamParams.random(16, seed=5)
        b = GamParams.random(16, seed=5)
        for key, tensor in a.tensors().items():
            np.testing.assert_array_equal(tensor.data, b.tensors()[key].data)

    def test_from_tensors_round_trip(self, params):
        rebuilt = GamParams.from_tensors(params.tensors(), params.meta())
        assert rebuilt.reduction_ratio == params.reduction_ratio
        for key, tensor in params.tensors().items():
            np.testing.assert_array_equal(tensor.data, rebuilt.tensors()[key].data)

    def test_spatial_kernel_must_be_7x7(self, params):
        with pytest.raises(ShapeError):
            GamParams(params.mlp, Tensor(np.zeros((1, 2, 5, 5))), params.spatial_bias)
