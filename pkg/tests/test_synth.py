"""Tests for synthetic occluded scenes."""

import numpy as np
import pytest

from aisp.dataset.annotations import parse_annotations, write_annotations
from aisp.dataset.synth import (
    BACKGROUND_LEVEL,
    FRUIT_LEVEL,
    OCCLUDER_LEVEL,
    SynthParams,
    render_scene_image,
    synth_scene,
    to_annotations,
    to_ground_truth,
)
from aisp.errors import GenerationError
from aisp.metrics.occlusion import OcclusionLevel


@pytest.fixture(scope="module")
def scene():
    return synth_scene(SynthParams(), seed=7)


class TestSynthScene:
    """Occluder sizing and determinism."""

    def test_one_fruit_per_level(self, scene):
        assert [f.level for f in scene.fruits] == [
            OcclusionLevel.ZERO,
            OcclusionLevel.LOW,
            OcclusionLevel.MEDIUM,
            OcclusionLevel.HIGH,
        ]

    def test_achieved_within_tolerance(self, scene):
        for fruit in scene.fruits:
            assert abs(float(fruit.achieved) - fruit.target) <= 0.02
        assert 0.33 <= float(scene.fruits[2].achieved) <= 0.37

    def test_visible_inside_amodal(self, scene):
        for fruit in scene.fruits:
            assert fruit.visible.is_subset_of(fruit.amodal)
            if fruit.occluder is not None:
                assert not np.any(fruit.visible.bits & fruit.occluder.bits)

    def test_unoccluded_fruit(self, scene):
        zero = scene.fruits[0]
        assert zero.occluder is None
        assert zero.visible == zero.amodal

    def test_fruits_do_not_overlap(self, scene):
        total = sum(f.amodal.area for f in scene.fruits)
        union = np.logical_or.reduce([f.amodal.bits for f in scene.fruits])
        assert union.sum() == total

    def test_deterministic(self, scene):
        again = synth_scene(SynthParams(), seed=7)
        for a, b in zip(scene.fruits, again.fruits):
            assert a.amodal == b.amodal and a.visible == b.visible
        other = synth_scene(SynthParams(), seed=8)
        assert any(a.amodal != b.amodal for a, b in zip(scene.fruits, other.fruits))

    def test_rect_occluder(self):
        s = synth_scene(SynthParams(occluder="rect", targets=(0.35,)), seed=1)
        assert s.fruits[0].level is OcclusionLevel.MEDIUM

    def test_unreachable_target(self):
        params = SynthParams(targets=(0.123456789,), tolerance=1e-12, max_retries=2)
        with pytest.raises(GenerationError):
            synth_scene(params, seed=0)

    @pytest.mark.parametrize("kwargs", [{"targets": (1.0,)}, {"targets": ()}, {"fruit_radius": (10, 5)}])
    def test_params_validated(self, kwargs):
        with pytest.raises(ValueError):
            SynthParams(**kwargs)


class TestSynthExport:
    def test_render(self, scene):
        image = render_scene_image(scene)
        assert image.shape == (128, 128)
        assert set(np.unique(image)) == {BACKGROUND_LEVEL, FRUIT_LEVEL, OCCLUDER_LEVEL}
        high = scene.fruits[3]
        assert np.all(image[high.visible.bits] == FRUIT_LEVEL)

    def test_ground_truth(self, scene):
        gts = to_ground_truth(scene, image_id="s")
        assert [g.level for g in gts] == [f.level for f in scene.fruits]
        assert all(g.image_id == "s" for g in gts)

    def test_annotations_round_trip(self, scene, tmp_path):
        ann = to_annotations([scene])
        assert ann.images[0].id == "synth_7"
        assert [i.occlusion for i in ann.instances] == ["zero", "low", "medium", "high"]
        assert all(i.visible is None for i in ann.instances)
        write_annotations(ann, tmp_path / "synth.json")
        assert parse_annotations(tmp_path / "synth.json") == ann

    def test_scene_dict(self, scene):
        d = scene.as_dict()
        assert d["seed"] == 7
        assert [f["level"] for f in d["fruits"]] == ["zero", "low", "medium", "high"]
