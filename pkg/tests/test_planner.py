import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lowrank import (
    CompressionPlan,
    LayerSpec,
    ModelManifest,
    ParameterError,
    layer_param_counts,
    plan_model,
    rank_for_alpha,
)

FIXTURES = Path(__file__).parent / "fixtures"


def load_vgg19_manifest():
    doc = json.loads((FIXTURES / "vgg19_manifest.json").read_text())
    layers = tuple(
        LayerSpec(
            name=entry["name"],
            rows=entry["rows"],
            cols=entry["cols"],
            has_bias=entry.get("has_bias", False),
        )
        for entry in doc["layers"]
    )
    return ModelManifest(doc["model_name"], doc["fixed_params"], layers)


def vgg19_feature_params():
    """Parameter count of the convolutional trunk, from the layer widths:
    sixteen 3x3 convolutions with biases."""
    widths = [64, 64, 128, 128, 256, 256, 256, 256, 512, 512, 512, 512, 512, 512, 512, 512]
    total = 0
    previous = 3
    for width in widths:
        total += width * previous * 9 + width
        previous = width
    return total


class TestRankForAlpha:
    def test_known_values(self):
        assert rank_for_alpha(768, 3072, 0.4) == 308
        assert rank_for_alpha(4096, 25088, 0.2) == 820
        assert rank_for_alpha(1000, 4096, 0.2) == 200

    def test_float_products_do_not_inflate_the_ceiling(self):
        # 0.7 * 10 evaluates to 7.000000000000001 in binary floats
        assert rank_for_alpha(10, 10, 0.7) == 7
        assert rank_for_alpha(1000, 4096, 0.6) == 600

    def test_clamped_to_one(self):
        assert rank_for_alpha(3, 100, 0.01) == 1

    def test_alpha_range_enforced(self):
        for alpha in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ParameterError):
                rank_for_alpha(10, 10, alpha)

    @settings(max_examples=60, deadline=None)
    @given(
        rows=st.integers(min_value=1, max_value=5000),
        cols=st.integers(min_value=1, max_value=5000),
        alpha=st.floats(min_value=1e-6, max_value=1.0, exclude_max=True),
    )
    def test_rank_always_in_range(self, rows, cols, alpha):
        rank = rank_for_alpha(rows, cols, alpha)
        assert 1 <= rank <= min(rows, cols)


class TestLayerParamCounts:
    def test_tiny_layer_with_bias(self):
        layer = LayerSpec(name="fc", rows=2, cols=3, has_bias=True)
        assert layer_param_counts(layer, 1) == (8, 7)

    def test_largest_image_classifier_layer(self):
        layer = LayerSpec(name="classifier.0", rows=4096, cols=25088)
        before, after = layer_param_counts(layer, 820)
        assert before == 102_760_448
        assert after == (4096 + 25088) * 820

    def test_transformer_mlp_layer(self):
        layer = LayerSpec(name="mlp", rows=768, cols=3072)
        before, after = layer_param_counts(layer, 308)
        assert before == 2_359_296
        assert after == 1_182_720

    def test_rank_bounds(self):
        layer = LayerSpec(name="fc", rows=4, cols=6)
        with pytest.raises(ParameterError):
            layer_param_counts(layer, 5)
        with pytest.raises(ParameterError):
            layer_param_counts(layer, 0)


class TestPlanModel:
    def test_fixture_matches_architecture_arithmetic(self):
        manifest = load_vgg19_manifest()
        assert manifest.fixed_params == vgg19_feature_params()
        dense = sum(l.rows * l.cols + l.rows for l in manifest.layers)
        assert manifest.fixed_params + dense == 143_667_240

    def test_whole_model_ratios(self):
        manifest = load_vgg19_manifest()
        for alpha, expected in [(0.2, 0.36), (0.4, 0.58), (0.6, 0.80), (0.8, 1.02)]:
            plan = plan_model(manifest, alpha)
            assert plan.ratio == pytest.approx(expected, abs=0.01)
        assert plan_model(manifest, 0.8).ratio > 1.0

    def test_ratio_monotone_in_alpha(self):
        manifest = load_vgg19_manifest()
        ratios = [plan_model(manifest, alpha).ratio for alpha in (0.1, 0.3, 0.5, 0.7, 0.9)]
        assert all(a < b for a, b in zip(ratios, ratios[1:]))

    def test_skip_if_larger_keeps_ratio_at_most_one(self):
        manifest = load_vgg19_manifest()
        plan = plan_model(manifest, 0.8, skip_if_larger=True)
        assert plan.ratio <= 1.0
        skipped = {entry.name for entry in plan.layers if entry.skipped}
        assert "classifier.3" in skipped  # square layer cannot win at alpha 0.8
        for entry in plan.layers:
            if entry.skipped:
                assert entry.params_after == entry.params_before

    def test_totals_include_fixed_params(self):
        manifest = ModelManifest(
            "toy", 100, (LayerSpec(name="fc", rows=8, cols=12, has_bias=True),)
        )
        plan = plan_model(manifest, 0.5)
        assert plan.original_params == 100 + 8 * 12 + 8
        assert plan.compressed_params == 100 + (8 + 12) * 4 + 8
        assert plan.ratio == plan.compressed_params / plan.original_params

    def test_layerless_manifest_keeps_ratio_one(self):
        plan = plan_model(ModelManifest("empty", 10, ()), 0.5)
        assert plan.ratio == 1.0
        assert plan.original_params == 10

    def test_duplicate_layer_names_rejected(self):
        layers = (
            LayerSpec(name="fc", rows=4, cols=4),
            LayerSpec(name="fc", rows=8, cols=8),
        )
        with pytest.raises(ParameterError):
            ModelManifest("dup", 0, layers)

    def test_to_dict_uses_the_wire_field_names(self):
        manifest = load_vgg19_manifest()
        doc = plan_model(manifest, 0.2).to_dict()
        assert set(doc) == {"layers", "totals"}
        assert set(doc["layers"][0]) == {
            "name", "k", "params_before", "params_after", "skipped",
        }
        assert set(doc["totals"]) == {"original_params", "compressed_params", "ratio"}
        assert isinstance(doc["layers"][0]["k"], int)

    def test_plan_is_a_value_object(self):
        manifest = load_vgg19_manifest()
        a = plan_model(manifest, 0.3)
        b = plan_model(manifest, 0.3)
        assert isinstance(a, CompressionPlan)
        assert a == b
