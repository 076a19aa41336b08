"""Rank selection and whole-model parameter accounting.

A model is described by a manifest: a list of linear layers plus a count of
parameters that factorization never touches (convolutions, norms, biases of
skipped layers, and so on). Planning picks a rank per layer from a single
width fraction and totals the parameter bill before and after.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError
from .validation import check_positive_int

__all__ = [
    "LayerSpec",
    "ModelManifest",
    "LayerPlan",
    "CompressionPlan",
    "rank_for_alpha",
    "layer_param_counts",
    "plan_model",
]


@dataclass(frozen=True)
class LayerSpec:
    """One linear layer: ``rows`` output features by ``cols`` input features."""

    name: str
    rows: int
    cols: int
    has_bias: bool = False
    weight_path: str | None = None
    bias_path: str | None = None

    def __post_init__(self):
        if not self.name:
            raise ParameterError("layer name must be non-empty")
        check_positive_int(self.rows, f"layer {self.name!r} rows")
        check_positive_int(self.cols, f"layer {self.name!r} cols")


@dataclass(frozen=True)
class ModelManifest:
    """A named model: factorizable layers plus untouched parameter count."""

    model_name: str
    fixed_params: int
    layers: tuple[LayerSpec, ...]

    def __post_init__(self):
        if self.fixed_params < 0:
            raise ParameterError(f"fixed_params must be >= 0, got {self.fixed_params}")
        seen = set()
        for layer in self.layers:
            if layer.name in seen:
                raise ParameterError(f"duplicate layer name {layer.name!r} in manifest")
            seen.add(layer.name)


@dataclass(frozen=True)
class LayerPlan:
    """Planned factorization of one layer.

    When ``skipped`` is set the layer keeps its original weights and
    ``params_after`` equals ``params_before``.
    """

    name: str
    rank: int
    params_before: int
    params_after: int
    skipped: bool


@dataclass(frozen=True)
class CompressionPlan:
    """Per-layer plans plus model-wide parameter totals."""

    layers: tuple[LayerPlan, ...]
    original_params: int
    compressed_params: int
    ratio: float

    def to_dict(self) -> dict:
        """JSON-ready form. Layer rank is emitted under the key ``k``."""
        return {
            "layers": [
                {
                    "name": entry.name,
                    "k": entry.rank,
                    "params_before": entry.params_before,
                    "params_after": entry.params_after,
                    "skipped": entry.skipped,
                }
                for entry in self.layers
            ],
            "totals": {
                "original_params": self.original_params,
                "compressed_params": self.compressed_params,
                "ratio": self.ratio,
            },
        }


def rank_for_alpha(rows: int, cols: int, alpha: float) -> int:
    """Target rank ``ceil(alpha * min(rows, cols))``, clamped to at least 1.

    A small epsilon guards the ceiling against float products such as
    ``0.7 * 10`` landing just above the exact integer.
    """
    rows = check_positive_int(rows, "rows")
    cols = check_positive_int(cols, "cols")
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie strictly between 0 and 1, got {alpha}")
    target = alpha * min(rows, cols)
    return max(1, math.ceil(target - 1e-9 * max(1.0, target)))


def layer_param_counts(layer: LayerSpec, rank: int) -> tuple[int, int]:
    """Parameter counts (before, after) for factorizing one layer.

    The bias vector (length ``rows``) is stored either way and is never
    factorized, so it appears in both counts when present.
    """
    rank = check_positive_int(rank, "rank")
    limit = min(layer.rows, layer.cols)
    if rank > limit:
        raise ParameterError(
            f"rank {rank} exceeds min(rows, cols) = {limit} for layer {layer.name!r}"
        )
    bias = layer.rows if layer.has_bias else 0
    before = layer.rows * layer.cols + bias
    after = (layer.rows + layer.cols) * rank + bias
    return before, after


def plan_model(manifest: ModelManifest, alpha: float, skip_if_larger: bool = False) -> CompressionPlan:
    """Plan every layer at one width fraction and total the parameter bill.

    ``fixed_params`` counts toward both totals, so the ratio reflects the
    whole model, not just the factorized layers. With ``skip_if_larger``
    a layer whose factors would not save parameters is left untouched;
    without it the plan reports ratios above 1 honestly.
    """
    entries = []
    for layer in manifest.layers:
        rank = rank_for_alpha(layer.rows, layer.cols, alpha)
        before, after = layer_param_counts(layer, rank)
        skipped = skip_if_larger and after >= before
        entries.append(
            LayerPlan(
                name=layer.name,
                rank=rank,
                params_before=before,
                params_after=before if skipped else after,
                skipped=skipped,
            )
        )
    original = manifest.fixed_params + sum(entry.params_before for entry in entries)
    compressed = manifest.fixed_params + sum(entry.params_after for entry in entries)
    ratio = compressed / original if original else 1.0
    return CompressionPlan(
        layers=tuple(entries),
        original_params=original,
        compressed_params=compressed,
        ratio=ratio,
    )
