"""Export a torchvision model's linear layers as NPY files plus a manifest.

The manifest follows the model-manifest JSON format of the ``lowrank``
package (``docs/manifest.schema.json`` there); the NPY files are standard
format-1.0 little-endian float32, which that package widens to float64 on
read. Nothing here imports ``lowrank``: the two packages meet only at the
file formats.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from torch import nn
from torchvision import models

__all__ = [
    "MODEL_BUILDERS",
    "ExportRecord",
    "build_model",
    "export_model",
    "linear_layers",
]

MODEL_BUILDERS = {
    "vgg19": models.vgg19,
    "vit_b_32": models.vit_b_32,
}


@dataclass(frozen=True)
class ExportRecord:
    """One exported layer: dotted module path, shape, and file names."""

    layer_name: str
    rows: int
    cols: int
    weight_file: str
    bias_file: str | None


def build_model(model_name: str, pretrained: bool = True) -> nn.Module:
    """Instantiate a supported zoo model in eval mode.

    ``pretrained=False`` keeps the architecture's fresh initialization,
    which is enough for shape/accounting work and needs no downloads.
    """
    try:
        builder = MODEL_BUILDERS[model_name]
    except KeyError:
        raise ValueError(
            f"unknown model {model_name!r}; supported: {', '.join(sorted(MODEL_BUILDERS))}"
        ) from None
    return builder(weights="DEFAULT" if pretrained else None).eval()


def linear_layers(model: nn.Module):
    """Yield ``(dotted_name, module)`` for each exportable linear layer.

    Traversal order is the model's own module order, so manifests are
    reproducible. Linear modules whose weights are not plain 2-D float
    tensors are skipped with a warning; their parameters simply stay in
    the fixed (non-exported) count.
    """
    for name, module in model.named_modules():
        if not isinstance(module, nn.Linear):
            continue
        weight = module.weight
        if weight is None or weight.dim() != 2 or not weight.is_floating_point():
            warnings.warn(
                f"skipping {name}: weight is not a 2-D float tensor",
                stacklevel=2,
            )
            continue
        yield name, module


def export_model(model_name: str, out_dir, pretrained: bool = True) -> dict:
    """Write one NPY file per weight/bias and ``manifest.json``; return the manifest.

    ``fixed_params`` in the manifest is the model's total parameter count
    minus everything exported, so the two always recombine to the zoo
    model's reported size.
    """
    model = build_model(model_name, pretrained=pretrained)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    total_params = sum(p.numel() for p in model.parameters())
    exported_params = 0
    records: list[ExportRecord] = []
    with torch.no_grad():
        for name, module in linear_layers(model):
            weight = module.weight.detach().cpu().numpy().astype("<f4")
            rows, cols = weight.shape
            weight_file = f"{name}.weight.npy"
            np.save(out / weight_file, weight)
            exported_params += weight.size

            bias_file = None
            if module.bias is not None:
                bias = module.bias.detach().cpu().numpy().astype("<f4")
                bias_file = f"{name}.bias.npy"
                np.save(out / bias_file, bias)
                exported_params += bias.size
            records.append(ExportRecord(name, rows, cols, weight_file, bias_file))

    manifest = {
        "model_name": model_name,
        "fixed_params": total_params - exported_params,
        "layers": [_layer_entry(record) for record in records],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def _layer_entry(record: ExportRecord) -> dict:
    entry = {
        "name": record.layer_name,
        "rows": record.rows,
        "cols": record.cols,
        "has_bias": record.bias_file is not None,
        "weight_path": record.weight_file,
    }
    if record.bias_file is not None:
        entry["bias_path"] = record.bias_file
    return entry
