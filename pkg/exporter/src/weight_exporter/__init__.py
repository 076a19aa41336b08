"""Torchvision linear-layer exporter for the lowrank compression CLI."""

from .export import (
    MODEL_BUILDERS,
    ExportRecord,
    build_model,
    export_model,
    linear_layers,
)

__version__ = "0.1.0"

__all__ = [
    "MODEL_BUILDERS",
    "ExportRecord",
    "build_model",
    "export_model",
    "linear_layers",
    "__version__",
]
