"""File interchange: a strict NPY subset and schema-checked JSON documents.

NPY support is deliberately narrow - format version 1.0, little-endian
float32/float64, 1-D or 2-D - because these files cross tool boundaries
and a loud, specific parse error beats a silent misread. Written files are
canonical (fixed header rendering, 64-byte aligned data section), so equal
arrays always serialize to identical bytes.
"""

from __future__ import annotations

import ast
import json
import struct
from pathlib import Path

import jsonschema
import numpy as np

from .errors import (
    ManifestError,
    NpyBadMagicError,
    NpyHeaderError,
    NpyShapeError,
    NpyTruncatedError,
    NpyUnsupportedDtypeError,
    NpyVersionError,
    ParameterError,
    ShapeError,
)
from .planner import LayerSpec, ModelManifest

__all__ = [
    "MANIFEST_SCHEMA",
    "PLAN_SCHEMA",
    "BOUND_REPORT_SCHEMA",
    "read_npy",
    "write_npy",
    "read_manifest",
    "write_manifest",
    "write_json",
    "validate_document",
]

_MAGIC = b"\x93NUMPY"
_SUPPORTED_DESCRS = {"<f4": np.dtype("<f4"), "<f8": np.dtype("<f8")}
_WRITE_DESCRS = {"f4": "<f4", "f8": "<f8", "<f4": "<f4", "<f8": "<f8"}
_HEADER_ALIGN = 64


def write_npy(array, path, dtype: str = "f8") -> None:
    """Serialize a 1-D or 2-D float array as a version 1.0 NPY file.

    ``dtype`` selects the on-disk precision: ``"f8"`` (default) or
    ``"f4"``. The header dictionary is rendered with fixed key order and
    space-padded so the data section starts on a 64-byte boundary.
    """
    descr = _WRITE_DESCRS.get(dtype)
    if descr is None:
        raise ParameterError(f"unsupported write dtype {dtype!r}; use 'f4' or 'f8'")
    arr = np.asarray(array)
    if arr.ndim not in (1, 2):
        raise ShapeError(f"can only serialize 1-D or 2-D arrays, got {arr.ndim}-D")
    if arr.size == 0:
        raise ShapeError("refusing to serialize an empty array")
    if not np.isfinite(arr).all():
        raise ParameterError("refusing to serialize non-finite values")
    data = np.ascontiguousarray(arr, dtype=np.dtype(descr))
    shape = tuple(int(n) for n in arr.shape)
    header = f"{{'descr': '{descr}', 'fortran_order': False, 'shape': {shape!r}, }}"
    prefix_len = len(_MAGIC) + 2 + 2
    pad = (_HEADER_ALIGN - (prefix_len + len(header) + 1) % _HEADER_ALIGN) % _HEADER_ALIGN
    blob = header.encode("latin-1") + b" " * pad + b"\n"
    with open(path, "wb") as handle:
        handle.write(_MAGIC)
        handle.write(b"\x01\x00")
        handle.write(struct.pack("<H", len(blob)))
        handle.write(blob)
        handle.write(data.tobytes(order="C"))


def read_npy(path) -> np.ndarray:
    """Parse a version 1.0 NPY file into a float64 array.

    float32 payloads are widened on read. Column-major files are accepted
    and returned in row-major layout with the same logical shape. Every
    malformed input maps to a specific subclass of NpyFormatError.
    """
    raw = Path(path).read_bytes()
    if len(raw) < len(_MAGIC) or raw[: len(_MAGIC)] != _MAGIC:
        raise NpyBadMagicError(f"{path}: not an NPY file (bad magic bytes)")
    if len(raw) < len(_MAGIC) + 2:
        raise NpyTruncatedError(f"{path}: file ends before the format version")
    major, minor = raw[6], raw[7]
    if (major, minor) != (1, 0):
        raise NpyVersionError(
            f"{path}: NPY format version {major}.{minor} is not supported; "
            "re-save the array as version 1.0 (headers under 64 KiB)"
        )
    if len(raw) < 10:
        raise NpyTruncatedError(f"{path}: file ends before the header length")
    (header_len,) = struct.unpack("<H", raw[8:10])
    if len(raw) < 10 + header_len:
        raise NpyTruncatedError(
            f"{path}: header claims {header_len} bytes but the file ends early"
        )
    header_text = raw[10 : 10 + header_len].decode("latin-1")
    try:
        info = ast.literal_eval(header_text.strip())
    except (ValueError, SyntaxError) as exc:
        raise NpyHeaderError(f"{path}: malformed header dictionary: {exc}") from exc
    if not isinstance(info, dict) or set(info) != {"descr", "fortran_order", "shape"}:
        raise NpyHeaderError(
            f"{path}: header must be a dict with exactly descr, fortran_order, shape"
        )
    dtype = _SUPPORTED_DESCRS.get(info["descr"])
    if dtype is None:
        raise NpyUnsupportedDtypeError(
            f"{path}: dtype {info['descr']!r} is not supported; expected "
            "little-endian '<f4' or '<f8'"
        )
    fortran_order = info["fortran_order"]
    if not isinstance(fortran_order, bool):
        raise NpyHeaderError(f"{path}: fortran_order must be a boolean")
    shape = info["shape"]
    if (
        not isinstance(shape, tuple)
        or len(shape) not in (1, 2)
        or not all(isinstance(n, int) and n >= 1 for n in shape)
    ):
        raise NpyShapeError(
            f"{path}: shape {shape!r} is not a 1-D or 2-D shape of positive sizes"
        )
    expected = int(np.prod(shape)) * dtype.itemsize
    payload = raw[10 + header_len :]
    if len(payload) < expected:
        raise NpyTruncatedError(
            f"{path}: payload holds {len(payload)} of {expected} expected bytes"
        )
    if len(payload) > expected:
        raise NpyShapeError(
            f"{path}: {len(payload) - expected} trailing bytes beyond shape {shape}"
        )
    flat = np.frombuffer(payload, dtype=dtype)
    arr = flat.reshape(shape, order="F" if fortran_order else "C")
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    if not np.isfinite(arr).all():
        raise ParameterError(f"{path}: array contains non-finite values")
    return arr


MANIFEST_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Model manifest",
    "type": "object",
    "required": ["model_name", "fixed_params", "layers"],
    "additionalProperties": False,
    "properties": {
        "model_name": {"type": "string", "minLength": 1},
        "fixed_params": {"type": "integer", "minimum": 0},
        "layers": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "rows", "cols"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "rows": {"type": "integer", "minimum": 1},
                    "cols": {"type": "integer", "minimum": 1},
                    "has_bias": {"type": "boolean"},
                    "weight_path": {"type": "string", "minLength": 1},
                    "bias_path": {"type": "string", "minLength": 1},
                },
            },
        },
    },
}

PLAN_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Compression plan",
    "type": "object",
    "required": ["layers", "totals"],
    "properties": {
        "layers": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "k", "params_before", "params_after", "skipped"],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "k": {"type": "integer", "minimum": 1},
                    "params_before": {"type": "integer", "minimum": 0},
                    "params_after": {"type": "integer", "minimum": 0},
                    "skipped": {"type": "boolean"},
                },
            },
        },
        "totals": {
            "type": "object",
            "required": ["original_params", "compressed_params", "ratio"],
            "properties": {
                "original_params": {"type": "integer", "minimum": 0},
                "compressed_params": {"type": "integer", "minimum": 0},
                "ratio": {"type": "number", "minimum": 0},
            },
        },
    },
}

BOUND_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "Softmax deviation bound report",
    "type": "object",
    "required": [
        "R",
        "spectral_error",
        "theoretical_bound",
        "empirical_max_dev",
        "samples_tested",
    ],
    "properties": {
        "R": {"type": "number", "exclusiveMinimum": 0},
        "spectral_error": {"type": "number", "minimum": 0},
        "theoretical_bound": {"type": "number", "minimum": 0},
        "empirical_max_dev": {"type": "number", "minimum": 0},
        "samples_tested": {"type": "integer", "minimum": 1},
    },
}


def validate_document(document, schema) -> None:
    """Schema-check a JSON document, naming the offending field on failure."""
    try:
        jsonschema.validate(document, schema)
    except jsonschema.ValidationError as exc:
        raise ManifestError(f"{exc.json_path}: {exc.message}") from exc


def read_manifest(path) -> ModelManifest:
    """Load and validate a model manifest.

    Relative weight and bias paths are resolved against the manifest's own
    directory, so a manifest travels with its tensor files.
    """
    path = Path(path)
    try:
        document = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: invalid JSON: {exc}") from exc
    validate_document(document, MANIFEST_SCHEMA)
    layers = []
    for entry in document["layers"]:
        layers.append(
            LayerSpec(
                name=entry["name"],
                rows=entry["rows"],
                cols=entry["cols"],
                has_bias=entry.get("has_bias", False),
                weight_path=_resolve(path, entry.get("weight_path")),
                bias_path=_resolve(path, entry.get("bias_path")),
            )
        )
    return ModelManifest(
        model_name=document["model_name"],
        fixed_params=document["fixed_params"],
        layers=tuple(layers),
    )


def _resolve(manifest_path: Path, value):
    if value is None:
        return None
    candidate = Path(value)
    if candidate.is_absolute():
        return str(candidate)
    return str(manifest_path.parent / candidate)


def write_manifest(manifest: ModelManifest, path) -> None:
    """Serialize a manifest; optional per-layer fields appear only when set."""
    layers = []
    for layer in manifest.layers:
        entry = {"name": layer.name, "rows": layer.rows, "cols": layer.cols}
        if layer.has_bias:
            entry["has_bias"] = True
        if layer.weight_path is not None:
            entry["weight_path"] = layer.weight_path
        if layer.bias_path is not None:
            entry["bias_path"] = layer.bias_path
        layers.append(entry)
    document = {
        "model_name": manifest.model_name,
        "fixed_params": manifest.fixed_params,
        "layers": layers,
    }
    validate_document(document, MANIFEST_SCHEMA)
    write_json(document, path)


def write_json(document, path_or_handle) -> None:
    """Write a JSON document with stable formatting (insertion order, two-space
    indent, trailing newline)."""
    text = json.dumps(document, indent=2) + "\n"
    if hasattr(path_or_handle, "write"):
        path_or_handle.write(text)
    else:
        Path(path_or_handle).write_text(text)
