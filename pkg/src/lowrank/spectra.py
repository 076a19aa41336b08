"""Synthetic test matrices with prescribed singular-value profiles.

Profiles are plain arrays of positive, non-increasing values; ``synth_matrix``
turns one into a dense matrix whose exact SVD is known by construction, which
makes the generated matrices their own accuracy oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ParameterError
from .matrix import SvdFactors, gaussian_matrix, qr_orthonormalize
from .validation import check_positive_int, check_seed

__all__ = [
    "PROFILES",
    "SpectrumSpec",
    "knee_spectrum",
    "power_law_spectrum",
    "exponential_spectrum",
    "flat_spectrum",
    "explicit_spectrum",
    "make_spectrum",
    "synth_matrix",
]

PROFILES = ("knee", "power_law", "exponential", "flat", "explicit")


@dataclass(frozen=True)
class SpectrumSpec:
    """Recipe for a singular-value profile.

    ``params`` carries the profile-specific knobs: ``knee`` reads
    ``head_count``, ``head_decay_rate`` and ``tail_exponent``; ``power_law``
    reads ``exponent``; ``exponential`` reads ``rate``; ``flat`` reads
    ``value``; ``explicit`` reads ``values``.
    """

    profile: str
    length: int
    scale: float = 1.0
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ParameterError(
                f"unknown profile {self.profile!r}; expected one of {', '.join(PROFILES)}"
            )
        check_positive_int(self.length, "length")
        if not self.scale > 0.0:
            raise ParameterError(f"scale must be positive, got {self.scale}")


def _validated(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ParameterError("spectrum must contain at least one value")
    if not np.isfinite(values).all() or float(values.min()) <= 0.0:
        raise ParameterError("spectrum values must be positive and finite")
    if np.any(np.diff(values) > 0):
        raise ParameterError("spectrum values must be non-increasing")
    return values


def knee_spectrum(
    length: int,
    head_count: int = 32,
    head_decay_rate: float = 0.2,
    tail_exponent: float = 0.5,
    scale: float = 1.0,
) -> np.ndarray:
    """Exponential decay for the leading values, then a slow power-law tail.

    This is the regime where a single sketching pass loses the most
    accuracy, which makes it the default profile for iteration sweeps. The
    tail is stitched to the last head value so the profile stays
    continuous and non-increasing.
    """
    length = check_positive_int(length, "length")
    head_count = check_positive_int(head_count, "head_count")
    index = np.arange(length, dtype=np.float64)
    head = scale * np.exp(-head_decay_rate * index)
    knee_value = scale * np.exp(-head_decay_rate * (head_count - 1))
    tail = knee_value * (head_count / (index + 1.0)) ** tail_exponent
    return _validated(np.where(index < head_count, head, tail))


def power_law_spectrum(length: int, exponent: float = 1.0, scale: float = 1.0) -> np.ndarray:
    """Values ``scale / (i + 1) ** exponent``."""
    length = check_positive_int(length, "length")
    index = np.arange(length, dtype=np.float64)
    return _validated(scale / (index + 1.0) ** exponent)


def exponential_spectrum(length: int, rate: float = 0.5, scale: float = 1.0) -> np.ndarray:
    """Values ``scale * exp(-rate * i)``."""
    length = check_positive_int(length, "length")
    index = np.arange(length, dtype=np.float64)
    return _validated(scale * np.exp(-rate * index))


def flat_spectrum(length: int, value: float = 1.0, scale: float = 1.0) -> np.ndarray:
    """All values equal to ``scale * value``."""
    length = check_positive_int(length, "length")
    return _validated(np.full(length, scale * value))


def explicit_spectrum(values, scale: float = 1.0) -> np.ndarray:
    """Caller-supplied values, validated and scaled."""
    return _validated(scale * np.asarray(values, dtype=np.float64))


_PROFILE_KEYS = {
    "knee": frozenset({"head_count", "head_decay_rate", "tail_exponent"}),
    "power_law": frozenset({"exponent"}),
    "exponential": frozenset({"rate"}),
    "flat": frozenset({"value"}),
    "explicit": frozenset({"values"}),
}

_PROFILE_BUILDERS = {
    "knee": knee_spectrum,
    "power_law": power_law_spectrum,
    "exponential": exponential_spectrum,
    "flat": flat_spectrum,
}


def make_spectrum(spec: SpectrumSpec) -> np.ndarray:
    """Evaluate a profile recipe into a concrete spectrum."""
    params = dict(spec.params)
    unexpected = sorted(set(params) - _PROFILE_KEYS[spec.profile])
    if unexpected:
        raise ParameterError(
            f"unexpected parameters for profile {spec.profile!r}: {unexpected}"
        )
    if spec.profile == "explicit":
        values = explicit_spectrum(params.get("values", ()), scale=spec.scale)
        if values.size != spec.length:
            raise ParameterError(
                f"explicit spectrum has {values.size} values but length says {spec.length}"
            )
        return values
    return _PROFILE_BUILDERS[spec.profile](spec.length, scale=spec.scale, **params)


def synth_matrix(spectrum, rows: int, cols: int, seed: int) -> tuple[np.ndarray, SvdFactors]:
    """Random matrix with the given singular values, plus its known factors.

    Both singular bases come from one Gaussian block, orthonormalized side
    by side, so the construction is deterministic in ``seed`` and the
    returned factors are the exact SVD of the returned matrix (up to sign
    convention).
    """
    spectrum = np.asarray(spectrum, dtype=np.float64)
    if spectrum.ndim != 1 or spectrum.size < 1:
        raise ParameterError("spectrum must be a non-empty 1-D sequence")
    if not np.isfinite(spectrum).all() or float(spectrum.min()) < 0.0:
        raise ParameterError("spectrum values must be nonnegative and finite")
    if np.any(np.diff(spectrum) > 0):
        raise ParameterError("spectrum values must be non-increasing")
    rows = check_positive_int(rows, "rows")
    cols = check_positive_int(cols, "cols")
    seed = check_seed(seed)
    r = spectrum.size
    if r > min(rows, cols):
        raise ParameterError(
            f"spectrum length {r} exceeds min(rows, cols) = {min(rows, cols)}"
        )
    block = gaussian_matrix(rows + cols, r, seed)
    u = qr_orthonormalize(block[:rows])
    v = qr_orthonormalize(block[rows:])
    w = (u * spectrum) @ v.T
    return w, SvdFactors(u=u, s=spectrum, v=v)
