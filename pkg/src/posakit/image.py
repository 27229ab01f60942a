"""Shared raster plumbing: array coercion, validation, subband container, moments."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def as_image(pixels, name: str = "image") -> np.ndarray:
    """Coerce to the toolkit's working currency: a finite 2D float64 array.

    Raises ValueError for empty, non-2D, or non-finite input.
    """
    img = np.asarray(pixels, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"{name} must be 2D, got {img.ndim} dimensions")
    if img.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(img)):
        raise ValueError(f"{name} contains NaN or Inf values")
    return img


def require_even_dims(img: np.ndarray, name: str = "image") -> None:
    rows, cols = img.shape
    if rows % 2 or cols % 2:
        raise ValueError(
            f"{name} dimensions must both be even for a one-level transform, "
            f"got {rows}x{cols}"
        )


@dataclass(frozen=True)
class Subbands:
    """One decomposition level: approximation plus three oriented detail bands.

    lh holds horizontal-edge detail (highpass down the rows), hl the transpose,
    hh the diagonal residue. All four share one shape, half the source size.
    """

    ll: np.ndarray
    lh: np.ndarray
    hl: np.ndarray
    hh: np.ndarray

    def __post_init__(self) -> None:
        shapes = {np.shape(b) for b in (self.ll, self.lh, self.hl, self.hh)}
        if len(shapes) != 1:
            raise ValueError(f"subbands must share one shape, got {sorted(shapes)}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.ll.shape

    def bands(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return self.ll, self.lh, self.hl, self.hh


def image_stats(img) -> tuple[float, float]:
    """Population mean and variance over all pixels (denominator rows*cols)."""
    img = as_image(img)
    mean = float(img.mean())
    var = float(np.mean((img - mean) ** 2))
    return mean, var


def image_std(img) -> float:
    return math.sqrt(image_stats(img)[1])
