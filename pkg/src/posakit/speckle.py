"""Calibrated multiplicative speckle synthesis.

Three unit-mean noise laws cover the usual detection chains:

  amplitude  - single-look linear detection, Rayleigh with sigma = sqrt(2/pi),
               variance (4-pi)/pi
  intensity  - single-look square-law detection, Exp(1), variance 1
  multilook  - L-look averaged intensity, Gamma(shape=L, scale=1/L),
               variance 1/L

A speckled image is the pixelwise product of the clean image and a field drawn
from one of these laws; the additive view N = I*(S-1) underlies the SNR-pinned
variant, which rescales the perturbation so the realized ratio of signal energy
to noise energy hits a requested decibel target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .image import as_image

KINDS = ("amplitude", "intensity", "multilook")


@dataclass(frozen=True)
class SpeckleModel:
    kind: str = "multilook"
    looks: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown speckle kind {self.kind!r}; expected one of {KINDS}")
        if self.looks < 1:
            raise ValueError(f"looks must be >= 1, got {self.looks}")

    def field_variance(self) -> float:
        """Theoretical variance of the unit-mean field."""
        if self.kind == "amplitude":
            return (4.0 - math.pi) / math.pi
        if self.kind == "intensity":
            return 1.0
        return 1.0 / self.looks


def draw_speckle_field(rows: int, cols: int, model: SpeckleModel) -> np.ndarray:
    """Draw a rows-by-cols unit-mean speckle field, reproducible from model.seed."""
    if rows < 1 or cols < 1:
        raise ValueError(f"field dimensions must be positive, got {rows}x{cols}")
    rng = np.random.default_rng(model.seed)
    if model.kind == "amplitude":
        return rng.rayleigh(scale=math.sqrt(2.0 / math.pi), size=(rows, cols))
    if model.kind == "intensity":
        return rng.exponential(scale=1.0, size=(rows, cols))
    return rng.gamma(shape=model.looks, scale=1.0 / model.looks, size=(rows, cols))


def apply_speckle(img, model: SpeckleModel) -> np.ndarray:
    """Pixelwise product of the image with a freshly drawn speckle field."""
    img = as_image(img)
    rows, cols = img.shape
    return img * draw_speckle_field(rows, cols, model)


def apply_speckle_snr(img, model: SpeckleModel, target_snr_db: float) -> np.ndarray:
    """Speckle the image, then rescale the perturbation to an exact SNR.

    The perturbation N = I*(S-1) is scaled by beta so that
    10*log10(sum(I^2) / sum((beta*N)^2)) equals target_snr_db. An infinite
    target degenerates to the clean image.
    """
    img = as_image(img)
    rows, cols = img.shape
    noise = img * (draw_speckle_field(rows, cols, model) - 1.0)
    signal_energy = float(np.sum(img * img))
    noise_energy = float(np.sum(noise * noise))
    if noise_energy == 0.0:
        raise ValueError("speckle perturbation is identically zero; cannot hit an SNR target")
    if math.isinf(target_snr_db):
        return img.copy()
    beta = math.sqrt(signal_energy / (noise_energy * 10.0 ** (target_snr_db / 10.0)))
    return img + beta * noise


def measured_snr_db(clean, noisy) -> float:
    """Realized energy ratio in decibels between a clean image and its noisy copy."""
    clean = as_image(clean, "clean")
    noisy = as_image(noisy, "noisy")
    if clean.shape != noisy.shape:
        raise ValueError(f"shape mismatch {clean.shape} vs {noisy.shape}")
    noise_energy = float(np.sum((noisy - clean) ** 2))
    if noise_energy == 0.0:
        return math.inf
    signal_energy = float(np.sum(clean * clean))
    if signal_energy == 0.0:
        raise ValueError("clean image has zero energy; SNR undefined")
    return 10.0 * math.log10(signal_energy / noise_energy)
