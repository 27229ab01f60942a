"""Despeckling assessment suite.

Global moments (NMV, NV, NSD), mean square difference against the noisy input,
tiled equivalent number of looks, the deflection ratio, Pratt's figure of merit
over binary edge maps, and PSNR. The deflection ratio is computed exactly as
defined even though the standardized deviations sum to zero analytically; its
floating-point residue (order 1e-15) doubles as a fidelity check. ENL follows
the tiled protocol: average of mean^2/variance over non-overlapping 25x25
blocks, remainder pixels discarded, zero-variance blocks excluded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.ndimage as ndi

from .image import as_image, image_stats


@dataclass(frozen=True)
class MetricsReport:
    """One assessment row; absent metrics are None with a reason in notes."""

    nmv: float
    nsd: float
    msd: float | None = None
    enl: float | None = None
    dr: float | None = None
    fom: float | None = None
    psnr_db: float | None = None
    notes: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        if self.nsd < 0.0:
            raise ValueError(f"nsd must be >= 0, got {self.nsd}")
        if self.msd is not None and self.msd < 0.0:
            raise ValueError(f"msd must be >= 0, got {self.msd}")
        if self.enl is not None and self.enl < 0.0:
            raise ValueError(f"enl must be >= 0, got {self.enl}")
        if self.fom is not None and not 0.0 <= self.fom <= 1.0:
            raise ValueError(f"fom must be in [0,1], got {self.fom}")


def nmv_nv_nsd(img) -> tuple[float, float, float]:
    """Normalized mean value, normalized variance, normalized standard deviation."""
    mean, var = image_stats(img)
    return mean, var, math.sqrt(var)


def msd(noisy, despeckled) -> float:
    """Mean square difference between the noisy input and the filtered output."""
    a = as_image(noisy, "noisy")
    b = as_image(despeckled, "despeckled")
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))


def enl(img, tile: int = 25) -> float:
    """Tiled equivalent number of looks: average of mean^2/var over full tiles."""
    img = as_image(img)
    if tile < 1:
        raise ValueError(f"tile must be >= 1, got {tile}")
    rows, cols = img.shape
    n_r, n_c = rows // tile, cols // tile
    if n_r == 0 or n_c == 0:
        raise ValueError(f"image {rows}x{cols} is smaller than one {tile}x{tile} tile")
    blocks = (
        img[: n_r * tile, : n_c * tile]
        .reshape(n_r, tile, n_c, tile)
        .swapaxes(1, 2)
        .reshape(n_r * n_c, tile, tile)
    )
    means = blocks.mean(axis=(1, 2))
    variances = ((blocks - means[:, None, None]) ** 2).mean(axis=(1, 2))
    live = variances > 0.0
    if not np.any(live):
        raise ValueError("every tile has zero variance; ENL undefined")
    return float(np.mean(means[live] ** 2 / variances[live]))


def deflection_ratio(img) -> float:
    """Average standardized deviation, evaluated literally (analytically zero)."""
    img = as_image(img)
    mean, var = image_stats(img)
    nsd = math.sqrt(var)
    if nsd == 0.0:
        raise ValueError("constant image has zero NSD; deflection ratio undefined")
    return float(np.sum((img - mean) / nsd) / img.size)


def _as_edge_map(mask, name: str) -> np.ndarray:
    mask = np.asarray(mask)
    if mask.ndim != 2 or mask.size == 0:
        raise ValueError(f"{name} must be a non-empty 2D map")
    return mask.astype(bool)


def pratt_fom(detected, ideal, alpha: float = 1.0 / 9.0) -> float:
    """Pratt's figure of merit between a detected and an ideal edge map.

    FOM = (1/max(Nd, Ni)) * sum over detected pixels of 1/(1 + alpha*d^2),
    with d the Euclidean distance to the nearest ideal edge pixel. Unity only
    for perfect detection; spurious or missing pixels both pull it down.
    """
    detected = _as_edge_map(detected, "detected")
    ideal = _as_edge_map(ideal, "ideal")
    if detected.shape != ideal.shape:
        raise ValueError(f"shape mismatch {detected.shape} vs {ideal.shape}")
    n_ideal = int(ideal.sum())
    if n_ideal == 0:
        raise ValueError("ideal edge map is empty")
    n_detected = int(detected.sum())
    if n_detected == 0:
        return 0.0
    distances = ndi.distance_transform_edt(~ideal)
    d = distances[detected]
    return float(np.sum(1.0 / (1.0 + alpha * d * d)) / max(n_detected, n_ideal))


def edge_map(img) -> np.ndarray:
    """Sobel gradient magnitude thresholded strictly above its 90th percentile."""
    img = as_image(img)
    gx = ndi.sobel(img, axis=1, mode="nearest")
    gy = ndi.sobel(img, axis=0, mode="nearest")
    magnitude = np.hypot(gx, gy)
    return magnitude > np.percentile(magnitude, 90.0)


def psnr(reference, test, peak: float) -> float:
    """Peak signal-to-noise ratio in decibels; math.inf for identical images."""
    a = as_image(reference, "reference")
    b = as_image(test, "test")
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    if not peak > 0.0:
        raise ValueError(f"peak must be positive, got {peak}")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def full_report(noisy, despeckled, ideal_edges=None, tile: int = 25) -> MetricsReport:
    """Assemble one benchmark row for a (noisy, despeckled) pair.

    FOM is computed only when an ideal edge map is supplied. Degenerate inputs
    leave ENL or DR absent, with the reason recorded in notes.
    """
    noisy = as_image(noisy, "noisy")
    despeckled = as_image(despeckled, "despeckled")
    nmv, _, nsd = nmv_nv_nsd(despeckled)
    msd_value = msd(noisy, despeckled)
    notes: list[tuple[str, str]] = []
    try:
        enl_value = enl(despeckled, tile)
    except ValueError as err:
        enl_value = None
        notes.append(("enl", str(err)))
    try:
        dr_value = deflection_ratio(despeckled)
    except ValueError as err:
        dr_value = None
        notes.append(("dr", str(err)))
    fom_value = None
    if ideal_edges is not None:
        fom_value = pratt_fom(edge_map(despeckled), ideal_edges)
    return MetricsReport(
        nmv=nmv,
        nsd=nsd,
        msd=msd_value,
        enl=enl_value,
        dr=dr_value,
        fom=fom_value,
        notes=tuple(notes),
    )
