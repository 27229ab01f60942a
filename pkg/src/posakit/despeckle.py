"""Despeckling filters: span-projection shrinkage plus the classical baselines.

The projection filter (posashrink) replaces each wavelet detail band with its
expansion over the normalized earlier bands, led by the approximation band, and
rebuilds the image with the approximation band untouched. The baselines are the
standard local-statistics estimators (median, Lee, Kuan, Frost) and universal-
threshold wavelet shrinkage in hard, soft, and semisoft flavors. Statistical
filters are usually run homomorphically on speckle: filter log(1+I), then map
back through expm1 and clamp at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.ndimage as ndi
from numpy.lib.stride_tricks import sliding_window_view

from .image import Subbands, as_image
from .projection import span_cascade
from .wavelet import DB1, WaveletBasis, dwt2, idwt2

LOCAL_FILTERS = ("median", "lee", "kuan", "frost")
WAVELET_FILTERS = ("posashrink", "visu_hard", "visu_soft", "visu_semisoft")
THRESHOLD_RULES = ("hard", "soft", "semisoft")


@dataclass(frozen=True)
class FilterSpec:
    """Everything needed to run one filter; unused knobs are simply ignored
    by kinds that do not read them (callers should not set them)."""

    kind: str
    kernel: int = 3
    basis: WaveletBasis = DB1
    looks: int = 1
    damping: float = 1.0
    homomorphic: bool = True

    def __post_init__(self) -> None:
        if self.kind not in LOCAL_FILTERS + WAVELET_FILTERS:
            raise ValueError(f"unknown filter kind {self.kind!r}")
        _check_kernel(self.kernel)
        if self.looks < 1:
            raise ValueError(f"looks must be >= 1, got {self.looks}")
        if not self.damping > 0.0:
            raise ValueError(f"damping must be positive, got {self.damping}")


def _check_kernel(kernel: int) -> None:
    if kernel < 3 or kernel % 2 == 0:
        raise ValueError(f"kernel must be an odd integer >= 3, got {kernel}")


def posashrink(img, basis: WaveletBasis = DB1) -> np.ndarray:
    """Replace each detail band with its span projection and reconstruct.

    The cascade sees [LL, LH, HL, HH] in that order; its three outputs become
    the new detail bands. The approximation band bypasses the cascade, so the
    output keeps the input's coarse radiometry (the mean survives exactly up
    to rounding).
    """
    img = as_image(img)
    bands = dwt2(img, basis)
    lh, hl, hh = span_cascade([bands.ll, bands.lh, bands.hl, bands.hh])
    return idwt2(Subbands(ll=bands.ll, lh=lh, hl=hl, hh=hh), basis)


def _windows(img: np.ndarray, kernel: int) -> np.ndarray:
    # Edge-replicated sliding windows, shape (rows, cols, kernel, kernel).
    half = kernel // 2
    padded = np.pad(img, half, mode="edge")
    return sliding_window_view(padded, (kernel, kernel))


def _local_stats(img: np.ndarray, kernel: int) -> tuple[np.ndarray, np.ndarray]:
    win = _windows(img, kernel)
    mean = win.mean(axis=(2, 3))
    var = ((win - mean[..., None, None]) ** 2).mean(axis=(2, 3))
    return mean, var


def median_filter(img, kernel: int = 3) -> np.ndarray:
    """Kernel-sized order-statistic filter with edge replication."""
    img = as_image(img)
    _check_kernel(kernel)
    return ndi.median_filter(img, size=kernel, mode="nearest")


def lee_filter(img, kernel: int = 3, looks: int = 1) -> np.ndarray:
    """Local linear MMSE estimator out = mu + W*(x - mu).

    W = clip(1 - Cu^2/Ci^2, 0, 1) with noise variation Cu = 1/sqrt(looks) and
    local variation Ci = sigma/mu over the window. Flat windows pass the local
    mean; zero-mean windows pass the input through.
    """
    img = as_image(img)
    _check_kernel(kernel)
    if looks < 1:
        raise ValueError(f"looks must be >= 1, got {looks}")
    mean, var = _local_stats(img, kernel)
    cu2 = 1.0 / looks
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = cu2 * mean * mean / var  # Cu^2 / Ci^2
    weight = np.clip(1.0 - ratio, 0.0, 1.0)
    weight = np.where(var > 0.0, weight, 0.0)
    out = mean + weight * (img - mean)
    return np.where(mean == 0.0, img, out)


def kuan_filter(img, kernel: int = 3, looks: int = 1) -> np.ndarray:
    """Lee's estimator with the multiplicative-noise correction term:
    W = clip((1 - Cu^2/Ci^2) / (1 + Cu^2), 0, 1)."""
    img = as_image(img)
    _check_kernel(kernel)
    if looks < 1:
        raise ValueError(f"looks must be >= 1, got {looks}")
    mean, var = _local_stats(img, kernel)
    cu2 = 1.0 / looks
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = cu2 * mean * mean / var
    weight = np.clip((1.0 - ratio) / (1.0 + cu2), 0.0, 1.0)
    weight = np.where(var > 0.0, weight, 0.0)
    out = mean + weight * (img - mean)
    return np.where(mean == 0.0, img, out)


def frost_filter(img, kernel: int = 3, damping: float = 1.0) -> np.ndarray:
    """Exponentially damped convolution steered by local variation.

    Window weights are m(d) = exp(-damping * Ci^2 * d) with d the Euclidean
    distance to the window center, normalized to unit sum. Flat windows give
    uniform weights (a box mean); strong local variation shrinks the support
    toward the center pixel, which always keeps weight 1.
    """
    img = as_image(img)
    _check_kernel(kernel)
    if not damping > 0.0:
        raise ValueError(f"damping must be positive, got {damping}")
    half = kernel // 2
    rows_off, cols_off = np.mgrid[-half : half + 1, -half : half + 1]
    dist = np.hypot(rows_off, cols_off)
    win = _windows(img, kernel)
    mean = win.mean(axis=(2, 3))
    var = ((win - mean[..., None, None]) ** 2).mean(axis=(2, 3))
    with np.errstate(divide="ignore", invalid="ignore"):
        ci2 = var / (mean * mean)
    ci2 = np.where(var == 0.0, 0.0, ci2)
    ci2 = np.where((var > 0.0) & (mean == 0.0), np.inf, ci2)
    with np.errstate(invalid="ignore"):
        weights = np.exp(-(damping * ci2)[..., None, None] * dist[None, None])
    # inf * 0 at the center is NaN; the center weight is exp(0) = 1 by definition
    weights = np.where(dist[None, None] == 0.0, 1.0, weights)
    return (weights * win).sum(axis=(2, 3)) / weights.sum(axis=(2, 3))


def universal_threshold(hh: np.ndarray, detail_count: int) -> float:
    """T = sigma_hat * sqrt(2 ln M) with the robust noise scale
    sigma_hat = median(|HH|) / 0.6745."""
    if detail_count < 2:
        raise ValueError(f"need at least 2 detail coefficients, got {detail_count}")
    sigma = float(np.median(np.abs(hh))) / 0.6745
    return sigma * math.sqrt(2.0 * math.log(detail_count))


def _shrink_hard(w: np.ndarray, t: float) -> np.ndarray:
    return np.where(np.abs(w) <= t, 0.0, w)


def _shrink_soft(w: np.ndarray, t: float) -> np.ndarray:
    return np.sign(w) * np.maximum(np.abs(w) - t, 0.0)


def _shrink_semisoft(w: np.ndarray, t: float) -> np.ndarray:
    # Firm rule with knees at (t, 2t): kill below t, identity above 2t,
    # linear ramp 2*(|w| - t) in between (continuous at both knees).
    a = np.abs(w)
    ramp = np.sign(w) * 2.0 * (a - t)
    return np.where(a <= t, 0.0, np.where(a <= 2.0 * t, ramp, w))


_SHRINK: dict[str, Callable[[np.ndarray, float], np.ndarray]] = {
    "hard": _shrink_hard,
    "soft": _shrink_soft,
    "semisoft": _shrink_semisoft,
}


def wavelet_threshold(img, rule: str, basis: WaveletBasis = DB1) -> np.ndarray:
    """Universal-threshold shrinkage of the three detail bands.

    The threshold is shared by all bands; M counts every detail coefficient
    (three bands), and the noise scale comes from the diagonal band alone.
    """
    if rule not in THRESHOLD_RULES:
        raise ValueError(f"unknown threshold rule {rule!r}; expected one of {THRESHOLD_RULES}")
    img = as_image(img)
    bands = dwt2(img, basis)
    t = universal_threshold(bands.hh, 3 * bands.hh.size)
    shrink = _SHRINK[rule]
    return idwt2(
        Subbands(
            ll=bands.ll,
            lh=shrink(bands.lh, t),
            hl=shrink(bands.hl, t),
            hh=shrink(bands.hh, t),
        ),
        basis,
    )


def _spatial_fn(spec: FilterSpec) -> Callable[[np.ndarray], np.ndarray]:
    if spec.kind == "median":
        return lambda x: median_filter(x, spec.kernel)
    if spec.kind == "lee":
        return lambda x: lee_filter(x, spec.kernel, spec.looks)
    if spec.kind == "kuan":
        return lambda x: kuan_filter(x, spec.kernel, spec.looks)
    if spec.kind == "frost":
        return lambda x: frost_filter(x, spec.kernel, spec.damping)
    raise ValueError(f"{spec.kind} is not a local-statistics filter")


def homomorphic_wrap(filt: FilterSpec | Callable[[np.ndarray], np.ndarray], img) -> np.ndarray:
    """Run a spatial filter on log-brightness: expm1(F(log1p(I))), clamped at 0.

    The filter may be a FilterSpec for one of the local-statistics kinds or any
    image-to-image callable. The +1 offset keeps zero pixels finite; negative
    input is outside the multiplicative-noise domain and is rejected.
    """
    fn = _spatial_fn(filt) if isinstance(filt, FilterSpec) else filt
    img = as_image(img)
    if np.any(img < 0.0):
        raise ValueError("homomorphic filtering requires non-negative pixels")
    return np.maximum(np.expm1(fn(np.log1p(img))), 0.0)


def apply_filter(spec: FilterSpec, img) -> np.ndarray:
    """Dispatch one FilterSpec; the single entry point the CLI goes through."""
    img = as_image(img)
    if spec.kind == "posashrink":
        return posashrink(img, spec.basis)
    if spec.kind == "visu_hard":
        return wavelet_threshold(img, "hard", spec.basis)
    if spec.kind == "visu_soft":
        return wavelet_threshold(img, "soft", spec.basis)
    if spec.kind == "visu_semisoft":
        return wavelet_threshold(img, "semisoft", spec.basis)
    if spec.homomorphic:
        return homomorphic_wrap(spec, img)
    return _spatial_fn(spec)(img)
