"""One-level separable 2D orthonormal wavelet transform with periodic boundaries.

Two bases are supported: the 2-tap Haar pair (db1) and the 8-tap Daubechies
extremal-phase pair (db4). The highpass filter follows the alternating-sign
quadrature-mirror rule g[k] = (-1)^k h[L-1-k], so both filter banks are
orthonormal and the inverse transform is the exact adjoint of the forward one.
Circular indexing keeps reconstruction exact on any even-sized image at least
as large as the filter support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import Subbands, as_image, require_even_dims

# Analysis lowpass taps. Haar is exact by construction; the 8-tap set is the
# extremal-phase tabulation, good to <1e-15 on sum(h)=sqrt(2), sum(h^2)=1 and
# every even-shift autocorrelation.
_LOWPASS: dict[str, tuple[float, ...]] = {
    "db1": (
        0.7071067811865476,
        0.7071067811865476,
    ),
    "db4": (
        0.23037781330889653,
        0.7148465705529157,
        0.6308807679298589,
        -0.027983769416859854,
        -0.18703481171909309,
        0.030841381835560764,
        0.0328830116668852,
        -0.010597401785069032,
    ),
}


@dataclass(frozen=True)
class WaveletBasis:
    """Named orthonormal analysis filter pair."""

    name: str
    lowpass: tuple[float, ...]

    @property
    def taps(self) -> int:
        return len(self.lowpass)

    @property
    def highpass(self) -> tuple[float, ...]:
        h = self.lowpass
        length = len(h)
        return tuple((-1.0) ** k * h[length - 1 - k] for k in range(length))


DB1 = WaveletBasis("db1", _LOWPASS["db1"])
DB4 = WaveletBasis("db4", _LOWPASS["db4"])


def wavelet_basis(name: str) -> WaveletBasis:
    """Look up a basis by name; ValueError on anything unsupported."""
    try:
        return WaveletBasis(name, _LOWPASS[name])
    except KeyError:
        raise ValueError(
            f"unknown wavelet basis {name!r}; available: {sorted(_LOWPASS)}"
        ) from None


def _analyze(x: np.ndarray, filt: np.ndarray, axis: int) -> np.ndarray:
    # Circular correlation y[n] = sum_k f[k] x[(2n+k) mod N], then keep even n.
    acc = filt[0] * x
    for k in range(1, len(filt)):
        acc += filt[k] * np.roll(x, -k, axis=axis)
    keep: list[slice] = [slice(None), slice(None)]
    keep[axis] = slice(0, None, 2)
    return acc[tuple(keep)]


def _synthesize(y: np.ndarray, filt: np.ndarray, axis: int) -> np.ndarray:
    # Adjoint of _analyze: zero-upsample, then shift the other way.
    shape = list(y.shape)
    shape[axis] *= 2
    up = np.zeros(shape, dtype=np.float64)
    put: list[slice] = [slice(None), slice(None)]
    put[axis] = slice(0, None, 2)
    up[tuple(put)] = y
    out = filt[0] * up
    for k in range(1, len(filt)):
        out += filt[k] * np.roll(up, k, axis=axis)
    return out


def _check_size(rows: int, cols: int, basis: WaveletBasis) -> None:
    if rows < basis.taps or cols < basis.taps:
        raise ValueError(
            f"image {rows}x{cols} is smaller than the {basis.name} filter "
            f"support ({basis.taps} taps)"
        )


def dwt2(img, basis: WaveletBasis) -> Subbands:
    """Forward one-level transform of an even-sized 2D image.

    Rows are filtered first, then columns, each branch decimated by two, so
    LL = lowpass/lowpass, LH = highpass along rows / lowpass along columns,
    HL the transpose, HH = highpass/highpass.
    """
    img = as_image(img)
    require_even_dims(img)
    _check_size(*img.shape, basis)
    lo = np.asarray(basis.lowpass)
    hi = np.asarray(basis.highpass)
    low0 = _analyze(img, lo, axis=0)
    high0 = _analyze(img, hi, axis=0)
    return Subbands(
        ll=_analyze(low0, lo, axis=1),
        lh=_analyze(high0, lo, axis=1),
        hl=_analyze(low0, hi, axis=1),
        hh=_analyze(high0, hi, axis=1),
    )


def idwt2(bands: Subbands, basis: WaveletBasis) -> np.ndarray:
    """Inverse of dwt2; exact reconstruction up to float rounding."""
    rows, cols = bands.shape
    _check_size(2 * rows, 2 * cols, basis)
    lo = np.asarray(basis.lowpass)
    hi = np.asarray(basis.highpass)
    low0 = _synthesize(bands.ll, lo, axis=1) + _synthesize(bands.hl, hi, axis=1)
    high0 = _synthesize(bands.lh, lo, axis=1) + _synthesize(bands.hh, hi, axis=1)
    return _synthesize(low0, lo, axis=0) + _synthesize(high0, hi, axis=0)
