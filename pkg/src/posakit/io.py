"""Grayscale raster I/O (binary PGM, grayscale PNG) and CSV report emission.

PGM P5 is the canonical interchange format: ASCII header (magic, width,
height, maxval, '#' comments allowed), one whitespace byte, then row-major
samples, 1 byte each up to maxval 255 and big-endian 2 bytes above. PNG is a
convenience path via Pillow, grayscale only. Processing happens in reals;
quantization (clamp to [0, maxval], round half away from zero) occurs only
when writing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from .image import as_image
from .metrics import MetricsReport


class RasterFormatError(ValueError):
    """Malformed or unsupported raster file content."""


FORMATS = {"pgm8": 255, "pgm16": 65535, "png_gray": 255}

REPORT_COLUMNS = ("MSD", "NMV", "NSD", "ENL", "DR", "FOM")


@dataclass(frozen=True)
class RasterInfo:
    format: str
    maxval: int
    rows: int
    cols: int


def read_image(path) -> np.ndarray:
    """Read a PGM or grayscale PNG file as a float64 image."""
    return read_image_info(path)[0]


def read_image_info(path) -> tuple[np.ndarray, RasterInfo]:
    """Read a raster plus its declared format and sample range."""
    path = Path(path)
    data = path.read_bytes()
    if data[:2] == b"P5":
        return _parse_pgm(data, str(path))
    return _read_png(path)


def _parse_pgm(data: bytes, name: str) -> tuple[np.ndarray, RasterInfo]:
    pos = 2  # past the magic
    fields: list[int] = []
    while len(fields) < 3:
        # skip whitespace and '#' comments that run to end of line
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        token = data[start:pos]
        if not token:
            raise RasterFormatError(f"{name}: header ended early at byte {start}")
        if not token.isdigit():
            raise RasterFormatError(
                f"{name}: expected integer header field at byte {start}, got {token!r}"
            )
        fields.append(int(token))
    if pos >= len(data):
        raise RasterFormatError(f"{name}: missing raster data after header at byte {pos}")
    pos += 1  # exactly one whitespace byte separates header and raster
    cols, rows, maxval = fields
    if cols < 1 or rows < 1:
        raise RasterFormatError(f"{name}: invalid dimensions {cols}x{rows}")
    if not 0 < maxval < 65536:
        raise RasterFormatError(f"{name}: maxval {maxval} outside [1, 65535]")
    bytes_per = 1 if maxval <= 255 else 2
    expected = rows * cols * bytes_per
    raster = data[pos : pos + expected]
    if len(raster) != expected:
        raise RasterFormatError(
            f"{name}: raster truncated at byte {pos + len(raster)}; "
            f"expected {expected} sample bytes, found {len(raster)}"
        )
    dtype = ">u2" if bytes_per == 2 else np.uint8
    pixels = np.frombuffer(raster, dtype=dtype).reshape(rows, cols).astype(np.float64)
    fmt = "pgm16" if bytes_per == 2 else "pgm8"
    return pixels, RasterInfo(format=fmt, maxval=maxval, rows=rows, cols=cols)


def _read_png(path: Path) -> tuple[np.ndarray, RasterInfo]:
    try:
        with PILImage.open(path) as im:
            if im.format != "PNG":
                raise RasterFormatError(f"{path}: unsupported format {im.format or 'unknown'}")
            if im.mode == "L":
                maxval = 255
            elif im.mode in ("I;16", "I;16B", "I"):
                maxval = 65535
            else:
                raise RasterFormatError(f"{path}: PNG mode {im.mode} is not plain grayscale")
            pixels = np.asarray(im, dtype=np.float64)
    except PILImage.UnidentifiedImageError as err:
        raise RasterFormatError(f"{path}: not a PGM or PNG file") from err
    rows, cols = pixels.shape
    return pixels, RasterInfo(format="png_gray", maxval=maxval, rows=rows, cols=cols)


def quantize(img: np.ndarray, maxval: int) -> np.ndarray:
    """Clamp to [0, maxval] and round half away from zero (all values end up >= 0)."""
    clipped = np.clip(img, 0.0, float(maxval))
    return np.floor(clipped + 0.5)


def write_image(img, path, format: str = "pgm8") -> None:
    """Quantize and serialize; bytes are a pure function of (img, format)."""
    img = as_image(img)
    if format not in FORMATS:
        raise ValueError(f"unknown raster format {format!r}; expected one of {sorted(FORMATS)}")
    maxval = FORMATS[format]
    q = quantize(img, maxval)
    path = Path(path)
    if format == "png_gray":
        PILImage.fromarray(q.astype(np.uint8), mode="L").save(path, format="PNG")
        return
    rows, cols = img.shape
    header = f"P5\n{cols} {rows}\n{maxval}\n".encode("ascii")
    samples = q.astype(">u2" if maxval > 255 else np.uint8).tobytes()
    path.write_bytes(header + samples)


def _format_value(value: float | None) -> str:
    if value is None:
        return ""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.6g}"


def write_report(rows, path) -> None:
    """Write (label, MetricsReport) rows as CSV.

    Column order is fixed; the PSNR column appears only when at least one row
    carries a PSNR value. Absent metrics become empty fields. UTF-8, '\\n'
    line endings, '.' decimal separator regardless of locale.
    """
    rows = list(rows)
    with_psnr = any(report.psnr_db is not None for _, report in rows)
    header = "filter," + ",".join(REPORT_COLUMNS) + (",PSNR" if with_psnr else "")
    lines = [header]
    for label, report in rows:
        values = [report.msd, report.nmv, report.nsd, report.enl, report.dr, report.fom]
        if with_psnr:
            values.append(report.psnr_db)
        lines.append(",".join([str(label)] + [_format_value(v) for v in values]))
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
