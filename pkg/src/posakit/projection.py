"""Frobenius inner-product machinery and the ordered span-projection cascade."""

from __future__ import annotations

import numpy as np

from .image import as_image


def frob_inner(a, b) -> float:
    """Frobenius inner product <A,B> = trace(A B^T) = sum of elementwise products."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.dot(a.ravel(), b.ravel()))


def frob_norm(a) -> float:
    a = np.asarray(a, dtype=np.float64)
    return float(np.sqrt(np.dot(a.ravel(), a.ravel())))


def normalize(a) -> np.ndarray:
    """Scale to unit Frobenius norm; a zero matrix has no direction to keep."""
    a = np.asarray(a, dtype=np.float64)
    norm = frob_norm(a)
    if norm == 0.0:
        raise ValueError("cannot normalize a zero-norm matrix")
    return a / norm


def span_cascade(members) -> list[np.ndarray]:
    """Project each member onto the span of the normalized members before it.

    Every member except the last is normalized to a unit direction U_j; the
    last enters its own projection raw. The k-th output (k = 2..n) is

        P_k = sum_{j<k} <M_k', U_j> U_j

    where M_k' is U_k for interior members and the raw final member for k = n.
    This is a direct expansion over the raw unit directions, not an orthogonal
    (Gram-Schmidt) projection: when the U_j overlap, shared components are
    counted once per direction. A zero-norm member has no direction, so it
    contributes nothing to later projections and its own projection is zero.

    Returns the n-1 projections [P_2, ..., P_n].
    """
    mats = [as_image(m, f"member {i + 1}") for i, m in enumerate(members)]
    if len(mats) < 2:
        raise ValueError(f"need at least 2 members, got {len(mats)}")
    shapes = {m.shape for m in mats}
    if len(shapes) != 1:
        raise ValueError(f"members must share one shape, got {sorted(shapes)}")

    units: list[np.ndarray | None] = []
    for m in mats[:-1]:
        norm = frob_norm(m)
        units.append(m / norm if norm > 0.0 else None)

    projections: list[np.ndarray] = []
    for k in range(1, len(mats)):
        if k < len(mats) - 1:
            target = units[k]
        else:
            target = mats[-1]
        proj = np.zeros_like(mats[0])
        if target is not None:
            for unit in units[:k]:
                if unit is not None:
                    proj += frob_inner(target, unit) * unit
        projections.append(proj)
    return projections
