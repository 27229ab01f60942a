"""Doubling image resolution from half-resolution observations via span projections.

Two reconstruction modes share one assembly rule. Four phase-shifted
observations [O1..O4] (or a single observation padded with three random
auxiliary matrices in [0,1]) become the subbands of the unknown high-resolution
image: the approximation band is 2*O1 (the factor two is the one-level DWT DC
gain, so the inverse transform restores observation radiometry) and the three
detail bands are the span-cascade projections of O2, O3, O4. Every member of
the cascade enters the coefficients normalized, which keeps each detail band's
Frobenius norm at most the number of directions before it and makes the detail
bands invariant to uniform rescaling of the observations.

A forward synthesizer provides test material: 2x2 box blur of a high-resolution
image, the four 2x2 decimation phases, and per-observation speckle pinned to a
target SNR with independent sub-seeds.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .image import Subbands, as_image, require_even_dims
from .metrics import psnr
from .projection import frob_norm, span_cascade
from .speckle import SpeckleModel, apply_speckle_snr
from .wavelet import DB4, WaveletBasis, idwt2


@dataclass(frozen=True)
class ObservationSet:
    """One or four half-resolution observations plus synthesis provenance."""

    observations: tuple[np.ndarray, ...]
    seed: int | None = None
    snr_db: float | None = None

    def __post_init__(self) -> None:
        if len(self.observations) not in (1, 4):
            raise ValueError(f"expected 1 or 4 observations, got {len(self.observations)}")
        shapes = {np.shape(o) for o in self.observations}
        if len(shapes) != 1:
            raise ValueError(f"observations must share one shape, got {sorted(shapes)}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.observations[0].shape


@dataclass(frozen=True)
class AuxiliaryMatrices:
    """Three random matrices with entries in [0,1] standing in for missing observations."""

    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray
    seed: int | None = None

    def __post_init__(self) -> None:
        shapes = {np.shape(a) for a in (self.a1, self.a2, self.a3)}
        if len(shapes) != 1:
            raise ValueError(f"auxiliary matrices must share one shape, got {sorted(shapes)}")
        for name, a in (("a1", self.a1), ("a2", self.a2), ("a3", self.a3)):
            arr = np.asarray(a)
            if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
                raise ValueError(f"{name} has entries outside [0,1]")
            if not np.any(arr):
                raise ValueError(f"{name} is identically zero")

    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.a1, self.a2, self.a3


def draw_auxiliary(rows: int, cols: int, seed: int) -> AuxiliaryMatrices:
    """Three i.i.d. uniform-[0,1] matrices, reproducible from the seed."""
    if rows < 1 or cols < 1:
        raise ValueError(f"dimensions must be positive, got {rows}x{cols}")
    rng = np.random.default_rng(seed)
    a1, a2, a3 = (rng.random((rows, cols)) for _ in range(3))
    return AuxiliaryMatrices(a1=a1, a2=a2, a3=a3, seed=seed)


def bands_from_observations(members) -> Subbands:
    """Assemble the half-resolution subband set from a 4-member sequence.

    LL = 2 * the raw first member; LH, HL, HH = the cascade projections with
    the final member normalized too (pass-through when it has zero norm), so
    all three detail bands sit at unit scale regardless of input radiometry.
    """
    mats = [as_image(m, f"member {i + 1}") for i, m in enumerate(members)]
    if len(mats) != 4:
        raise ValueError(f"expected 4 members, got {len(mats)}")
    last_norm = frob_norm(mats[3])
    cascade = mats[:3] + [mats[3] / last_norm if last_norm > 0.0 else mats[3]]
    lh, hl, hh = span_cascade(cascade)
    return Subbands(ll=2.0 * mats[0], lh=lh, hl=hl, hh=hh)


def _as_observation_tuple(obs) -> tuple[np.ndarray, ...]:
    if isinstance(obs, ObservationSet):
        return obs.observations
    return tuple(obs)


def superres_four(obs, basis: WaveletBasis = DB4) -> np.ndarray:
    """Reconstruct a double-resolution image from four observations."""
    members = [as_image(o, f"observation {i + 1}") for i, o in enumerate(_as_observation_tuple(obs))]
    if len(members) != 4:
        raise ValueError(f"expected 4 observations, got {len(members)}")
    shapes = {m.shape for m in members}
    if len(shapes) != 1:
        raise ValueError(f"observations must share one shape, got {sorted(shapes)}")
    require_even_dims(members[0], "observation")
    if frob_norm(members[0]) == 0.0:
        raise ValueError("first observation has zero norm; no radiometry to anchor")
    return idwt2(bands_from_observations(members), basis)


def superres_one(obs, aux: AuxiliaryMatrices, basis: WaveletBasis = DB4) -> np.ndarray:
    """Reconstruct a double-resolution image from one observation plus auxiliaries."""
    obs = as_image(obs, "observation")
    if frob_norm(obs) == 0.0:
        raise ValueError("observation has zero norm; no radiometry to anchor")
    members = [obs]
    for name, a in zip(("a1", "a2", "a3"), aux.matrices()):
        a = as_image(a, name)
        if a.shape != obs.shape:
            raise ValueError(f"{name} shape {a.shape} does not match observation {obs.shape}")
        members.append(a)
    return idwt2(bands_from_observations(members), basis)


def synthesize_observations(hr, model: SpeckleModel, snr_db: float) -> ObservationSet:
    """Blur, decimate, and corrupt a high-resolution image into four observations.

    The blur is a 2x2 box average (sensor integration, periodic wrap); the four
    observations are its four 2x2 sampling phases, each speckled to the target
    SNR with an independent sub-seed derived from model.seed.
    """
    hr = as_image(hr, "high-resolution image")
    require_even_dims(hr, "high-resolution image")
    down = np.roll(hr, -1, axis=0)
    blurred = 0.25 * (hr + down + np.roll(hr, -1, axis=1) + np.roll(down, -1, axis=1))
    phases = [blurred[dr::2, dc::2] for dr, dc in ((0, 0), (0, 1), (1, 0), (1, 1))]
    sub_seeds = np.random.SeedSequence(model.seed).generate_state(4, dtype=np.uint64)
    observations = tuple(
        apply_speckle_snr(phase, replace(model, seed=int(sub)), snr_db)
        for phase, sub in zip(phases, sub_seeds)
    )
    return ObservationSet(observations=observations, seed=model.seed, snr_db=snr_db)


def reconstruct_and_score(
    hr, model: SpeckleModel, snr_db: float, basis: WaveletBasis = DB4
) -> tuple[np.ndarray, float]:
    """Synthesize observations, reconstruct, and score against the original."""
    hr = as_image(hr, "high-resolution image")
    obs = synthesize_observations(hr, model, snr_db)
    result = superres_four(obs, basis)
    return result, psnr(hr, result, peak=float(hr.max()))
