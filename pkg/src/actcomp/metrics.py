"""Reconstruction error, spectral energy concentration, token similarity and ratio sweeps."""

from __future__ import annotations

import csv
import math
import time
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import codecs
from .errors import DimensionMismatch, IndexOutOfRange, TooFewTokens, ZeroReference
from .fourier import passband_mask
from .spectral import Spectrum, fft2
from .tensor import ActivationMatrix

SWEEP_HEADER = ("codec", "ratio_requested", "ratio_achieved", "rel_error", "t_compress_s", "t_decompress_s")


def _data(A) -> np.ndarray:
    return A.data.astype(np.float64) if isinstance(A, ActivationMatrix) else np.asarray(A, dtype=np.float64)


def reconstruction_error(A, A_hat) -> float:
    """||A - A_hat||_F / ||A||_F, with 0/0 defined as 0."""
    a, b = _data(A), _data(A_hat)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    ref = np.linalg.norm(a)
    diff = np.linalg.norm(a - b)
    if ref == 0:
        if diff == 0:
            return 0.0
        raise ZeroReference("reference matrix is zero but the reconstruction is not")
    return float(diff / ref)


def _as_mask(mask, shape) -> np.ndarray:
    S, D = shape
    arr = np.asarray(mask)
    if arr.dtype == bool:
        if arr.shape != shape:
            raise IndexOutOfRange(f"mask shape {arr.shape} does not match spectrum {shape}")
        return arr
    pairs = np.asarray(list(mask), dtype=np.int64).reshape(-1, 2)
    out = np.zeros(shape, dtype=bool)
    if len(pairs):
        u, v = pairs[:, 0], pairs[:, 1]
        if np.any((u < 0) | (u >= S) | (v < 0) | (v >= D)):
            raise IndexOutOfRange(f"mask index outside {S}x{D}")
        out[u, v] = True
    return out


def energy_captured(spec: Spectrum, mask) -> float:
    """Fraction of sum |A[u,v]|^2 that lies inside ``mask``.

    ``mask`` is either a boolean array shaped like the spectrum or an
    iterable of (u, v) pairs. A zero spectrum counts as fully captured.
    """
    m = _as_mask(mask, spec.shape)
    power = np.abs(spec.coeffs) ** 2
    total = power.sum()
    if total == 0:
        return 1.0
    return float(min(1.0, power[m].sum() / total))


def token_similarity(A) -> float:
    """Mean cosine similarity over all unordered pairs of nonzero token rows."""
    a = _data(A)
    norms = np.linalg.norm(a, axis=1)
    nonzero = norms > 0
    skipped = int(np.count_nonzero(~nonzero))
    if skipped:
        warnings.warn(f"token_similarity: skipped {skipped} all-zero row(s)", stacklevel=2)
    n = int(np.count_nonzero(nonzero))
    if n < 2:
        raise TooFewTokens(f"need at least 2 nonzero rows, have {n}")
    unit = a[nonzero] / norms[nonzero, None]
    # |sum_i x_i|^2 = n + 2 * sum_{i<j} cos(i, j) for unit rows
    total = unit.sum(axis=0)
    pair_sum = (float(total @ total) - n) / 2.0
    return float(np.clip(pair_sum / (n * (n - 1) / 2.0), -1.0, 1.0))


def spectral_profile(A, steps: int) -> list[tuple[float, float]]:
    """Cumulative energy captured by growing corner passbands.

    Step t keeps a ceil(tS/steps) x ceil(tD/steps) block (plus conjugate
    partners); returns (block_fraction, energy_fraction) per step.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    spec = fft2(A)
    S, D = spec.shape
    out = []
    for t in range(1, steps + 1):
        ks, kd = math.ceil(t * S / steps), math.ceil(t * D / steps)
        out.append((ks * kd / (S * D), energy_captured(spec, passband_mask(S, D, ks, kd))))
    return out


@dataclass(frozen=True)
class SweepRow:
    codec: str
    ratio_requested: float
    byte_budget: int
    payload_bytes: int
    achieved_ratio: float
    rel_error: float
    wall_time_compress: float
    wall_time_decompress: float


def median_time(fn: Callable[[], object], repeats: int = 5, warmup: int = 1) -> tuple[float, object]:
    """Median wall time of ``repeats`` calls after ``warmup`` untimed calls."""
    result = None
    for _ in range(warmup):
        result = fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times)), result


def paired_median_times(fns: Sequence[Callable[[], object]], repeats: int = 5, warmup: int = 1) -> list[float]:
    """Like ``median_time`` for several callables, with their runs interleaved.

    Slow drift in machine load then hits every callable alike, which keeps
    ratios of the medians stable.
    """
    for _ in range(warmup):
        for fn in fns:
            fn()
    times = [[] for _ in fns]
    for _ in range(repeats):
        for slot, fn in zip(times, fns):
            t0 = time.perf_counter()
            fn()
            slot.append(time.perf_counter() - t0)
    return [float(np.median(t)) for t in times]


def ratio_sweep(
    A: ActivationMatrix,
    codec_names: Sequence[str],
    ratios: Iterable[float],
    mode="corner",
    repeats: int = 5,
    warmup: int = 1,
) -> list[SweepRow]:
    rows = []
    original = A.nbytes
    for r in ratios:
        budget = int(np.floor(original / r))
        for name in codec_names:
            t_c, payload = median_time(lambda: codecs.compress(A, name, r, mode), repeats, warmup)
            t_d, recon = median_time(lambda: codecs.decompress(payload), repeats, warmup)
            rows.append(
                SweepRow(
                    codec=name,
                    ratio_requested=float(r),
                    byte_budget=budget,
                    payload_bytes=payload.nbytes,
                    achieved_ratio=original / payload.nbytes,
                    rel_error=reconstruction_error(A, recon),
                    wall_time_compress=t_c,
                    wall_time_decompress=t_d,
                )
            )
    return rows


def write_sweep_csv(rows: Iterable[SweepRow], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow(
            [row.codec]
            + [
                f"{x:.9g}"
                for x in (
                    row.ratio_requested,
                    row.achieved_ratio,
                    row.rel_error,
                    row.wall_time_compress,
                    row.wall_time_decompress,
                )
            ]
        )
