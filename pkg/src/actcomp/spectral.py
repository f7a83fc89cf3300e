"""2D DFT / IDFT with the unnormalized-forward, 1/(SD)-inverse convention.

``fft2`` and ``ifft2`` are backed by pocketfft (``scipy.fft``), which handles
arbitrary sizes via mixed-radix and Bluestein passes. ``dft2_oracle`` is an
independent, literal evaluation of the defining double sum used to check them.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import DimensionMismatch, TooLargeForOracle
from .tensor import ActivationMatrix

NORMALIZATION = "forward-unnormalized / inverse-1-over-SD"
ORACLE_MAX_ELEMENTS = 4096


def _workers() -> int:
    """Thread count for pocketfft; SPECTRAL_THREADS=0 or unset means all cores."""
    raw = os.environ.get("SPECTRAL_THREADS", "0").strip() or "0"
    n = int(raw)
    return -1 if n <= 0 else n


@dataclass(frozen=True, eq=False)
class Spectrum:
    coeffs: np.ndarray
    normalization_tag: str = NORMALIZATION

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim != 2:
            raise ValueError("spectrum must be 2D")
        object.__setattr__(self, "coeffs", c)

    @property
    def rows(self) -> int:
        return self.coeffs.shape[0]

    @property
    def cols(self) -> int:
        return self.coeffs.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape

    def energy(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))


def _as_array(A) -> np.ndarray:
    if isinstance(A, ActivationMatrix):
        return A.data.astype(np.float64)
    return np.asarray(A, dtype=np.float64)


def fft2(A) -> Spectrum:
    return Spectrum(scipy.fft.fft2(_as_array(A), workers=_workers()))


def ifft2(spec) -> np.ndarray:
    coeffs = spec.coeffs if isinstance(spec, Spectrum) else np.asarray(spec, dtype=np.complex128)
    # scipy's "backward" norm applies 1/(S*D) on the inverse
    return scipy.fft.ifft2(coeffs, workers=_workers())


# complex elements per row chunk (512 KiB); keeps each pass inside L2
CHUNK_ELEMENTS = 1 << 15


def _row_step(D: int) -> int:
    return max(1, CHUNK_ELEMENTS // D)


def _complex_of(dtype):
    return np.complex64 if np.dtype(dtype) == np.float32 else np.complex128


def fft2_block(A, rows, cols, dtype=np.float64) -> np.ndarray:
    """fft2(A) sampled on the grid rows x cols.

    Row transforms are real-input FFTs run in cache-sized chunks; a column
    above D/2 is the conjugate of its mirror. Only the requested columns go
    through the column pass. ``dtype`` sets the working precision.
    """
    a = A.data if isinstance(A, ActivationMatrix) else np.asarray(A)
    S, D = a.shape
    cols = np.asarray(cols)
    low = cols <= D // 2
    src = np.where(low, cols, (-cols) % D)
    step = _row_step(D)
    partial = np.empty((S, len(cols)), dtype=_complex_of(dtype))
    for i in range(0, S, step):
        chunk = scipy.fft.rfft(a[i : i + step].astype(dtype, copy=False), axis=1, workers=_workers())
        partial[i : i + step] = chunk[:, src]
    partial[:, ~low] = partial[:, ~low].conj()
    return scipy.fft.fft(partial, axis=0, workers=_workers())[np.asarray(rows)]


def ifft2_columns(compact: np.ndarray, cols, D: int) -> np.ndarray:
    """Complex ifft2 of an S x D spectrum that is zero outside columns ``cols``.

    ``compact`` holds just those columns (shape S x len(cols)); the full
    spectrum is never materialized.
    """
    compact = np.asarray(compact, dtype=np.complex128)
    cols = np.asarray(cols)
    S = compact.shape[0]
    t = scipy.fft.ifft(compact, axis=0, workers=_workers())
    out = np.empty((S, D), dtype=np.complex128)
    step = _row_step(D)
    buf = np.zeros((step, D), dtype=np.complex128)
    for i in range(0, S, step):
        n = min(step, S - i)
        buf[:n, cols] = t[i : i + n]
        out[i : i + n] = scipy.fft.ifft(buf[:n], axis=1, workers=_workers())
    return out


def irfft2_columns(compact: np.ndarray, cols, D: int, dtype=np.float64, out_dtype=None) -> np.ndarray:
    """Real part of ``ifft2_columns`` without forming the complex S x D result.

    ``cols`` must be closed under v -> -v mod D. The Hermitian part of the
    spectrum has the same real inverse, so only columns v <= D/2 go through
    the column pass and each row is finished with a real-output inverse FFT.
    ``dtype`` sets the working precision; rows are cast to ``out_dtype``
    (default ``dtype``) as they are produced.
    """
    compact = np.asarray(compact, dtype=_complex_of(dtype))
    cols = np.asarray(cols)
    S = compact.shape[0]
    pos = np.full(D, -1, dtype=np.int64)
    pos[cols] = np.arange(len(cols))
    half_cols = cols[cols <= D // 2]
    flip = (-np.arange(S)) % S
    herm = 0.5 * (compact[:, pos[half_cols]] + compact[np.ix_(flip, pos[(-half_cols) % D])].conj())
    t = scipy.fft.ifft(herm, axis=0, workers=_workers())
    out = np.empty((S, D), dtype=out_dtype or dtype)
    step = _row_step(D)
    buf = np.zeros((step, D // 2 + 1), dtype=compact.dtype)
    for i in range(0, S, step):
        n = min(step, S - i)
        buf[:n, half_cols] = t[i : i + n]
        out[i : i + n] = scipy.fft.irfft(buf[:n], n=D, axis=1, workers=_workers())
    return out


def mirror_index(u, v, S: int, D: int):
    """Conjugate-partner bin of (u, v) for a real S x D signal."""
    return (-np.asarray(u)) % S, (-np.asarray(v)) % D


def dft2_oracle(A) -> Spectrum:
    """Brute-force O((SD)^2) evaluation of sum_s sum_d A[s,d] e^{-j2pi(us/S + vd/D)}."""
    a = _as_array(A)
    S, D = a.shape
    if S * D > ORACLE_MAX_ELEMENTS:
        raise TooLargeForOracle(f"{S}x{D} exceeds the oracle limit of {ORACLE_MAX_ELEMENTS} elements")
    s = np.arange(S)
    d = np.arange(D)
    out = np.empty((S, D), dtype=np.complex128)
    for u in range(S):
        for v in range(D):
            # reduce the integer phase first so large indices keep full precision
            phase = (np.outer(u * s % S, np.full(D, D)) + np.outer(np.full(S, S), v * d % D)) / (S * D)
            out[u, v] = np.sum(a * np.exp(-2j * np.pi * phase))
    return Spectrum(out)


def parseval_residual(A, spec: Spectrum) -> float:
    """Relative gap between spatial energy and (1/SD) * spectral energy."""
    a = _as_array(A)
    if a.shape != spec.shape:
        raise DimensionMismatch(f"matrix {a.shape} vs spectrum {spec.shape}")
    spatial = float(np.sum(a * a))
    if spatial == 0.0:
        return 0.0
    spectral = spec.energy() / a.size
    return abs(spatial - spectral) / spatial
