"""Low-frequency block codec in the 2D Fourier domain.

Encoder: 2D FFT, keep a K_S x K_D block of coefficients (float32 pairs).
Decoder: zero spectrum, write the block back, fill in each missing conjugate
partner, force self-conjugate bins real and take the real inverse FFT.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import CorruptPayload, RatioInfeasible
from .spectral import fft2_block, ifft2_columns, irfft2_columns
from .tensor import ActivationMatrix

BYTES_PER_COEFF = 8  # two float32


class RetentionMode(enum.IntEnum):
    CORNER = 0
    CENTERED = 1

    @classmethod
    def parse(cls, value) -> "RetentionMode":
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            return cls[value.upper()]
        return cls(int(value))


@dataclass(frozen=True)
class CodecConfig:
    target_ratio: float
    retention_mode: RetentionMode = RetentionMode.CORNER

    def __post_init__(self):
        if not self.target_ratio > 1:
            raise ValueError(f"target ratio must satisfy r > 1, got {self.target_ratio}")
        object.__setattr__(self, "retention_mode", RetentionMode.parse(self.retention_mode))


@dataclass(frozen=True, eq=False)
class FourierPayload:
    rows: int
    cols: int
    ks: int
    kd: int
    mode: RetentionMode
    coeffs: np.ndarray  # complex64, shape (ks, kd)

    @property
    def nbytes(self) -> int:
        return BYTES_PER_COEFF * self.ks * self.kd

    @property
    def ratio(self) -> float:
        return 4 * self.rows * self.cols / self.nbytes


def choose_cutoffs(S: int, D: int, r: float) -> tuple[int, int]:
    """Cutoffs shrinking both axes by 1/sqrt(2r), so that 8*K_S*K_D <= 4*S*D/r.

    >>> choose_cutoffs(512, 2048, 8)
    (128, 512)
    >>> choose_cutoffs(1, 2048, 8)
    (1, 128)
    """
    if S < 1 or D < 1:
        raise ValueError("dimensions must be positive")
    if not r > 1:
        raise ValueError(f"target ratio must satisfy r > 1, got {r}")
    if S * D < 2 * r:
        raise RatioInfeasible(f"{S}x{D} cannot hold one complex coefficient at ratio {r}")

    scale = math.sqrt(2 * r)
    raw_s = math.floor(S / scale)
    raw_d = math.floor(D / scale)
    ks, kd = max(1, raw_s), max(1, raw_d)
    if raw_s < 1 and raw_d < 1:
        raise RatioInfeasible(f"{S}x{D} cannot hold one complex coefficient at ratio {r}")
    if raw_s < 1:
        kd = max(1, math.floor(S * D / (2 * r * ks)))
    elif raw_d < 1:
        ks = max(1, math.floor(S * D / (2 * r * kd)))
    ks, kd = min(ks, S), min(kd, D)

    # guard against floor() landing on the wrong side of an exact boundary
    while 2 * r * ks * kd > S * D:
        if ks >= kd and ks > 1:
            ks -= 1
        elif kd > 1:
            kd -= 1
        else:
            raise RatioInfeasible(f"{S}x{D} at ratio {r}")
    return ks, kd


def _axis_indices(n: int, k: int, mode: RetentionMode) -> np.ndarray:
    if mode is RetentionMode.CORNER:
        return np.arange(k)
    lo = np.arange((k + 1) // 2)
    hi = np.arange(n - k // 2, n)
    return np.concatenate([lo, hi])


def retention_indices(S: int, D: int, ks: int, kd: int, mode=RetentionMode.CORNER):
    """Row and column index vectors of the transmitted block, ascending."""
    mode = RetentionMode.parse(mode)
    if not (1 <= ks <= S and 1 <= kd <= D):
        raise CorruptPayload(f"cutoffs {ks}x{kd} invalid for {S}x{D}")
    return _axis_indices(S, ks, mode), _axis_indices(D, kd, mode)


def retained_mask(S: int, D: int, ks: int, kd: int, mode=RetentionMode.CORNER) -> np.ndarray:
    ui, vi = retention_indices(S, D, ks, kd, mode)
    mask = np.zeros((S, D), dtype=bool)
    mask[np.ix_(ui, vi)] = True
    return mask


def passband_mask(S: int, D: int, ks: int, kd: int, mode=RetentionMode.CORNER) -> np.ndarray:
    """Boolean S x D mask of bins that are nonzero after decoder symmetrization.

    This is the transmitted block plus the conjugate partner of every
    transmitted bin.
    """
    kept = retained_mask(S, D, ks, kd, mode)
    mirrored = kept[(-np.arange(S)) % S][:, (-np.arange(D)) % D]
    return kept | mirrored


def compress_fourier(A: ActivationMatrix, cfg: CodecConfig) -> FourierPayload:
    ks, kd = choose_cutoffs(A.rows, A.cols, cfg.target_ratio)
    return compress_fourier_block(A, ks, kd, cfg.retention_mode)


def compress_fourier_block(A: ActivationMatrix, ks: int, kd: int, mode=RetentionMode.CORNER) -> FourierPayload:
    """Encode with explicit cutoffs; ``compress_fourier`` derives them from a ratio."""
    mode = RetentionMode.parse(mode)
    ui, vi = retention_indices(A.rows, A.cols, ks, kd, mode)
    # single precision throughout: the payload stores complex64 anyway
    block = fft2_block(A, ui, vi).astype(np.complex64)
    return FourierPayload(A.rows, A.cols, ks, kd, mode, block)


def _column_spectrum(p: FourierPayload) -> tuple[np.ndarray, np.ndarray]:
    """Symmetrized spectrum restricted to its nonzero columns.

    Returns ``(cols, compact)`` where ``compact[:, j]`` is spectrum column
    ``cols[j]``; every other column is identically zero.
    """
    S, D = p.rows, p.cols
    coeffs = np.asarray(p.coeffs)
    if coeffs.shape != (p.ks, p.kd):
        raise CorruptPayload(f"expected {p.ks}x{p.kd} coefficients, got shape {coeffs.shape}")
    if not np.all(np.isfinite(coeffs)):
        raise CorruptPayload("payload contains non-finite coefficients")
    ui, vi = retention_indices(S, D, p.ks, p.kd, p.mode)
    cols = np.union1d(vi, (-vi) % D)
    pos = np.full(D, -1, dtype=np.int64)
    pos[cols] = np.arange(len(cols))

    compact = np.zeros((S, len(cols)), dtype=np.complex128)
    kept = np.zeros((S, len(cols)), dtype=bool)
    compact[np.ix_(ui, pos[vi])] = coeffs
    kept[np.ix_(ui, pos[vi])] = True

    # conjugate partners that were not transmitted; transmitted bins are never overwritten
    uu, vv = np.meshgrid(ui, pos[vi], indexing="ij")
    mu, mv = (-uu) % S, pos[(-cols[vv]) % D]
    missing = ~kept[mu, mv]
    compact[mu[missing], mv[missing]] = np.conj(compact[uu[missing], vv[missing]])

    # bins equal to their own mirror: u in {0, S/2}, v in {0, D/2}
    su = [0] + ([S // 2] if S % 2 == 0 else [])
    sv = [c for c in ([0] + ([D // 2] if D % 2 == 0 else [])) if pos[c] >= 0]
    if sv:
        sc = np.ix_(su, pos[sv])
        compact[sc] = compact[sc].real
    return cols, compact


def symmetrized_spectrum(p: FourierPayload) -> np.ndarray:
    """Full S x D spectrum the decoder inverts (complex128)."""
    cols, compact = _column_spectrum(p)
    full = np.zeros((p.rows, p.cols), dtype=np.complex128)
    full[:, cols] = compact
    return full


def _inverse(p: FourierPayload) -> np.ndarray:
    cols, compact = _column_spectrum(p)
    return ifft2_columns(compact, cols, p.cols)


def decompress_fourier(p: FourierPayload) -> ActivationMatrix:
    cols, compact = _column_spectrum(p)
    return ActivationMatrix(irfft2_columns(compact, cols, p.cols, out_dtype=np.float32))


def reconstruct_with_residue(p: FourierPayload) -> tuple[ActivationMatrix, float]:
    """Decode and also return ||imag|| / ||real|| of the inverse transform."""
    out = _inverse(p)
    re_norm = float(np.linalg.norm(out.real))
    residue = float(np.linalg.norm(out.imag)) / re_norm if re_norm > 0 else float(np.linalg.norm(out.imag))
    return ActivationMatrix(out.real), residue
