"""Activation matrices, the ACTV file format and a synthetic activation generator."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (
    BadMagic,
    DimensionOverflow,
    InvalidSpec,
    IoFailure,
    NonFiniteValue,
    UnsupportedVersion,
)
from .rng import SplitMix64

ACTV_MAGIC = b"ACTV"
ACTV_VERSION = 1
DTYPE_F32 = 0
# magic, version u16, dtype u8, reserved u8, S u32, D u32
_HEADER = struct.Struct("<4sHBBII")
HEADER_SIZE = _HEADER.size  # 16

# highest frequency index a synthetic mode may use along either axis
MAX_MODE_INDEX = 3


@dataclass(frozen=True, eq=False)
class ActivationMatrix:
    """Real S x D activation tensor (sequence x hidden), stored as float32.

    The array is copied on construction and marked read-only.
    """

    data: np.ndarray
    origin_tag: Optional[str] = None

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float32, order="C", copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"activation must be a non-empty 2D array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteValue("activation contains NaN or Inf")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def nbytes(self) -> int:
        """Size of the raw float32 payload."""
        return 4 * self.rows * self.cols

    def __eq__(self, other):
        if not isinstance(other, ActivationMatrix):
            return NotImplemented
        return self.shape == other.shape and self.data.tobytes() == other.data.tobytes()

    def __repr__(self):
        tag = f", origin_tag={self.origin_tag!r}" if self.origin_tag else ""
        return f"ActivationMatrix({self.rows}x{self.cols}{tag})"


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of the smooth synthetic activation generator.

    ``noise_sigma`` is the white-noise standard deviation after the modal
    signal has been scaled to unit mean power.
    """

    mode_count: int = 8
    decay_exponent: float = 2.0
    noise_sigma: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.mode_count < 0:
            raise InvalidSpec("mode_count must be non-negative")
        if self.decay_exponent < 0:
            raise InvalidSpec("decay_exponent must be non-negative")
        if self.noise_sigma < 0:
            raise InvalidSpec("noise_sigma must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpec("seed must fit in 64 unsigned bits")


def frobenius_norm(A) -> float:
    data = A.data if isinstance(A, ActivationMatrix) else np.asarray(A)
    return float(np.sqrt(np.sum(np.square(data, dtype=np.float64))))


def load_activation(path) -> ActivationMatrix:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if len(raw) < HEADER_SIZE or raw[:4] != ACTV_MAGIC:
        raise BadMagic(f"{path}: not an ACTV file")
    _, version, dtype, _reserved, rows, cols = _HEADER.unpack_from(raw)
    if version != ACTV_VERSION or dtype != DTYPE_F32:
        raise UnsupportedVersion(f"{path}: version {version}, dtype {dtype}")
    if rows < 1 or cols < 1:
        raise DimensionOverflow(f"{path}: empty dimensions {rows}x{cols}")
    need = rows * cols * 4
    have = len(raw) - HEADER_SIZE
    if need > have:
        raise DimensionOverflow(f"{path}: header declares {need} payload bytes, file has {have}")
    data = np.frombuffer(raw, dtype="<f4", count=rows * cols, offset=HEADER_SIZE)
    if not np.all(np.isfinite(data)):
        raise NonFiniteValue(f"{path}: payload contains NaN or Inf")
    return ActivationMatrix(data.reshape(rows, cols))


def store_activation(A: ActivationMatrix, path) -> None:
    header = _HEADER.pack(ACTV_MAGIC, ACTV_VERSION, DTYPE_F32, 0, A.rows, A.cols)
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(A.data.astype("<f4", copy=False).tobytes())
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def generate_synthetic(S: int, D: int, spec: SynthSpec) -> ActivationMatrix:
    """Sum of low-frequency 2D cosines plus white noise.

    Each mode has integer frequencies (u, v) in {0..3}^2, amplitude
    ``g * (1 + u + v) ** -beta`` with ``g ~ U[0.5, 1.5)`` and phase
    ``phi ~ U[0, 2 pi)``. Mode parameters and noise come from independent
    child streams of ``SplitMix64(spec.seed)``.
    """
    if S < 1 or D < 1:
        raise InvalidSpec(f"dimensions must be positive, got {S}x{D}")
    if 4 * spec.mode_count > S * D:
        raise InvalidSpec(f"mode_count {spec.mode_count} exceeds S*D/4 = {S * D / 4}")

    root = SplitMix64(spec.seed)
    nm = spec.mode_count
    modes = root.split(1)
    u = modes.integers(MAX_MODE_INDEX + 1, nm)
    v = modes.integers(MAX_MODE_INDEX + 1, nm)
    gain = 0.5 + modes.uniform(nm)
    phase = 2.0 * np.pi * modes.uniform(nm)
    amp = gain * (1.0 + u + v) ** (-spec.decay_exponent)

    s = np.arange(S, dtype=np.float64)[:, None]
    d = np.arange(D, dtype=np.float64)[None, :]
    signal = np.zeros((S, D))
    for m in range(nm):
        signal += amp[m] * np.cos(2.0 * np.pi * (u[m] * s / S + v[m] * d / D) + phase[m])

    power = np.mean(signal**2)
    if power > 0:
        signal /= np.sqrt(power)
    if spec.noise_sigma > 0:
        signal += spec.noise_sigma * root.split(2).normal(S * D).reshape(S, D)

    tag = f"synthetic/modes={nm},beta={spec.decay_exponent:g},sigma={spec.noise_sigma:g},seed={spec.seed}"
    return ActivationMatrix(signal, origin_tag=tag)
