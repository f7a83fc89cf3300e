"""FCMP container: one compressed activation per file.

Header (24 bytes, little-endian)::

    magic "FCMP" | version u16 = 1 | codec u8 | mode u8 | S u32 | D u32 | K_S u32 | K_D u32

``codec`` is 0 fourier, 1 topk, 2 svd, 3 qr. For fourier K_S/K_D are the
block cutoffs and the body is K_S*K_D float32 (re, im) pairs. For topk K_S
holds k, K_D is 0, and the body is k (u32 index, f32 value) entries. For svd
and qr K_S holds the rank, K_D is 0, and the body is the S x rank left factor
followed by the rank x D right factor, float32 row-major.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Union

import numpy as np

from .baselines import LowRankMethod, LowRankPayload, TopKPayload
from .errors import BadMagic, CorruptPayload, IoFailure, UnsupportedVersion
from .fourier import FourierPayload, RetentionMode

FCMP_MAGIC = b"FCMP"
FCMP_VERSION = 1
_HEADER = struct.Struct("<4sHBBIIII")
HEADER_SIZE = _HEADER.size

CODEC_FOURIER, CODEC_TOPK, CODEC_SVD, CODEC_QR = 0, 1, 2, 3
CODEC_NAMES = {CODEC_FOURIER: "fourier", CODEC_TOPK: "topk", CODEC_SVD: "svd", CODEC_QR: "qr"}

Payload = Union[FourierPayload, TopKPayload, LowRankPayload]
_TOPK_ENTRY = np.dtype([("index", "<u4"), ("value", "<f4")])


def encode(p: Payload) -> bytes:
    if isinstance(p, FourierPayload):
        header = _HEADER.pack(FCMP_MAGIC, FCMP_VERSION, CODEC_FOURIER, int(p.mode), p.rows, p.cols, p.ks, p.kd)
        body = np.ascontiguousarray(p.coeffs, dtype=np.complex64).astype("<c8").tobytes()
    elif isinstance(p, TopKPayload):
        header = _HEADER.pack(FCMP_MAGIC, FCMP_VERSION, CODEC_TOPK, 0, p.rows, p.cols, p.k, 0)
        entries = np.empty(p.k, dtype=_TOPK_ENTRY)
        entries["index"] = p.indices
        entries["value"] = p.values
        body = entries.tobytes()
    elif isinstance(p, LowRankPayload):
        header = _HEADER.pack(FCMP_MAGIC, FCMP_VERSION, int(p.method), 0, p.rows, p.cols, p.rank, 0)
        body = np.asarray(p.left, dtype="<f4").tobytes() + np.asarray(p.right, dtype="<f4").tobytes()
    else:
        raise TypeError(f"unknown payload type {type(p).__name__}")
    return header + body


def decode(raw: bytes) -> Payload:
    if len(raw) < HEADER_SIZE or raw[:4] != FCMP_MAGIC:
        raise BadMagic("not an FCMP container")
    _, version, codec, mode, S, D, k1, k2 = _HEADER.unpack_from(raw)
    if version != FCMP_VERSION:
        raise UnsupportedVersion(f"FCMP version {version}")
    if S < 1 or D < 1:
        raise CorruptPayload(f"bad dimensions {S}x{D}")
    body = raw[HEADER_SIZE:]

    def take(count: int, dtype) -> np.ndarray:
        need = count * np.dtype(dtype).itemsize
        if len(body) != need:
            raise CorruptPayload(f"body has {len(body)} bytes, header implies {need}")
        return np.frombuffer(body, dtype=dtype, count=count)

    if codec == CODEC_FOURIER:
        if mode not in (0, 1):
            raise CorruptPayload(f"unknown retention mode {mode}")
        if not (1 <= k1 <= S and 1 <= k2 <= D):
            raise CorruptPayload(f"cutoffs {k1}x{k2} exceed {S}x{D}")
        coeffs = take(k1 * k2, "<c8").reshape(k1, k2).astype(np.complex64)
        return FourierPayload(S, D, k1, k2, RetentionMode(mode), coeffs)
    if codec == CODEC_TOPK:
        if k1 > S * D:
            raise CorruptPayload(f"k={k1} exceeds S*D")
        entries = take(k1, _TOPK_ENTRY)
        return TopKPayload(S, D, entries["index"].astype(np.uint32), entries["value"].astype(np.float32))
    if codec in (CODEC_SVD, CODEC_QR):
        if not 1 <= k1 <= min(S, D):
            raise CorruptPayload(f"rank {k1} out of range for {S}x{D}")
        flat = take(k1 * (S + D), "<f4")
        left = flat[: S * k1].reshape(S, k1).astype(np.float32)
        right = flat[S * k1 :].reshape(k1, D).astype(np.float32)
        return LowRankPayload(S, D, LowRankMethod(codec), left, right)
    raise CorruptPayload(f"unknown codec id {codec}")


def write_payload(p: Payload, path) -> None:
    try:
        Path(path).write_bytes(encode(p))
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_payload(path) -> Payload:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return decode(raw)
