"""Uniform compress/decompress entry points keyed by codec name and target ratio."""

from __future__ import annotations

from .baselines import (
    LowRankPayload,
    TopKPayload,
    byte_budget_for_ratio,
    compress_lowrank,
    compress_topk,
    decompress_lowrank,
    decompress_topk,
)
from .fourier import CodecConfig, FourierPayload, compress_fourier, decompress_fourier
from .tensor import ActivationMatrix

CODECS = ("fourier", "topk", "svd", "qr")


def compress(A: ActivationMatrix, codec: str, ratio: float, mode="corner"):
    """Compress A so its payload is at most 4*S*D/ratio bytes."""
    if codec == "fourier":
        return compress_fourier(A, CodecConfig(ratio, mode))
    if not ratio > 1:
        raise ValueError(f"target ratio must satisfy r > 1, got {ratio}")
    budget = byte_budget_for_ratio(A.rows, A.cols, ratio)
    if codec == "topk":
        return compress_topk(A, budget)
    if codec in ("svd", "qr"):
        return compress_lowrank(A, budget, codec)
    raise ValueError(f"unknown codec {codec!r}; expected one of {', '.join(CODECS)}")


def decompress(p) -> ActivationMatrix:
    if isinstance(p, FourierPayload):
        return decompress_fourier(p)
    if isinstance(p, TopKPayload):
        return decompress_topk(p)
    if isinstance(p, LowRankPayload):
        return decompress_lowrank(p)
    raise TypeError(f"unknown payload type {type(p).__name__}")
