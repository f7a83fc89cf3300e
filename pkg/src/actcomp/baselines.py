"""Comparison codecs under the same byte accounting: Top-k and low-rank (SVD, QR)."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import BudgetTooSmall, ConvergenceFailure, CorruptPayload, RankOutOfRange
from .tensor import ActivationMatrix

TOPK_ENTRY_BYTES = 8  # u32 flat index + f32 value


class LowRankMethod(enum.IntEnum):
    SVD = 2
    QR = 3

    @classmethod
    def parse(cls, value) -> "LowRankMethod":
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            return cls[value.upper()]
        return cls(int(value))


@dataclass(frozen=True, eq=False)
class TopKPayload:
    rows: int
    cols: int
    indices: np.ndarray  # uint32, strictly increasing
    values: np.ndarray  # float32

    @property
    def k(self) -> int:
        return len(self.indices)

    @property
    def nbytes(self) -> int:
        return TOPK_ENTRY_BYTES * self.k


@dataclass(frozen=True, eq=False)
class LowRankPayload:
    rows: int
    cols: int
    method: LowRankMethod
    left: np.ndarray  # float32 (rows, rank)
    right: np.ndarray  # float32 (rank, cols)

    @property
    def rank(self) -> int:
        return self.left.shape[1]

    @property
    def nbytes(self) -> int:
        return 4 * self.rank * (self.rows + self.cols)


def byte_budget_for_ratio(S: int, D: int, r: float) -> int:
    """Largest payload size that still achieves ratio r on an S x D float32 matrix."""
    return int(np.floor(4 * S * D / r))


# --- Top-k -----------------------------------------------------------------


def compress_topk(A: ActivationMatrix, byte_budget: int) -> TopKPayload:
    if byte_budget < TOPK_ENTRY_BYTES:
        raise BudgetTooSmall(f"budget {byte_budget} B cannot hold one {TOPK_ENTRY_BYTES}-byte entry")
    flat = A.data.ravel()
    k = min(byte_budget // TOPK_ENTRY_BYTES, flat.size)
    # stable sort on -|x|: largest magnitudes first, equal magnitudes by lower index
    order = np.argsort(-np.abs(flat), kind="stable")[:k]
    idx = np.sort(order)
    return TopKPayload(A.rows, A.cols, idx.astype(np.uint32), flat[idx].astype(np.float32))


def decompress_topk(p: TopKPayload) -> ActivationMatrix:
    n = p.rows * p.cols
    idx = np.asarray(p.indices, dtype=np.int64)
    if len(idx) != len(p.values):
        raise CorruptPayload("index and value counts differ")
    if len(idx) and (idx[-1] >= n or idx[0] < 0 or np.any(np.diff(idx) <= 0)):
        raise CorruptPayload("indices must be strictly increasing and below S*D")
    out = np.zeros(n, dtype=np.float32)
    out[idx] = p.values
    return ActivationMatrix(out.reshape(p.rows, p.cols))


# --- low rank ----------------------------------------------------------------


def svd_truncated(A, rank: int) -> tuple[np.ndarray, np.ndarray]:
    """Best rank-``rank`` factors (U*Sigma, V^T) in float64.

    Uses LAPACK's QR-iteration driver (gesvd) rather than divide-and-conquer.
    """
    a = A.data.astype(np.float64) if isinstance(A, ActivationMatrix) else np.asarray(A, dtype=np.float64)
    S, D = a.shape
    if not 1 <= rank <= min(S, D):
        raise RankOutOfRange(f"rank {rank} outside [1, {min(S, D)}]")
    try:
        u, sv, vt = scipy.linalg.svd(a, full_matrices=False, lapack_driver="gesvd", check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return u[:, :rank] * sv[:rank], vt[:rank]


def qr_truncated(A, rank: int) -> tuple[np.ndarray, np.ndarray]:
    """Rank-``rank`` factors from column-pivoted QR, right factor un-permuted."""
    a = A.data.astype(np.float64) if isinstance(A, ActivationMatrix) else np.asarray(A, dtype=np.float64)
    S, D = a.shape
    if not 1 <= rank <= min(S, D):
        raise RankOutOfRange(f"rank {rank} outside [1, {min(S, D)}]")
    q, r, perm = scipy.linalg.qr(a, mode="economic", pivoting=True, check_finite=False)
    right = np.empty((rank, D))
    right[:, perm] = r[:rank]
    return q[:, :rank], right


def lowrank_rank_for_budget(S: int, D: int, byte_budget: int) -> int:
    rank = byte_budget // (4 * (S + D))
    if rank < 1:
        raise BudgetTooSmall(f"budget {byte_budget} B is below one rank-1 term ({4 * (S + D)} B)")
    return min(rank, S, D)


def compress_lowrank(A: ActivationMatrix, byte_budget: int, method=LowRankMethod.SVD) -> LowRankPayload:
    method = LowRankMethod.parse(method)
    rank = lowrank_rank_for_budget(A.rows, A.cols, byte_budget)
    factor = svd_truncated if method is LowRankMethod.SVD else qr_truncated
    left, right = factor(A, rank)
    return LowRankPayload(A.rows, A.cols, method, left.astype(np.float32), right.astype(np.float32))


def decompress_lowrank(p: LowRankPayload) -> ActivationMatrix:
    left, right = np.asarray(p.left), np.asarray(p.right)
    if left.ndim != 2 or right.ndim != 2:
        raise CorruptPayload("factors must be 2D")
    if left.shape[0] != p.rows or right.shape[1] != p.cols or left.shape[1] != right.shape[0]:
        raise CorruptPayload(f"factor shapes {left.shape} x {right.shape} do not match {p.rows}x{p.cols}")
    if not 1 <= left.shape[1] <= min(p.rows, p.cols):
        raise CorruptPayload(f"rank {left.shape[1]} out of range")
    return ActivationMatrix(left.astype(np.float64) @ right.astype(np.float64))
