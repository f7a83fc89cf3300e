"""Compress + decompress wall-time benchmark across matrix sizes and codecs."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import codecs
from .baselines import TOPK_ENTRY_BYTES, byte_budget_for_ratio, compress_lowrank, compress_topk
from .errors import RatioInfeasible
from .fourier import choose_cutoffs, compress_fourier_block
from .metrics import median_time
from .tensor import ActivationMatrix, SynthSpec, generate_synthetic

BENCH_HEADER = ("rows", "cols", "codec", "ratio_requested", "ratio_achieved", "t_compress_s", "t_decompress_s", "t_total_s")


@dataclass(frozen=True)
class BenchRow:
    rows: int
    cols: int
    codec: str
    ratio_requested: float
    ratio_achieved: float
    t_compress: float
    t_decompress: float

    @property
    def t_total(self) -> float:
        return self.t_compress + self.t_decompress


def _compressor(A: ActivationMatrix, codec: str, ratio: float):
    """Compression closure at ``ratio``, falling back to the smallest payload unit
    (one coefficient / entry / rank) when the matrix is too small for the ratio."""
    S, D = A.shape
    if codec == "fourier":
        try:
            ks, kd = choose_cutoffs(S, D, ratio)
        except RatioInfeasible:
            ks, kd = 1, 1
        return lambda: compress_fourier_block(A, ks, kd)
    budget = byte_budget_for_ratio(S, D, ratio)
    if codec == "topk":
        budget = max(budget, TOPK_ENTRY_BYTES)
        return lambda: compress_topk(A, budget)
    budget = max(budget, 4 * (S + D))
    return lambda: compress_lowrank(A, budget, codec)


def bench(
    sizes: Iterable[tuple[int, int]],
    codec_names: Sequence[str] = codecs.CODECS,
    ratio: float = 8.0,
    repeats: int = 5,
    seed: int = 0,
) -> list[BenchRow]:
    rows = []
    for S, D in sizes:
        modes = min(8, (S * D) // 4)
        A = generate_synthetic(S, D, SynthSpec(mode_count=modes, decay_exponent=2.0, noise_sigma=0.01, seed=seed))
        for name in codec_names:
            t_c, payload = median_time(_compressor(A, name, ratio), repeats)
            t_d, _ = median_time(lambda: codecs.decompress(payload), repeats)
            rows.append(BenchRow(S, D, name, ratio, A.nbytes / payload.nbytes, t_c, t_d))
    return rows


def write_bench_csv(rows: Iterable[BenchRow], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(BENCH_HEADER)
    for r in rows:
        writer.writerow(
            [r.rows, r.cols, r.codec]
            + [f"{x:.9g}" for x in (r.ratio_requested, r.ratio_achieved, r.t_compress, r.t_decompress, r.t_total)]
        )
