"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error. Data goes to files or
stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from typing import Optional, Sequence

import numpy as np

from . import codecs
from .bench import bench, write_bench_csv
from .container import read_payload, write_payload
from .errors import ActCompError
from .metrics import ratio_sweep, reconstruction_error, spectral_profile, token_similarity, write_sweep_csv
from .netsim import parse_config, simulate, write_results_csv
from .tensor import SynthSpec, generate_synthetic, load_activation, store_activation

SWEEP_FIXTURE = dict(S=64, D=64, modes=8, beta=2.0, sigma=0.01)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _sizes(text: str) -> list[tuple[int, int]]:
    out = []
    for item in text.split(","):
        try:
            s, d = item.lower().split("x")
            out.append((int(s), int(d)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"sizes look like 256x256,512x512; got {item!r}")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="actcomp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def cmd(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--seed", type=int, default=0, help="seed for any randomized behavior")
        return p

    p = cmd("gen", "write a synthetic activation matrix")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--modes", type=int, default=8)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--sigma", type=float, default=0.01)
    p.add_argument("--out", required=True)

    p = cmd("compress", "compress an ACTV file into an FCMP container")
    p.add_argument("--codec", choices=codecs.CODECS, default="fourier")
    p.add_argument("--ratio", type=float, required=True)
    p.add_argument("--mode", choices=("corner", "centered"), default="corner")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)

    p = cmd("decompress", "reconstruct an ACTV file from an FCMP container")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)

    p = cmd("metrics", "relative reconstruction error of --test against --ref")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)

    p = cmd("sweep", "error/time table over codecs and ratios")
    p.add_argument("--codecs", default=",".join(codecs.CODECS))
    p.add_argument("--ratios", type=_float_list, default=[6.0, 8.0, 10.0])
    p.add_argument("--in", dest="inp")
    p.add_argument("--out", default="-")
    p.add_argument("--seeds", type=_int_list, help="without --in: synthetic fixture seeds to average over")

    p = cmd("analyze", "spectral energy profile and token similarity")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--profile-steps", type=int, default=8)
    p.add_argument("--similarity", action="store_true")

    p = cmd("simulate", "run the multi-client latency simulation")
    p.add_argument("--config", required=True, help="key = value file of SimConfig fields")
    p.add_argument("--out", default="-")

    p = cmd("bench", "compress+decompress timing per size and codec")
    p.add_argument("--sizes", type=_sizes, default=[(256, 256), (512, 512)])
    p.add_argument("--out", default="-")
    return parser


@contextlib.contextmanager
def _output(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _check_ratio(r: float) -> None:
    if not r > 1:
        raise UsageError(f"--ratio must satisfy r > 1 (got {r:g})")


def _cmd_gen(args) -> None:
    spec = SynthSpec(args.modes, args.beta, args.sigma, args.seed)
    store_activation(generate_synthetic(args.rows, args.cols, spec), args.out)


def _cmd_compress(args) -> None:
    _check_ratio(args.ratio)
    A = load_activation(args.inp)
    write_payload(codecs.compress(A, args.codec, args.ratio, args.mode), args.out)


def _cmd_decompress(args) -> None:
    store_activation(codecs.decompress(read_payload(args.inp)), args.out)


def _cmd_metrics(args) -> None:
    err = reconstruction_error(load_activation(args.ref), load_activation(args.test))
    print(f"rel_error={err:.9g}")


def _parse_codecs(text: str) -> list[str]:
    names = [c.strip() for c in text.split(",") if c.strip()]
    bad = [c for c in names if c not in codecs.CODECS]
    if bad or not names:
        raise UsageError(f"--codecs must be drawn from {','.join(codecs.CODECS)}; got {text!r}")
    return names


def _cmd_sweep(args) -> None:
    names = _parse_codecs(args.codecs)
    for r in args.ratios:
        _check_ratio(r)
    if args.inp:
        rows = ratio_sweep(load_activation(args.inp), names, args.ratios)
    else:
        seeds = args.seeds or [args.seed]
        f = SWEEP_FIXTURE
        per_seed = [
            ratio_sweep(
                generate_synthetic(f["S"], f["D"], SynthSpec(f["modes"], f["beta"], f["sigma"], s)),
                names,
                args.ratios,
            )
            for s in seeds
        ]
        rows = [_average_rows(cells) for cells in zip(*per_seed)]
    with _output(args.out) as fh:
        write_sweep_csv(rows, fh)


def _average_rows(cells):
    from dataclasses import replace

    first = cells[0]
    return replace(
        first,
        rel_error=float(np.mean([c.rel_error for c in cells])),
        wall_time_compress=float(np.median([c.wall_time_compress for c in cells])),
        wall_time_decompress=float(np.median([c.wall_time_decompress for c in cells])),
    )


def _cmd_analyze(args) -> None:
    A = load_activation(args.inp)
    print("block_fraction,energy_fraction")
    for frac, energy in spectral_profile(A, args.profile_steps):
        print(f"{frac:.9g},{energy:.9g}")
    if args.similarity:
        print(f"token_similarity={token_similarity(A):.9g}")


def _cmd_simulate(args) -> None:
    with open(args.config) as fh:
        cfg = parse_config(fh.read())
    if cfg.seed == 0 and args.seed:
        cfg = cfg.replace(seed=args.seed)
    result = simulate(cfg)
    with _output(args.out) as fh:
        write_results_csv([result], fh)


def _cmd_bench(args) -> None:
    rows = bench(args.sizes, seed=args.seed)
    with _output(args.out) as fh:
        write_bench_csv(rows, fh)


COMMANDS = {
    "gen": _cmd_gen,
    "compress": _cmd_compress,
    "decompress": _cmd_decompress,
    "metrics": _cmd_metrics,
    "sweep": _cmd_sweep,
    "analyze": _cmd_analyze,
    "simulate": _cmd_simulate,
    "bench": _cmd_bench,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"actcomp: usage error: {exc}", file=sys.stderr)
        return 1
    except (ActCompError, OSError, ValueError) as exc:
        print(f"actcomp: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())
