"""Command-line entry point: ``sfistride <command> [options]``.

Commands
--------
design     write a filterbank JSON (and optionally its weights at one rate)
encode     WAV -> feature map file
decode     feature map file -> WAV
roundtrip  encode + decode a WAV, print the SI-SNR
bench      compare the four stride strategies over a grid of rates (CSV)
lsweep     proposed strategy over window lengths L in {2,4,8,16,32,64} (CSV)
"""

from __future__ import annotations

import argparse
import csv
import math
import statistics
import sys
import time
from fractions import Fraction

from . import fixtures
from ._rational import rationalize
from .baselines import StrategyConfig, execute_strategy, round_stride
from .filters import FilterBankSpec, WeightMatrix, generate_weights, init_filterbank
from .formats import (FormatError, load_features, load_filterbank, load_mask, load_weights, save_features,
                      save_filterbank, save_weights)
from .interp import KAISER_BETA, SignalBuffer, WindowSpec, resample
from .layers import LayerGeometry, RationalStride, make_geometry
from .metrics import si_snr
from .pipeline import MaskSource, apply_mask, decode, encode
from .wavio import WavFormatError, read_wav, write_wav

__all__ = ["main", "build_parser", "BENCH_COLUMNS", "LSWEEP_COLUMNS", "LSWEEP_GRID"]

BENCH_COLUMNS = ("sf_hz", "strategy", "stride_num", "stride_den", "stride_used", "frame_rate_hz",
                 "si_snr_db", "wall_ms")
LSWEEP_COLUMNS = ("L", "sf_hz", "si_snr_db", "wall_ms")
LSWEEP_GRID = (2, 4, 8, 16, 32, 64)

_MODES = {
    "proposed": "proposed",
    "rounding": "rounding",
    "resample-near": "resampling_near",
    "resample-trained": "resampling_trained",
}
_MODE_NAMES = {v: k for k, v in _MODES.items()}


class CliError(Exception):
    pass


def _positive_rate(text: str) -> Fraction:
    try:
        rate = rationalize(float(text), 1000, 1e-14) if "/" not in text else Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"invalid sampling rate {text!r}") from exc
    if rate <= 0:
        raise argparse.ArgumentTypeError("sampling rate must be positive")
    return rate


def _rate_list(text: str) -> list[Fraction]:
    return [_positive_rate(part) for part in text.split(",") if part.strip()]


def _window_L(text: str) -> int:
    value = int(text)
    if not 1 <= value <= 128:
        raise argparse.ArgumentTypeError("L must be between 1 and 128")
    return value


def _add_window(p: argparse.ArgumentParser) -> None:
    p.add_argument("--L", type=_window_L, default=16, help="window support in samples (default 16)")
    p.add_argument("--window", choices=("kaiser", "hann"), default="kaiser")
    p.add_argument("--beta", type=float, default=KAISER_BETA, help="Kaiser shape parameter")


def _add_layer(p: argparse.ArgumentParser, weights: bool = True) -> None:
    p.add_argument("--filterbank", metavar="PATH", help="filterbank JSON (default: built-in fixture bank)")
    if weights:
        p.add_argument("--weights", metavar="PATH", help="precomputed weights (must match the processing rate)")
    p.add_argument("--padding", type=int, default=0, help="zero padding P on each side")
    _add_window(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sfistride", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="write a filterbank JSON")
    p.add_argument("--bank", choices=("quad-phase", "linear"), default="quad-phase",
                   help="quad-phase fixture bank, or linearly spaced zero-phase filters")
    p.add_argument("--channels", type=int, default=64, help="channel count for --bank linear")
    p.add_argument("--f-min", type=float, default=0.0)
    p.add_argument("--f-max", type=float, default=15000.0)
    p.add_argument("--kernel-ms", type=float, default=5.0)
    p.add_argument("--stride-ms", type=float, default=2.5)
    p.add_argument("--train-sf", type=_positive_rate, default=Fraction(fixtures.TRAIN_RATE))
    p.add_argument("--out", required=True, metavar="PATH", help="filterbank JSON to write")
    p.add_argument("--weights", metavar="PATH", help="also write weights generated at --sf")
    p.add_argument("--sf", type=_positive_rate, help="rate for --weights")

    p = sub.add_parser("encode", help="WAV -> feature map")
    p.add_argument("input", help="input WAV")
    _add_layer(p)
    p.add_argument("--sf", type=_positive_rate, help="process at this rate (input is resampled)")
    p.add_argument("--stride-mode", choices=("proposed", "rounding"), default="proposed")
    p.add_argument("--out", required=True, metavar="PATH", help="feature map file")

    p = sub.add_parser("decode", help="feature map -> WAV")
    p.add_argument("input", help="feature map file")
    _add_layer(p)
    p.add_argument("--sf", type=_positive_rate, required=True, help="output sampling rate")
    p.add_argument("--stride-mode", choices=("proposed", "rounding"), default="proposed")
    p.add_argument("--length", type=int, help="output length in samples (default: implied by the frames)")
    p.add_argument("--mask", metavar="PATH", help="J x C x M mask file")
    p.add_argument("--source", type=int, default=0, help="mask source index j")
    p.add_argument("--out", required=True, metavar="PATH", help="output WAV")
    p.add_argument("--format", choices=("float32", "pcm16"), default="float32")

    p = sub.add_parser("roundtrip", help="encode + decode, print SI-SNR")
    p.add_argument("input", help="input WAV")
    _add_layer(p, weights=False)
    p.add_argument("--sf", type=_positive_rate, help="process at this rate (input is resampled)")
    p.add_argument("--stride-mode", choices=tuple(_MODES), default="proposed")
    p.add_argument("--mask", metavar="PATH", help="J x C x M mask file")
    p.add_argument("--source", type=int, default=0, help="mask source index j")
    p.add_argument("--out", metavar="PATH", help="write the reconstruction here")
    p.add_argument("--format", choices=("float32", "pcm16"), default="float32")

    for name, help_text in (("bench", "compare stride strategies across rates"),
                            ("lsweep", "sweep the interpolation window length")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", nargs="?", help="input WAV (default: synthetic harmonic mixture)")
        _add_layer(p, weights=False)
        p.add_argument("--sf", type=_rate_list, default=[Fraction(r) for r in fixtures.BENCH_RATES],
                       help="comma-separated rates (default 11025,16538,22050,44100)")
        p.add_argument("--seed", type=int, default=0, help="phase seed of the synthetic mixture")
        p.add_argument("--duration", type=float, default=60.0, help="synthetic mixture length in seconds")
        p.add_argument("--repeats", type=int, default=10, help="timed runs per row; the median is reported")
        p.add_argument("--no-timing", action="store_true", help="leave wall_ms empty (byte-reproducible CSV)")
        p.add_argument("--csv", required=True, metavar="PATH", help="CSV output ('-' for stdout)")
        if name == "bench":
            p.add_argument("--strategies", default=",".join(_MODES),
                           help="comma-separated subset of " + ",".join(_MODES))
        else:
            p.add_argument("--Ls", default=",".join(map(str, LSWEEP_GRID)),
                           help="comma-separated window lengths")
    return parser


def _window(args) -> WindowSpec:
    return WindowSpec(args.window, args.beta, args.L)


def _bank(args) -> FilterBankSpec:
    return load_filterbank(args.filterbank) if args.filterbank else fixtures.quad_phase_bank()


def _at_rate(x: SignalBuffer, rate: Fraction | None, window: WindowSpec) -> SignalBuffer:
    if rate is None or rate == x.rate:
        return x
    return resample(x, 1 / rate, window)


def _geometry(spec: FilterBankSpec, rate: Fraction, args) -> LayerGeometry:
    geom = make_geometry(spec, 1 / rate, _window(args), args.padding)
    if args.stride_mode == "rounding":
        geom = make_geometry(spec, 1 / rate, _window(args), args.padding,
                             stride=RationalStride(round_stride(geom.stride)))
    return geom


def _weights(spec: FilterBankSpec, geom: LayerGeometry, path: str | None) -> WeightMatrix:
    if path is None:
        return generate_weights(spec, geom.target_period, k_taps=geom.k_taps)
    w = load_weights(path)
    if not math.isclose(float(w.period), float(geom.target_period), rel_tol=1e-12):
        raise CliError(f"weights in {path} were generated for {float(1 / w.period):g} Hz, "
                       f"not {float(1 / geom.target_period):g} Hz")
    if w.n_channels != spec.n_channels:
        raise CliError(f"weights in {path} have {w.n_channels} channels, the filterbank has {spec.n_channels}")
    return w


def _load_mask(args) -> MaskSource:
    return load_mask(args.mask) if args.mask else MaskSource()


def cmd_design(args) -> int:
    kernel = rationalize(args.kernel_ms / 1000)
    stride = rationalize(args.stride_ms / 1000)
    period = 1 / args.train_sf
    if args.bank == "quad-phase":
        spec = fixtures.quad_phase_bank(kernel_duration=kernel, stride_duration=stride,
                                        train_rate=int(args.train_sf))
    else:
        spec = init_filterbank(args.channels, args.f_min, args.f_max, kernel, stride, period)
    save_filterbank(args.out, spec)
    if args.weights:
        if args.sf is None:
            raise CliError("--weights needs --sf")
        save_weights(args.weights, generate_weights(spec, 1 / args.sf))
    elif args.sf is not None:
        raise CliError("--sf is only used together with --weights")
    return 0


def cmd_encode(args) -> int:
    spec = _bank(args)
    x = _at_rate(read_wav(args.input), args.sf, _window(args))
    geom = _geometry(spec, x.rate, args)
    X = encode(x, _weights(spec, geom, args.weights), geom)
    save_features(args.out, X)
    print(f"{X.n_channels} channels x {X.n_frames} frames, stride {geom.stride}, "
          f"frame rate {float(X.frame_rate):g} Hz")
    return 0


def cmd_decode(args) -> int:
    spec = _bank(args)
    geom = _geometry(spec, args.sf, args)
    X = load_features(args.input)
    if args.length is None:
        # shortest signal whose correlation still holds every frame
        n_corr = math.ceil((X.n_frames - 1) * geom.stride.fraction) + 1
        out_len = n_corr + geom.k_taps - 1 - 2 * geom.padding
    else:
        out_len = args.length
    if args.mask:
        X = apply_mask(X, load_mask(args.mask), args.source)
    y = decode(X, _weights(spec, geom, args.weights), geom, out_len)
    write_wav(args.out, y, args.format)
    return 0


def cmd_roundtrip(args) -> int:
    spec = _bank(args)
    window = _window(args)
    x = _at_rate(read_wav(args.input), args.sf, window)
    run = execute_strategy(x, spec, StrategyConfig(_MODES[args.stride_mode], window, args.padding),
                           _load_mask(args), args.source)
    try:
        score = si_snr(run.output, x)
    except ValueError:
        score = math.nan
    if args.out:
        write_wav(args.out, run.output, args.format)
    print(f"si_snr_db {score:.6f}")
    return 0


def _inputs(args, window: WindowSpec):
    """Yield (rate, signal) for every requested rate."""
    source = read_wav(args.input) if args.input else None
    for rate in args.sf:
        if source is None:
            yield rate, fixtures.harmonic_mixture(rate, args.duration, args.seed)
        else:
            yield rate, _at_rate(source, rate, window)


def _timed(fn, repeats: int):
    times, result = [], None
    for _ in range(max(repeats, 1)):
        t0 = time.perf_counter()
        result = fn()
        times.append((time.perf_counter() - t0) * 1000.0)
    return result, statistics.median(times)


def _fmt_rate(rate) -> str:
    if isinstance(rate, Fraction) and rate.denominator == 1:
        return str(rate.numerator)
    return repr(float(rate))


def _open_csv(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", newline="", encoding="utf-8"), True


def _write_rows(path: str, columns, rows) -> None:
    fh, close = _open_csv(path)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(row)
    finally:
        if close:
            fh.close()


def _score(run_output, x) -> str:
    try:
        return f"{si_snr(run_output, x):.6f}"
    except ValueError:
        return "nan"


def bench_rows(args):
    spec = _bank(args)
    window = _window(args)
    kinds = []
    for name in args.strategies.split(","):
        name = name.strip()
        if name not in _MODES:
            raise CliError(f"unknown strategy {name!r}; choose from {', '.join(_MODES)}")
        kinds.append(_MODES[name])
    for rate, x in _inputs(args, window):
        for kind in kinds:
            cfg = StrategyConfig(kind, window, args.padding)
            run, ms = _timed(lambda: execute_strategy(x, spec, cfg), args.repeats)
            adjusted = run.adjusted_stride
            yield (_fmt_rate(rate), _MODE_NAMES[kind], adjusted.num, adjusted.den, str(run.geometry.stride),
                   _fmt_rate(run.features.frame_rate), _score(run.output, x),
                   "" if args.no_timing else f"{ms:.3f}")


def lsweep_rows(args):
    spec = _bank(args)
    try:
        grid = [_window_L(v) for v in args.Ls.split(",") if v.strip()]
    except (ValueError, argparse.ArgumentTypeError) as exc:
        raise CliError(f"bad --Ls value: {exc}") from exc
    for rate, x in _inputs(args, _window(args)):
        for L in grid:
            cfg = StrategyConfig("proposed", WindowSpec(args.window, args.beta, L), args.padding)
            run, ms = _timed(lambda: execute_strategy(x, spec, cfg), args.repeats)
            yield (L, _fmt_rate(rate), _score(run.output, x), "" if args.no_timing else f"{ms:.3f}")


def cmd_bench(args) -> int:
    _write_rows(args.csv, BENCH_COLUMNS, list(bench_rows(args)))
    return 0


def cmd_lsweep(args) -> int:
    _write_rows(args.csv, LSWEEP_COLUMNS, list(lsweep_rows(args)))
    return 0


_COMMANDS = {
    "design": cmd_design,
    "encode": cmd_encode,
    "decode": cmd_decode,
    "roundtrip": cmd_roundtrip,
    "bench": cmd_bench,
    "lsweep": cmd_lsweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (CliError, FormatError, WavFormatError, ValueError, IndexError, OSError) as exc:
        print(f"sfistride {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
