"""``authmark`` command line.

Exit codes
==========  ======================================================
0           success; verify accepted; dispute ruled A-is-author
1           verify rejected the claim; calibrate missed the target
2           dispute ruled B-is-author
3           dispute inconclusive
4           bad input: usage, format, capacity or I/O error
==========  ======================================================
"""

from __future__ import annotations

import argparse
import getpass
import os
import sys
from pathlib import Path

from . import assets, defaults
from .attacks import CODECS, bench_sr_vs_qf, calibrate, check_qf, write_bench_csv, write_bench_gnuplot
from .imaging import ImageFormatError, AlignmentError, load_image, save_image
from .protocol import (
    A_IS_AUTHOR,
    B_IS_AUTHOR,
    HASHES,
    digest_bits,
    embed_authorship,
    resolve_dispute,
    verify,
)
from .wmcore import (
    Algorithm,
    CapacityError,
    EmbedParams,
    capacity,
    embed,
    extract,
    load_watermark,
    save_watermark,
)

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_B_AUTHOR = 2
EXIT_INCONCLUSIVE = 3
EXIT_INPUT_ERROR = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _unit_interval(text):
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return v


def _strength(text):
    v = float(text)
    if not v >= 0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"strength must be a finite value >= 0, got {text}")
    return v


def _qf(text):
    try:
        return check_qf(int(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _qf_list(text):
    return [_qf(t) for t in text.replace(",", " ").split()]


def _pairs(text):
    try:
        return EmbedParams.parse_pairs(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--pairs expects 'all' or 1..5: {exc}") from None


def _add_embed_params(p):
    p.add_argument("--algorithm", choices=[a.value for a in Algorithm], default=defaults.ALGORITHM)
    p.add_argument("--strength-b", type=_strength, default=defaults.STRENGTH_B, metavar="B")
    p.add_argument(
        "--pairs", type=_pairs, default=defaults.PAIR_STRATEGY, metavar="all|1..5",
        help="write every pair with majority decoding (all), or a single pair",
    )
    p.add_argument("--no-repetition", action="store_true", help="leave spare blocks untouched")


def _add_hash(p):
    p.add_argument("--hash", choices=sorted(HASHES), default=defaults.HASH_NAME)


def _add_keyword(p, suffix=""):
    flag = f"--keyword{suffix}"
    p.add_argument(flag, dest=f"keyword{suffix.replace('-', '_')}", metavar="TEXT")
    p.add_argument(
        f"{flag}-env", dest=f"keyword{suffix.replace('-', '_')}_env", metavar="VAR",
        default=defaults.KEYWORD_ENV if not suffix else None,
        help="environment variable holding the keyword",
    )


def _params(args) -> EmbedParams:
    return EmbedParams(args.strength_b, Algorithm(args.algorithm), args.pairs, not args.no_repetition)


def _keyword(args, suffix="", label="keyword") -> str:
    """Flag, then environment variable, then a prompt on a terminal."""
    attr = "keyword" + suffix.replace("-", "_")
    value = getattr(args, attr)
    if value:
        return value
    env = getattr(args, attr + "_env")
    if env and os.environ.get(env):
        return os.environ[env]
    if sys.stdin.isatty():
        value = getpass.getpass(f"{label}: ")
        if value:
            return value
    raise UsageError(f"no {label} given (use --keyword{suffix}, an environment variable, or a terminal)")


def _params_line(params: EmbedParams, hash_name=None) -> str:
    parts = [
        f"algorithm={params.algorithm.value}",
        f"pairs={params.pair_strategy}",
        f"strength_b={params.effective_strength():g}",
    ]
    if hash_name:
        parts.append(f"hash={hash_name}")
    return " ".join(parts)


# ---------------------------------------------------------------------------
# commands


def cmd_embed(args) -> int:
    img = load_image(args.input)
    params = _params(args)
    cap = capacity(img, params)
    if args.watermark_file:
        wm = load_watermark(args.watermark_file)
        out = embed(img, wm, params)
        size = len(wm)
    else:
        size = 2 * digest_bits(args.hash)
        if cap < size:
            raise CapacityError(f"capacity {cap} < {size}")
        out = embed_authorship(img, _keyword(args), params, args.hash)
    save_image(out, args.out)
    print(f"embedded {size} bits into {args.out} capacity={cap} {_params_line(params, args.hash)}")
    return EXIT_OK


def cmd_extract(args) -> int:
    img = load_image(args.input)
    params = _params(args)
    if args.shape:
        n, m = args.shape
        nbits = n * m
    elif args.nbits is not None:
        n, m, nbits = 1, args.nbits, args.nbits
    else:
        raise UsageError("extract needs --nbits or --shape")
    wm = extract(img, nbits, params, (n, m))
    save_watermark(wm, args.out)
    print(f"extracted {nbits} bits to {args.out} {_params_line(params)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    img = load_image(args.input)
    report = verify(img, _keyword(args), _params(args), args.threshold, args.hash)
    text = report.to_text()
    sys.stdout.write(text)
    if args.report:
        Path(args.report).write_text(text)
    return EXIT_OK if report.accepted else EXIT_REJECTED


def cmd_dispute(args) -> int:
    a, b = load_image(args.in_a), load_image(args.in_b)
    ka = _keyword(args, "-a", "keyword A")
    kb = _keyword(args, "-b", "keyword B")
    result = resolve_dispute(a, ka, b, kb, _params(args), args.threshold, args.hash)
    text = result.to_text()
    sys.stdout.write(text)
    if args.report:
        Path(args.report).write_text(text)
    return {A_IS_AUTHOR: EXIT_OK, B_IS_AUTHOR: EXIT_B_AUTHOR}.get(result.ruling, EXIT_INCONCLUSIVE)


def cmd_attack(args) -> int:
    img = load_image(args.input)
    save_image(CODECS[args.codec](img, args.qf), args.out)
    print(f"wrote {args.out} qf={args.qf} codec={args.codec}")
    return EXIT_OK


def _bench_inputs(args):
    img = load_image(args.input) if args.input else assets.cover()
    wm = load_watermark(args.watermark_file) if args.watermark_file else assets.logo()
    return img, wm


def cmd_bench(args) -> int:
    img, wm = _bench_inputs(args)
    configs = [
        ("MMBEC", EmbedParams(args.strength_b, Algorithm.MMBEC, args.pairs, not args.no_repetition)),
        ("MBEC", EmbedParams(algorithm=Algorithm.MBEC, repetition=not args.no_repetition)),
    ]
    rows = bench_sr_vs_qf(img, wm, configs, args.qf_list, args.codec, args.workers)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            write_bench_csv(rows, fh)
    else:
        write_bench_csv(rows, sys.stdout)
    if args.gnuplot:
        with open(args.gnuplot, "w") as fh:
            write_bench_gnuplot(rows, fh)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    img, wm = _bench_inputs(args)
    params = EmbedParams(defaults.STRENGTH_B, Algorithm.MMBEC, args.pairs, not args.no_repetition)
    best, trace = calibrate(img, wm, args.qf, args.target_sr, params, codec=args.codec)
    for b, sr in trace:
        print(f"B={b:g} sr={sr:.4f}")
    if best is None:
        print(f"no B in {defaults.CALIBRATION_BS[0]:g}..{defaults.CALIBRATION_BS[-1]:g} "
              f"reaches sr>={args.target_sr} at qf={args.qf}")
        return EXIT_REJECTED
    print(f"calibrated B={best:g} (sr>={args.target_sr} at qf={args.qf})")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="authmark", description=__doc__.split("\n")[0],
                     epilog=__doc__.split("\n", 1)[1], formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("embed", help="watermark an image with an authorship payload or a bit file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    _add_keyword(p)
    p.add_argument("--watermark-file", help="embed this mark (bit file or P5/PNG logo) instead of a keyword payload")
    _add_embed_params(p)
    _add_hash(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="blindly extract raw watermark bits to a bit file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--nbits", type=int)
    p.add_argument("--shape", type=int, nargs=2, metavar=("N", "M"))
    _add_embed_params(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("verify", help="check a claimed keyword against a watermarked image")
    p.add_argument("--in", dest="input", required=True)
    _add_keyword(p)
    p.add_argument("--threshold", type=_unit_interval, default=defaults.THRESHOLD)
    p.add_argument("--report", help="also write the report to this file")
    _add_embed_params(p)
    _add_hash(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dispute", help="resolve an authorship dispute between two parties")
    p.add_argument("--in-a", required=True)
    p.add_argument("--in-b", required=True)
    _add_keyword(p, "-a")
    _add_keyword(p, "-b")
    p.add_argument("--threshold", type=_unit_interval, default=defaults.THRESHOLD)
    p.add_argument("--report")
    _add_embed_params(p)
    _add_hash(p)
    p.set_defaults(func=cmd_dispute)

    p = sub.add_parser("attack", help="apply a JPEG compression attack")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--qf", type=_qf, required=True)
    p.add_argument("--codec", choices=sorted(CODECS), default="sim")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("bench", help="SR vs QF sweep for MMBEC and MBEC")
    p.add_argument("--in", dest="input", help="host image (default: bundled cover)")
    p.add_argument("--watermark-file", help="mark (default: bundled 32x32 logo)")
    p.add_argument("--qf-list", type=_qf_list, default=list(defaults.BENCH_QFS))
    p.add_argument("--csv")
    p.add_argument("--gnuplot")
    p.add_argument("--codec", choices=sorted(CODECS), default="sim",
                   help="'pillow' compresses with libjpeg instead of the simulator")
    p.add_argument("--workers", type=int, default=1)
    _add_embed_params(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("calibrate", help="smallest B reaching a target SR at a QF")
    p.add_argument("--in", dest="input")
    p.add_argument("--watermark-file")
    p.add_argument("--qf", type=_qf, default=25)
    p.add_argument("--target-sr", type=_unit_interval, default=1.0)
    p.add_argument("--codec", choices=sorted(CODECS), default="sim")
    _add_embed_params(p)
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT_ERROR
    try:
        return args.func(args)
    except (UsageError, ImageFormatError, AlignmentError, CapacityError, ValueError, OSError) as exc:
        print(f"authmark {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
