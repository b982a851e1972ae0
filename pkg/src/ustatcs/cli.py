"""Command-line front end.

Subcommands::

    ustatcs cs        stream confidence-sequence records over a data file or stdin
    ustatcs test      sequential test of H0: theta = theta0 over a data stream
    ustatcs simulate  run a Monte Carlo experiment from a JSON config
    ustatcs boundary  tabulate a Gaussian boundary over an n-grid
    ustatcs spectrum  estimate and dump the truncated spectrum of a data set

Exit codes: 0 success (including an input that never reaches the cold
start), 2 invalid flags or config, 3 unparseable input row.  Numeric output
uses the shortest round-trip decimal representation, so identical runs are
byte-identical and diffable.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .accumulator import UStatAccumulator
from .boundaries import BoundaryParams, gaussian_boundary
from .kernels import get_kernel
from .sequences import (
    classical_ci,
    csv_header,
    degenerate_cs,
    nondegenerate_cs,
)
from .simharness import ExperimentConfig, run_experiment
from .spectral import SpectrumMonitor, estimate_spectrum, parse_weights

__all__ = ["main"]


class _ParseFailure(Exception):
    def __init__(self, row: int, detail: str):
        super().__init__(f"row {row}: {detail}")
        self.row = row


class _Parser(argparse.ArgumentParser):
    # single-line diagnostic on stderr, exit code 2
    def error(self, message: str):
        self.exit(2, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="ustatcs", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True)

    def add_boundary_flags(p):
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--m", type=int, default=2, help="cold-start time")
        p.add_argument("--eta", type=float, default=2.0)
        p.add_argument("--s", type=float, default=1.4)
        p.add_argument("--boundary", choices=("lil", "gm"), default="lil")

    def add_stream_flags(p):
        p.add_argument("input", nargs="?", default="-", help="CSV file or - for stdin")
        p.add_argument("--kernel", required=True,
                       choices=("variance", "gmd", "spatial-kendall", "mmd-gauss"))
        add_boundary_flags(p)
        p.add_argument("--weights", default="data", help="poly:<b> | exp:<c> | data")
        p.add_argument("--trunc-a", type=float, default=0.25, dest="trunc_a")
        p.add_argument("--subsample-w", type=float, default=None, dest="subsample_w")
        p.add_argument("--out", default="-", help="output CSV path or - for stdout")
        p.add_argument("--seed", type=int, default=0)

    p_cs = sub.add_parser("cs", parents=[], help="stream confidence-sequence records")
    add_stream_flags(p_cs)
    p_cs.add_argument("--classical", action="store_true",
                      help="also emit the pointwise classical CI per row")

    p_test = sub.add_parser("test", help="sequential test of H0: theta = theta0")
    add_stream_flags(p_test)
    p_test.add_argument("--theta0", type=float, default=0.0)

    p_sim = sub.add_parser("simulate", help="run an experiment from a JSON config")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", default=".", help="output directory")
    p_sim.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_sim.add_argument("--no-svg", action="store_true")

    p_b = sub.add_parser("boundary", help="tabulate a boundary over an n-grid")
    add_boundary_flags(p_b)
    p_b.add_argument("--kind", choices=("lil", "gm", "both"), default="both")
    p_b.add_argument("--n-max", type=int, default=10_000, dest="n_max")
    p_b.add_argument("--points", type=int, default=50)
    p_b.add_argument("--out", default="-")

    p_sp = sub.add_parser("spectrum", help="dump the estimated spectrum of a data set")
    add_stream_flags(p_sp)
    return top


# ---------------------------------------------------------------------------
# input parsing
# ---------------------------------------------------------------------------


def _open_output(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _parse_rows(lines, dim: int):
    """Yield (row_number, point) from CSV lines; raise _ParseFailure on bad rows."""
    for row_no, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != dim:
            raise _ParseFailure(row_no, f"expected {dim} column(s), got {len(parts)}")
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise _ParseFailure(row_no, f"non-numeric field in {text!r}") from None
        yield row_no, (values[0] if dim == 1 else np.array(values))


def _validate_common(args) -> None:
    if not 0.0 < args.alpha < 1.0:
        raise ValueError(f"--alpha must be in (0,1), got {args.alpha}")
    if args.m < 2:
        raise ValueError(f"--m must be >= 2, got {args.m}")
    if args.eta <= 1.0 or args.s <= 1.0:
        raise ValueError("--eta and --s must be > 1")
    if not 0.0 < args.trunc_a < 0.5:
        raise ValueError(f"--trunc-a must be in (0, 0.5), got {args.trunc_a}")
    if args.subsample_w is not None and not 0.0 < args.subsample_w < 1.0:
        raise ValueError(f"--subsample-w must be in (0,1), got {args.subsample_w}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _stream_records(args, emit) -> int:
    """Shared cs/test driver: push rows, hand each record to ``emit``."""
    kernel = get_kernel(args.kernel)
    params = BoundaryParams(
        alpha=args.alpha, m=args.m, eta=args.eta, s=args.s, kind=args.boundary
    )
    degenerate = kernel.id == "mmd-gauss"
    acc = UStatAccumulator(kernel, keep_pairwise=degenerate)
    monitor = SpectrumMonitor(
        scheme=parse_weights(args.weights),
        alpha=args.alpha,
        start=args.m,
        trunc_exponent=args.trunc_a,
        subsample_exponent=args.subsample_w,
    )
    stdin_mode = args.input == "-"
    stream = sys.stdin if stdin_mode else open(args.input, "r", encoding="utf-8")
    try:
        for _row_no, point in _parse_rows(stream, kernel.point_dim):
            acc.push(point)
            if acc.n < max(args.m, 2):
                continue
            if degenerate:
                rec = degenerate_cs(acc, params, monitor.update(acc))
            else:
                rec = nondegenerate_cs(acc, params)
            if rec is not None:
                emit(rec, acc)
    finally:
        if not stdin_mode:
            stream.close()
    return 0


def _cmd_cs(args) -> int:
    out, close = _open_output(args.out)
    flush = args.input == "-"
    try:
        out.write(csv_header() + "\n")

        def emit(rec, acc):
            out.write(rec.csv_row() + "\n")
            if args.classical:
                out.write(classical_ci(acc, args.alpha).csv_row() + "\n")
            if flush:
                out.flush()

        return _stream_records(args, emit)
    finally:
        if close:
            out.close()


def _cmd_test(args) -> int:
    out, close = _open_output(args.out)
    flush = args.input == "-"
    state = {"first": None}
    try:
        out.write("n,method,center,boundary_value,reject,first_rejection_n\n")

        def emit(rec, acc):
            if state["first"] is None and not rec.covers(args.theta0):
                state["first"] = rec.n
            first = state["first"]
            out.write(
                f"{rec.n},{rec.method},{rec.center!r},{rec.boundary_value!r},"
                f"{int(first is not None)},{'' if first is None else first}\n"
            )
            if flush:
                out.flush()

        return _stream_records(args, emit)
    finally:
        if close:
            out.close()


def _cmd_boundary(args) -> int:
    if args.n_max < args.m:
        raise ValueError(f"--n-max must be >= m, got {args.n_max} < {args.m}")
    grid = np.unique(
        np.rint(np.geomspace(args.m, args.n_max, num=max(args.points, 2))).astype(int)
    )
    kinds = ("lil", "gm") if args.kind == "both" else (args.kind,)
    out, close = _open_output(args.out)
    try:
        out.write("n,kind,value\n")
        for kind in kinds:
            p = BoundaryParams(alpha=args.alpha, m=args.m, eta=args.eta, s=args.s, kind=kind)
            for n in grid:
                out.write(f"{int(n)},{kind},{gaussian_boundary(int(n), p)!r}\n")
    finally:
        if close:
            out.close()
    return 0


def _cmd_spectrum(args) -> int:
    kernel = get_kernel(args.kernel)
    acc = UStatAccumulator(kernel, keep_pairwise=True)
    stdin_mode = args.input == "-"
    stream = sys.stdin if stdin_mode else open(args.input, "r", encoding="utf-8")
    try:
        for _row_no, point in _parse_rows(stream, kernel.point_dim):
            acc.push(point)
    finally:
        if not stdin_mode:
            stream.close()
    if acc.n < 2:
        raise ValueError(f"spectrum needs at least 2 rows, got {acc.n}")
    est = estimate_spectrum(
        acc,
        parse_weights(args.weights),
        trunc_exponent=args.trunc_a,
        subsample_exponent=args.subsample_w,
        alpha=args.alpha,
    )
    out, close = _open_output(args.out)
    try:
        out.write("index,lambda_hat,beta,contribution_plus,contribution_minus\n")
        for i, (lam, wp, wm) in enumerate(
            zip(est.eigenvalues, est.weights, est.weights_minus), start=1
        ):
            lam, wp, wm = float(lam), float(wp), float(wm)
            plus = lam * math.log(1.0 / wp) if lam > 0 else 0.0
            minus = lam * math.log(1.0 / wm) if lam < 0 else 0.0
            out.write(f"{i},{lam!r},{(wp if lam >= 0 else wm)!r},{plus!r},{minus!r}\n")
        for name, value in (
            ("trace", est.trace_est),
            ("sum_pos", est.sum_pos),
            ("sum_neg", est.sum_neg),
            ("sum_pos_logw", est.sum_pos_logw),
            ("sum_neg_logw", est.sum_neg_logw),
            ("sum_pos_ginv2", est.sum_pos_ginv2),
            ("sum_neg_ginv2", est.sum_neg_ginv2),
        ):
            out.write(f"{name},{value!r},,,\n")
    finally:
        if close:
            out.close()
    return 0


def _cmd_simulate(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as f:
            cfg = ExperimentConfig.from_json(f.read())
    except FileNotFoundError:
        raise ValueError(f"config file not found: {args.config}") from None
    if args.seed is not None:
        from dataclasses import replace

        cfg = replace(cfg, seed=args.seed)
    result = run_experiment(cfg)
    prefix = cfg.experiment.replace("-", "_")
    written = result.write_csvs(args.out, prefix)
    if not args.no_svg:
        written += result.write_svgs(args.out, prefix)
    print(result.summary(), file=sys.stderr)
    for path in written:
        print(f"wrote {path}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command in ("cs", "test", "spectrum"):
            _validate_common(args)
        if args.command == "cs":
            return _cmd_cs(args)
        if args.command == "test":
            return _cmd_test(args)
        if args.command == "boundary":
            return _cmd_boundary(args)
        if args.command == "spectrum":
            return _cmd_spectrum(args)
        return _cmd_simulate(args)
    except _ParseFailure as exc:
        print(f"ustatcs {args.command}: input error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError) as exc:
        print(f"ustatcs {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # downstream consumer (head, etc.) closed the stream; exit quietly
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
