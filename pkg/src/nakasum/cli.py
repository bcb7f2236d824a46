"""Command-line interface.

Subcommands
-----------
match     fit the Gamma-sum proxy and print it as JSON
tables    regenerate the balanced-branch shape-parameter tables
pdf       envelope density over a grid
mgf       moment generating function at one point
outage    outage probability versus per-branch average SNR
ber       average error probability versus per-branch average SNR
validate  goodness-of-fit campaign or Monte-Carlo EGC comparison
sample    export correlated envelope draws

Exit codes: 0 success, 2 validation/domain error, 3 numerical accuracy
error, 4 I/O error.

The correlation matrix file format is plain text: optional '#' comment
lines, then the dimension L on its own line, then L rows of L
space-separated sqrt-correlation entries.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import egc, gof, simkit
from .errors import (
    AccuracyError,
    DomainError,
    NakasumError,
    TruncationError,
    ValidationError,
)
from .gammasum import mgf as model_mgf
from .gammasum import pdf as model_pdf
from .linalg import CorrelationMatrix
from .matcher import match_parameters
from .moments import (
    ArbitraryCorrelation,
    EnsembleSpec,
    EqualCorrelation,
    ExponentialCorrelation,
)

__all__ = ["main", "read_corr_file", "write_corr_file"]

TABLE_RHOS = (0.0, 0.2, 0.4, 0.6, 0.8)
TABLE_MZ = (1, 2, 3)
TABLE_L = (2, 3, 4)


def read_corr_file(path: str) -> CorrelationMatrix:
    rows: list[list[float]] = []
    dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if dim is None:
                dim = int(line)
                continue
            rows.append([float(tok) for tok in line.split()])
    if dim is None:
        raise ValidationError(f"{path}: no dimension line found")
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise ValidationError(f"{path}: expected {dim} rows of {dim} entries")
    return CorrelationMatrix(np.asarray(rows))


def write_corr_file(matrix: CorrelationMatrix, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{matrix.dim}\n")
        for row in matrix.entries:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def _parse_grid(text: str) -> np.ndarray:
    """Parse 'start:stop:count' into an inclusive linear grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"grid must be start:stop:count, got {text!r}")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValidationError("grid count must be at least 1")
    return np.linspace(start, stop, count)


def _parse_omega(text: str, L: int, mu: float | None) -> tuple[float, ...]:
    vals = tuple(float(tok) for tok in text.split(","))
    if mu is not None:
        if len(vals) != 1:
            raise ValidationError("--mu requires a scalar --omega (first-branch power)")
        return egc.power_profile(vals[0], mu, L)
    if len(vals) == 1:
        return vals * L
    if len(vals) != L:
        raise ValidationError(f"--omega lists {len(vals)} powers for {L} branches")
    return vals


def build_spec(args: argparse.Namespace) -> EnsembleSpec:
    if args.mz is None:
        raise ValidationError("--mz is required")
    if args.model == "arbitrary":
        if args.corr_file is None:
            raise ValidationError("--model arbitrary requires --corr-file")
        if args.rho is not None:
            raise ValidationError("--rho cannot be combined with --corr-file")
        matrix = read_corr_file(args.corr_file)
        L = matrix.dim
        correlation = ArbitraryCorrelation(matrix)
    else:
        if args.corr_file is not None:
            raise ValidationError("--corr-file requires --model arbitrary")
        if args.rho is None:
            raise ValidationError(f"--model {args.model} requires --rho")
        if args.L is None:
            raise ValidationError("--L is required")
        L = args.L
        cls = EqualCorrelation if args.model == "equal" else ExponentialCorrelation
        correlation = cls(args.rho)
    powers = _parse_omega(args.omega, L, args.mu)
    return EnsembleSpec(fading_m=args.mz, powers=powers, correlation=correlation)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _rows_to_text(rows: list[dict], header: tuple[str, ...], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=header)
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _add_spec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=("equal", "exp", "arbitrary"), required=True)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--corr-file", default=None)
    p.add_argument("--mz", type=int, default=None, help="integer fading parameter")
    p.add_argument("--L", type=int, default=None, help="branch count")
    p.add_argument("--omega", default="1",
                   help="branch powers: scalar or comma list (linear units)")
    p.add_argument("--mu", type=float, default=None,
                   help="exponential power-decay exponent (uses scalar --omega)")


def _add_io_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def cmd_match(args) -> int:
    model = match_parameters(build_spec(args))
    _emit(model.to_json(), args.out)
    return 0


def cmd_tables(args) -> int:
    rows = []
    models = ("equal", "exp") if args.corr == "both" else (args.corr,)
    for corr in models:
        cls = EqualCorrelation if corr == "equal" else ExponentialCorrelation
        for mz in TABLE_MZ:
            for L in TABLE_L:
                for rho in TABLE_RHOS:
                    spec = EnsembleSpec(fading_m=mz, powers=(1.0,) * L,
                                        correlation=cls(rho))
                    rows.append({
                        "correlation": corr,
                        "rho": rho,
                        "mz": mz,
                        "L": L,
                        "m_r": match_parameters(spec).m_r,
                    })
    _emit(_rows_to_text(rows, ("correlation", "rho", "mz", "L", "m_r"),
                        args.format), args.out)
    return 0


def cmd_pdf(args) -> int:
    spec = build_spec(args)
    model = match_parameters(spec)
    grid = _parse_grid(args.r_grid)
    rows = []
    meta = json.dumps({"branches": spec.branch_count,
                       "m_r": model.m_r, "omega_r": model.omega_r},
                      sort_keys=True)
    for r in grid:
        rows.append({"r": float(r), "value": model_pdf(model, float(r)),
                     "kind": "envelope-pdf", "meta": meta})
    _emit(_rows_to_text(rows, ("r", "value", "kind", "meta"), args.format), args.out)
    return 0


def cmd_mgf(args) -> int:
    model = match_parameters(build_spec(args))
    value = model_mgf(model, args.s)
    _emit(json.dumps({"s": args.s, "mgf": value}), args.out)
    return 0


def cmd_outage(args) -> int:
    spec = build_spec(args)
    rx = egc.ReceiverSpec(ensemble=spec, noise_psd=args.n0)
    if args.threshold_db is not None:
        threshold = 10.0 ** (args.threshold_db / 10.0)
    else:
        threshold = args.threshold
    curve = egc.outage_curve(rx, _parse_grid(args.snr_grid), threshold)
    _emit(_rows_to_text(curve.to_rows(), egc.CURVE_CSV_HEADER, args.format), args.out)
    return 0


def cmd_ber(args) -> int:
    spec = build_spec(args)
    rx = egc.ReceiverSpec(ensemble=spec, noise_psd=args.n0, modulation=args.mod)
    curve = egc.ber_curve(rx, _parse_grid(args.snr_grid))
    _emit(_rows_to_text(curve.to_rows(), egc.CURVE_CSV_HEADER, args.format), args.out)
    return 0


def _gof_table(args) -> str:
    """Campaign significance levels over the standard scenario grid."""
    cls = EqualCorrelation if args.model == "equal" else ExponentialCorrelation
    lines = [f"{'rho':>4} {'mz':>3} {'L':>3} {'alpha_cs':>10} {'alpha_ks':>10}"]
    for mz in (1, 3):
        for rho in (0.2, 0.7):
            for L in (2, 5):
                spec = EnsembleSpec(fading_m=mz, powers=(1.0,) * L,
                                    correlation=cls(rho))
                rep = gof.gof_campaign(
                    spec, trials=args.trials, per_trial=args.per_trial,
                    seed=args.seed, alpha_mode=args.alpha_mode,
                    threads=args.threads)
                lines.append(f"{rho:>4} {mz:>3} {L:>3} "
                             f"{rep.alpha_cs:>10.4f} {rep.alpha_ks:>10.4f}")
    return "\n".join(lines) + "\n"


def cmd_validate(args) -> int:
    if args.table:
        if args.model == "arbitrary":
            raise ValidationError("--table runs the parametric scenario grid; "
                                  "use equal or exp")
        _emit(_gof_table(args), args.out)
        return 0
    spec = build_spec(args)
    if args.kind == "gof":
        report = gof.gof_campaign(
            spec, trials=args.trials, per_trial=args.per_trial,
            seed=args.seed, alpha_mode=args.alpha_mode, threads=args.threads)
        _emit(report.to_json(), args.out)
        return 0
    rx = egc.ReceiverSpec(ensemble=spec, noise_psd=args.n0, modulation=args.mod)
    grid = _parse_grid(args.snr_grid)
    analytic = egc.ber_curve(rx, grid)
    simulated = simkit.simulate_egc_ber(rx, grid, n_bits=args.n_bits, seed=args.seed)
    rows = []
    for pa, ps in zip(analytic.points, simulated.points):
        rows.append({
            "snr_db": pa.snr_db,
            "analytic": pa.value,
            "simulated": ps.value,
            "stderr": ps.stderr,
        })
    _emit(_rows_to_text(rows, ("snr_db", "analytic", "simulated", "stderr"),
                        args.format), args.out)
    return 0


def cmd_sample(args) -> int:
    spec = build_spec(args)
    batch = simkit.sample_correlated_nakagami(spec, args.n, args.seed)
    if args.out is None:
        raise ValidationError("sample requires --out")
    simkit.save_batch(batch, args.out, fmt="bin" if args.format == "bin" else "csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nakasum",
        description="Correlated Nakagami-m envelope sums through a "
                    "moment-matched Gamma-sum model.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("match", help="fit the proxy model")
    _add_spec_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("tables", help="regenerate the balanced m_r tables")
    p.add_argument("--corr", choices=("equal", "exp", "both"), default="both")
    _add_io_flags(p)
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("pdf", help="envelope density over a grid")
    _add_spec_flags(p)
    p.add_argument("--r-grid", default="0.1:5:50", help="start:stop:count")
    _add_io_flags(p)
    p.set_defaults(func=cmd_pdf)

    p = sub.add_parser("mgf", help="MGF of the squared envelope at s <= 0")
    _add_spec_flags(p)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_mgf)

    p = sub.add_parser("outage", help="outage probability vs per-branch SNR")
    _add_spec_flags(p)
    p.add_argument("--n0", type=float, default=1.0, help="noise density")
    p.add_argument("--snr-grid", default="0:20:11", help="dB grid start:stop:count")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--threshold", type=float, help="linear SNR threshold")
    g.add_argument("--threshold-db", type=float, help="SNR threshold in dB")
    _add_io_flags(p)
    p.set_defaults(func=cmd_outage)

    p = sub.add_parser("ber", help="average error probability vs per-branch SNR")
    _add_spec_flags(p)
    p.add_argument("--n0", type=float, default=1.0)
    p.add_argument("--mod", choices=("bpsk", "bfsk"), default="bpsk")
    p.add_argument("--snr-grid", default="0:20:11")
    _add_io_flags(p)
    p.set_defaults(func=cmd_ber)

    p = sub.add_parser("validate", help="statistical validation runs")
    _add_spec_flags(p)
    p.add_argument("--kind", choices=("gof", "egc"), default="gof")
    p.add_argument("--table", action="store_true",
                   help="render campaign significance levels over the "
                        "standard scenario grid")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--per-trial", type=int, default=10_000)
    p.add_argument("--alpha-mode", choices=("stat-mean", "alpha-mean"),
                   default="stat-mean")
    p.add_argument("--n0", type=float, default=1.0)
    p.add_argument("--mod", choices=("bpsk", "bfsk"), default="bpsk")
    p.add_argument("--snr-grid", default="0:16:5")
    p.add_argument("--n-bits", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    _add_io_flags(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sample", help="export correlated envelope draws")
    _add_spec_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("bin", "csv"), default="bin")
    p.set_defaults(func=cmd_sample)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AccuracyError, TruncationError) as exc:
        print(f"accuracy error: {exc}", file=sys.stderr)
        return 3
    except NakasumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
