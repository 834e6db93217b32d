"""Command line front end: ``npslab sort | stats | verify``.

Exit codes: 0 success, 2 input error, 3 capacity exceeded, 4 invariant
violation (including a failed verification).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from npslab import engine, stats, theory
from npslab.errors import CapacityError, DomainError, NPSError
from npslab.young import (
    Partition,
    Tableau,
    column_order,
    height,
    is_standard,
    parse_strip,
    row_order,
    strip_order,
)


DEFAULT_CAP = 10
CONJ66_LOG = "npslab-conj66.jsonl"


@dataclass(frozen=True)
class RunConfig:
    shape: Partition
    order_spec: str
    mode: str = "exhaustive"
    samples: int | None = None
    seed: int | None = None
    workers: int = 1
    fmt: str = "json"
    out: Path | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("exhaustive", "sample"):
            raise DomainError(f"unknown mode {self.mode!r}")
        if self.mode == "sample":
            if self.samples is None or self.samples < 1:
                raise DomainError("sample mode requires --samples N with N >= 1")
            if self.seed is None:
                raise DomainError("sample mode requires an explicit --seed")
        if self.workers < 1:
            raise DomainError("--workers must be positive")
        if self.fmt not in ("json", "csv"):
            raise DomainError(f"unknown format {self.fmt!r}")


def exhaustive_cap() -> int:
    raw = os.environ.get("NPSLAB_CAP")
    if raw is None:
        return DEFAULT_CAP
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"NPSLAB_CAP must be an integer, got {raw!r}") from None


def check_cap(shape: Partition, force: bool) -> None:
    cap = exhaustive_cap()
    if shape.n > cap and not force:
        raise CapacityError(
            f"exhaustive run over {shape.n}! fillings exceeds the cap n <= {cap}; "
            "use --force, raise NPSLAB_CAP, or sample"
        )


def load_tableau(source: str) -> Tableau:
    """Tableau JSON from a path, ``-`` for stdin, or an inline JSON object."""
    if source.lstrip().startswith("{"):
        text = source
    elif source == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise DomainError(f"cannot read tableau file {source}: {exc}") from exc
    return Tableau.from_json(text)


def resolve_order(shape: Partition, spec: str) -> Tableau:
    spec = spec.strip()
    if spec == "column":
        return column_order(shape)
    if spec == "row":
        return row_order(shape)
    if spec.startswith("strip:"):
        return strip_order(shape, parse_strip(spec[len("strip:"):]))
    if spec.startswith("file:"):
        u = load_tableau(spec[len("file:"):])
        if u.shape != shape:
            raise DomainError(f"order file has shape {u.shape}, expected {shape}")
        if not is_standard(u):
            raise DomainError("order tableau is not standard")
        return u
    raise DomainError(f"unknown order spec {spec!r} (column, row, strip:<RC...>, file:<path>)")


def parse_mode(text: str, samples: int | None, seed: int | None) -> tuple[str, int | None, int | None]:
    """Accept ``exhaustive``, ``sample`` or the compact ``sample:N[:seed=S]``."""
    head, *rest = text.split(":")
    if head not in ("exhaustive", "sample") or (head == "exhaustive" and rest):
        raise DomainError(f"bad --mode {text!r}")
    for tok in rest:
        try:
            if tok.startswith("seed="):
                seed = int(tok[5:])
            else:
                samples = int(tok)
        except ValueError:
            raise DomainError(f"bad --mode {text!r}") from None
    return head, samples, seed


def rational(q: Fraction) -> dict:
    return {"num": q.numerator, "den": q.denominator, "decimal": f"{float(q):.12g}"}


def _value(v: int | Fraction) -> int | str:
    return v if isinstance(v, int) else f"{v.numerator}/{v.denominator}"


def _workers(requested: int | None) -> int:
    if requested is None:
        return os.cpu_count() or 1
    if requested < 1:
        raise DomainError("--workers must be positive")
    return requested


def _rows(t: Tableau) -> list[list[int]]:
    return [list(r) for r in t.rows]


def stats_report(cfg: RunConfig, agg: stats.Aggregate) -> dict:
    shape, n = agg.shape, agg.shape.n
    report: dict = {
        "shape": list(shape.parts),
        "order": _rows(agg.order),
        "mode": "exhaustive" if agg.exhaustive else {"samples": cfg.samples, "seed": cfg.seed},
        "n": n,
        "fillings": agg.fillings,
        "total_steps": agg.total_steps,
    }
    if agg.exhaustive:
        direct, via_m, via_beta = theory.complexities(agg)
        report["complexity"] = {"direct": rational(direct), "exchange": rational(via_m), "beta": rational(via_beta)}
        report["uniform"] = stats.is_uniform(agg.distribution)
        report["alpha"] = agg.heights.alpha
        report["exchange_numbers"] = {str(a): m for a, m in agg.exchange.exchange_numbers().items()}
        report["local_exchange"] = [
            {"a": a, "x": list(x), "y": list(y), "m": m}
            for (a, x, y), m in agg.exchange.local_counts.items()
        ]
    else:
        report["complexity"] = {
            "estimate": rational(agg.mean_steps),
            "standard_error": float(f"{agg.standard_error:.12g}"),
        }
    report["exchange_matrix"] = agg.exchange.matrix
    report["distribution"] = [
        {"W": _rows(w), "z": z} for w, z in agg.distribution.multiplicities.items()
    ]
    report["omega"] = {str(b): v for b, v in agg.heights.omega_by_entry.items()}
    report["beta"] = {str(b): v for b, v in agg.heights.beta_by_entry.items()}
    report["drop"] = [
        {"b": b, "x": list(x), "d": d} for (b, x), d in agg.drops.counts.items()
    ]
    report["signed_exit"] = [
        {"b": b, "x": list(x), "delta": _value(v)} for (b, x), v in agg.exits.values.items()
    ]
    return report


CSV_HEADER = ("b", "row", "col", "height", "drop", "signed_exit", "terminal")


def stats_csv(agg: stats.Aggregate) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for b in range(1, agg.shape.n + 1):
        for x in agg.shape.cells:
            w.writerow((
                b, x.row, x.col, height(x), agg.drops.counts[b, x],
                _value(agg.exits.values[b, x]), agg.heights.omega_by_entry_cell[b, x],
            ))
    return buf.getvalue()


def emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


# -- commands ---------------------------------------------------------------


def cmd_sort(args: argparse.Namespace) -> int:
    shape = Partition.parse(args.shape)
    u = resolve_order(shape, args.order)
    t = load_tableau(args.tableau)
    if t.shape != shape:
        raise DomainError(f"tableau has shape {t.shape}, expected {shape}")
    trace = engine.sort(t, u)
    emit(dumps(trace.to_json()), args.out)
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    mode, samples, seed = parse_mode(args.mode, args.samples, args.seed)
    cfg = RunConfig(
        Partition.parse(args.shape), args.order, mode, samples, seed,
        _workers(args.workers), args.format, args.out,
    )
    u = resolve_order(cfg.shape, cfg.order_spec)
    if cfg.mode == "exhaustive":
        check_cap(cfg.shape, args.force)
        agg = stats.aggregate(cfg.shape, u, workers=cfg.workers)
    else:
        agg = stats.aggregate_sample(cfg.shape, u, cfg.samples, cfg.seed, workers=cfg.workers)
    text = dumps(stats_report(cfg, agg)) if cfg.fmt == "json" else stats_csv(agg)
    emit(text, cfg.out)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    shape = Partition.parse(args.shape)
    check_cap(shape, args.force)
    which = [w for spec in (args.which or ["all"]) for w in spec.split(",") if w]
    if "all" in which:
        which = list(theory.CHECKS)
    orders = [resolve_order(shape, o) for o in args.order] if args.order else None
    report = theory.verify(shape, orders, which, workers=_workers(args.workers))
    if report.conj66:
        log_path = Path(args.log or os.environ.get("NPSLAB_CONJ66_LOG", CONJ66_LOG))
        with log_path.open("a") as fh:
            for u, rec in report.conj66:
                r = rec.ratio
                fh.write(json.dumps({
                    "shape": list(shape.parts), "order": _rows(u),
                    "ratio": f"{r.numerator}/{r.denominator}",
                    "uniform": rec.uniform, "gcd": rec.gcd, "lcm": rec.lcm,
                }) + "\n")
    emit(dumps(report.to_json()), args.out)
    return 0 if report.ok else 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="npslab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--shape", required=True, help='partition, e.g. "5,4,2,1"')
        p.add_argument("--out", type=Path, help="output file (default: stdout)")

    p = sub.add_parser("sort", help="sort one tableau and print its trace")
    common(p)
    p.add_argument("--order", default="column", help="column | row | strip:<RC...> | file:<path>")
    p.add_argument("--tableau", required=True, help="tableau JSON file, '-' for stdin, or inline JSON")
    p.set_defaults(func=cmd_sort)

    p = sub.add_parser("stats", help="aggregate statistics over all or sampled fillings")
    common(p)
    p.add_argument("--order", default="column")
    p.add_argument("--mode", default="exhaustive", help="exhaustive | sample | sample:N[:seed=S]")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, help="worker processes (default: CPU count)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--force", action="store_true", help="ignore the exhaustive size cap")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("verify", help="cross-check recursions against brute force")
    common(p)
    p.add_argument("--order", action="append", help="repeatable; default column, row and all strip orders")
    p.add_argument("--which", action="append", help=f"comma list from {', '.join(theory.CHECKS)}, or all")
    p.add_argument("--workers", type=int)
    p.add_argument("--force", action="store_true")
    p.add_argument("--log", help=f"append conj66 records here (default ${{NPSLAB_CONJ66_LOG}} or {CONJ66_LOG})")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except NPSError as exc:
        print(f"npslab: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
