"""Command-line front end.

Subcommands: ``sample`` (exact or batch temperature sampling), ``oracle``
(closed-form tempered pmf and cost analytics), ``cost-sim`` (empirical vs.
theoretical call counts), ``eval-brier`` (corpus evaluation or Brier-n
combination), ``energy`` (energy loss of a batch file).

Exit codes: 0 success, 2 usage error, 3 call budget exhausted, 4 wire
protocol violation.  All seeded invocations are bit-reproducible.  Inverse
temperatures are rational ``p/q`` strings only; a float flag would defeat
the exact integer/fractional decomposition.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Sequence

from . import brier as brier_mod
from . import energy as energy_mod
from .core import ExplicitSampler, SamplerSource, load_pmf, make_rng
from .extproto import ProtocolError, spawn_external_sampler
from .temp_batch import batch_temperature_sample
from .temp_exact import (
    CallBudgetExhausted,
    DEFAULT_CALL_BUDGET,
    InverseTemperature,
    cost_bound,
    exact_temperature_sample,
    expected_calls,
    run_cost_experiment,
    target_distribution,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_PROTOCOL = 4


def _emit(text: str, path: str | None) -> None:
    """Print, or write atomically (temp file then rename) when a path is given."""
    if path is None:
        print(text)
        return
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
        if not text.endswith("\n"):
            fh.write("\n")
    os.replace(tmp, path)


def _rows_as_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().rstrip("\n")


def _rows_as_table(header: list[str], rows: list[list]) -> str:
    cells = [header] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines)


def _format_rows(fmt: str, header: list[str], rows: list[list], json_payload) -> str:
    if fmt == "json":
        return json.dumps(json_payload, sort_keys=True)
    if fmt == "csv":
        return _rows_as_csv(header, rows)
    return _rows_as_table(header, rows)


def _pmf_dict(dist) -> dict:
    return {"outcomes": [list(o) for o in dist.outcomes],
            "probs": [float(p) for p in dist.probs]}


def _open_source(args) -> tuple[SamplerSource, object | None]:
    """Build the sampler source; returns (source, explicit pmf or None)."""
    if getattr(args, "pmf", None):
        dist = load_pmf(args.pmf)
        return ExplicitSampler(dist), dist
    return spawn_external_sampler(args.external), None


# -- sample ---------------------------------------------------------------


def cmd_sample(args) -> int:
    exact_mode = args.inv_temp is not None
    if exact_mode == (args.n is not None):
        raise UsageError("choose exactly one of --inv-temp (exact) or --n/--batch-size (batch)")
    source, dist = _open_source(args)
    try:
        if exact_mode:
            inv_temp = InverseTemperature.parse(args.inv_temp)
            samples = []
            rng = make_rng(args.seed)
            try:
                for _ in range(args.count):
                    outcome, calls = exact_temperature_sample(source, inv_temp, rng, args.budget)
                    samples.append({"outcome": list(outcome), "calls_used": calls})
            except CallBudgetExhausted as exc:
                detail = f"{exc}"
                if dist is not None:
                    detail += (f"; expected calls per sample at 1/T={inv_temp} is "
                               f"{expected_calls(dist, inv_temp):.4f}")
                print(detail, file=sys.stderr)
                return EXIT_BUDGET
            payload = {"algorithm": "exact", "inv_temp": str(inv_temp), "seed": args.seed,
                       "samples": samples,
                       "total_calls": sum(s["calls_used"] for s in samples)}
            if dist is not None:
                # No automatic exact-vs-batch switch-over is offered; the
                # closed-form cost is surfaced so callers can decide.
                payload["expected_calls"] = expected_calls(dist, inv_temp)
            rows = [[" ".join(map(str, s["outcome"])), s["calls_used"]] for s in samples]
            text = _format_rows(args.output_format, ["outcome", "calls_used"], rows, payload)
        else:
            if args.batch_size is None:
                raise UsageError("--n requires --batch-size")
            rng = make_rng(args.seed)
            traces = [batch_temperature_sample(source, args.n, args.batch_size, rng)
                      for _ in range(args.count)]
            payload = {"algorithm": "batch", "n": args.n, "batch_size": args.batch_size,
                       "seed": args.seed,
                       "samples": [{"outcome": list(t.chosen), "used_m": t.used_m}
                                   for t in traces],
                       "traces": [json.loads(t.to_json()) for t in traces]}
            rows = [[" ".join(map(str, t.chosen)), t.used_m] for t in traces]
            text = _format_rows(args.output_format, ["outcome", "used_m"], rows, payload)
        _emit(text, args.output)
        return EXIT_OK
    finally:
        if hasattr(source, "close"):
            source.close()


# -- oracle ---------------------------------------------------------------


def cmd_oracle(args) -> int:
    dist = load_pmf(args.pmf)
    inv_temp = InverseTemperature.parse(args.inv_temp)
    target = target_distribution(dist, inv_temp)
    payload = {
        "inv_temp": str(inv_temp),
        "target_distribution": _pmf_dict(target),
        "expected_calls": expected_calls(dist, inv_temp),
        "cost_bound": cost_bound(dist, inv_temp),
        "regime": "low_temp" if inv_temp.value >= 2 else "high_temp",
    }
    _emit(json.dumps(payload, sort_keys=True), args.output)
    return EXIT_OK


# -- cost-sim -------------------------------------------------------------


def cmd_cost_sim(args) -> int:
    dist = load_pmf(args.pmf)
    grid = [InverseTemperature.parse(t) for t in args.inv_temp_grid.split(",")]
    header = ["inv_temp", "theoretical", "empirical", "bound", "regime", "trials"]
    rows, payload = [], []
    for i, inv_temp in enumerate(grid):
        report = run_cost_experiment(dist, inv_temp, args.trials, args.seed + i)
        rows.append([str(inv_temp), f"{report.theoretical_expected_calls:.6f}",
                     f"{report.empirical_mean_calls:.6f}", f"{report.bound:.6f}",
                     report.regime, report.trials])
        payload.append({"inv_temp": str(inv_temp),
                        "theoretical_expected_calls": report.theoretical_expected_calls,
                        "empirical_mean_calls": report.empirical_mean_calls,
                        "bound": report.bound, "regime": report.regime,
                        "trials": report.trials})
    _emit(_format_rows(args.output_format, header, rows, payload), args.output)
    return EXIT_OK


# -- eval-brier -----------------------------------------------------------


def cmd_eval_brier(args) -> int:
    if args.combine_only:
        values = [float(v) for v in args.combine_only.replace("/", ",").split(",")]
        if len(values) != 4:
            raise UsageError("--combine-only needs four Brier-n values (orders 1..4)")
        lm = brier_mod.combine_brier_lm(dict(zip((1, 2, 3, 4), values)))
        _emit(json.dumps({"brier_lm": lm, "brier_n": values}) if args.output_format == "json"
              else f"{lm:.2f}", args.output)
        return EXIT_OK
    if not args.corpus:
        raise UsageError("--corpus is required unless --combine-only is given")
    corpus = brier_mod.load_corpus(args.corpus, fmt=args.corpus_format)
    source, dist = _open_source(args)
    try:
        if args.chunk_len is not None:
            chunk_len = args.chunk_len
        elif dist is not None:
            chunk_len = len(dist.outcomes[0])
        else:
            chunk_len = source.handshake.k
        report = brier_mod.evaluate_corpus(source, corpus, chunk_len,
                                           max_order=args.max_order,
                                           stride=args.stride, seed=args.seed)
    finally:
        if hasattr(source, "close"):
            source.close()
    if args.output_format == "json":
        text = report.to_json()
    elif args.output_format == "csv":
        header = ["order", "brier_n", "accuracy", "collision", "positions"]
        rows = [[n, report.brier_n[n], report.accuracy[n], report.collision[n],
                 report.sums[n][3]] for n in sorted(report.brier_n)]
        rows.append(["brier_lm", report.brier_lm, "", "", ""])
        text = _rows_as_csv(header, rows)
    else:
        text = report.to_table()
    _emit(text, args.output)
    return EXIT_OK


# -- energy ---------------------------------------------------------------


def cmd_energy(args) -> int:
    batches = energy_mod.load_vector_batches(args.batch)
    loss = energy_mod.sequence_energy_loss(batches, args.alpha)
    if args.output_format == "json":
        text = json.dumps({"energy_loss": loss, "batches": len(batches), "alpha": args.alpha})
    else:
        text = f"{loss!r}"
    _emit(text, args.output)
    return EXIT_OK


# -- parser ---------------------------------------------------------------


class UsageError(Exception):
    pass


def _add_common(p: argparse.ArgumentParser, seed: bool = True) -> None:
    if seed:
        p.add_argument("--seed", type=int, default=0, help="64-bit RNG seed")
    p.add_argument("--output-format", choices=("json", "csv", "table"), default="json")
    p.add_argument("--output", default=None, help="write output to this file atomically")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lfree",
                                     description="Likelihood-free sampling and evaluation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="temperature-sample from a pmf file or external sampler")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--pmf", help="explicit pmf JSON file")
    src.add_argument("--external", help="external sampler command line")
    p.add_argument("--inv-temp", help="exact algorithm: rational 1/T as 'p/q'")
    p.add_argument("--n", type=int, help="batch algorithm: integer n (T = 1/n)")
    p.add_argument("--batch-size", type=int, help="batch algorithm: batch size N")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--budget", type=int, default=DEFAULT_CALL_BUDGET,
                   help="base-sampler call budget per requested sample")
    _add_common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("oracle", help="closed-form tempered pmf, expected calls, cost bound")
    p.add_argument("--pmf", required=True)
    p.add_argument("--inv-temp", required=True)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("cost-sim", help="empirical vs. theoretical sampler-call counts")
    p.add_argument("--pmf", required=True)
    p.add_argument("--inv-temp-grid", required=True, help="comma-separated p/q list")
    p.add_argument("--trials", type=int, default=10000)
    _add_common(p)
    p.set_defaults(func=cmd_cost_sim)

    p = sub.add_parser("eval-brier", help="Brier-n / BrierLM evaluation over a corpus")
    p.add_argument("--corpus", help="token corpus (JSONL token arrays or raw text)")
    p.add_argument("--corpus-format", choices=("auto", "jsonl", "text"), default="auto")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--pmf", help="context-free explicit pmf source")
    src.add_argument("--external", help="external sampler command line")
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--max-order", type=int, default=4)
    p.add_argument("--chunk-len", type=int, default=None,
                   help="tokens per sampled chunk (default: inferred from the source)")
    p.add_argument("--combine-only", default=None,
                   help="skip evaluation; combine four Brier-n values into BrierLM")
    _add_common(p)
    p.set_defaults(func=cmd_eval_brier)

    p = sub.add_parser("energy", help="energy loss of a vector-batch JSON file")
    p.add_argument("--batch", required=True)
    p.add_argument("--alpha", type=float, default=1.0, help="distance exponent in (0, 2]")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_energy)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "pmf", None) is None and getattr(args, "external", None) is None \
            and args.command in ("eval-brier",) and not getattr(args, "combine_only", None):
        parser.error("eval-brier needs --pmf or --external (or --combine-only)")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits 2
        return EXIT_USAGE  # unreachable
    except CallBudgetExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ProtocolError as exc:
        print(f"protocol violation: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
