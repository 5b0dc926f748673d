"""Command-line driver: measure / ingest -> compose -> rank / report.

Exit codes: 0 success, 2 measurement, 3 ingestion, 4 composition, 5 output.
"""

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

from . import __version__
from ._accel import BACKENDS, DEFAULT_BACKEND
from .bench import AGGREGATIONS, DEFAULT_WORKLOAD_BYTES, TimingConfig, corpus_measure, seed_from_env
from .ciphers import CORPUS
from .errors import OutputError, SchemaError, UnibenchError
from .indicators import RatioTable, SubjectRecord, catalog_from_dict, compose_all, default_li_catalog, rank
from .ingestion import (
    emit_canonical,
    emit_results,
    merge_records,
    parse_canonical,
    parse_profiler_csv,
    parse_results,
    parse_synthesis_summary,
    profiler_to_measurements,
    synthesis_to_measurements,
)
from .report import ReportBundle, emit_bar_chart_svg, emit_radar_chart_svg, emit_ranking_csv

EXIT_OK, EXIT_MEASURE, EXIT_INGEST, EXIT_COMPOSE, EXIT_OUTPUT = 0, 2, 3, 4, 5


class CommandError(UnibenchError):
    def __init__(self, message, exit_code):
        super().__init__(message)
        self.exit_code = exit_code


def _read(path, code):
    try:
        if path == "-":
            return sys.stdin.read()
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc.strerror or exc}", code) from None
    except UnicodeDecodeError as exc:
        raise SchemaError("file is not valid UTF-8", location=f"byte {exc.start}", source=path) from None


def _load_catalog(args, code):
    if getattr(args, "catalog", None):
        try:
            return catalog_from_dict(json.loads(_read(args.catalog, code)))
        except json.JSONDecodeError as exc:
            raise CommandError(f"{args.catalog}: {exc}", code) from None
    return default_li_catalog()


def _write(out_dir, name, text):
    try:
        os.makedirs(out_dir, exist_ok=True)
        path = Path(out_dir) / name
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {Path(out_dir) / name}: {exc.strerror or exc}") from None
    return path


def _emit(args, name, text):
    """Machine output: a file in --out when given, else stdout."""
    if args.out:
        path = _write(args.out, name, text)
        print(f"wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def cmd_measure(args):
    names = [n.strip() for n in args.ciphers.split(",") if n.strip()] if args.ciphers else list(CORPUS)
    try:
        cfg = TimingConfig(args.warmup, args.repetitions, args.workload_bytes, args.agg, seed_from_env())
    except ValueError as exc:
        raise CommandError(str(exc), EXIT_MEASURE) from None
    records = corpus_measure(names, cfg, backend=args.backend)
    _emit(args, "measurements.json", emit_canonical(records))


def cmd_ingest(args):
    if not (args.profiler_csv or args.synthesis or args.canonical):
        raise CommandError("ingest needs at least one --profiler-csv, --synthesis or --canonical file", EXIT_INGEST)
    catalog = _load_catalog(args, EXIT_INGEST)
    merged = []
    for path in args.canonical:
        merged = merge_records(merged, parse_canonical(_read(path, EXIT_INGEST), catalog, args.clamp_epsilon, path))
    for path in args.profiler_csv:
        recs = []
        for p in parse_profiler_csv(_read(path, EXIT_INGEST), source=path):
            ms = profiler_to_measurements(p, args.clamp_epsilon, detail=f"file={Path(path).name}")
            recs = merge_records(recs, [_record(p.subject_id, ms)])
        merged = merge_records(merged, recs)
    for path in args.synthesis:
        s = parse_synthesis_summary(_read(path, EXIT_INGEST), source=path)
        merged = merge_records(merged, [_record(s.subject_id, synthesis_to_measurements(s, f"file={Path(path).name}"))])
    _emit(args, "measurements.json", emit_canonical(merged, catalog))


def _record(subject_id, measurements):
    return SubjectRecord.from_measurements(subject_id, measurements)


def cmd_compose(args):
    catalog = _load_catalog(args, EXIT_COMPOSE)
    records = parse_canonical(_read(args.document, EXIT_COMPOSE), catalog, args.clamp_epsilon, args.document)
    table, results, ranking = compose_all(records, args.reference, catalog)
    for r in results:
        for w in r.warnings:
            print(f"warning: {w}", file=sys.stderr)
    _emit(args, "results.json", emit_results(catalog, table, results, ranking))
    human = sys.stdout if args.out else sys.stderr
    for row in ranking:
        print(f"{row.rank:>3}  {row.subject_id:<12} {row.cmi:.2f}", file=human)


def _parse_scores(scores):
    pairs = []
    for item in scores:
        sid, sep, value = item.partition("=")
        if not sep or not sid:
            raise CommandError(f"--score expects subject=value, got {item!r}", EXIT_COMPOSE)
        try:
            pairs.append((sid, float(value)))
        except ValueError:
            raise CommandError(f"--score value for {sid!r} is not a number", EXIT_COMPOSE) from None
    return pairs


def cmd_rank(args):
    if args.results:
        catalog, table, results, _ = parse_results(_read(args.results, EXIT_COMPOSE), args.results)
        order = catalog.indicator_ids()
    elif args.score:
        table, results, order = RatioTable(args.reference), [], ()
    else:
        raise CommandError("rank needs a results document or --score entries", EXIT_COMPOSE)
    ranking = rank(_parse_scores(args.score) if args.score else results)
    bundle = ReportBundle(ranking, table, results, indicator_ids=tuple(order))
    _emit(args, "ranking.csv", emit_ranking_csv(bundle))


def _common_indicators(table, subjects, order):
    return [iid for iid in order if all((s, iid) in table.entries for s in subjects)]


def cmd_report(args):
    catalog, table, results, ranking = parse_results(_read(args.results, EXIT_OUTPUT), args.results)
    if not results:
        raise CommandError("results document has no results", EXIT_OUTPUT)
    bundle = ReportBundle(ranking, table, results, indicator_ids=tuple(catalog.indicator_ids()))
    subjects = [row.subject_id for row in ranking]
    axes = _common_indicators(table, subjects, catalog.indicator_ids())
    out = args.out or "."
    for name, text in (
        (args.ranking_name, emit_ranking_csv(bundle)),
        (args.bar_name, emit_bar_chart_svg(results)),
        (args.radar_name, emit_radar_chart_svg(table, subjects, axes)),
    ):
        print(f"wrote {_write(out, name, text)}", file=sys.stderr)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="DIR", help="write output files into DIR instead of stdout")
    common.add_argument("--reference", default="aes128", metavar="ID",
                        help="reference subject for ratio normalisation (default: aes128)")
    common.add_argument("--clamp-epsilon", type=float, default=None, metavar="X",
                        help="raise zero/negative values to X (with a warning) instead of failing")

    p = argparse.ArgumentParser(prog="unibench", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("measure", parents=[common], help="time the cipher corpus (software ET/TH)")
    m.add_argument("--ciphers", help=f"comma-separated cipher names (default: {','.join(CORPUS)})")
    m.add_argument("--workload-bytes", type=int, default=DEFAULT_WORKLOAD_BYTES,
                   help=f"bytes encrypted per timed pass (default: {DEFAULT_WORKLOAD_BYTES})")
    m.add_argument("--repetitions", type=int, default=30, help="timed passes (default: 30)")
    m.add_argument("--warmup", type=int, default=5, help="discarded passes before timing (default: 5)")
    m.add_argument("--agg", choices=AGGREGATIONS, default="median", help="aggregation of the timed passes")
    m.add_argument("--backend", choices=BACKENDS, default=None,
                   help=f"kernel backend (default: {DEFAULT_BACKEND}; UNIBENCH_DISABLE_NUMBA=1 forces numpy)")
    m.set_defaults(func=cmd_measure, code=EXIT_MEASURE)

    i = sub.add_parser("ingest", parents=[common], help="merge measurement files into one canonical document")
    i.add_argument("--profiler-csv", action="append", default=[], metavar="PATH", help="profiler CSV export")
    i.add_argument("--synthesis", action="append", default=[], metavar="PATH", help="synthesis summary file")
    i.add_argument("--canonical", action="append", default=[], metavar="PATH", help="canonical JSON document")
    i.add_argument("--catalog", metavar="PATH", help="indicator catalog JSON (default: LI catalog)")
    i.set_defaults(func=cmd_ingest, code=EXIT_INGEST)

    c = sub.add_parser("compose", parents=[common], help="ratios, profile products, CMI and ranking")
    c.add_argument("document", help="canonical measurement document ('-' for stdin)")
    c.add_argument("--catalog", metavar="PATH", help="indicator catalog JSON (default: LI catalog)")
    c.set_defaults(func=cmd_compose, code=EXIT_COMPOSE)

    r = sub.add_parser("rank", parents=[common], help="print the ranking CSV")
    r.add_argument("results", nargs="?", help="results document from compose")
    r.add_argument("--score", action="append", default=[], metavar="ID=CMI",
                   help="rank precomputed scores instead of a results document")
    r.set_defaults(func=cmd_rank, code=EXIT_COMPOSE)

    o = sub.add_parser("report", parents=[common], help="write ranking.csv, li_bar.svg and li_radar.svg")
    o.add_argument("results", help="results document from compose")
    o.add_argument("--ranking-name", default="ranking.csv", help="ranking CSV file name")
    o.add_argument("--bar-name", default="li_bar.svg", help="bar chart file name")
    o.add_argument("--radar-name", default="li_radar.svg", help="radar chart file name")
    o.set_defaults(func=cmd_report, code=EXIT_OUTPUT)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            args.func(args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except UnibenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code or args.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
