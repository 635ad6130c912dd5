"""Command-line front end wiring the pipeline together.

Subcommands cover the whole flow: extract measurement records from plain
or annotated text, aggregate records into partial tables, merge and
finalize them, then query, compare, evaluate, audit, split, and export
plot data. Exit codes: 0 success, 1 usage error, 2 data error.

Between `extract` and `aggregate` records travel as a tab-separated
stream whose header line pins the registry version, distance preset, and
phrase threshold, so sharded builds cannot silently mix configurations.
"""

from __future__ import annotations

import argparse
import functools
import os
import sys

from .errors import QuantdistError, ConfigMismatchError, RecordFormatError
from .evaluation import (
    SCALE_MAP,
    detect_leakage,
    evaluate,
    load_dataset,
    make_clean_split,
)
from .inference import (
    CompareConfig,
    compare_adjectives,
    compare_nouns,
    query_distribution,
    relax_hour_window,
    relax_to_decade,
)
from .pipeline import (
    AnnotatedSentence,
    CooccurrenceRecord,
    ExtractionConfig,
    ObjectKey,
    Pos,
    read_annotated,
    split_sentences,
)
from .pipeline import extract_records as _extract_records
from .table import BuildConfig, QuantTable, read_table
from .units import Dimension, Quantity, load_registry

RECORD_FORMAT = "quantrecords/1"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems through the exit-code contract."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageError(message)


# ------------------------------------------------------------ flag parsing


def _positive_int(raw: str) -> int:
    value = int(raw)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _tau(raw: str) -> float:
    value = float(raw)
    if value < 1.0:
        raise argparse.ArgumentTypeError("must be >= 1.0")
    return value


def _dimension(raw: str) -> Dimension:
    name = raw.strip().lower()
    if name in SCALE_MAP:
        return SCALE_MAP[name]
    try:
        return Dimension[name.upper()]
    except KeyError:
        raise argparse.ArgumentTypeError(f"unknown dimension {raw!r}")


def _distance(raw: str):
    return None if raw == "sentence" else int(raw)


def _ratios(raw: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(p) for p in raw.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("ratios must be numbers")
    if len(parts) != 3 or any(p < 0 for p in parts) or abs(sum(parts) - 1.0) > 1e-9:
        raise argparse.ArgumentTypeError(
            "need three non-negative ratios summing to 1, e.g. 0.8,0.1,0.1"
        )
    return parts


def _add_registry_flags(p) -> None:
    p.add_argument("--units", help="unit lexicon TSV (default: QUANTDIST_UNITS or packaged)")
    p.add_argument("--rates", help="currency rate TSV (default: QUANTDIST_RATES or packaged)")


def _add_key_flags(p) -> None:
    p.add_argument("--object", required=True, help="object surface form")
    p.add_argument("--dim", required=True, type=_dimension, help="measurement dimension")
    p.add_argument("--pos", choices=[x.name.lower() for x in Pos], default=None)
    p.add_argument("--head", default=None, help="restrict to one syntactic head")


def _registry_for(args):
    units = getattr(args, "units", None) or os.environ.get("QUANTDIST_UNITS")
    rates = getattr(args, "rates", None) or os.environ.get("QUANTDIST_RATES")
    return load_registry(units, rates)


def _object_key(args) -> ObjectKey:
    pos = Pos[args.pos.upper()] if args.pos else Pos.UNKNOWN
    head = args.head.lower() if args.head else None
    return ObjectKey(args.object.lower(), pos, head)


# --------------------------------------------------------- record streams


def _record_line(record: CooccurrenceRecord) -> str:
    key = record.object
    return "\t".join(
        (
            key.surface,
            key.head or "",
            key.pos.name,
            record.quantity.dimension.name,
            repr(record.quantity.value_std),
            str(record.token_distance),
        )
    )


def _stream_header(registry_version: str, distance, min_phrase_count: int) -> str:
    preset = "sentence" if distance is None else str(distance)
    return (
        f"#{RECORD_FORMAT}\tregistry={registry_version}"
        f"\tdistance={preset}\tmin_phrase_count={min_phrase_count}"
    )


def _read_record_stream(path):
    """Returns ((registry, distance, min_phrase_count), records)."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        fields = header.split("\t")
        if not fields or fields[0] != f"#{RECORD_FORMAT}":
            raise RecordFormatError(
                f"missing {RECORD_FORMAT} header", line_number=1, path=str(path)
            )
        meta = dict(f.split("=", 1) for f in fields[1:] if "=" in f)
        try:
            distance = _distance(meta["distance"])
            config = (meta["registry"], distance, int(meta["min_phrase_count"]))
        except (KeyError, ValueError) as exc:
            raise RecordFormatError(
                f"bad stream header: {exc}", line_number=1, path=str(path)
            )
        records = []
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 6:
                raise RecordFormatError(
                    f"expected 6 columns, got {len(parts)}",
                    line_number=lineno,
                    path=str(path),
                )
            surface, head, pos_s, dim_s, value_s, gap_s = parts
            try:
                pos = Pos[pos_s]
                dim = Dimension[dim_s]
                value = float(value_s)
                gap = int(gap_s)
            except (KeyError, ValueError) as exc:
                raise RecordFormatError(
                    f"bad record field: {exc}", line_number=lineno, path=str(path)
                )
            key = ObjectKey(surface, pos, head or None)
            records.append(
                CooccurrenceRecord(key, Quantity(dim, value, value, "standard"), gap)
            )
    return config, records


# ------------------------------------------------------------ subcommands


def _cmd_extract(args) -> int:
    registry = _registry_for(args)
    config = ExtractionConfig(
        max_distance=args.distance,
        min_phrase_count=args.min_phrase_count,
        max_phrase_len=args.max_phrase_len,
    )
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        print(
            _stream_header(registry.version, config.max_distance, config.min_phrase_count),
            file=out,
        )
        for path in args.inputs:
            if args.annotated:
                sentences = read_annotated(path)
            else:
                sentences = _plain_sentences(path)
            for sentence in sentences:
                for record in _extract_records(sentence, config, registry):
                    print(_record_line(record), file=out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _plain_sentences(path):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            for text in split_sentences(line):
                yield AnnotatedSentence.from_plain(text)


def _cmd_aggregate(args) -> int:
    stream_config = None
    table = None
    for path in args.records:
        config, records = _read_record_stream(path)
        if stream_config is None:
            stream_config = config
            registry_version, distance, min_phrase_count = config
            table = QuantTable(
                BuildConfig(
                    registry_version=registry_version,
                    distance=distance,
                    min_phrase_count=min_phrase_count,
                    exact_cap=args.exact_cap,
                )
            )
        elif config != stream_config:
            raise ConfigMismatchError(
                f"record stream {path} was extracted under a different "
                f"configuration than {args.records[0]}"
            )
        table.observe_all(records)
    table.write(args.output)
    return 0


def _cmd_merge(args) -> int:
    tables = [read_table(path) for path in args.tables]
    merged = functools.reduce(lambda a, b: a.merge(b), tables)
    merged.write(args.output)
    return 0


def _cmd_finalize(args) -> int:
    table = read_table(args.table)
    table.finalize(args.min_count).write(args.output)
    return 0


def _format_value(value: float) -> str:
    return f"{value:.6g}"


def _cmd_query(args) -> int:
    table = read_table(args.table)
    key = _object_key(args)
    dist = query_distribution(table, key, args.dim)
    if dist is None:
        print(f"no entry for {key.surface!r} under {args.dim.name}", file=sys.stderr)
        return 2
    stats = dist.stats()
    unit_label = args.dim.standard_unit
    if args.unit:
        registry = _registry_for(args)
        unit = registry.lookup_unit(args.unit, marker_present=True)
        if unit is None:
            print(f"unknown unit {args.unit!r}", file=sys.stderr)
            return 2
        for field in ("median", "mean", "p5", "p95", "min", "max"):
            stats[field] = registry.denormalize(
                Quantity(args.dim, stats[field], stats[field], "standard"), unit
            )
        unit_label = args.unit
    if args.dim is Dimension.TIME:
        window = relax_hour_window(stats["median"])
    else:
        try:
            window = relax_to_decade(stats["median"])
        except ValueError:
            window = None  # non-positive medians have no decade bracket
    if args.format == "records":
        for field in ("count", "median", "mean", "p5", "p95", "min", "max"):
            print(f"{field}\t{stats[field]!r}")
        if window is not None:
            print(f"range_low\t{window[0]!r}")
            print(f"range_high\t{window[1]!r}")
        print(f"unit\t{unit_label}")
    else:
        print(f"object: {key.surface} (pos={key.pos.name})")
        print(f"dimension: {args.dim.name}")
        print(f"count: {stats['count']}")
        for field in ("median", "mean", "p5", "p95", "min", "max"):
            print(f"{field}: {_format_value(stats[field])} {unit_label}")
        if window is not None:
            print(f"range: {window[0]:g}-{window[1]:g} {unit_label}")
    return 0


def _cmd_compare(args) -> int:
    table = read_table(args.table)
    cfg = CompareConfig(equality_ratio=args.tau, min_count=args.min_count)
    if args.noun:
        label = compare_nouns(table, args.noun[0], args.noun[1], args.dim, cfg)
    else:
        label = compare_adjectives(table, args.adj[0], args.adj[1], args.dim, cfg)
        if label is None:
            print(
                f"no shared-head evidence for {args.adj[0]!r} vs {args.adj[1]!r} "
                f"under {args.dim.name}",
                file=sys.stderr,
            )
            return 2
    print(label.value)
    return 0


def _cmd_eval(args) -> int:
    table = read_table(args.table)
    examples = load_dataset(args.dataset)
    cfg = CompareConfig(equality_ratio=args.tau, min_count=args.min_count)
    report = evaluate(table, examples, cfg)
    if args.format == "records":
        for field in (
            "accuracy",
            "coverage",
            "majority_baseline",
            "scored",
            "skipped_not_comparable",
            "out_of_coverage",
        ):
            print(f"{field}\t{report[field]!r}")
        for scale, acc in report["per_dimension"].items():
            print(f"accuracy.{scale}\t{acc!r}")
    else:
        print(f"scored: {report['scored']}")
        print(f"accuracy: {report['accuracy']:.3f}")
        print(f"coverage: {report['coverage']:.3f}")
        print(f"majority baseline: {report['majority_baseline']:.3f}")
        for scale, acc in report["per_dimension"].items():
            print(f"accuracy[{scale}]: {acc:.3f}")
        print(f"not comparable: {report['skipped_not_comparable']}")
        print(f"out of coverage: {report['out_of_coverage']}")
    return 0


def _cmd_audit(args) -> int:
    train = load_dataset(args.train)
    eval_split = load_dataset(args.eval)
    report = detect_leakage(train, eval_split)
    if args.format == "records":
        for idx in sorted(report.transitive_flags):
            print(f"transitive\t{idx}")
        for idx in sorted(report.object_flags):
            print(f"object\t{idx}")
        print(f"rate.transitive\t{report.rates['transitive']!r}")
        print(f"rate.object\t{report.rates['object']!r}")
    else:
        n = len(eval_split)
        print(f"eval examples: {n}")
        print(
            f"transitive flags: {len(report.transitive_flags)} "
            f"({100.0 * report.rates['transitive']:.1f}%)"
        )
        print(
            f"object flags: {len(report.object_flags)} "
            f"({100.0 * report.rates['object']:.1f}%)"
        )
        if report.transitive_flags:
            flagged = " ".join(str(i) for i in sorted(report.transitive_flags))
            print(f"transitive rows: {flagged}")
        print(f"clean: {'yes' if report.clean else 'no'}")
    return 0


_LABEL_TEXT = {None: "NA"}


def _cmd_split(args) -> int:
    examples = load_dataset(args.dataset)
    train, dev, test = make_clean_split(examples, ratios=args.ratios, seed=args.seed)
    for name, rows in (("train", train), ("dev", dev), ("test", test)):
        path = f"{args.output_prefix}.{name}.tsv"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("object1\tobject2\tdimension\tlabel\n")
            for row in rows:
                label = _LABEL_TEXT.get(row.gold) or row.gold.value
                fh.write(f"{row.object1}\t{row.object2}\t{row.scale}\t{label}\n")
        print(f"{name}: {len(rows)} examples -> {path}")
    return 0


def _cmd_plot_export(args) -> int:
    table = read_table(args.table)
    key = _object_key(args)
    points = table.export_points(key, args.dim)
    if points is None and key.pos is not Pos.UNKNOWN:
        points = table.export_points(
            ObjectKey(key.surface, Pos.UNKNOWN, key.head), args.dim
        )
    if points is None:
        print(f"no entry for {key.surface!r} under {args.dim.name}", file=sys.stderr)
        return 2
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        print("#bucket_center\tdensity", file=out)
        for center, density in points:
            print(f"{center!r}\t{density!r}", file=out)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


# ----------------------------------------------------------------- parser


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="quantdist",
        description="Extract, aggregate, and query quantity distributions from text.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", help="corpus files to a measurement record stream")
    p.add_argument("inputs", nargs="+", help="plain text or annotated corpus files")
    p.add_argument("--annotated", action="store_true", help="inputs use the column format")
    p.add_argument(
        "--distance",
        type=_distance,
        choices=(None, 10, 3),
        default=None,
        metavar="{sentence,10,3}",
        help="co-occurrence window preset (default: sentence)",
    )
    p.add_argument("--min-phrase-count", type=_positive_int, default=5)
    p.add_argument("--max-phrase-len", type=_positive_int, default=3)
    p.add_argument("-o", "--output", help="record stream path (default: stdout)")
    _add_registry_flags(p)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("aggregate", help="record streams to one partial table")
    p.add_argument("records", nargs="+", help="record stream files from extract")
    p.add_argument("--exact-cap", type=_positive_int, default=4096)
    p.add_argument("-o", "--output", required=True, help="table path")
    p.set_defaults(func=_cmd_aggregate)

    p = sub.add_parser("merge", help="combine partial (or finalized) tables")
    p.add_argument("tables", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_merge)

    p = sub.add_parser("finalize", help="apply count thresholds to a partial table")
    p.add_argument("table")
    p.add_argument("--min-count", type=_positive_int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_finalize)

    p = sub.add_parser("query", help="distribution stats for one object")
    p.add_argument("--table", required=True)
    _add_key_flags(p)
    p.add_argument("--unit", help="display unit (default: the standard unit)")
    p.add_argument("--format", choices=("text", "records"), default="text")
    _add_registry_flags(p)
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("compare", help="order two objects or two modifiers")
    p.add_argument("--table", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--noun", nargs=2, metavar=("OBJ1", "OBJ2"))
    group.add_argument("--adj", nargs=2, metavar=("ADJ1", "ADJ2"))
    p.add_argument("--dim", required=True, type=_dimension)
    p.add_argument("--tau", type=_tau, default=1.1, help="equality ratio (default 1.1)")
    p.add_argument("--min-count", type=_positive_int, default=1)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("eval", help="score a comparison dataset against a table")
    p.add_argument("dataset")
    p.add_argument("--table", required=True)
    p.add_argument("--tau", type=_tau, default=1.1)
    p.add_argument("--min-count", type=_positive_int, default=1)
    p.add_argument("--format", choices=("text", "records"), default="text")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("audit", help="flag train-to-eval leakage")
    p.add_argument("train")
    p.add_argument("eval")
    p.add_argument("--format", choices=("text", "records"), default="text")
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("split", help="rebuild leakage-free train/dev/test files")
    p.add_argument("dataset")
    p.add_argument("--output-prefix", required=True)
    p.add_argument("--ratios", type=_ratios, default=(0.8, 0.1, 0.1))
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("plot-export", help="histogram points for density plots")
    p.add_argument("--table", required=True)
    _add_key_flags(p)
    p.add_argument("-o", "--output", help="default: stdout")
    p.set_defaults(func=_cmd_plot_export)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError:
        return 1
    except SystemExit as exc:  # --help
        return 0 if exc.code in (None, 0) else 1
    try:
        return args.func(args)
    except QuantdistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
