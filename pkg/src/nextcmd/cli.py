"""Command-line entry point: ``nextcmd <subcommand> [--config run.json] [flags]``.

Flags override values from the config file.  Exit codes: 0 success, 1 usage
or configuration error, 2 data or format error, 3 numeric divergence.
Errors are written to stderr as one JSON line ``{"stage": ..., "message": ...}``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import cleanse, extract, ingest, synth
from .config import RunConfig
from .errors import (ConfigError, CorpusFormatError, DivergenceError, FoldError,
                     NoCommandEventsError)
from .evaluation import MetricsReport, cross_validate, format_table
from .extract import TargetClassSet
from .pipeline import TrainedModel

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_DIVERGED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _ngram(text):
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    return [lo, hi]


def _add_common(p):
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_pipeline_flags(p):
    p.add_argument("--run-key", choices=cleanse.RUN_KEYS)
    p.add_argument("--top-k", type=int, dest="top_k")
    p.add_argument("--coverage", type=float)
    p.add_argument("--max-prefix-window", type=int)


def _add_model_flags(p):
    p.add_argument("--model", dest="model_kind", help="nb-bernoulli | nb-multinomial | logreg | nn")
    p.add_argument("--ngram", type=_ngram, help="n-gram range lo:hi")
    p.add_argument("--min-df", type=int)
    p.add_argument("--window", type=int, help="network input window")
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)


def build_parser():
    parser = _Parser(prog="nextcmd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="sample a synthetic event corpus")
    _add_common(p)
    p.add_argument("--output", help="corpus JSON-lines path")
    p.add_argument("--sessions", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("ingest-stats", help="corpus statistics and cleansing removals")
    _add_common(p)
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--run-key", choices=cleanse.RUN_KEYS)

    p = sub.add_parser("cleanse", help="filter, de-duplicate, tokenize, compress")
    _add_common(p)
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--run-key", choices=cleanse.RUN_KEYS)

    p = sub.add_parser("extract", help="select targets, write (prefix, label) rows")
    _add_common(p)
    p.add_argument("--input", help="cleansed token streams")
    p.add_argument("--output", help="rows JSON-lines path")
    p.add_argument("--targets", help="where to write the target class set")
    _add_pipeline_flags(p)

    p = sub.add_parser("train", help="fit one model on all rows")
    _add_common(p)
    p.add_argument("--input", help="rows, streams or raw corpus")
    p.add_argument("--targets")
    p.add_argument("--output", help="model JSON path")
    _add_pipeline_flags(p)
    _add_model_flags(p)

    p = sub.add_parser("evaluate", help="k-fold cross-validation report")
    _add_common(p)
    p.add_argument("--input", help="rows, streams or raw corpus")
    p.add_argument("--targets")
    p.add_argument("--output", help="MetricsReport JSON path (default stdout)")
    p.add_argument("--k", type=int)
    p.add_argument("--sample-size", type=int)
    p.add_argument("--fit-scope", choices=("fold", "global"))
    p.add_argument("--group-by-session", action="store_true", default=None)
    _add_pipeline_flags(p)
    _add_model_flags(p)

    p = sub.add_parser("predict", help="top-k classes for prefixes on stdin")
    _add_common(p)
    p.add_argument("--model", dest="model_path", help="model JSON path")
    p.add_argument("-k", "--top", type=int, default=5)

    p = sub.add_parser("report", help="render MetricsReport files as a table")
    p.add_argument("reports", nargs="+")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _merge_flags(args, raw):
    """Apply command-line overrides onto the raw config dict."""
    def section(name):
        return raw.setdefault(name, {})

    get = lambda name: getattr(args, name, None)  # noqa: E731
    if get("run_key") is not None:
        section("pipeline")["run_key"] = args.run_key
    if get("fit_scope") is not None:
        section("pipeline")["fit_scope"] = args.fit_scope
    if get("group_by_session"):
        section("pipeline")["group_by_session"] = True
    if get("top_k") is not None:
        section("extract").pop("coverage", None)
        section("extract")["top_k"] = args.top_k
    if get("coverage") is not None:
        section("extract").pop("top_k", None)
        section("extract")["coverage"] = args.coverage
    if get("max_prefix_window") is not None:
        section("extract")["max_prefix_window"] = args.max_prefix_window
    if get("model_kind") is not None:
        section("model")["kind"] = args.model_kind
    if get("ngram") is not None:
        section("features")["ngram_range"] = args.ngram
    if get("min_df") is not None:
        section("features")["min_df"] = args.min_df
    if get("window") is not None:
        section("features")["window"] = args.window
    if get("epochs") is not None:
        section("model")["epochs"] = args.epochs
    if get("k") is not None:
        section("eval")["k"] = args.k
    if get("sample_size") is not None:
        section("eval")["sample_size"] = args.sample_size
    if args.command == "generate":
        if get("sessions") is not None:
            section("synth")["session_count"] = args.sessions
        if get("seed") is not None:
            section("synth")["seed"] = args.seed
    elif get("seed") is not None:
        section("eval")["seed"] = args.seed
        section("model")["seed"] = args.seed
    return raw


def load_config(args) -> RunConfig:
    raw = {}
    if getattr(args, "config", None):
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{args.config}: top level must be a JSON object")
    return RunConfig.from_dict(_merge_flags(args, raw))


def _path(args, flag, cfg, key, required=True):
    value = getattr(args, flag, None) or cfg.paths.get(key)
    if value is None and required:
        raise ConfigError(f"no {key} path given (use --{flag} or paths.{key})")
    return value


def _model_input(args, cfg):
    """Explicit --input, else the most processed configured path."""
    for key in ("rows", "streams", "corpus"):
        if getattr(args, "input", None) or cfg.paths.get(key):
            return args.input or cfg.paths[key]
    raise ConfigError("no input given (use --input or paths.rows / paths.streams / paths.corpus)")


def _open_out(path):
    return open(path, "w", encoding="utf-8") if path else _Stdout()


class _Stdout:
    def __enter__(self):
        return sys.stdout

    def __exit__(self, *exc):
        sys.stdout.flush()


def _sniff(path):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorpusFormatError(f"{path}: first record is not JSON: {exc}", line=1)
                if "prefix" in obj:
                    return "rows"
                if "tokens" in obj:
                    return "streams"
                return "events"
    return "events"


def _targets_path(rows_path):
    return str(rows_path) + ".targets.json"


def _streams_from_events(path, cfg, strict=False):
    events = ingest.read_corpus(path, lenient=not strict).events
    sessions = ingest.group_sessions(events)
    return sessions, cleanse.cleanse_sessions(sessions, cfg.run_key)


def load_rows(path, cfg, targets_path=None):
    """Rows and targets from a rows file, a streams file or a raw corpus."""
    kind = _sniff(path)
    if kind == "rows":
        tpath = targets_path or cfg.paths.get("targets") or _targets_path(path)
        targets = TargetClassSet.from_dict(json.loads(Path(tpath).read_text(encoding="utf-8")))
        with open(path, encoding="utf-8") as fh:
            return extract.read_rows(fh, targets), targets
    if kind == "streams":
        with open(path, encoding="utf-8") as fh:
            streams = cleanse.read_streams(fh)
    else:
        streams = _streams_from_events(path, cfg)[1].streams
    targets = extract.select_targets(streams, cfg.selection)
    return extract.extract_all(streams, targets, cfg.max_prefix_window), targets


def _subsample(rows, cfg):
    if cfg.sample_size is None or cfg.sample_size >= len(rows):
        return rows
    idx = np.sort(np.random.default_rng(cfg.seed).choice(len(rows), cfg.sample_size, replace=False))
    return [rows[i] for i in idx]


# -- subcommands -----------------------------------------------------------

def cmd_generate(args, cfg):
    out = _path(args, "output", cfg, "corpus")
    spec = synth.MarkovSpec.from_dict(cfg.synth)
    corpus = synth.generate(spec)
    with open(out, "w", encoding="utf-8") as fh:
        ingest.write_corpus(corpus.events, fh)
    Path(str(out) + ".truth.json").write_text(
        json.dumps(corpus.truth.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_ingest_stats(args, cfg):
    inp = _path(args, "input", cfg, "corpus")
    sessions, cleansed = _streams_from_events(inp, cfg, strict=args.strict)
    stats = ingest.corpus_stats(sessions, cleansed)
    with _open_out(getattr(args, "output", None) or cfg.paths.get("stats")) as fh:
        fh.write(stats.to_json() + "\n")


def cmd_cleanse(args, cfg):
    inp = _path(args, "input", cfg, "corpus")
    out = _path(args, "output", cfg, "streams")
    _, cleansed = _streams_from_events(inp, cfg, strict=args.strict)
    with open(out, "w", encoding="utf-8") as fh:
        cleanse.write_streams(cleansed.streams, fh)


def cmd_extract(args, cfg):
    inp = _path(args, "input", cfg, "streams")
    out = _path(args, "output", cfg, "rows")
    rows, targets = load_rows(inp, cfg)
    tpath = args.targets or cfg.paths.get("targets") or _targets_path(out)
    Path(tpath).write_text(json.dumps(targets.to_dict(), indent=2) + "\n", encoding="utf-8")
    with open(out, "w", encoding="utf-8") as fh:
        extract.write_rows(rows, targets, fh)


def cmd_train(args, cfg):
    inp = _model_input(args, cfg)
    out = _path(args, "output", cfg, "model")
    rows, targets = load_rows(inp, cfg, args.targets)
    rows = _subsample(rows, cfg)
    model = TrainedModel.fit([r.prefix for r in rows], [r.label for r in rows],
                             cfg.model, cfg.features, targets.classes)
    Path(out).write_text(model.to_json() + "\n", encoding="utf-8")


def cmd_evaluate(args, cfg):
    inp = _model_input(args, cfg)
    rows, targets = load_rows(inp, cfg, args.targets)
    rows = _subsample(rows, cfg)
    result = cross_validate(rows, cfg.model, cfg.features, targets.classes, k=cfg.k,
                            seed=cfg.seed, fit_scope=cfg.fit_scope,
                            group_by_session=cfg.group_by_session)
    echo = cfg.to_dict()
    echo["targets"] = targets.to_dict()
    report = MetricsReport.from_scores(result.scores, result.labels, targets.classes, echo)
    with _open_out(getattr(args, "output", None) or cfg.paths.get("report")) as fh:
        fh.write(report.to_json() + "\n")


def cmd_predict(args, cfg):
    path = args.model_path or cfg.paths.get("model")
    if path is None:
        raise ConfigError("no model path given (use --model or paths.model)")
    model = TrainedModel.from_json(Path(path).read_text(encoding="utf-8"))
    for line in sys.stdin:
        prefix = line.split()
        top = model.top_k(prefix, args.top)
        sys.stdout.write(json.dumps(
            {"prefix": prefix, "top": [{"class": c, "prob": p} for c, p in top]}) + "\n")


def cmd_report(args, cfg):
    reports = [MetricsReport.from_json(Path(p).read_text(encoding="utf-8")) for p in args.reports]
    sys.stdout.write(format_table(reports))


COMMANDS = {
    "generate": cmd_generate,
    "ingest-stats": cmd_ingest_stats,
    "cleanse": cmd_cleanse,
    "extract": cmd_extract,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "predict": cmd_predict,
    "report": cmd_report,
}


def _fail(stage, exc, code):
    sys.stderr.write(json.dumps({"stage": stage, "message": str(exc)}) + "\n")
    return code


def main(argv=None) -> int:
    stage = "cli"
    try:
        args = build_parser().parse_args(argv)
        stage = args.command
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        cfg = load_config(args) if args.command != "report" else None
        COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        return _fail(stage, exc, EXIT_USAGE)
    except DivergenceError as exc:
        return _fail(stage, exc, EXIT_DIVERGED)
    except FoldError as exc:
        code = EXIT_DIVERGED if isinstance(exc.cause, DivergenceError) else EXIT_DATA
        return _fail(stage, exc, code)
    except (CorpusFormatError, NoCommandEventsError, OSError, ValueError, KeyError) as exc:
        return _fail(stage, exc, EXIT_DATA)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
