"""Batch front end: everything the service answers, scriptable.

Subcommands print exactly the canonical JSON the HTTP endpoints return
(or CSV where a tabular export exists), so pipelines can mix both
freely. Exit codes: 0 success, 1 validation problem (bad arguments,
bad data, unknown ids), 2 internal error. Errors go to stderr as one
JSON object per line.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import payloads
from .consensus import MatrixMode, SortKey, sweep as run_sweep, sweep_csv
from .errors import ConsensusError, IngestError, UnknownDataset
from .ingest import DatasetManifest, ingest_study, protocol_warnings
from .model import StudyDataset
from .simulate import simulate, spec_from_json
from .store import Store, serialize_dataset

_SORT_KEYS = {k.value: k for k in SortKey}
_MODES = {m.value: m for m in MatrixMode}


class _UsageExit(SystemExit):
    pass


class _Parser(argparse.ArgumentParser):
    # usage problems are validation errors: help + JSON diagnostic, exit 1
    def error(self, message: str) -> None:
        self.print_help(sys.stderr)
        _emit_error("usage", message)
        raise _UsageExit(1)


def _emit_error(code: str, message: str, detail=None) -> None:
    sys.stderr.write(
        payloads.canonical_json({"code": code, "message": message, "detail": detail})
        + "\n"
    )


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load(store: Store, dataset_id: str) -> StudyDataset:
    try:
        return store.load(dataset_id)
    except KeyError:
        raise UnknownDataset(f"unknown dataset {dataset_id!r}") from None


def _parse_weights(raw: str | None) -> dict[str, float] | None:
    if raw is None or not raw.strip():
        return None
    weights: dict[str, float] = {}
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        name, sep, value = part.partition(":")
        weights[name.strip()] = float(value) if sep else 1.0
    return weights or None


def _build_parser() -> _Parser:
    parser = _Parser(prog="crowdconsensus", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="load study CSVs into the store")
    ingest.add_argument("--store", required=True)
    ingest.add_argument("--manifest", required=True)
    ingest.add_argument("--responses", required=True)
    ingest.add_argument("--workers", required=True)
    ingest.add_argument("--segments", required=True)
    ingest.add_argument("--comments")

    simulate_cmd = sub.add_parser("simulate", help="generate a synthetic study")
    simulate_cmd.add_argument("--spec", required=True, help="simulation spec JSON file")
    simulate_cmd.add_argument("--out", help="directory for the generated study files")
    simulate_cmd.add_argument("--store", help="also save into this store")

    consensus = sub.add_parser("consensus", help="classify at one threshold")
    consensus.add_argument("--store", required=True)
    consensus.add_argument("--dataset", required=True)
    consensus.add_argument("--threshold", type=float, default=50.0)
    consensus.add_argument("--mode", choices=sorted(_MODES), default="response")
    consensus.add_argument("--sort", choices=sorted(_SORT_KEYS), default="time")
    consensus.add_argument("--exclude", action="store_true")

    sweep = sub.add_parser("sweep", help="SE/SP across thresholds 0..100")
    sweep.add_argument("--store", required=True)
    sweep.add_argument("--dataset", required=True)
    sweep.add_argument("--step", type=float, default=5.0)
    sweep.add_argument("--format", choices=("json", "csv"), default="json")
    sweep.add_argument("--exclude", action="store_true")

    anomalies = sub.add_parser("anomalies", help="signature groups and suspects")
    anomalies.add_argument("--store", required=True)
    anomalies.add_argument("--dataset", required=True)
    anomalies.add_argument("--exclude", action="store_true")

    embed = sub.add_parser("embed", help="2-D projection of workers or segments")
    embed.add_argument("--store", required=True)
    embed.add_argument("--dataset", required=True)
    embed.add_argument("--items", choices=("workers", "segments"), default="workers")
    embed.add_argument("--method", choices=("mds", "tsne"), default="mds")
    embed.add_argument("--weights", help="param:w,... (bare name means 1.0)")
    embed.add_argument("--glyph", choices=("polyps", "accuracy"), default="polyps")
    embed.add_argument("--radius", type=float, default=0.0)
    embed.add_argument("--perplexity", type=float, default=15.0)
    embed.add_argument("--iterations", type=int, default=1000)
    embed.add_argument("--seed", type=int, default=0)
    embed.add_argument("--format", choices=("json", "csv"), default="json")
    embed.add_argument("--exclude", action="store_true")

    report = sub.add_parser("report", help="overview + timeline + word cloud")
    report.add_argument("--store", required=True)
    report.add_argument("--dataset", required=True)
    report.add_argument("--words", type=int, default=50)
    report.add_argument("--exclude", action="store_true")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--store", required=True)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    return parser


def _cmd_ingest(args: argparse.Namespace) -> int:
    manifest = DatasetManifest.from_json(Path(args.manifest).read_bytes())
    comments = Path(args.comments).read_bytes() if args.comments else None
    dataset = ingest_study(
        Path(args.responses).read_bytes(),
        Path(args.workers).read_bytes(),
        Path(args.segments).read_bytes(),
        manifest,
        comments,
    )
    Store(args.store).save(dataset)
    warnings = [d.to_dict() for d in protocol_warnings(dataset)]
    _emit(payloads.canonical_json(payloads.ingest_result_payload(dataset, warnings)))
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    spec = spec_from_json(Path(args.spec).read_text(encoding="utf-8"))
    dataset = simulate(spec)
    written: list[str] = []
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, blob in serialize_dataset(dataset).items():
            (out / name).write_bytes(blob)
            written.append(name)
    if args.store:
        Store(args.store).save(dataset)
    _emit(
        payloads.canonical_json(
            {
                "dataset": payloads.dataset_summary_payload(dataset),
                "files": sorted(written),
            }
        )
    )
    return 0


def _cmd_consensus(args: argparse.Namespace) -> int:
    dataset = _load(Store(args.store), args.dataset)
    payload = payloads.consensus_payload(
        dataset,
        args.threshold,
        _MODES[args.mode],
        _SORT_KEYS[args.sort],
        args.exclude,
    )
    _emit(payloads.canonical_json(payload))
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    dataset = _load(Store(args.store), args.dataset)
    if args.format == "csv":
        excluded = dataset.marked_workers() if args.exclude else frozenset()
        excluded_segments = dataset.marked_segments() if args.exclude else frozenset()
        points = run_sweep(dataset, args.step, excluded, excluded_segments)
        _emit(sweep_csv(points))
    else:
        _emit(
            payloads.canonical_json(
                payloads.sweep_payload(dataset, args.step, args.exclude)
            )
        )
    return 0


def _cmd_anomalies(args: argparse.Namespace) -> int:
    dataset = _load(Store(args.store), args.dataset)
    _emit(payloads.canonical_json(payloads.anomalies_payload(dataset, args.exclude)))
    return 0


def _cmd_embed(args: argparse.Namespace) -> int:
    dataset = _load(Store(args.store), args.dataset)
    payload = payloads.embedding_payload(
        dataset,
        items=args.items,
        method=args.method,
        weights=_parse_weights(args.weights),
        glyph=args.glyph,
        radius=args.radius,
        perplexity=args.perplexity,
        n_iter=args.iterations,
        seed=args.seed,
        exclude=args.exclude,
    )
    if args.format == "csv":
        _emit(payloads.embedding_csv(payload))
    else:
        _emit(payloads.canonical_json(payload))
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    store = Store(args.store)
    dataset = _load(store, args.dataset)
    payload = payloads.report_payload(
        dataset, store.load_all(), args.words, args.exclude
    )
    _emit(payloads.canonical_json(payload))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(Store(args.store)), host=args.host, port=args.port)
    return 0


_HANDLERS = {
    "ingest": _cmd_ingest,
    "simulate": _cmd_simulate,
    "consensus": _cmd_consensus,
    "sweep": _cmd_sweep,
    "anomalies": _cmd_anomalies,
    "embed": _cmd_embed,
    "report": _cmd_report,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageExit as exc:
        return int(exc.code or 1)
    try:
        return _HANDLERS[args.command](args)
    except IngestError as exc:
        _emit_error("ingest_error", str(exc), [d.to_dict() for d in exc.diagnostics])
        return 1
    except FileExistsError as exc:
        _emit_error("duplicate_dataset", str(exc))
        return 1
    except (ConsensusError, ValueError, OSError, KeyError) as exc:
        _emit_error("validation", str(exc))
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        _emit_error("internal", f"{type(exc).__name__}: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
