"""Command-line front end.

Exit codes: 0 no smelly attribute, 1 at least one smelly attribute,
2 usage or configuration error, 3 input that cannot be parsed.
"""

from __future__ import annotations

import argparse
import difflib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ._version import __version__
from .engine import resolve_enabled, scan_table
from .errors import ConfigError, FormatError
from .ingest import load_table
from .model import PRESETS, SmellCategory, register_descriptors, resolve_preset, _PRESET_TABLE
from .report import aggregate_corpus, normalize_mode, render_report, _dumps
from .resources import load_resources

EXIT_CLEAN, EXIT_SMELLY, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 3

_CONFIG_KEYS = {
    "preset", "mode", "density_threshold", "params", "detectors", "exclude", "missing_tokens",
    "sample_cap", "resources", "delimiter", "header", "format",
}
_RESOURCE_FLAGS = ("dummy_lexicon", "thesaurus", "vectors", "ambiguity_lexicon", "abbreviations")


@dataclass
class CliConfig:
    preset: str = "default"
    density_threshold: float | None = None
    mode: str = "density_threshold"
    detectors: tuple = ()
    exclude: tuple = ()
    params: dict = field(default_factory=dict)
    missing_tokens: tuple | None = None
    delimiter: str = ","
    header: bool = True
    resources: dict = field(default_factory=dict)
    format: str = "json"
    out: str | None = None
    sample_cap: int | None = None
    glob: str = "*.csv"
    jobs: int = 0
    csv_out: str | None = None

    def strength(self):
        cfg = resolve_preset(self.preset)
        return cfg.with_overrides(
            self.params,
            density_threshold=self.density_threshold,
            sample_cap=self.sample_cap,
            missing_tokens=self.missing_tokens,
        )

    def enabled(self) -> tuple:
        return resolve_enabled(self.detectors or None, self.exclude)


def _split_ids(text) -> tuple:
    if text is None:
        return ()
    if isinstance(text, str):
        text = text.split(",")
    return tuple(t.strip() for t in text if t.strip())


def load_config_file(path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    base = Path(path).parent
    resources = data.get("resources") or {}
    if not isinstance(resources, dict):
        raise ConfigError("config 'resources' must be an object of kind -> path")
    data["resources"] = {k: str(base / v) for k, v in resources.items()}
    return data


def build_config(args: argparse.Namespace) -> CliConfig:
    """Merge preset defaults, the config file and flags (flags win)."""
    file = load_config_file(args.config) if getattr(args, "config", None) else {}

    def pick(name, flag_value):
        return flag_value if flag_value is not None else file.get(name)

    cc = CliConfig()
    cc.preset = pick("preset", args.preset) or "default"
    if cc.preset not in PRESETS:
        raise ConfigError(f"unknown preset {cc.preset!r}")
    cc.mode = normalize_mode(pick("mode", args.mode) or "density")
    cc.density_threshold = pick("density_threshold", args.density_threshold)
    cc.detectors = _split_ids(pick("detectors", args.detectors))
    cc.exclude = _split_ids(pick("exclude", args.exclude))
    cc.params = file.get("params") or {}
    if not isinstance(cc.params, dict):
        raise ConfigError("config 'params' must map detector id -> parameters")
    cc.missing_tokens = file.get("missing_tokens")
    cc.delimiter = pick("delimiter", args.delimiter) or ","
    cc.header = False if args.no_header else bool(file.get("header", True))
    cc.format = pick("format", args.format) or "json"
    cc.sample_cap = pick("sample_cap", args.sample_cap)
    cc.out = args.out
    cc.glob = getattr(args, "glob", None) or "*.csv"
    cc.jobs = getattr(args, "jobs", None) or 0
    cc.csv_out = getattr(args, "csv", None)
    cc.resources = dict(file.get("resources") or {})
    for kind in _RESOURCE_FLAGS:
        value = getattr(args, kind, None)
        if value:
            cc.resources[kind] = value
    if cc.format not in ("json", "text"):
        raise ConfigError(f"unknown format {cc.format!r}")
    if len(cc.delimiter) != 1:
        raise ConfigError("delimiter must be a single character")
    if cc.density_threshold is not None:
        cc.density_threshold = float(cc.density_threshold)
    if cc.sample_cap is not None:
        cc.sample_cap = int(cc.sample_cap)
    # validate eagerly so config errors never surface mid-scan
    cc.strength()
    cc.enabled()
    return cc


def _emit(data: bytes, out: str | None) -> None:
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _scan_path(path: str, cc: CliConfig, cfg=None, res=None):
    cfg = cfg or cc.strength()
    res = res if res is not None else load_resources(cc.resources)
    table = load_table(path, delimiter=cc.delimiter, header=cc.header,
                       missing_tokens=cfg.missing_tokens)
    return scan_table(table, cfg, res, cc.enabled(), cc.mode)


def run_scan(path, cc: CliConfig) -> int:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"no such file: {path}")
    if p.is_dir():
        raise ConfigError(f"{path} is a directory; use the corpus command")
    cfg = cc.strength()
    res = load_resources(cc.resources)
    try:
        report = _scan_path(str(path), cc, cfg, res)
    except (FormatError, OSError) as exc:
        print(f"datasmell: cannot parse {path}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    _emit(render_report(report, cc.format), cc.out)
    return EXIT_SMELLY if report.smelly_attributes else EXIT_CLEAN


def _corpus_worker(item):
    path, cc = item
    try:
        return path, _scan_path(path, cc), None
    except (FormatError, OSError) as exc:
        return path, None, str(exc)


def run_corpus(directory, cc: CliConfig) -> int:
    d = Path(directory)
    if not d.is_dir():
        raise ConfigError(f"not a directory: {directory}")
    files = sorted(str(p) for p in d.glob(cc.glob) if p.is_file())
    if not files:
        raise ConfigError(f"no files match {cc.glob!r} in {directory}")
    load_resources(cc.resources)  # surface resource errors before any work
    jobs = cc.jobs or os.cpu_count() or 1
    items = [(f, cc) for f in files]
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(files))) as pool:
            results = list(pool.map(_corpus_worker, items))
    else:
        results = [_corpus_worker(i) for i in items]
    reports = [r for _, r, _ in results if r is not None]
    skipped = [(p, err) for p, r, err in results if r is None]
    for p, err in skipped:
        print(f"datasmell: skipped {p}: {err}", file=sys.stderr)
    summary = aggregate_corpus(reports, skipped)
    if cc.format == "json":
        doc = summary.to_dict()
        doc["reports"] = [r.to_dict() for r in sorted(reports, key=lambda r: r.path)]
        data = (_dumps(doc) + "\n").encode("utf-8")
    else:
        data = render_report(summary, "text")
    _emit(data, cc.out)
    if cc.csv_out:
        Path(cc.csv_out).write_text(summary.to_csv(), encoding="utf-8")
    if not reports:
        return EXIT_PARSE
    return EXIT_SMELLY if summary.smelly_datasets else EXIT_CLEAN


def _format_params(smell_id: str) -> list[str]:
    table = _PRESET_TABLE[smell_id]
    if not table:
        return ["    (no parameters)"]
    lines = [f"    {'parameter':<18} " + " ".join(f"{p:>10}" for p in PRESETS)]
    for name, values in table.items():
        shown = []
        for v in values:
            if isinstance(v, tuple):
                v = f"{len(v)} dates"
            shown.append(f"{str(v):>10}")
        lines.append(f"    {name:<18} " + " ".join(shown))
    return lines


def explain_text(descriptor) -> str:
    lines = [
        f"{descriptor.id}  {descriptor.name}",
        f"  category:    {descriptor.category.value}",
        f"  granularity: {descriptor.granularity.value}",
        f"  applies to:  {', '.join(sorted(descriptor.applicable_types))}",
    ]
    if descriptor.requires_resource:
        lines.append(f"  resource:    {descriptor.requires_resource}")
    lines += ["", f"  {descriptor.doc}", "", f"  example: {descriptor.example}", "",
              "  parameters per preset:"]
    lines += _format_params(descriptor.id)
    return "\n".join(lines)


def run_explain(smell_id: str | None, show_all: bool = False) -> int:
    registry = register_descriptors()
    if show_all:
        blocks = []
        for category in SmellCategory:
            members = [d for d in registry if d.category == category]
            blocks.append(f"== {category.value} ({len(members)}) ==")
            blocks += [explain_text(d) + "\n" for d in members]
        print("\n".join(blocks))
        return EXIT_CLEAN
    if smell_id is None:
        raise ConfigError("explain needs a smell id or --all")
    key = smell_id.strip().upper()
    if key not in registry:
        close = difflib.get_close_matches(key, registry.ids(), n=1, cutoff=0.0)
        hint = f"; did you mean {close[0]}?" if close else ""
        print(f"datasmell: unknown smell id {smell_id!r}{hint}", file=sys.stderr)
        return EXIT_USAGE
    print(explain_text(registry[key]))
    return EXIT_CLEAN


def run_list() -> int:
    for d in register_descriptors():
        resource = d.requires_resource or "-"
        print(f"{d.id:<12} {d.granularity.value:<9} {d.category.value:<27} {d.name}  [{resource}]")
    return EXIT_CLEAN


def _add_scan_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="FILE", help="JSON configuration file")
    p.add_argument("--preset", choices=PRESETS)
    p.add_argument("--mode", choices=("density", "any"),
                   help="density: density >= threshold or a column-level finding; any: any finding")
    p.add_argument("--density-threshold", type=float, metavar="F")
    p.add_argument("--detectors", metavar="A,B", help="only run these detector ids")
    p.add_argument("--exclude", metavar="A,B", help="skip these detector ids")
    p.add_argument("--format", choices=("json", "text"))
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--delimiter", metavar="C")
    p.add_argument("--no-header", action="store_true", help="first line is data")
    p.add_argument("--sample-cap", type=int, metavar="N")
    for kind in _RESOURCE_FLAGS:
        p.add_argument("--" + kind.replace("_", "-"), dest=kind, metavar="FILE")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="datasmell", description="Lint tabular data for data smells.")
    parser.add_argument("--version", action="version", version=f"datasmell {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="scan one delimited file")
    scan.add_argument("path")
    _add_scan_options(scan)

    corpus = sub.add_parser("corpus", help="scan every matching file in a directory")
    corpus.add_argument("directory")
    _add_scan_options(corpus)
    corpus.add_argument("--glob", default="*.csv", metavar="PATTERN")
    corpus.add_argument("--jobs", type=int, metavar="N", help="worker processes (default: CPU count)")
    corpus.add_argument("--csv", metavar="FILE", help="also write the per-dataset CSV here")

    explain = sub.add_parser("explain", help="describe a smell")
    explain.add_argument("smell_id", nargs="?")
    explain.add_argument("--all", action="store_true")

    sub.add_parser("list-detectors", help="list every detector id")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_CLEAN
    try:
        if args.command == "explain":
            return run_explain(args.smell_id, args.all)
        if args.command == "list-detectors":
            return run_list()
        cc = build_config(args)
        if args.command == "scan":
            return run_scan(args.path, cc)
        if cc.jobs < 0:
            raise ConfigError("--jobs must be positive")
        return run_corpus(args.directory, cc)
    except ConfigError as exc:
        print(f"datasmell: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"datasmell: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # keep the exit code inside the documented range
        print(f"datasmell: internal error: {exc!r}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
