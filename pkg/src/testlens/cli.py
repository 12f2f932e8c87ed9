"""Command line: ``testlens analyze | corpus | report``.

Exit codes: 0 success, 2 partial success (some files, projects or model
documents failed), 1 fatal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .catalog import CatalogError, load_catalog
from .model import serialize_model

log = logging.getLogger("testlens")

EXIT_OK, EXIT_FATAL, EXIT_PARTIAL = 0, 1, 2


class ManifestError(ValueError):
    pass


def load_manifest(path) -> dict:
    """``{"entries": [(name, path)], "ignore": [...], "catalog": str|None}``.

    JSON manifests are either ``{"projects": [{"name", "path"}], "ignore", "catalog"}``
    or a plain ``{name: path}`` object. Text manifests hold one ``name path``
    (or ``name=path``, or bare ``path``) per line; ``#`` starts a comment.
    Relative paths are taken relative to the manifest's directory.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc.strerror or exc}") from exc
    base = path.parent
    entries, ignore, catalog = [], [], None
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"manifest is not valid JSON: {exc}") from exc
        if isinstance(data, dict) and "projects" in data:
            projects = data["projects"]
            ignore = list(data.get("ignore", []))
            catalog = data.get("catalog")
        else:
            projects = data
        if isinstance(projects, dict):
            projects = [{"name": k, "path": v} for k, v in projects.items()]
        if not isinstance(projects, list):
            raise ManifestError("manifest 'projects' must be a list or an object")
        for i, p in enumerate(projects):
            if not isinstance(p, dict) or not isinstance(p.get("path"), str):
                raise ManifestError(f"manifest entry {i} needs a string 'path'")
            entries.append((p.get("name") or Path(p["path"]).name, p["path"]))
    else:
        for ln, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                name, _, p = line.partition("=")
            elif len(line.split()) >= 2:
                name, p = line.split(None, 1)
            else:
                name, p = Path(line).name, line
            name, p = name.strip(), p.strip()
            if not name or not p:
                raise ManifestError(f"manifest line {ln}: expected 'name path'")
            entries.append((name, p))
    if not entries:
        raise ManifestError("manifest lists no projects")
    names = [n for n, _ in entries]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise ManifestError(f"duplicate project names in manifest: {', '.join(dupes)}")
    for n in names:
        if "/" in n or "\\" in n or n in (".", ".."):
            raise ManifestError(f"project name {n!r} is not a valid file name")
    resolved = [(n, str((base / p) if not Path(p).is_absolute() else Path(p))) for n, p in entries]
    if catalog and not Path(catalog).is_absolute():
        catalog = str(base / catalog)
    return {"entries": resolved, "ignore": ignore, "catalog": catalog}


def _analyze_entry(name: str, path: str, ignore: list, catalog_path: str | None):
    """Worker: returns ``(name, document text or None, [(file, reason)], fatal reason or None)``."""
    from .pipeline import analyze_project

    try:
        catalog = load_catalog(catalog_path)
        model = analyze_project(path, project_name=name, ignore_globs=ignore, catalog=catalog)
        return name, serialize_model(model), list(model.analysis_failures), None
    except FileNotFoundError as exc:
        return name, None, [], str(exc)
    except Exception as exc:  # noqa: BLE001 - a project failure never aborts the corpus
        return name, None, [], f"{type(exc).__name__}: {exc}"


def cmd_analyze(args) -> int:
    from .pipeline import analyze_project

    root = Path(args.path)
    if not root.is_dir():
        log.error("project root not found: %s", root)
        return EXIT_FATAL
    try:
        catalog = load_catalog(args.catalog)
    except CatalogError as exc:
        log.error("%s", exc)
        return EXIT_FATAL
    model = analyze_project(root, project_name=args.name, ignore_globs=args.ignore, catalog=catalog)
    text = serialize_model(model)
    if args.out and args.out != "-":
        try:
            out = Path(args.out)
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(text, encoding="utf-8")
        except OSError as exc:
            log.error("cannot write %s: %s", args.out, exc.strerror or exc)
            return EXIT_FATAL
    else:
        sys.stdout.write(text)
    for path, reason in model.analysis_failures:
        log.warning("%s: %s", path, reason)
    n_tests = sum(len(c.test_methods) for c in model.test_classes)
    log.info("%s: %d test classes, %d test methods", model.project_name, len(model.test_classes), n_tests)
    return EXIT_PARTIAL if model.analysis_failures else EXIT_OK


def cmd_corpus(args) -> int:
    try:
        manifest = load_manifest(args.manifest)
        catalog_path = args.catalog or manifest["catalog"]
        load_catalog(catalog_path)
    except (ManifestError, CatalogError) as exc:
        log.error("%s", exc)
        return EXIT_FATAL
    ignore = list(manifest["ignore"]) + list(args.ignore or [])
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        log.error("cannot create %s: %s", out, exc.strerror or exc)
        return EXIT_FATAL

    jobs = [(n, p, ignore, catalog_path) for n, p in manifest["entries"]]
    if args.parallelism <= 1:
        results = [_analyze_entry(*j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=args.parallelism) as pool:
            futures = [pool.submit(_analyze_entry, *j) for j in jobs]
            results = [f.result() for f in futures]

    log_lines = []
    status = EXIT_OK
    for name, text, failures, fatal in sorted(results, key=lambda r: r[0]):
        if fatal is not None:
            log.error("%s: %s", name, fatal)
            log_lines.append(f"{name}\t-\t{fatal}")
            status = EXIT_PARTIAL
            continue
        try:
            (out / f"{name}.json").write_text(text, encoding="utf-8")
        except OSError as exc:
            log.error("cannot write model for %s: %s", name, exc.strerror or exc)
            return EXIT_FATAL
        for path, reason in failures:
            log_lines.append(f"{name}\t{path}\t{reason}")
            status = EXIT_PARTIAL
    (out / "failures.log").write_text("".join(line + "\n" for line in sorted(log_lines)), encoding="utf-8")
    log.info("corpus: %d projects, %d log entries", len(results), len(log_lines))
    return status


def cmd_report(args) -> int:
    from .report import aggregate, emit_report, load_models

    src = Path(args.models)
    if not src.is_dir():
        log.error("model directory not found: %s", src)
        return EXIT_FATAL
    paths = sorted(src.glob("*.json"))
    models, bad = load_models(paths)
    for path, reason in bad:
        log.warning("skipping %s: %s", path, reason)
    if not models:
        log.error("no valid model documents in %s", src)
        return EXIT_FATAL
    try:
        catalog = load_catalog(args.catalog)
    except CatalogError as exc:
        log.error("%s", exc)
        return EXIT_FATAL
    summary = aggregate(models, catalog, trim_percent=args.trim_percent)
    for d in summary.diagnostics:
        log.info("%s", d)
    formats = tuple(args.format) if args.format else ("json", "csv", "md")
    try:
        emit_report(summary, args.out, formats)
    except OSError as exc:
        log.error("cannot write report: %s", exc.strerror or exc)
        return EXIT_FATAL
    return EXIT_PARTIAL if bad else EXIT_OK


def _percent(text: str) -> float:
    v = float(text)
    if not 0 <= v < 50:
        raise argparse.ArgumentTypeError("trim percent must be in [0, 50)")
    return v


class _Parser(argparse.ArgumentParser):
    # usage errors are fatal (1); argparse's default 2 would read as "partial"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FATAL, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="testlens", description="Characterize Java test suites.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--catalog", help="framework catalog overlay (JSON or TOML); "
                                         "falls back to $HAMSTER_CATALOG")
        p.add_argument("--ignore", action="append", default=[], metavar="GLOB",
                       help="exclude files matching GLOB (repeatable)")

    a = sub.add_parser("analyze", help="analyze one project directory")
    a.add_argument("path")
    a.add_argument("--out", help="model file (default: stdout)")
    a.add_argument("--name", help="project name (default: directory name)")
    common(a)
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("corpus", help="analyze every project listed in a manifest")
    c.add_argument("manifest")
    c.add_argument("--out", required=True, help="output directory for models and failures.log")
    c.add_argument("--parallelism", type=int, default=1, help="concurrent project analyses")
    common(c)
    c.set_defaults(func=cmd_corpus)

    r = sub.add_parser("report", help="aggregate model documents into reports")
    r.add_argument("models", help="directory of model documents")
    r.add_argument("--out", required=True, help="report output directory")
    r.add_argument("--format", action="append", choices=("json", "csv", "md"),
                   help="report format (repeatable; default: all)")
    r.add_argument("--trim-percent", type=_percent, default=0.0,
                   help="drop this percentage from each tail before percentiles")
    r.add_argument("--catalog", help="framework catalog overlay")
    r.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
