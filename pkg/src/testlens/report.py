"""Corpus-level aggregation and report emission (JSON, CSV, Markdown)."""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .catalog import CATEGORIES, FrameworkCatalog, load_catalog
from .model import EntityKind, PercentileSummary, ProjectAnalysis, TestCategory

QUANTILES = (25, 50, 75, 90)

TABLE1_ROWS = (
    ("projects", "Projects"),
    ("application_classes", "Application classes"),
    ("application_methods", "Application methods"),
    ("test_classes", "Test classes"),
    ("test_methods", "Test methods"),
    ("fixture_methods", "Test fixture methods"),
    ("test_method_ncloc", "Test method NCLOC"),
)

# (key, label, applies to setup, applies to teardown)
FIXTURE_ROWS = (
    ("ncloc", "NCLOC", True, True),
    ("cyclomatic_complexity", "Cyclomatic complexity", True, True),
    ("objects_created", "# of objects created", True, False),
    ("cleanup_operations", "# of cleanup operations", False, True),
    ("mocks", "# of mocks created", True, False),
)

METHOD_ROWS = (
    ("ncloc", "NCLOC"),
    ("objects_created", "# of objects created"),
    ("mocks", "# of mocks"),
    ("constructor_calls", "# of constructor calls"),
    ("application_calls", "# of application calls"),
    ("library_calls", "# of library calls"),
    ("call_assertion_sequences", "# of call-assertion sequence"),
    ("calls", "# of calls"),
    ("assertions", "# of assertions"),
)

CATEGORY_ORDER = tuple(c.value for c in (
    TestCategory.UI, TestCategory.API, TestCategory.LIBRARY, TestCategory.UNIT,
    TestCategory.INTEGRATION, TestCategory.UNKNOWN))


class EmptyInput(ValueError):
    pass


def nearest_rank(sorted_values: list, q: int):
    """Value at 1-based rank ceil(q*n/100) of an ascending list."""
    n = len(sorted_values)
    rank = max(1, (q * n + 99) // 100)
    return sorted_values[rank - 1]


def percentile_summary(values) -> PercentileSummary:
    vals = sorted(values)
    if not vals:
        raise EmptyInput("percentile summary of an empty list")
    p = [nearest_rank(vals, q) for q in QUANTILES]
    return PercentileSummary(p[0], p[1], p[2], p[3], sum(vals) / len(vals), len(vals))


def trim(values, percent: float) -> list:
    """Drop ``percent``% of the values from each tail (floor count)."""
    vals = sorted(values)
    if not percent:
        return vals
    k = int(len(vals) * percent / 100)
    return vals[k:len(vals) - k] if len(vals) - 2 * k > 0 else vals


@dataclass
class CorpusSummary:
    totals: dict
    table1: dict = field(default_factory=dict)          # metric -> PercentileSummary
    framework_category_counts: dict = field(default_factory=dict)
    scope_distribution: dict = field(default_factory=dict)   # category -> (count, fraction)
    focal_distributions: dict = field(default_factory=dict)  # name -> {count: tests}
    fixture_table: dict = field(default_factory=dict)   # Setup/Teardown -> metric -> PercentileSummary
    method_table: dict = field(default_factory=dict)    # category -> metric -> PercentileSummary
    structured_input_split: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)

    def to_json(self) -> dict:
        def ps(d):
            return {k: asdict(v) for k, v in d.items()}
        return {
            "totals": dict(self.totals),
            "table1": ps(self.table1),
            "framework_category_counts": dict(self.framework_category_counts),
            "scope_distribution": {k: {"count": c, "fraction": f}
                                   for k, (c, f) in self.scope_distribution.items()},
            "focal_distributions": {k: {str(n): c for n, c in v.items()}
                                    for k, v in self.focal_distributions.items()},
            "fixture_table": {k: ps(v) for k, v in self.fixture_table.items()},
            "method_table": {k: ps(v) for k, v in self.method_table.items()},
            "structured_input_split": self.structured_input_split,
            "diagnostics": list(self.diagnostics),
        }

    @classmethod
    def from_json(cls, d: dict) -> "CorpusSummary":
        def ps(x):
            return {k: PercentileSummary(**v) for k, v in x.items()}
        return cls(
            totals=dict(d["totals"]),
            table1=ps(d["table1"]),
            framework_category_counts=dict(d["framework_category_counts"]),
            scope_distribution={k: (v["count"], v["fraction"]) for k, v in d["scope_distribution"].items()},
            focal_distributions={k: {int(n): c for n, c in v.items()}
                                 for k, v in d["focal_distributions"].items()},
            fixture_table={k: ps(v) for k, v in d["fixture_table"].items()},
            method_table={k: ps(v) for k, v in d["method_table"].items()},
            structured_input_split=d["structured_input_split"],
            diagnostics=list(d["diagnostics"]),
        )


def compute_totals(models) -> dict:
    t = Counter()
    for p in models:
        t["projects"] += 1
        t["application_classes"] += p.application_class_count
        t["application_methods"] += p.application_method_count
        t["test_classes"] += len(p.test_classes)
        for c in p.test_classes:
            t["test_methods"] += len(c.test_methods)
            t["setup_methods"] += len(c.setup_methods)
            t["teardown_methods"] += len(c.teardown_methods)
            t["fixture_methods"] += len(c.setup_methods) + len(c.teardown_methods)
            t["classes_with_setup"] += bool(c.setup_methods)
            t["classes_with_teardown"] += bool(c.teardown_methods)
            for m in c.test_methods:
                t["test_method_ncloc"] += m.ncloc
                t["tests_with_structured_input"] += bool(m.structured_inputs)
                t["assertions"] += m.assertion_count
    keys = ("projects", "application_classes", "application_methods", "test_classes", "test_methods",
            "fixture_methods", "setup_methods", "teardown_methods", "classes_with_setup",
            "classes_with_teardown", "test_method_ncloc", "tests_with_structured_input", "assertions")
    return {k: t[k] for k in keys}


def _method_values(m) -> dict:
    calls = sum(1 for e in m.invocation_sequence if e.kind is not EntityKind.ASSERTION)
    return {
        "ncloc": m.ncloc,
        "objects_created": m.objects_created,
        "mocks": len(m.mocks),
        "constructor_calls": m.constructor_calls,
        "application_calls": m.application_calls,
        "library_calls": m.library_calls,
        "call_assertion_sequences": len(m.call_assertion_sequences),
        "calls": calls,
        "assertions": m.assertion_count,
    }


def _summaries(series: dict, where: str, diagnostics: list, trim_percent: float) -> dict:
    out = {}
    for key, values in series.items():
        if not values:
            diagnostics.append(f"{where}/{key}: no values, row skipped")
            continue
        out[key] = percentile_summary(trim(values, trim_percent))
    return out


def scope_distribution(models) -> dict:
    counts = Counter()
    for p in models:
        for c in p.test_classes:
            for m in c.test_methods:
                counts[m.category.value] += 1
    total = sum(counts.values())
    return {k: (counts[k], counts[k] / total if total else 0.0) for k in CATEGORY_ORDER}


def aggregate(models, catalog: FrameworkCatalog | None = None, trim_percent: float = 0.0) -> CorpusSummary:
    models = sorted(models, key=lambda p: p.project_name)
    if not models:
        raise EmptyInput("aggregate needs at least one model")
    catalog = catalog or load_catalog()
    diagnostics: list = []

    per_project = {"application_classes": [], "application_methods": [], "test_classes": [],
                   "test_methods": [], "fixture_methods": [], "test_method_ncloc": []}
    fixture_series = {"Setup": {k: [] for k, _l, s, _t in FIXTURE_ROWS if s},
                      "Teardown": {k: [] for k, _l, _s, t in FIXTURE_ROWS if t}}
    method_series = {c: {k: [] for k, _l in METHOD_ROWS} for c in CATEGORY_ORDER}
    focal_classes, focal_methods = Counter(), Counter()
    split = {True: [], False: []}
    fw_counts = {c: 0 for c in CATEGORIES}

    for p in models:
        per_project["application_classes"].append(p.application_class_count)
        per_project["application_methods"].append(p.application_method_count)
        per_project["test_classes"].append(len(p.test_classes))
        per_project["test_methods"].append(sum(len(c.test_methods) for c in p.test_classes))
        per_project["fixture_methods"].append(
            sum(len(c.setup_methods) + len(c.teardown_methods) for c in p.test_classes))
        cats = {catalog.category_of(f) for f in p.framework_ids} - {None}
        for cat in cats:
            fw_counts[cat] = fw_counts.get(cat, 0) + 1
        for c in p.test_classes:
            for f in c.setup_methods:
                s = fixture_series["Setup"]
                s["ncloc"].append(f.ncloc)
                s["cyclomatic_complexity"].append(f.cyclomatic_complexity)
                s["objects_created"].append(f.objects_created)
                s["mocks"].append(len(f.mocks))
            for f in c.teardown_methods:
                s = fixture_series["Teardown"]
                s["ncloc"].append(f.ncloc)
                s["cyclomatic_complexity"].append(f.cyclomatic_complexity)
                s["cleanup_operations"].append(len(f.cleanup_operations))
            for m in c.test_methods:
                per_project["test_method_ncloc"].append(m.ncloc)
                for k, v in _method_values(m).items():
                    method_series[m.category.value][k].append(v)
                focal_classes[len(m.focal_classes)] += 1
                focal_methods[len(m.focal_methods)] += 1
                split[bool(m.structured_inputs)].append(m)

    def split_row(ms):
        n = len(ms)
        return {
            "tests": n,
            "mean_ncloc": sum(m.ncloc for m in ms) / n if n else 0.0,
            "mean_cyclomatic_complexity": sum(m.cyclomatic_complexity for m in ms) / n if n else 0.0,
            "mean_assertions": sum(m.assertion_count for m in ms) / n if n else 0.0,
        }

    method_table = {}
    for cat in CATEGORY_ORDER:
        if not method_series[cat]["ncloc"]:
            continue
        method_table[cat] = _summaries(method_series[cat], f"method_table/{cat}", diagnostics, trim_percent)

    return CorpusSummary(
        totals=compute_totals(models),
        table1=_summaries(per_project, "table1", diagnostics, trim_percent),
        framework_category_counts=fw_counts,
        scope_distribution=scope_distribution(models),
        focal_distributions={"focal_classes": dict(sorted(focal_classes.items())),
                             "focal_methods": dict(sorted(focal_methods.items()))},
        fixture_table={k: _summaries(v, f"fixture_table/{k}", diagnostics, trim_percent)
                       for k, v in fixture_series.items()},
        method_table=method_table,
        structured_input_split={"with": split_row(split[True]), "without": split_row(split[False])},
        diagnostics=diagnostics,
    )


# -- emission ------------------------------------------------------------

def _num(v) -> str:
    if isinstance(v, float) and v.is_integer():
        return str(int(v)) if abs(v) < 1e15 else repr(v)
    return str(v) if not isinstance(v, float) else repr(v)


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


def _ps_cells(ps: PercentileSummary | None) -> list:
    if ps is None:
        return ["-"] * 4
    return [_num(ps.p25), _num(ps.p50), _num(ps.p75), _num(ps.p90)]


def render_csv(s: CorpusSummary) -> dict[str, str]:
    t1 = [["metric", "total", "average", "p25", "p50", "p75", "p90"]]
    for key, label in TABLE1_ROWS:
        ps = s.table1.get(key)
        if key == "projects":
            t1.append([label, s.totals["projects"], "-", "-", "-", "-", "-"])
            continue
        t1.append([label, s.totals[key], _num(ps.mean) if ps else "-"] + _ps_cells(ps))
    t2 = [["metric", "kind", "p25", "p50", "p75", "p90", "mean", "count"]]
    for key, label, su, td in FIXTURE_ROWS:
        for kind, applies in (("Setup", su), ("Teardown", td)):
            ps = s.fixture_table.get(kind, {}).get(key) if applies else None
            t2.append([label, kind] + _ps_cells(ps) + [_num(ps.mean) if ps else "-", ps.count if ps else 0])
    t3 = [["category", "metric", "p25", "p50", "p75", "p90", "mean", "count"]]
    for cat in CATEGORY_ORDER:
        for key, label in METHOD_ROWS:
            ps = s.method_table.get(cat, {}).get(key)
            t3.append([cat, label] + _ps_cells(ps) + [_num(ps.mean) if ps else "-", ps.count if ps else 0])
    sd = [["category", "count", "fraction"]]
    for cat in CATEGORY_ORDER:
        c, f = s.scope_distribution[cat]
        sd.append([cat, c, _num(f)])
    fw = [["category", "projects"]]
    for cat in sorted(s.framework_category_counts):
        fw.append([cat, s.framework_category_counts[cat]])
    return {
        "table1.csv": _csv(t1),
        "table2_fixtures.csv": _csv(t2),
        "table3_methods.csv": _csv(t3),
        "scope_distribution.csv": _csv(sd),
        "frameworks.csv": _csv(fw),
    }


def _md_table(header, rows) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(str(c) for c in r) + " |" for r in rows]
    return "\n".join(lines)


def render_markdown(s: CorpusSummary) -> str:
    out = ["# Test suite characterization report", ""]
    out.append("## Dataset overview")
    out.append("")
    rows = []
    for key, label in TABLE1_ROWS:
        ps = s.table1.get(key)
        if key == "projects" or ps is None:
            rows.append([label, s.totals[key], "-", "-", "-", "-", "-"])
        else:
            rows.append([label, s.totals[key], _num(ps.mean)] + _ps_cells(ps))
    out.append(_md_table(["", "Total", "Average", "P25", "P50", "P75", "P90"], rows))
    out += ["", "## Test fixture characteristics", ""]
    rows = []
    for key, label, su, td in FIXTURE_ROWS:
        cells = [label]
        for kind, applies in (("Setup", su), ("Teardown", td)):
            cells += _ps_cells(s.fixture_table.get(kind, {}).get(key) if applies else None)
        rows.append(cells)
    out.append(_md_table(["Metrics", "Setup P25", "Setup P50", "Setup P75", "Setup P90",
                          "Teardown P25", "Teardown P50", "Teardown P75", "Teardown P90"], rows))
    out += ["", "## Test method characteristics", ""]
    cats = [c for c in CATEGORY_ORDER if c in s.method_table]
    header = ["Metrics"] + [f"{c} {q}" for c in cats for q in ("P25", "P50", "P75", "P90")]
    rows = [["Total tests"] + [s.scope_distribution[c][0] if i == 0 else "" for c in cats for i in range(4)]]
    for key, label in METHOD_ROWS:
        rows.append([label] + [x for c in cats for x in _ps_cells(s.method_table[c].get(key))])
    out.append(_md_table(header, rows))
    out += ["", "## Test scope distribution", ""]
    out.append(_md_table(["Category", "Tests", "Fraction"],
                         [[c, n, f"{f:.4f}"] for c, (n, f) in s.scope_distribution.items()]))
    out += ["", "## Focal classes and methods per test", ""]
    for name, hist in s.focal_distributions.items():
        out.append(_md_table([name.replace("_", " "), "Tests"], [[k, v] for k, v in hist.items()]))
        out.append("")
    out += ["## Framework categories (projects using)", ""]
    out.append(_md_table(["Category", "Projects"],
                         [[k, v] for k, v in sorted(s.framework_category_counts.items())]))
    out += ["", "## Structured inputs", ""]
    rows = [[k, v["tests"], f"{v['mean_ncloc']:.2f}", f"{v['mean_cyclomatic_complexity']:.2f}",
             f"{v['mean_assertions']:.2f}"] for k, v in s.structured_input_split.items()]
    out.append(_md_table(["Tests", "Count", "Mean NCLOC", "Mean complexity", "Mean assertions"], rows))
    if s.diagnostics:
        out += ["", "## Diagnostics", ""] + [f"- {d}" for d in s.diagnostics]
    return "\n".join(out) + "\n"


def render_json(s: CorpusSummary) -> str:
    return json.dumps(s.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def emit_report(summary: CorpusSummary, out_dir, formats=("json", "csv", "md")) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: dict[str, str] = {}
    if "json" in formats:
        files["summary.json"] = render_json(summary)
    if "csv" in formats:
        files.update(render_csv(summary))
    if "md" in formats:
        files["report.md"] = render_markdown(summary)
    written = []
    for name in sorted(files):
        path = out / name
        path.write_text(files[name], encoding="utf-8")
        written.append(path)
    return written


def load_models(paths) -> tuple[list[ProjectAnalysis], list[tuple[str, str]]]:
    """Deserialize model documents; invalid ones are returned as (path, reason)."""
    from .model import ModelError, deserialize_model

    models, bad = [], []
    for p in sorted(paths, key=str):
        try:
            models.append(deserialize_model(Path(p).read_text(encoding="utf-8")))
        except (OSError, ValueError, ModelError) as exc:
            bad.append((str(p), str(exc)))
    return models, bad
