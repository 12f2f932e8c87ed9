"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; the lines are printed together at the end
of the pytest run (see ``pytest_terminal_summary`` in conftest.py).
"""

import os
import random
import time
from pathlib import Path

from conftest import GOLDEN
from golden.expected import expected_models
from testlens.cli import main
from testlens.model import serialize_model, validate_document
from testlens.pipeline import analyze_project
from testlens.report import compute_totals, nearest_rank

import test_golden
import test_properties

RESULTS: dict[int, str] = {}


def record(n: int, title: str, ok: bool, detail: str) -> None:
    RESULTS[n] = f"[{'PASS' if ok else 'FAIL'}] {n}. {title}: {detail}"
    assert ok, RESULTS[n]


def test_criterion_1_golden_corpus(catalog):
    start = time.perf_counter()
    mismatched = []
    for name, model in expected_models().items():
        got = serialize_model(analyze_project(GOLDEN / name, project_name=name, catalog=catalog))
        if got != serialize_model(model):
            mismatched.append(name)
    took = time.perf_counter() - start
    files = sum(1 for _ in GOLDEN.rglob("*.java"))
    record(1, "golden corpus byte-identical", not mismatched and took < 5.0,
           f"{files} files, mismatched={mismatched or 'none'}, {took:.2f}s (limit 5s)")


def test_criterion_2_snippet_oracles(catalog):
    analyzed = {n: analyze_project(GOLDEN / n, project_name=n, catalog=catalog) for n in ("acme", "legacy")}
    checks = [test_golden.test_rule_snippet, test_golden.test_mocking_setup_snippet,
              test_golden.test_inherited_fixture_snippet, test_golden.test_fixture_scope_snippet,
              test_golden.test_structured_input_snippets]
    failed = []
    for check in checks:
        try:
            check(analyzed)
        except AssertionError:
            failed.append(check.__name__)
    record(2, "snippet oracles", not failed, f"{len(checks) - len(failed)}/{len(checks)} hold"
           + (f", failing: {failed}" if failed else ""))


def test_criterion_3_sequence_properties(tmp_path_factory):
    start = time.perf_counter()
    test_properties.test_partition_round_trip()              # 1000 examples x 10 = 10,000 sequences
    test_properties.test_generated_expressions_are_ordered(tmp_path_factory)
    took = time.perf_counter() - start
    record(3, "sequence properties", took < 30.0,
           f"10000 partition sequences + generated Java bodies, {took:.2f}s (limit 30s)")


def test_criterion_4_percentiles():
    a = [nearest_rank(list(range(1, 11)), q) for q in (25, 50, 75, 90)]
    b = [nearest_rank(list(range(1, 101)), q) for q in (25, 50, 75, 90)]
    test_properties.test_percentiles_ignore_order()
    record(4, "nearest-rank percentiles", a == [3, 5, 8, 9] and b == [25, 50, 75, 90],
           f"1..10 -> {a}, 1..100 -> {b}, permutation invariant")


def _run_corpus(tmp: Path, parallelism: int) -> dict:
    tmp.mkdir(parents=True)
    man = tmp / "projects.txt"
    man.write_text("".join(f"{n} {GOLDEN / n}\n" for n in ("acme", "legacy", "shop")))
    codes = (main(["corpus", str(man), "--out", str(tmp / "models"), "--parallelism", str(parallelism)]),
             main(["report", str(tmp / "models"), "--out", str(tmp / "report")]))
    assert codes == (0, 0), codes
    return {str(p.relative_to(tmp)): p.read_bytes() for p in sorted(tmp.rglob("*")) if p.is_file()
            and p.name != "projects.txt"}


def test_criterion_5_determinism(tmp_path):
    one = _run_corpus(tmp_path / "p1", 1)
    eight = _run_corpus(tmp_path / "p8", 8)
    diff = sorted(k for k in one.keys() | eight.keys() if one.get(k) != eight.get(k))
    record(5, "parallelism 1 vs 8", not diff, f"{len(one)} files compared, differing={diff or 'none'}")


def test_criterion_6_additivity():
    models = list(expected_models().values())
    whole = compute_totals(models)
    rnd = random.Random(20260101)
    bad = 0
    for _ in range(200):
        groups = {}
        for m in models:
            groups.setdefault(rnd.randrange(4), []).append(m)
        parts = [compute_totals(g) for g in groups.values()]
        bad += {k: sum(p[k] for p in parts) for k in whole} != whole
    test_properties.test_totals_additive_over_partitions()
    record(6, "aggregation additivity", bad == 0, f"200 random partitions, {bad} violations")


def test_criterion_7_scale(tmp_path):
    root = os.environ.get("TESTLENS_SCALE_PROJECT")
    if not root or not Path(root).is_dir():
        record(7, "scale smoke test", False,
               "TESTLENS_SCALE_PROJECT does not name a project directory; no real project to analyze")
    out = tmp_path / "scale.json"
    start = time.perf_counter()
    code = main(["analyze", root, "--out", str(out)])
    took = time.perf_counter() - start
    import json
    doc = json.loads(out.read_text()) if out.exists() else None
    try:
        validate_document(doc)
        valid = True
    except Exception:  # noqa: BLE001
        valid = False
    n = sum(len(c["test_methods"]) for c in doc["test_classes"]) if valid else 0
    record(7, "scale smoke test", code in (0, 2) and valid and n >= 1000 and took < 60.0,
           f"{n} test methods, exit {code}, schema valid={valid}, {took:.1f}s (limit 60s)")
