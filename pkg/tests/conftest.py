"""Shared helpers: build throwaway Java projects and analyze them."""

import textwrap
from pathlib import Path

import pytest

from testlens.catalog import load_catalog
from testlens.pipeline import analyze_project

GOLDEN = Path(__file__).parent / "golden" / "projects"


def write_project(root: Path, files: dict) -> Path:
    for rel, src in files.items():
        p = root / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(textwrap.dedent(src).lstrip("\n"), encoding="utf-8")
    return root


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture
def analyze(tmp_path, catalog):
    """analyze({relpath: java source}) -> ProjectAnalysis"""
    def run(files, name="p"):
        root = write_project(tmp_path / name, files)
        return analyze_project(root, project_name=name, catalog=catalog)
    return run


def only_test(model, name=None):
    tests = [m for c in model.test_classes for m in c.test_methods]
    if name is None:
        assert len(tests) == 1, [t.name for t in tests]
        return tests[0]
    return next(t for t in tests if t.name == name)


def seq_names(m):
    return [e.method_name for e in m.invocation_sequence]


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
