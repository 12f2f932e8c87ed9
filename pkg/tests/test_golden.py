"""Analyzer output against the hand-derived expected models of the golden corpus."""

import difflib
import json

import pytest

from conftest import GOLDEN
from golden.expected import expected_models
from testlens.model import AssertionCategory, FixtureOrigin, FixtureScope, InputFormat, TestCategory, serialize_model
from testlens.pipeline import analyze_project

EXPECTED = expected_models()


@pytest.fixture(scope="module")
def analyzed(catalog):
    return {name: analyze_project(GOLDEN / name, project_name=name, catalog=catalog) for name in EXPECTED}


def _diff(want: str, got: str) -> str:
    w = json.dumps(json.loads(want), indent=1, sort_keys=True).splitlines()
    g = json.dumps(json.loads(got), indent=1, sort_keys=True).splitlines()
    return "\n".join(list(difflib.unified_diff(w, g, "expected", "analyzed", n=3, lineterm=""))[:80])


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_model_matches_expected_bytes(analyzed, name):
    want = serialize_model(EXPECTED[name])
    got = serialize_model(analyzed[name])
    assert got == want, _diff(want, got)


def _klass(model, fqn):
    return next(c for c in model.test_classes if c.qualified_name == fqn)


def _method(model, fqn, name):
    return next(m for m in _klass(model, fqn).test_methods if m.name == name)


def test_rule_snippet(analyzed):
    m = _method(analyzed["acme"], "com.acme.rules.RuleTest", "testANDRule")
    assert {t.name for t in m.focal_classes} == {"Rule"}
    assert m.focal_methods == frozenset()
    assert m.category is TestCategory.UNIT


def test_mocking_setup_snippet(analyzed):
    su = _klass(analyzed["acme"], "com.acme.http.HeaderUtilsTest").setup_methods
    assert [f.name for f in su] == ["setUp"]
    assert len(su[0].mocks) >= 2 and {mk.site.value for mk in su[0].mocks} == {"Fixture"}


def test_inherited_fixture_snippet(analyzed):
    c = _klass(analyzed["acme"], "com.acme.artemis.DuplicateRecordIdTest")
    assert [f.origin for f in c.setup_methods] == [FixtureOrigin.INHERITED]
    assert [f.origin for f in c.teardown_methods] == [FixtureOrigin.INHERITED]
    td = c.teardown_methods[0]
    assert td.assertions_in_teardown >= 1 and len(td.cleanup_operations) >= 1


def test_fixture_scope_snippet(analyzed):
    c = _klass(analyzed["acme"], "com.acme.epoxy.DifferCorrectnessTest")
    assert sorted(f.scope.value for f in c.setup_methods) == [FixtureScope.PER_CLASS.value,
                                                             FixtureScope.PER_TEST.value]
    assert [f.scope for f in c.teardown_methods] == [FixtureScope.PER_CLASS]


def test_structured_input_snippets(analyzed):
    azure = _method(analyzed["acme"], "com.acme.config.AppConfigurationTest", "validationParsing")
    assert InputFormat.JSON in {s.format for s in azure.structured_inputs}
    phoenix = _method(analyzed["legacy"], "org.legacy.db.UpsertTest", "testTDVCommonsUpsert")
    assert {s.format for s in phoenix.structured_inputs} == {InputFormat.SQL, InputFormat.CSV}
    eq = [e for e in phoenix.invocation_sequence if e.method_name == "assertEquals"]
    assert eq and all(e.assertion_category is AssertionCategory.EQUALITY for e in eq)
