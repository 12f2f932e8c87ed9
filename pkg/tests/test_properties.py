"""Randomized checks: partition round trip, entity ordering, percentiles, additivity."""

from hypothesis import HealthCheck, given, settings, strategies as st

from conftest import write_project
from golden.expected import expected_models
from testlens.model import EntityKind, validate_partition
from testlens.pipeline import analyze_project
from testlens.report import compute_totals, percentile_summary
from testlens.sequences import partition_call_assertion


class _E:
    def __init__(self, kind):
        self.kind = kind


def _flatten(parts):
    return [i for p in parts for i in p.call_entities + p.assertion_entities]


def _check_partition(flags):
    seq = tuple(_E(EntityKind.ASSERTION if a else EntityKind.METHOD_CALL) for a in flags)
    parts = partition_call_assertion(seq)
    assert _flatten(parts) == list(range(len(seq)))
    assert sum(len(p.assertion_entities) for p in parts) == sum(flags)
    for i, p in enumerate(parts):
        assert p.call_entities or (i == 0 and p.assertion_entities)
        if i < len(parts) - 1:
            assert p.assertion_entities      # a block only ends at a call after assertions
    validate_partition(seq, tuple(parts), "generated")


# ten sequences per example keeps 10,000 sequences affordable
@settings(max_examples=1000, deadline=None)
@given(st.lists(st.lists(st.booleans(), max_size=40), min_size=10, max_size=10))
def test_partition_round_trip(batch):
    for flags in batch:
        _check_partition(flags)


# Generated Java expressions over a small application class. Each node knows
# the entity names the analyzer must emit for it, in evaluation order.

FOO = """
package g;
public class Foo {
    public Foo() {}
    public Foo(Foo a) {}
    public Foo(Foo a, Foo b) {}
    public Foo wrap(Foo o) { return this; }
    public Foo join(Foo a, Foo b) { return this; }
    public Foo self() { return this; }
    public static Foo make() { return new Foo(); }
    public static Foo of(Foo a) { return a; }
}
"""


def _leaf():
    return st.sampled_from([("x", []), ("Foo.make()", ["make"]), ("new Foo()", ["<init>"])])


def _extend(inner):
    def new(args):
        return "new Foo(" + ", ".join(a[0] for a in args) + ")", [n for a in args for n in a[1]] + ["<init>"]

    def call(r, name, args):
        text = f"{r[0]}.{name}(" + ", ".join(a[0] for a in args) + ")"
        return text, r[1] + [n for a in args for n in a[1]] + [name]

    return st.one_of(
        st.lists(inner, min_size=1, max_size=2).map(new),
        inner.map(lambda r: call(r, "self", [])),
        st.tuples(inner, inner).map(lambda t: call(t[0], "wrap", [t[1]])),
        st.tuples(inner, inner, inner).map(lambda t: call(t[0], "join", [t[1], t[2]])),
        inner.map(lambda a: ("Foo.of(" + a[0] + ")", a[1] + ["of"])),
    )


EXPR = st.recursive(_leaf(), _extend, max_leaves=8)
STMT = st.tuples(EXPR, st.booleans()).map(
    lambda t: (f"assertNotNull({t[0][0]});", t[0][1] + ["assertNotNull"]) if t[1] else (t[0][0] + ";", t[0][1]))


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.lists(st.lists(STMT, min_size=1, max_size=4), min_size=1, max_size=20))
def test_generated_expressions_are_ordered(tmp_path_factory, bodies):
    root = tmp_path_factory.mktemp("gen")
    methods = "\n".join(
        f"    @Test public void t{i}() {{\n        Foo x = null;\n"
        + "".join(f"        {s}\n" for s, _ in body) + "    }"
        for i, body in enumerate(bodies))
    test = ("package g;\nimport org.junit.Test;\nimport static org.junit.Assert.*;\n"
            "public class GenTest {\n" + methods + "\n}\n")
    write_project(root, {"src/main/java/g/Foo.java": FOO, "src/test/java/g/GenTest.java": test})
    model = analyze_project(root, project_name="gen")
    assert model.analysis_failures == ()
    tests = {m.name: m for m in model.test_classes[0].test_methods}
    for i, body in enumerate(bodies):
        m = tests[f"t{i}"]
        want = [n for _, names in body for n in names]
        assert [e.method_name for e in m.invocation_sequence] == want
        assert m.assertion_count == sum(1 for e in m.invocation_sequence if e.kind is EntityKind.ASSERTION)
        assert _flatten(m.call_assertion_sequences) == list(range(len(want)))


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=60), st.randoms())
def test_percentiles_ignore_order(values, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    assert percentile_summary(values) == percentile_summary(shuffled)
    ps = percentile_summary(values)
    assert min(values) <= ps.p25 <= ps.p50 <= ps.p75 <= ps.p90 <= max(values)


_MODELS = list(expected_models().values())


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=len(_MODELS), max_size=len(_MODELS)))
def test_totals_additive_over_partitions(labels):
    whole = compute_totals(_MODELS)
    groups = {}
    for label, m in zip(labels, _MODELS):
        groups.setdefault(label, []).append(m)
    parts = [compute_totals(g) for g in groups.values()]
    assert {k: sum(p[k] for p in parts) for k in whole} == whole

