from testlens.model import AssertionCategory as AC, CallClass as CC, EntityKind as EK, Site
from testlens.sequences import partition_call_assertion

from conftest import only_test, seq_names

APP = {
    "src/main/java/a/Foo.java": """
        package a;
        public class Foo {
            public Foo() {}
            public Foo(int x) {}
            public Foo wrap(Foo other) { return this; }
            public int size() { return 0; }
            public static Foo make() { return new Foo(); }
            public static void reset() {}
        }
    """,
}


def _one(analyze, body, imports="", members=""):
    files = dict(APP)
    files["src/test/java/a/FooTest.java"] = f"""
        package a;
        import org.junit.Test;
        import static org.junit.Assert.*;
        {imports}
        public class FooTest {{
            {members}
            @Test public void t() {{
                {body}
            }}
        }}
    """
    return only_test(analyze(files))


def test_arguments_before_call_and_receiver_chain_left_to_right(analyze):
    m = _one(analyze, "new Foo(1).wrap(new Foo()).wrap(Foo.make()).size();")
    assert seq_names(m) == ["<init>", "<init>", "wrap", "make", "wrap", "size"]
    assert [e.arg_count for e in m.invocation_sequence] == [1, 0, 1, 0, 1, 0]


def test_statement_order_and_nested_blocks(analyze):
    m = _one(analyze, """
        Foo f = new Foo();
        if (f.size() > 0) { f.wrap(f); } else { Foo.reset(); }
        for (int i = 0; i < f.size(); i++) { assertTrue(i >= 0); }
    """)
    assert seq_names(m) == ["<init>", "size", "wrap", "reset", "size", "assertTrue"]


def test_lambda_and_anonymous_initializer_included_methods_excluded(analyze):
    m = _one(analyze, """
        Runnable r = () -> Foo.reset();
        Object o = new Object() { { Foo.make(); } public String toString() { Foo.reset(); return ""; } };
    """)
    assert seq_names(m) == ["reset", "<init>", "make"]


def test_classification(analyze):
    m = _one(analyze, """
        Foo f = new Foo();
        f.size();
        java.util.List<String> l = new java.util.ArrayList<>();
        l.add("x");
        mystery.go();
        assertEquals(1, l.size());
    """)
    cls = [(e.method_name, e.classification) for e in m.invocation_sequence]
    assert cls == [("<init>", CC.CONSTRUCTOR), ("size", CC.APPLICATION), ("<init>", CC.CONSTRUCTOR),
                   ("add", CC.LIBRARY), ("go", CC.UNRESOLVED), ("size", CC.LIBRARY),
                   ("assertEquals", CC.ASSERTION)]
    assert m.invocation_sequence[4].receiver_type.name == "?"


def test_helpers_are_inlined_with_site_and_recorded(analyze):
    m = _one(analyze, "Foo f = build(); assertNotNull(f);",
             members="private Foo build() { Foo x = new Foo(); x.size(); return x; }")
    assert seq_names(m) == ["<init>", "size", "assertNotNull"]
    assert m.helpers_expanded == ("build()",)
    assert m.focal_classes and m.category.value == "Unit"


def test_recursive_helpers_terminate(analyze):
    m = _one(analyze, "a(3);",
             members="private void a(int n) { Foo.reset(); b(n); } private void b(int n) { a(n - 1); }")
    assert seq_names(m) == ["reset"]
    assert m.helpers_expanded == ("a(int)", "b(int)")


def test_assertion_categories(analyze):
    m = _one(analyze, """
        assertTrue(true); assertFalse(false); assertEquals(1, 1); assertSame(this, this);
        assertNull(null); assertNotNull(this); assertEquals(1.0, 1.0, 0.01);
        assertArrayEquals(new int[0], new int[0]); fail("x");
        assertEquals("msg", 1.0, 2.0, EPSILON); assertEquals("a", "b", "c");
        assertThat(1, org.hamcrest.Matchers.is(1));
    """, members="static final double EPSILON = 0.1;")
    cats = [e.assertion_category for e in m.invocation_sequence if e.kind is EK.ASSERTION]
    assert cats == [AC.TRUTHINESS, AC.TRUTHINESS, AC.EQUALITY, AC.IDENTITY, AC.NULLNESS, AC.NULLNESS,
                    AC.NUMERIC_TOLERANCE, AC.EQUALITY, AC.EXCEPTION, AC.NUMERIC_TOLERANCE, AC.EQUALITY,
                    AC.MATCHER]
    assert m.objects_created == 2  # the two arrays


def test_fluent_chain_every_link_is_an_assertion(analyze):
    m = _one(analyze, "assertThat(new Foo().size()).isEqualTo(0).isNotNegative().isPositive();",
             imports="import static org.assertj.core.api.Assertions.assertThat;")
    kinds = [(e.method_name, e.kind, e.assertion_category) for e in m.invocation_sequence]
    assert kinds[2:] == [("assertThat", EK.ASSERTION, AC.MATCHER), ("isEqualTo", EK.ASSERTION, AC.EQUALITY),
                         ("isNotNegative", EK.ASSERTION, AC.OTHER), ("isPositive", EK.ASSERTION, AC.OTHER)]


def test_method_references(analyze):
    m = _one(analyze, "java.util.List<Foo> l = null; l.forEach(Foo::size); l.stream().map(Foo::new);")
    refs = [e for e in m.invocation_sequence if e.kind is EK.METHOD_REFERENCE]
    assert [(r.method_name, r.classification, r.arg_count) for r in refs] == [
        ("size", CC.APPLICATION, 0), ("new", CC.APPLICATION, 0)]


def test_ambiguous_static_wildcards_leave_owner_unresolved(analyze):
    m = _one(analyze, "check(1);", imports="import static x.One.*; import static y.Two.*;")
    e = m.invocation_sequence[0]
    assert e.classification is CC.UNRESOLVED and e.receiver_type.name == "?"


def test_static_wildcards_unique_or_catalog_preferred(analyze):
    model = analyze({"src/test/java/a/T.java": """
        package a;
        import org.junit.Test;
        import static x.One.*;
        public class T { @Test public void t() { check(1); } }
    """, "src/test/java/b/U.java": """
        package b;
        import org.junit.Test;
        import static x.One.*;
        import static org.junit.Assert.*;
        public class U { @Test public void u() { assertTrue(true); } }
    """})
    assert only_test(model, "t").invocation_sequence[0].receiver_type.fqn == "x.One"
    e = only_test(model, "u").invocation_sequence[0]
    assert e.receiver_type.fqn == "org.junit.Assert" and e.kind is EK.ASSERTION


def test_setup_entities_stay_out_of_the_test_sequence(analyze):
    files = dict(APP)
    files["src/test/java/a/FooTest.java"] = """
        package a;
        import org.junit.*;
        public class FooTest {
            private Foo f = new Foo();
            @Before public void up() { f.size(); }
            @Test public void t() { f.wrap(f); }
        }
    """
    m = only_test(analyze(files))
    assert seq_names(m) == ["wrap"]
    assert m.focal_classes  # the field-initializer object is the candidate


def test_partition_blocks():
    class E:
        def __init__(self, k):
            self.kind = k
    seq = [E(EK.ASSERTION), E(EK.METHOD_CALL), E(EK.METHOD_CALL), E(EK.ASSERTION), E(EK.ASSERTION),
           E(EK.CONSTRUCTOR_CALL)]
    parts = partition_call_assertion(seq)
    assert [(p.call_entities, p.assertion_entities) for p in parts] == [
        ((), (0,)), ((1, 2), (3, 4)), ((5,), ())]
    assert partition_call_assertion([]) == []


def test_mock_entities(analyze):
    m = _one(analyze, "Foo f = mock(Foo.class); java.util.List<?> l = Mockito.spy(new java.util.ArrayList<>());",
             imports="import static org.mockito.Mockito.mock; import org.mockito.Mockito;")
    assert [(x.mocked_type.name, x.site, x.mocked_type_origin.value) for x in m.mocks] == [
        ("Foo", Site.TEST_BODY, "Application"), ("ArrayList", Site.TEST_BODY, "Library")]
