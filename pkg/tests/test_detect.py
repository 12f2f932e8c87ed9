from testlens.detect import identify_frameworks, tag_application_types
from testlens.model import ApplicationType
from testlens.syntax import parse_source

from conftest import only_test


def test_annotation_and_junit3_detection(analyze):
    model = analyze({
        "src/test/java/t/J4Test.java": """
            package t;
            import org.junit.Test;
            public class J4Test { @Test public void a() {} public void testNotAnnotated() {} }
        """,
        "src/test/java/t/J3Test.java": """
            package t;
            import junit.framework.TestCase;
            public class J3Test extends TestCase {
                public void testOne() {}
                public void testWithArg(int x) {}
                public static void testStatic() {}
                void testPackagePrivate() {}
                public void helper() {}
            }
        """,
        "src/test/java/t/Wild.java": """
            package t;
            import org.junit.jupiter.api.*;
            class Wild { @Test void w() {} @RepeatedTest(2) void r() {} @ParameterizedTest void p(int x) {} }
        """,
        "src/test/java/t/NotATest.java": """
            package t;
            class NotATest { @Deprecated void x() {} }
        """,
        "src/test/java/t/Fq.java": """
            package t;
            class Fq { @org.testng.annotations.Test public void f() {} }
        """,
    })
    found = {c.qualified_name: [m.name for m in c.test_methods] for c in model.test_classes}
    assert found == {
        "t.Fq": ["f"],
        "t.J3Test": ["testOne"],
        "t.J4Test": ["a"],
        "t.Wild": ["w", "r", "p"],
    }


def test_inherited_junit3_base_through_project_class(analyze):
    model = analyze({
        "src/test/java/t/Base.java": """
            package t;
            public abstract class Base extends junit.framework.TestCase {}
        """,
        "src/test/java/t/SubTest.java": """
            package t;
            public class SubTest extends Base { public void testX() { assertTrue(true); } }
        """,
    })
    m = only_test(model)
    assert m.name == "testX"
    assert m.invocation_sequence[0].receiver_type.fqn == "junit.framework.TestCase"


def test_framework_identification(catalog):
    u = parse_source("""
        package t;
        import static org.mockito.Mockito.mock;
        import org.junit.jupiter.api.Test;
        class T { @Test void t() { org.assertj.core.api.Assertions.assertThat(1).isEqualTo(1); } }
    """)
    assert identify_frameworks(u, catalog) == {("mockito", "Mocking"), ("junit5", "Core"), ("assertj", "Assertion")}


def test_application_type_markers(catalog):
    app = parse_source("package a; import javax.servlet.http.HttpServlet; class S {}", "src/main/java/a/S.java")
    api = parse_source("package a; import javax.ws.rs.GET; class R {}", "src/main/java/a/R.java")
    test = parse_source("package a; import android.app.Activity; class T {}", "src/test/java/a/T.java")
    assert tag_application_types([app, api, test], catalog) == {ApplicationType.WEB_APP, ApplicationType.WEB_API}
    assert tag_application_types([test], catalog) == {ApplicationType.JAVA_SE}
