from conftest import only_test

from testlens.inputs import is_sql_text, literal_format
from testlens.model import Evidence as Ev, InputFormat as F, Site


def test_literal_format(catalog):
    assert literal_format("data/users.json", catalog) == (True, F.JSON)
    assert literal_format("classpath:cfg.XML", catalog) == (True, F.XML)
    assert literal_format("classpath:blob", catalog) == (True, F.CLASSPATH_RESOURCE)
    assert literal_format("conf.yaml", catalog) == (True, None)
    assert literal_format(".json", catalog) == (False, None)
    assert literal_format("hello world.json", catalog) == (False, None)
    assert literal_format("SELECT * FROM t", catalog) == (True, F.SQL)
    assert literal_format("plain", catalog) == (False, None)


def test_sql_text_needs_keyword_and_space(catalog):
    assert is_sql_text("  insert into t values (1)", catalog)
    assert not is_sql_text("SELECTION", catalog)
    assert not is_sql_text("SELECT", catalog)
    assert not is_sql_text(None, catalog)


def run(analyze, body, imports="", extra=""):
    src = f"""
package t;
import org.junit.jupiter.api.*;
{imports}
class T {{
{extra}
    @Test void t() throws Exception {{
{body}
    }}
}}
"""
    return only_test(analyze({"src/test/java/t/T.java": src}))


def shape(m):
    return [(s.format, s.evidence, s.site) for s in m.structured_inputs]


def test_json_reader_needs_a_source(analyze):
    imports = "import com.fasterxml.jackson.databind.ObjectMapper;\nimport java.io.File;"
    m = run(analyze, 'new ObjectMapper().readValue(new File("in.json"), Object.class);', imports)
    assert shape(m) == [(F.JSON, Ev.API_CALL, Site.TEST_BODY)]
    m = run(analyze, 'new ObjectMapper().readValue(text, Object.class);', imports, extra="String text;")
    assert shape(m) == []


def test_sql_call_needs_sql_text(analyze):
    imports = "import java.sql.Connection;"
    m = run(analyze, 'c.prepareStatement("SELECT 1 FROM dual");', imports, extra="Connection c;")
    assert shape(m) == [(F.SQL, Ev.API_CALL, Site.TEST_BODY)]
    m = run(analyze, "c.prepareStatement(q);", imports, extra="Connection c; String q;")
    assert shape(m) == []


def test_nested_literal_merges_into_enclosing_call(analyze):
    m = run(analyze, 'getClass().getResourceAsStream("/x.csv");')
    assert shape(m) == [(F.CLASSPATH_RESOURCE, Ev.API_CALL, Site.TEST_BODY)]
    m = run(analyze, 'String p = "fixtures/a.xml";')
    assert shape(m) == [(F.XML, Ev.LITERAL_PATH, Site.TEST_BODY)]


def test_setup_site_and_field_initializers(analyze):
    files = {"src/test/java/t/T.java": """
        package t;
        import org.junit.jupiter.api.*;
        class T {
            String ignored = "skip.json";
            @BeforeEach void up() { String s = "rows.csv"; }
            @Test void t() {}
        }
    """}
    m = only_test(analyze(files))
    assert shape(m) == [(F.CSV, Ev.LITERAL_PATH, Site.FIXTURE)]
