from testlens.syntax import decode_source, parse_source

SRC = """\
package a.b;

import java.util.List;
import static org.junit.Assert.*;

public class Foo<T> extends Base<T> implements Runnable {
    @Deprecated private final List<String> names = List.of("x");
    int plain;

    public Foo(int n) { plain = n; }

    @Override
    public void run() {}

    static <E> void many(String s, E... rest) {}

    class Inner { void go() {} }

    record Pair(int left, int right) {}
}
"""


def test_declarations_and_imports():
    u = parse_source(SRC, "Foo.java")
    assert u.package_name == "a.b"
    assert [(i.path, i.is_static, i.is_wildcard) for i in u.imports] == [
        ("java.util.List", False, False), ("org.junit.Assert", True, True)]
    foo = u.top_level()[0]
    assert foo.qualified_name == "a.b.Foo"
    assert foo.superclass == "Base"          # generics erased
    assert foo.interfaces == ["Runnable"]
    assert foo.position == (6, 14)
    assert [f.name for f in foo.fields] == ["names", "plain"]
    assert foo.fields[0].type_name == "List"
    assert len(foo.constructors) == 1 and foo.constructors[0].is_constructor
    assert [m.signature for m in foo.methods] == ["run()", "many(String,E[])"]
    assert foo.methods[0].source_span == (12, 13)   # annotation starts the span
    names = {d.qualified_name: d for d in u.type_decls}
    assert names["a.b.Foo$Inner"].outer == "a.b.Foo"
    assert names["a.b.Foo$Pair"].kind == "Record"
    assert names["a.b.Foo$Pair"].record_components == ["left", "right"]


def test_columns_count_characters_not_bytes():
    src = 'class T {\n  void t() { String s = "żółw"; s.length(); }\n}\n'
    u = parse_source(src)
    body = u.type_decls[0].methods[0].body
    calls = [n for n in body.walk() if n.kind == "call"]
    line = src.splitlines()[1]
    assert calls[0].position == (2, line.index("length") + 1)
    assert len(line[:line.index("length")].encode()) > line.index("length")


def test_call_shapes():
    src = """
    class T {
      void t() {
        new Rule<>(new A(), X.Y).fire();
        list.forEach(Foo::bar);
        run(() -> go());
      }
    }
    """
    m = parse_source(src).type_decls[0].methods[0]
    kinds = [(n.kind, n.name or n.type_name) for n in m.body.walk() if n.kind in ("call", "new", "method_ref")]
    assert ("new", "Rule") in kinds and ("new", "A") in kinds
    ref = next(n for n in m.body.walk() if n.kind == "method_ref")
    assert ref.name == "bar" and ref.receiver.kind in ("name", "type")
    lam = next(n for n in m.body.walk() if n.kind == "lambda")
    assert lam.body


def test_string_values_are_decoded():
    src = 'class T { void t() { f("a\\tb", """\n  hi\n  """); } }'
    m = parse_source(src).type_decls[0].methods[0]
    vals = [n.value for n in m.body.walk() if n.kind == "string"]
    assert vals[0] == "a\tb"
    assert vals[1].strip() == "hi"


def test_parse_errors_recorded_not_raised():
    u = parse_source("class Broken { void x( { }", "B.java")
    assert u.parse_errors
    (line, col), msg = u.parse_errors[0]
    assert line >= 1 and col >= 1 and msg


def test_decode_source_falls_back_for_non_utf8():
    assert decode_source("café".encode("latin-1")) == "café"
    assert decode_source("﻿class A {}".encode("utf-8")).startswith("class")
