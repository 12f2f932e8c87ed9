from testlens.metrics import code_lines, cyclomatic_complexity, method_metrics, ncloc
from testlens.syntax import parse_source


def test_code_lines_skip_blank_and_comment_lines():
    src = (
        "class A {\n"            # 1
        "\n"                     # 2
        "  // note\n"            # 3
        "  /* block\n"           # 4
        "     still */ int x;\n"  # 5 (code after the comment)
        "  String s = \"// not a comment\";\n"  # 6
        "  /** doc */\n"         # 7
        "}\n"                    # 8
    )
    assert code_lines(src) == {1, 5, 6, 8}


def test_text_block_lines_count():
    src = 'class A {\n  String s = """\n\n    x\n    """;\n}\n'
    assert {2, 3, 4, 5} <= code_lines(src)


def test_ncloc_span_inclusive():
    assert ncloc((2, 4), frozenset({1, 2, 3, 4, 5})) == 3
    assert ncloc((2, 4), frozenset()) == 0


def _method(body: str):
    u = parse_source("class A {\n void m(int a, boolean b) {\n" + body + "\n }\n}\n")
    return u.type_decls[0].methods[0], code_lines(u.text)


def test_cyclomatic_decision_points():
    m, _ = _method("""
      if (a > 0 && b) { a++; } else if (a < 0 || !b) { a--; }
      for (int i = 0; i < a; i++) {}
      for (int x : new int[]{1}) {}
      while (b) { b = false; }
      do { a++; } while (a < 3);
      try { a = 1; } catch (RuntimeException e) {} catch (Error e) {}
      int c = b ? 1 : 2;
      switch (a) { case 1: case 2: break; default: break; }
    """)
    # if, &&, else-if, ||, for, foreach, while, do, 2 catches, ternary, 2 cases
    assert cyclomatic_complexity(m.body) == 1 + 13


def test_lambda_bodies_count():
    m, _ = _method("Runnable r = () -> { if (b) { a++; } };")
    assert cyclomatic_complexity(m.body) == 2


def test_arrow_switch_multi_label():
    m, _ = _method("int y = switch (a) { case 1, 2, 3 -> 0; default -> 1; };")
    assert cyclomatic_complexity(m.body) == 4


def test_method_metrics_empty_body():
    m, lines = _method("")
    assert method_metrics(m, lines).ncloc == 2
    assert method_metrics(m, lines).cyclomatic_complexity == 1
    assert cyclomatic_complexity(None) == 1
