"""NCLOC and cyclomatic complexity over the neutral syntax model."""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import Node


@dataclass(frozen=True)
class MetricResult:
    ncloc: int
    cyclomatic_complexity: int


def code_lines(source: str) -> frozenset[int]:
    """1-based numbers of lines holding at least one non-comment token.

    A small lexer: comments are skipped, string/char literals and text blocks
    count as tokens on every line they occupy.
    """
    lines: set[int] = set()
    i, n, line = 0, len(source), 1
    while i < n:
        c = source[i]
        if c == "\n":
            line += 1
            i += 1
        elif c in " \t\r\f":
            i += 1
        elif source.startswith("//", i):
            j = source.find("\n", i)
            i = n if j < 0 else j
        elif source.startswith("/*", i):
            j = source.find("*/", i + 2)
            end = n if j < 0 else j + 2
            line += source.count("\n", i, end)
            i = end
        elif source.startswith('"""', i):
            j = source.find('"""', i + 3)
            while j > 0 and _escaped(source, j):
                j = source.find('"""', j + 1)
            end = n if j < 0 else j + 3
            span = source.count("\n", i, end)
            lines.update(range(line, line + span + 1))
            line += span
            i = end
        elif c == '"' or c == "'":
            lines.add(line)
            j = i + 1
            while j < n and source[j] != c and source[j] != "\n":
                j += 2 if source[j] == "\\" else 1
            i = j + 1 if j < n and source[j] == c else j
        else:
            lines.add(line)
            i += 1
    return frozenset(lines)


def _escaped(s: str, j: int) -> bool:
    k, count = j - 1, 0
    while k >= 0 and s[k] == "\\":
        count += 1
        k -= 1
    return count % 2 == 1


def ncloc(span: tuple[int, int], lines: frozenset[int]) -> int:
    """Token-bearing lines inside an inclusive ``(start, end)`` line span."""
    start, end = span
    return sum(1 for ln in lines if start <= ln <= end)


def cyclomatic_complexity(body: Node | None) -> int:
    """1 + decision points; lambda and anonymous-class bodies are included."""
    if body is None:
        return 1
    points = 0
    for n in body.walk():
        k = n.kind
        if k in ("if", "for", "foreach", "while", "do", "catch", "ternary"):
            points += 1
        elif k == "binary" and n.value in ("&&", "||"):
            points += 1
        elif k == "case" and n.value != "default":
            points += max(1, len(n.names))
        elif k == "case":
            # `case null, default ->` carries one real constant
            points += sum(1 for lbl in n.names if lbl != "default")
    return 1 + points


def method_metrics(method, lines: frozenset[int]) -> MetricResult:
    return MetricResult(ncloc(method.source_span, lines), cyclomatic_complexity(method.body))
