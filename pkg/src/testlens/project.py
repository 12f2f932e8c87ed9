"""Project-wide indexing: type resolution and the inheritance graph."""

from __future__ import annotations

import fnmatch
import logging
import os
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .syntax import CompilationUnitModel, TypeDeclModel, parse_file

log = logging.getLogger(__name__)

DEFAULT_IGNORES = (
    "**/target/**",
    "**/build/**",
    "**/generated-sources/**",
    "**/generated/**",
    "**/.git/**",
)

TEST_DIR_NAMES = frozenset({"test", "tests", "androidTest", "testFixtures", "integrationTest"})

PRIMITIVES = frozenset({"int", "long", "short", "byte", "char", "boolean", "float", "double", "void", "var"})

JAVA_LANG = frozenset("""
AbstractMethodError Appendable ArithmeticException ArrayIndexOutOfBoundsException
ArrayStoreException AssertionError AutoCloseable Boolean Byte CharSequence Character Class
ClassCastException ClassLoader ClassNotFoundException CloneNotSupportedException Cloneable
Comparable Deprecated Double Enum EnumConstantNotPresentException Error Exception
ExceptionInInitializerError Float FunctionalInterface IllegalAccessException
IllegalArgumentException IllegalMonitorStateException IllegalStateException
IndexOutOfBoundsException InheritableThreadLocal InstantiationException Integer InternalError
InterruptedException Iterable LinkageError Long Math Module NegativeArraySizeException
NoSuchFieldException NoSuchMethodException NullPointerException Number NumberFormatException
Object OutOfMemoryError Override Package Process ProcessBuilder Readable Record
ReflectiveOperationException Runnable Runtime RuntimeException SafeVarargs SecurityException Short
StackOverflowError StackTraceElement StrictMath String StringBuffer StringBuilder
StringIndexOutOfBoundsException SuppressWarnings System Thread ThreadGroup ThreadLocal Throwable
TypeNotPresentException UnsupportedOperationException VirtualMachineError Void
""".split())

OBJECT = "java.lang.Object"


@dataclass(frozen=True)
class ResolvedTypeRef:
    simple_name: str
    fqn: str | None
    resolution: str  # Explicit | SamePackage | JavaLangDefault | ProjectIndex | Unresolved

    @property
    def resolved(self) -> bool:
        return self.fqn is not None


def binary_name(dotted: str) -> str:
    """``a.b.Outer.Inner`` -> ``a.b.Outer$Inner`` (first capitalized segment is the top type)."""
    parts = dotted.split(".")
    for i, p in enumerate(parts):
        if p[:1].isupper():
            return ".".join(parts[: i + 1]) + "".join("$" + q for q in parts[i + 1:])
    return dotted


def is_test_path(relpath: str) -> bool:
    return any(seg in TEST_DIR_NAMES for seg in Path(relpath).parts[:-1])


@dataclass
class ProjectIndex:
    """Name -> qualified-name lookups over every type declared in the project."""

    units: list = field(default_factory=list)
    decls: dict = field(default_factory=dict)
    by_simple: dict = field(default_factory=lambda: defaultdict(list))
    unit_of: dict = field(default_factory=dict)
    test_side: set = field(default_factory=set)
    application_types: set = field(default_factory=set)

    @classmethod
    def build(cls, units: list) -> "ProjectIndex":
        idx = cls()
        idx.units = list(units)
        for u in sorted(units, key=lambda u: u.source_path):
            side = is_test_path(u.source_path)
            for d in u.type_decls:
                if d.qualified_name in idx.decls:
                    continue
                idx.decls[d.qualified_name] = d
                idx.unit_of[d.qualified_name] = u
                idx.by_simple[d.simple_name].append(d.qualified_name)
                if side:
                    idx.test_side.add(d.qualified_name)
        idx.application_types = set(idx.decls) - idx.test_side
        return idx

    def mark_test_classes(self, fqns) -> None:
        """Detected test classes never count as application types."""
        self.test_side.update(fqns)
        self.application_types = set(self.decls) - self.test_side

    def is_application(self, fqn: str | None) -> bool:
        return bool(fqn) and (fqn in self.application_types or _top(fqn) in self.application_types)

    def is_project(self, fqn: str | None) -> bool:
        return bool(fqn) and (fqn in self.decls or _top(fqn) in self.decls)

    def is_test_side(self, fqn: str | None) -> bool:
        return bool(fqn) and (fqn in self.test_side or _top(fqn) in self.test_side)

    def as_map(self) -> dict[str, list[str]]:
        return {k: sorted(v) for k, v in self.by_simple.items()}


def _top(fqn: str) -> str:
    return fqn.split("$", 1)[0]


def resolve_type(name: str, unit: CompilationUnitModel, index: ProjectIndex,
                 context: TypeDeclModel | None = None) -> ResolvedTypeRef:
    """Best-effort resolution of a (possibly dotted) type name used in ``unit``."""
    name = name.strip()
    dims = ""
    while name.endswith("[]"):
        name, dims = name[:-2], dims + "[]"
    if name.endswith("..."):
        name, dims = name[:-3], dims + "[]"
    if name in PRIMITIVES:
        return ResolvedTypeRef(name + dims, name + dims, "JavaLangDefault")
    if "." in name:
        head, rest = name.split(".", 1)
        if head[:1].islower():
            return ResolvedTypeRef(name.rsplit(".", 1)[-1] + dims, binary_name(name) + dims, "Explicit")
        base = resolve_type(head, unit, index, context)
        if base.fqn is None:
            return ResolvedTypeRef(name.rsplit(".", 1)[-1] + dims, None, "Unresolved")
        return ResolvedTypeRef(name.rsplit(".", 1)[-1] + dims,
                               base.fqn + "".join("$" + p for p in rest.split(".")) + dims,
                               base.resolution)
    r = _resolve_simple(name, unit, index, context)
    if dims:
        return ResolvedTypeRef(r.simple_name + dims, r.fqn + dims if r.fqn else None, r.resolution)
    return r


def _resolve_simple(name, unit, index, context) -> ResolvedTypeRef:
    for imp in unit.imports:
        if not imp.is_wildcard and not imp.is_static and imp.path.rsplit(".", 1)[-1] == name:
            return ResolvedTypeRef(name, binary_name(imp.path), "Explicit")
    # a type declared in this unit; innermost enclosing scope first
    local = [d for d in unit.type_decls if d.simple_name == name]
    if local:
        if context is not None and len(local) > 1:
            scope = context.qualified_name
            while scope:
                for d in local:
                    if d.outer == scope or d.qualified_name == scope + "$" + name:
                        return ResolvedTypeRef(name, d.qualified_name, "SamePackage")
                scope = scope.rsplit("$", 1)[0] if "$" in scope else ""
        return ResolvedTypeRef(name, local[0].qualified_name, "SamePackage")
    pkg_fqn = f"{unit.package_name}.{name}" if unit.package_name else name
    if pkg_fqn in index.decls:
        return ResolvedTypeRef(name, pkg_fqn, "SamePackage")
    # explicit static import of a nested type
    for imp in unit.imports:
        if imp.is_static and not imp.is_wildcard and imp.path.rsplit(".", 1)[-1] == name:
            cand = binary_name(imp.path)
            if cand in index.decls:
                return ResolvedTypeRef(name, cand, "Explicit")
    if name in JAVA_LANG:
        return ResolvedTypeRef(name, "java.lang." + name, "JavaLangDefault")
    cands = index.by_simple.get(name, [])
    wild = [f"{imp.path}.{name}" for imp in unit.imports if imp.is_wildcard and not imp.is_static]
    wild_hits = [c for c in wild if c in index.decls]
    if len(wild_hits) == 1:
        return ResolvedTypeRef(name, wild_hits[0], "ProjectIndex")
    if len(cands) == 1 and len(wild_hits) == 0:
        return ResolvedTypeRef(name, cands[0], "ProjectIndex")
    return ResolvedTypeRef(name, None, "Unresolved")


@dataclass
class InheritanceGraph:
    """child -> parent edges between project types plus external leaf markers."""

    parents: dict = field(default_factory=dict)
    external: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)

    def parent(self, fqn: str) -> str | None:
        return self.parents.get(fqn)

    def ancestors(self, fqn: str) -> list[str]:
        """Project ancestors, nearest first."""
        out, seen = [], {fqn}
        cur = self.parents.get(fqn)
        while cur is not None and cur not in seen:
            out.append(cur)
            seen.add(cur)
            cur = self.parents.get(cur)
        return out

    def external_root(self, fqn: str) -> ResolvedTypeRef | None:
        chain = [fqn] + self.ancestors(fqn)
        return self.external.get(chain[-1])

    def nodes(self) -> set:
        return set(self.parents) | set(self.external)


def build_inheritance_graph(units: list, index: ProjectIndex | None = None) -> InheritanceGraph:
    index = index or ProjectIndex.build(units)
    g = InheritanceGraph()
    for fqn in sorted(index.decls):
        d = index.decls[fqn]
        unit = index.unit_of[fqn]
        if d.kind in ("Interface", "Annotation"):
            g.external[fqn] = ResolvedTypeRef("Object", OBJECT, "JavaLangDefault")
            continue
        if d.kind == "Enum":
            g.external[fqn] = ResolvedTypeRef("Enum", "java.lang.Enum", "JavaLangDefault")
            continue
        if d.kind == "Record":
            g.external[fqn] = ResolvedTypeRef("Record", "java.lang.Record", "JavaLangDefault")
            continue
        if not d.superclass:
            g.external[fqn] = ResolvedTypeRef("Object", OBJECT, "JavaLangDefault")
            continue
        outer = index.decls.get(d.outer) if d.outer else None
        r = resolve_type(d.superclass, unit, index, outer or d)
        if r.fqn and r.fqn in index.decls and r.fqn != fqn:
            g.parents[fqn] = r.fqn
        else:
            g.external[fqn] = r
    _break_cycles(g)
    return g


def _break_cycles(g: InheritanceGraph) -> None:
    done: set = set()
    for start in sorted(g.parents):
        path, on_path = [], set()
        cur = start
        while cur is not None and cur not in done:
            if cur in on_path:
                cycle = path[path.index(cur):]
                victim = max(cycle)
                target = g.parents.pop(victim)
                g.external[victim] = ResolvedTypeRef(target.rsplit(".", 1)[-1], None, "Unresolved")
                g.diagnostics.append(f"inheritance cycle broken: dropped {victim} -> {target}")
                break
            path.append(cur)
            on_path.add(cur)
            cur = g.parents.get(cur)
        done.update(path)


def _ignored(rel: str, globs) -> bool:
    for pat in globs:
        if fnmatch.fnmatchcase(rel, pat):
            return True
        if pat.startswith("**/") and fnmatch.fnmatchcase(rel, pat[3:]):
            return True
    return False


@dataclass
class IndexedProject:
    units: list
    index: ProjectIndex
    failures: list  # (relative path, reason)
    file_count: int = 0


def discover_sources(root: Path, ignore_globs=None) -> list[str]:
    globs = tuple(DEFAULT_IGNORES) + tuple(ignore_globs or ())
    found = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for fn in sorted(filenames):
            if not fn.endswith(".java"):
                continue
            rel = Path(dirpath, fn).relative_to(root).as_posix()
            if not _ignored(rel, globs):
                found.append(rel)
    return sorted(found)


def index_project(root, ignore_globs=None) -> IndexedProject:
    """Parse every non-ignored ``*.java`` below ``root``. Per-file failures are recorded."""
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"project root not found: {root}")
    units, failures = [], []
    rels = discover_sources(root, ignore_globs)
    for rel in rels:
        try:
            unit = parse_file(root / rel, rel)
        except OSError as exc:
            failures.append((rel, f"unreadable: {exc.strerror or exc}"))
            continue
        units.append(unit)
        if unit.parse_errors:
            (line, col), msg = unit.parse_errors[0]
            failures.append((rel, f"parse error at {line}:{col}: {msg}"))
    return IndexedProject(units, ProjectIndex.build(units), failures, len(rels))
