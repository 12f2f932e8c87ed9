"""Test class/method detection, framework identification, application tagging."""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import FrameworkCatalog, prefix_matches
from .model import ApplicationType
from .project import InheritanceGraph, ProjectIndex, is_test_path, resolve_type
from .syntax import CompilationUnitModel, MethodModel, TypeDeclModel


@dataclass(frozen=True)
class TestMethodEvidence:
    __test__ = False

    mechanism: str  # Annotation | JUnit3Convention
    detail: str


def annotation_fqn(name: str, unit: CompilationUnitModel, index: ProjectIndex,
                   context: TypeDeclModel | None = None) -> str | None:
    return resolve_type(name, unit, index, context).fqn


def match_annotation(ann, table, unit, index, context=None) -> str | None:
    """Catalog key an annotation refers to, or None.

    A resolved annotation must match exactly; an unresolved one (e.g. through a
    wildcard import) matches by simple name.
    """
    fqn = annotation_fqn(ann.name, unit, index, context)
    if fqn is not None:
        return fqn if fqn in table else None
    simple = ann.simple_name
    for key in table:
        if key.rsplit(".", 1)[-1] == simple:
            return key
    return None


def extends_junit3(decl: TypeDeclModel, graph: InheritanceGraph, catalog: FrameworkCatalog) -> bool:
    root = graph.external_root(decl.qualified_name)
    if root is None:
        return False
    bases = catalog["junit3_base_classes"]
    if root.fqn is not None:
        return root.fqn in bases
    return any(b.rsplit(".", 1)[-1] == root.simple_name for b in bases)


def is_test_method(method: MethodModel, decl: TypeDeclModel, unit: CompilationUnitModel,
                   index: ProjectIndex, graph: InheritanceGraph,
                   catalog: FrameworkCatalog, junit3: bool | None = None) -> TestMethodEvidence | None:
    table = set(catalog["test_annotations"])
    for ann in method.annotations:
        key = match_annotation(ann, table, unit, index, decl)
        if key is not None:
            return TestMethodEvidence("Annotation", key)
    if junit3 is None:
        junit3 = extends_junit3(decl, graph, catalog)
    if (junit3 and method.name.startswith("test") and "public" in method.modifiers
            and "static" not in method.modifiers and not method.parameters
            and method.body is not None):
        return TestMethodEvidence("JUnit3Convention", "public void test*() in TestCase subclass")
    return None


def detect_test_methods(decl, unit, index, graph, catalog) -> list[tuple[MethodModel, TestMethodEvidence]]:
    if decl.kind != "Class":
        return []
    junit3 = extends_junit3(decl, graph, catalog)
    out = []
    for m in decl.methods:
        ev = is_test_method(m, decl, unit, index, graph, catalog, junit3)
        if ev is not None:
            out.append((m, ev))
    return out


def detect_test_classes(unit, catalog, graph, index) -> list[TypeDeclModel]:
    """Classes declaring at least one test method, in source order."""
    return [d for d in unit.type_decls if detect_test_methods(d, unit, index, graph, catalog)]


def qualified_references(unit: CompilationUnitModel):
    """Dotted names written in full inside the unit (annotations, types, receivers)."""
    for d in unit.type_decls:
        for a in d.annotations:
            if "." in a.name:
                yield a.name
        for f in d.fields:
            if "." in f.type_name:
                yield f.type_name
        for m in d.methods + d.constructors:
            for a in m.annotations:
                if "." in a.name:
                    yield a.name
            if m.body is None:
                continue
            for n in m.body.walk():
                if n.type_name and "." in n.type_name:
                    yield n.type_name
                if n.kind == "call" and n.receiver is not None and n.receiver.kind == "field":
                    dotted = dotted_name(n.receiver)
                    if dotted and "." in dotted:
                        yield dotted


def dotted_name(node) -> str | None:
    parts = []
    while node is not None and node.kind == "field":
        parts.append(node.name)
        node = node.receiver
    if node is None or node.kind != "name":
        return None
    parts.append(node.name)
    return ".".join(reversed(parts))


def identify_frameworks(unit: CompilationUnitModel, catalog: FrameworkCatalog) -> set[tuple[str, str]]:
    found = set()
    names = [imp.path for imp in unit.imports]
    names.extend(n for n in qualified_references(unit) if n[:1].islower())
    for name in names:
        hit = catalog.framework_for(name)
        if hit is not None:
            found.add(hit)
    return found


def tag_application_types(units, catalog: FrameworkCatalog, test_units=frozenset()) -> frozenset:
    """Marker imports in application (non-test) units; JavaSE when nothing matches."""
    tags = set()
    markers = catalog["app_type_markers"]
    for u in units:
        if is_test_path(u.source_path) or u.source_path in test_units:
            continue
        for imp in u.imports:
            for kind, prefixes in markers.items():
                if any(prefix_matches(imp.path, p) for p in prefixes):
                    tags.add(ApplicationType(kind))
    return frozenset(tags) if tags else frozenset({ApplicationType.JAVA_SE})


JUNIT3_FIXTURES = {"setUp": ("Setup", "PerTest"), "tearDown": ("Teardown", "PerTest")}


def fixture_info(method: MethodModel, decl: TypeDeclModel, unit, index, catalog,
                 junit3: bool) -> tuple[str, str, str] | None:
    """``(kind, scope, evidence)`` when ``method`` is a setup/teardown method.

    Annotation evidence wins over the JUnit 3 naming convention.
    """
    table = catalog["fixture_annotations"]
    for ann in method.annotations:
        key = match_annotation(ann, table, unit, index, decl)
        if key is not None:
            kind, scope = table[key]
            return kind, scope, key
    if junit3 and method.name in JUNIT3_FIXTURES and not method.parameters:
        kind, scope = JUNIT3_FIXTURES[method.name]
        return kind, scope, "junit3:" + method.name
    return None
