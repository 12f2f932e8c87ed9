"""Setup/teardown detection (declared and inherited) and fixture metrics."""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import FrameworkCatalog
from .detect import JUNIT3_FIXTURES, extends_junit3, fixture_info
from .metrics import code_lines, method_metrics
from .model import (
    CleanupOp, EntityKind, FixtureAnalysis, FixtureKind, FixtureOrigin, FixtureScope,
    ResourceKind, Site, TypeRef,
)
from .project import InheritanceGraph, ProjectIndex
from .sequences import ClassContext, RawEntity, SequenceBuilder
from .syntax import MethodModel, TypeDeclModel


@dataclass
class FixtureSource:
    """A detected fixture before metrics: where it is declared and which body runs."""

    kind: FixtureKind
    scope: FixtureScope
    origin: FixtureOrigin
    declaring: TypeDeclModel     # class carrying the fixture annotation/convention
    method: MethodModel          # most-derived body
    body_owner: TypeDeclModel    # class declaring that body
    evidence: str
    depth: int                   # 0 = the test class, 1 = its parent, ...


def classify_execution_scope(evidence: str, catalog: FrameworkCatalog) -> FixtureScope:
    """Scope from an annotation fqn or a ``junit3:<name>`` convention marker."""
    if evidence.startswith("junit3:"):
        return FixtureScope(JUNIT3_FIXTURES[evidence[7:]][1])
    return FixtureScope(catalog["fixture_annotations"][evidence][1])


def _visible(m: MethodModel) -> bool:
    return "public" in m.modifiers or "protected" in m.modifiers


def detect_fixtures(decl: TypeDeclModel, index: ProjectIndex, graph: InheritanceGraph,
                    catalog: FrameworkCatalog) -> list[FixtureSource]:
    """Declared fixtures in source order, then inherited ones nearest ancestor first."""
    chain = [decl] + [index.decls[a] for a in graph.ancestors(decl.qualified_name)]
    out: list[FixtureSource] = []
    taken: set[tuple[str, int]] = set()   # (name, argc) already claimed by a more-derived class
    for depth, d in enumerate(chain):
        unit = index.unit_of[d.qualified_name]
        junit3 = extends_junit3(d, graph, catalog)
        for m in d.methods:
            key = (m.name, len(m.parameters))
            if key in taken:
                continue
            info = fixture_info(m, d, unit, index, catalog, junit3)
            if info is None:
                continue
            if depth > 0 and not _visible(m):
                continue
            kind, scope, evidence = info
            # the most-derived override supplies the body
            body, owner = m, d
            for sub in chain[:depth]:
                over = sub.method_named(m.name, len(m.parameters))
                if over and over[0].body is not None:
                    body, owner = over[0], sub
                    break
            taken.add(key)
            out.append(FixtureSource(
                FixtureKind(kind), FixtureScope(scope),
                FixtureOrigin.DECLARED if depth == 0 else FixtureOrigin.INHERITED,
                d, body, owner, evidence, depth))
    return out


def detect_cleanup_operations(entities: list[RawEntity], catalog: FrameworkCatalog) -> list[CleanupOp]:
    names = set(catalog["cleanup_names"])
    ops = []
    for e in entities:
        if e.kind is not EntityKind.METHOD_CALL or e.method_name not in names:
            continue
        kind = ResourceKind(catalog.resource_kind(e.owner)) if e.receiver_type.resolved else ResourceKind.UNKNOWN
        ops.append(CleanupOp(e.method_name, e.receiver_type, kind))
    return ops


def analyze_fixture(src: FixtureSource, index: ProjectIndex, graph: InheritanceGraph,
                    catalog: FrameworkCatalog, lines_of=None) -> FixtureAnalysis:
    """Metrics over the fixture body; entity counts include inlined helpers."""
    unit = index.unit_of[src.body_owner.qualified_name]
    lines = lines_of(unit) if lines_of else code_lines(unit.text)
    metric = method_metrics(src.method, lines)
    b = SequenceBuilder(catalog, index, graph)
    ctx = ClassContext(src.body_owner, index, graph, catalog)
    span = b.run_method(src.method, ctx, Site.FIXTURE, "s0")
    ents = b.entities[span.start:span.stop]
    created = sum(1 for e in ents if e.kind is EntityKind.CONSTRUCTOR_CALL) + len(b.arrays)
    mocks = tuple(e.mock for e in ents if e.mock is not None)
    cleanup: tuple = ()
    asserts = 0
    if src.kind is FixtureKind.TEARDOWN:
        cleanup = tuple(detect_cleanup_operations(ents, catalog))
        asserts = sum(1 for e in ents if e.kind is EntityKind.ASSERTION)
    return FixtureAnalysis(
        kind=src.kind, scope=src.scope, origin=src.origin,
        declaring_class=TypeRef.of(src.declaring.qualified_name), name=src.method.name,
        ncloc=metric.ncloc, cyclomatic_complexity=metric.cyclomatic_complexity,
        objects_created=created, mocks=mocks, cleanup_operations=cleanup,
        assertions_in_teardown=asserts,
    )
