"""Whole-project analysis: parse, detect, fixtures, sequences, scope, inputs, metrics."""

from __future__ import annotations

import logging
from pathlib import Path

from .catalog import FrameworkCatalog, load_catalog
from .detect import detect_test_classes, detect_test_methods, identify_frameworks, match_annotation, tag_application_types
from .fixtures import analyze_fixture, detect_fixtures
from .inputs import detect_structured_inputs
from .metrics import code_lines, method_metrics
from .model import (
    CallClass, EntityKind, FixtureKind, FixtureScope, MockUse, ProjectAnalysis, Site,
    TestClassAnalysis, TestMethodAnalysis, TypeOrigin, TypeRef,
)
from .project import InheritanceGraph, ProjectIndex, build_inheritance_graph, index_project, is_test_path
from .scope import analyze_scope
from .sequences import ClassContext, HelperExpansion, SequenceBuilder, Val, partition_call_assertion

log = logging.getLogger(__name__)


class _Lines:
    def __init__(self):
        self._cache = {}

    def __call__(self, unit):
        got = self._cache.get(unit.source_path)
        if got is None:
            got = self._cache[unit.source_path] = code_lines(unit.text)
        return got


def _origin(fqn: str | None, index: ProjectIndex) -> TypeOrigin:
    if fqn and index.is_project(fqn):
        return TypeOrigin.APPLICATION
    if fqn:
        return TypeOrigin.LIBRARY
    return TypeOrigin.UNRESOLVED


def _annotated(annotations, table, unit, index, decl):
    for ann in annotations:
        key = match_annotation(ann, table, unit, index, decl)
        if key is not None:
            return key
    return None


class ClassAnalyzer:
    """Analyzes one test class against a shared project index."""

    def __init__(self, decl, index: ProjectIndex, graph: InheritanceGraph, catalog: FrameworkCatalog,
                 lines: _Lines):
        self.decl = decl
        self.index = index
        self.graph = graph
        self.catalog = catalog
        self.lines = lines
        self.unit = index.unit_of[decl.qualified_name]
        self.ctx = ClassContext(decl, index, graph, catalog)
        self.contexts = {decl.qualified_name: self.ctx}
        self.sources = detect_fixtures(decl, index, graph, catalog)

    def context(self, d) -> ClassContext:
        ctx = self.contexts.get(d.qualified_name)
        if ctx is None:
            ctx = self.contexts[d.qualified_name] = ClassContext(d, self.index, self.graph, self.catalog)
        return ctx

    # fields carrying @Mock-style or injection annotations, own class first
    def annotated_fields(self):
        mock_table = self.catalog["mock_signatures"]["annotations"]
        inject_table = set(self.catalog["injected_subject_annotations"])
        mocks, injected = [], {}
        chain = [self.decl] + [self.index.decls[a] for a in self.graph.ancestors(self.decl.qualified_name)]
        for d in chain:
            unit = self.index.unit_of[d.qualified_name]
            for f in d.fields:
                key = _annotated(f.annotations, mock_table, unit, self.index, d)
                r = self.ctx.resolve(f.type_name, d)
                if key is not None:
                    mocks.append(MockUse(TypeRef.of(r.fqn) if r.fqn else TypeRef.unresolved(r.simple_name),
                                         mock_table[key], Site.FIXTURE, _origin(r.fqn, self.index)))
                    continue
                if _annotated(f.annotations, inject_table, unit, self.index, d) and f.name not in injected:
                    injected[f.name] = TypeRef.of(r.fqn) if r.fqn else TypeRef.unresolved(r.simple_name)
        return mocks, injected

    def analyze(self) -> TestClassAnalysis:
        fixtures = [analyze_fixture(s, self.index, self.graph, self.catalog, self.lines) for s in self.sources]
        setups = tuple(f for f in fixtures if f.kind is FixtureKind.SETUP)
        teardowns = tuple(f for f in fixtures if f.kind is FixtureKind.TEARDOWN)
        field_mocks, injected = self.annotated_fields()
        tests = [self.analyze_test(m, field_mocks, injected)
                 for m, _ev in detect_test_methods(self.decl, self.unit, self.index, self.graph, self.catalog)]
        chain = [TypeRef.of(a) for a in self.graph.ancestors(self.decl.qualified_name)]
        root = self.graph.external_root(self.decl.qualified_name)
        if root is not None and root.fqn != "java.lang.Object":
            chain.append(TypeRef.of(root.fqn) if root.fqn else TypeRef.unresolved(root.simple_name))
        return TestClassAnalysis(
            qualified_name=self.decl.qualified_name,
            source_path=self.unit.source_path,
            source_position=self.decl.position,
            framework_ids=frozenset(fid for fid, _cat in identify_frameworks(self.unit, self.catalog)),
            superclass_chain=tuple(chain),
            setup_methods=setups,
            teardown_methods=teardowns,
            test_methods=tuple(tests),
        )

    def analyze_test(self, method, field_mocks, injected) -> TestMethodAnalysis:
        b = SequenceBuilder(self.catalog, self.index, self.graph)
        for name, ref in injected.items():
            b.env["field:" + name] = Val(fqn=ref.fqn, name=ref.name, roots=frozenset({("inject", name)}))
        b.run_field_initializers(self.ctx)
        lit_start = len(b.literals)

        # PerClass before PerTest; within a scope, ancestors' fixtures run first
        setups = [s for s in self.sources if s.kind is FixtureKind.SETUP]
        setups.sort(key=lambda s: (s.scope is not FixtureScope.PER_CLASS, -s.depth))
        spans = []
        for i, s in enumerate(setups):
            spans.append(b.run_method(s.method, self.context(s.body_owner), Site.FIXTURE, f"s{i}"))

        b.expansion = HelperExpansion(method.signature)
        arrays_before = len(b.arrays)
        span = b.run_method(method, self.ctx, Site.TEST_BODY, "t")
        own = b.entities[span.start:span.stop]
        seq = tuple(e.to_model() for e in own)

        mocks = list(field_mocks)
        for sp in spans:
            mocks.extend(e.mock for e in b.entities[sp.start:sp.stop] if e.mock is not None)
        mock_table = self.catalog["mock_signatures"]["annotations"]
        for p in method.parameters:
            key = _annotated(p.annotations, mock_table, self.unit, self.index, self.decl)
            if key is not None:
                r = self.ctx.resolve(p.type_name)
                mocks.append(MockUse(TypeRef.of(r.fqn) if r.fqn else TypeRef.unresolved(r.simple_name),
                                     mock_table[key], Site.TEST_BODY, _origin(r.fqn, self.index)))
        mocks.extend(e.mock for e in own if e.mock is not None)

        metric = method_metrics(method, self.lines(self.unit))
        scope = analyze_scope(b.entities, span, self.index, self.graph, self.catalog, injected)
        inputs = detect_structured_inputs(b, spans + [span], range(lit_start, len(b.literals)), self.catalog)
        return TestMethodAnalysis(
            name=method.name,
            signature=method.signature,
            source_position=method.position,
            ncloc=metric.ncloc,
            cyclomatic_complexity=metric.cyclomatic_complexity,
            objects_created=sum(1 for e in own if e.kind is EntityKind.CONSTRUCTOR_CALL)
            + len(b.arrays) - arrays_before,
            mocks=tuple(mocks),
            constructor_calls=sum(1 for e in own if e.classification is CallClass.CONSTRUCTOR),
            application_calls=sum(1 for e in own if e.classification is CallClass.APPLICATION),
            library_calls=sum(1 for e in own if e.classification is CallClass.LIBRARY),
            assertion_count=sum(1 for e in own if e.kind is EntityKind.ASSERTION),
            invocation_sequence=seq,
            call_assertion_sequences=tuple(partition_call_assertion(seq)),
            focal_classes=scope.focal_classes,
            library_focal_classes=scope.library_focal_classes,
            focal_methods=scope.focal_methods,
            category=scope.category,
            structured_inputs=tuple(inputs),
            helpers_expanded=tuple(sig for _pos, sig in b.expansion.expanded),
        )


def analyze_project(root, project_name: str | None = None, ignore_globs=None,
                    catalog: FrameworkCatalog | None = None) -> ProjectAnalysis:
    """Run the full pipeline over a source tree. Raises FileNotFoundError for a missing root."""
    root = Path(root)
    catalog = catalog or load_catalog()
    indexed = index_project(root, ignore_globs)
    index = indexed.index
    graph = build_inheritance_graph(indexed.units, index)
    failures = list(indexed.failures)
    diagnostics = list(graph.diagnostics)

    test_decls = []
    for unit in indexed.units:
        for d in detect_test_classes(unit, catalog, graph, index):
            test_decls.append(d)
    index.mark_test_classes(d.qualified_name for d in test_decls)
    test_units = {index.unit_of[d.qualified_name].source_path for d in test_decls}

    frameworks = set()
    for unit in indexed.units:
        if unit.source_path in test_units or is_test_path(unit.source_path):
            frameworks.update(fid for fid, _cat in identify_frameworks(unit, catalog))
    app_types = tag_application_types(indexed.units, catalog, test_units)

    lines = _Lines()
    classes = []
    for d in sorted(test_decls, key=lambda d: (index.unit_of[d.qualified_name].source_path, d.position)):
        try:
            classes.append(ClassAnalyzer(d, index, graph, catalog, lines).analyze())
        except RecursionError:
            failures.append((index.unit_of[d.qualified_name].source_path,
                             f"analysis error in {d.qualified_name}: nesting too deep"))
        except Exception as exc:  # noqa: BLE001 - one bad class must not sink the project
            log.debug("analysis of %s failed", d.qualified_name, exc_info=True)
            failures.append((index.unit_of[d.qualified_name].source_path,
                             f"analysis error in {d.qualified_name}: {type(exc).__name__}: {exc}"))

    app_decls = [index.decls[f] for f in sorted(index.application_types)]
    return ProjectAnalysis(
        project_name=project_name or root.resolve().name,
        application_types=app_types,
        framework_ids=frozenset(frameworks),
        application_class_count=len(app_decls),
        application_method_count=sum(len(d.methods) + len(d.constructors) for d in app_decls),
        test_classes=tuple(classes),
        analysis_failures=tuple(sorted(failures)),
        diagnostics=tuple(diagnostics),
    )
