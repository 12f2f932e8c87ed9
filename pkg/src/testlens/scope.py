"""Focal class / focal method inference and test categorization.

Candidates are objects created (or obtained from static calls) anywhere in
the test's scope: test-class field initializers, setups, the test body and
its helpers. A candidate is promoted to focal when, inside the test body
(helpers included), it

  a. is the chain root of a receiver of a non-accessor, non-setter call,
  b. flows into an assertion argument,
  c. is passed to a non-accessor, non-setter call on an already promoted
     object (iterated to a fixpoint), or
  d. is the owner of a void static project method call.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .catalog import FrameworkCatalog
from .model import CallClass, EntityKind, FocalMethod, TestCategory, TypeRef
from .project import InheritanceGraph, ProjectIndex
from .sequences import RawEntity, find_method


class Role(str, Enum):
    EXERCISES_BEHAVIOR = "ExercisesBehavior"
    SETUP_ONLY = "SetupOnly"
    CONSTRUCTION_ONLY = "ConstructionOnly"


@dataclass(frozen=True)
class CandidateObject:
    key: object            # entity index, or ("inject", field name)
    type: TypeRef
    creation_site: object  # (line, column) or "StaticOrigin" / "Injected"
    role: Role = Role.SETUP_ONLY


@dataclass(frozen=True)
class ScopeResult:
    candidates: tuple
    focal_classes: frozenset
    library_focal_classes: frozenset
    focal_methods: frozenset
    category: TestCategory


def is_accessor(name: str, argc: int, record_components=()) -> bool:
    if argc != 0:
        return False
    if name in record_components:
        return True
    return (name.startswith("get") and len(name) > 3) or (name.startswith("is") and len(name) > 2)


def is_setter(name: str, argc: int) -> bool:
    return argc == 1 and name.startswith("set") and len(name) > 3


def _record_components(index: ProjectIndex, fqn: str | None) -> tuple:
    d = index.decls.get(fqn) if fqn else None
    return tuple(d.record_components) if d is not None and d.record_components else ()


def collect_candidates(entities: list[RawEntity], injected: dict | None = None) -> dict:
    """Candidate key -> (TypeRef, creation site)."""
    out = {}
    for i, e in enumerate(entities):
        if not e.candidate:
            continue
        site = e.position if e.kind is EntityKind.CONSTRUCTOR_CALL else "StaticOrigin"
        out[i] = (e.value_type or e.receiver_type, site)
    for name, ref in (injected or {}).items():
        out[("inject", name)] = (ref, "Injected")
    return out


def lightweight_dataflow(entities: list[RawEntity], test_span: range, index: ProjectIndex) -> set:
    """Keys of candidates that exercise behavior inside ``test_span``."""
    promoted: set = set()
    body = [entities[i] for i in test_span]

    def plain_call(e: RawEntity) -> bool:
        if e.kind not in (EntityKind.METHOD_CALL, EntityKind.METHOD_REFERENCE):
            return False
        if e.mock is not None:
            return False
        comps = _record_components(index, e.owner)
        return not is_accessor(e.method_name, e.arg_count, comps) and not is_setter(e.method_name, e.arg_count)

    for i in test_span:
        e = entities[i]
        if plain_call(e) and not e.static:
            promoted |= e.recv_roots                      # (a)
        if e.kind is EntityKind.ASSERTION:
            for r in e.arg_roots:                         # (b)
                promoted |= r
            promoted |= e.recv_roots
        if (e.kind is EntityKind.METHOD_CALL and e.static and e.candidate and e.returns_void
                and index.is_project(e.owner)):
            promoted.add(i)                               # (d)
    changed = True
    while changed:                                        # (c)
        changed = False
        for e in body:
            if not plain_call(e) or e.static or not (e.recv_roots & promoted):
                continue
            for r in e.arg_roots:
                if not r <= promoted:
                    promoted |= r
                    changed = True
    return promoted


def _construction_only(key, entities: list[RawEntity]) -> bool:
    seen = False
    for e in entities:
        if key in e.recv_roots:
            return False
        for r in e.arg_roots:
            if key in r:
                if e.kind is not EntityKind.CONSTRUCTOR_CALL:
                    return False
                seen = True
    return seen


def infer_focal_classes(candidates: dict, promoted: set, index: ProjectIndex):
    app, lib = set(), set()
    for key, (ref, _site) in candidates.items():
        if key not in promoted or not ref.resolved:
            continue
        if index.is_application(ref.fqn):
            app.add(ref)
        elif not index.is_project(ref.fqn):
            lib.add(ref)
    return frozenset(app), frozenset(lib)


def infer_focal_methods(focal: frozenset, entities: list[RawEntity], test_span: range,
                        index: ProjectIndex, graph: InheritanceGraph) -> frozenset:
    fqns = {t.fqn: t for t in focal}
    out = set()
    for i in test_span:
        e = entities[i]
        if e.kind not in (EntityKind.METHOD_CALL, EntityKind.METHOD_REFERENCE):
            continue
        if e.classification is not CallClass.APPLICATION or e.owner not in fqns:
            continue
        comps = _record_components(index, e.owner)
        if e.kind is EntityKind.METHOD_CALL and (is_accessor(e.method_name, e.arg_count, comps)
                                                 or is_setter(e.method_name, e.arg_count)):
            continue
        if e.kind is EntityKind.METHOD_REFERENCE:
            _, m = find_method(index, graph, e.owner, e.method_name)
            if m is not None and is_accessor(m.name, len(m.parameters), comps):
                continue
            sig = m.signature if m is not None else f"{e.method_name}(...)"
        else:
            _, m = find_method(index, graph, e.owner, e.method_name, e.arg_count)
            sig = m.signature if m is not None else f"{e.method_name}({','.join('?' * e.arg_count)})"
        out.add(FocalMethod(fqns[e.owner], sig))
    return frozenset(out)


def classify_test_category(entities: list[RawEntity], app_focal: frozenset, lib_focal: frozenset,
                           catalog: FrameworkCatalog) -> TestCategory:
    kinds = {catalog.ui_api_kind(e.owner) for e in entities}
    if "UI" in kinds:
        return TestCategory.UI
    if "API" in kinds:
        return TestCategory.API
    if app_focal:
        return TestCategory.UNIT if len(app_focal) == 1 else TestCategory.INTEGRATION
    if lib_focal:
        return TestCategory.LIBRARY
    return TestCategory.UNKNOWN


def analyze_scope(entities: list[RawEntity], test_span: range, index: ProjectIndex,
                  graph: InheritanceGraph, catalog: FrameworkCatalog,
                  injected: dict | None = None) -> ScopeResult:
    cands = collect_candidates(entities, injected)
    promoted = lightweight_dataflow(entities, test_span, index)
    app, lib = infer_focal_classes(cands, promoted, index)
    methods = infer_focal_methods(app, entities, test_span, index, graph)
    objs = []
    for key, (ref, site) in cands.items():
        if key in promoted:
            role = Role.EXERCISES_BEHAVIOR
        elif _construction_only(key, entities):
            role = Role.CONSTRUCTION_ONLY
        else:
            role = Role.SETUP_ONLY
        objs.append(CandidateObject(key, ref, site, role))
    category = classify_test_category(entities, app, lib, catalog)
    return ScopeResult(tuple(objs), app, lib, methods, category)
