"""Analysis data model for a project's tests, plus its canonical JSON form.

All types are frozen dataclasses. ``serialize_model`` refuses any instance
that breaks an invariant; ``deserialize_model`` validates the document against
the bundled JSON schema and then re-checks every invariant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from enum import Enum
from importlib import resources
from typing import Any

SCHEMA_VERSION = 1


class ModelError(ValueError):
    """Base class for model validation failures."""


class InvariantViolation(ModelError):
    def __init__(self, invariant: str, where: str = ""):
        self.invariant = invariant
        self.where = where
        super().__init__(f"{where}: {invariant}" if where else invariant)


class SchemaError(ModelError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path or '<root>'}: {message}")


class _Str(str, Enum):
    def __str__(self):
        return self.value


class ApplicationType(_Str):
    WEB_APP = "WebApp"
    WEB_API = "WebAPI"
    ANDROID = "Android"
    JAVA_EE = "JavaEE"
    JAVA_SE = "JavaSE"


class FixtureKind(_Str):
    SETUP = "Setup"
    TEARDOWN = "Teardown"


class FixtureScope(_Str):
    PER_TEST = "PerTest"
    PER_CLASS = "PerClass"


class FixtureOrigin(_Str):
    DECLARED = "Declared"
    INHERITED = "Inherited"


class EntityKind(_Str):
    METHOD_CALL = "MethodCall"
    CONSTRUCTOR_CALL = "ConstructorCall"
    METHOD_REFERENCE = "MethodReference"
    ASSERTION = "Assertion"


class CallClass(_Str):
    APPLICATION = "ApplicationCall"
    LIBRARY = "LibraryCall"
    CONSTRUCTOR = "Constructor"
    ASSERTION = "Assertion"
    UNRESOLVED = "Unresolved"


class AssertionCategory(_Str):
    TRUTHINESS = "Truthiness"
    EQUALITY = "Equality"
    IDENTITY = "Identity"
    NULLNESS = "Nullness"
    NUMERIC_TOLERANCE = "NumericTolerance"
    EXCEPTION = "Exception"
    MATCHER = "Matcher"
    OTHER = "Other"


class TestCategory(_Str):
    UI = "UI"
    API = "API"
    LIBRARY = "Library"
    UNIT = "Unit"
    INTEGRATION = "Integration"
    UNKNOWN = "Unknown"

    __test__ = False


class Site(_Str):
    FIXTURE = "Fixture"
    TEST_BODY = "TestBody"
    HELPER = "Helper"


class TypeOrigin(_Str):
    LIBRARY = "Library"
    APPLICATION = "Application"
    UNRESOLVED = "Unresolved"


class InputFormat(_Str):
    CLASSPATH_RESOURCE = "ClasspathResource"
    SQL = "SQL"
    JSON = "JSON"
    XML = "XML"
    CSV = "CSV"
    PROPERTIES = "Properties"
    HTML = "HTML"
    UNKNOWN = "Unknown"


class Evidence(_Str):
    API_CALL = "ApiCall"
    LITERAL_PATH = "LiteralPath"


class ResourceKind(_Str):
    IO_STREAM = "IOStream"
    NETWORK = "NetworkConnection"
    DATABASE = "DatabaseHandle"
    FILE_SYSTEM = "FileSystem"
    SERVER = "Server"
    UNKNOWN = "Unknown"


Position = tuple[int, int]


@dataclass(frozen=True, order=True)
class TypeRef:
    """A type reference; unresolved references keep the simple name."""

    name: str
    fqn: str | None = None
    resolved: bool = False

    @classmethod
    def of(cls, fqn: str) -> "TypeRef":
        return cls(name=fqn.rsplit(".", 1)[-1].rsplit("$", 1)[-1], fqn=fqn, resolved=True)

    @classmethod
    def unresolved(cls, name: str) -> "TypeRef":
        return cls(name=name, fqn=None, resolved=False)

    @property
    def key(self) -> str:
        return self.fqn if self.resolved and self.fqn else self.name


UNKNOWN_TYPE = TypeRef("?", None, False)


@dataclass(frozen=True)
class InvocationEntity:
    kind: EntityKind
    method_name: str
    receiver_type: TypeRef
    arg_count: int
    classification: CallClass
    assertion_category: AssertionCategory | None
    source_position: Position


@dataclass(frozen=True)
class CallAssertionSequence:
    call_entities: tuple[int, ...]
    assertion_entities: tuple[int, ...]


@dataclass(frozen=True)
class MockUse:
    mocked_type: TypeRef
    framework_id: str
    site: Site
    mocked_type_origin: TypeOrigin


@dataclass(frozen=True)
class StructuredInputUse:
    format: InputFormat
    evidence: Evidence
    site: Site
    source_position: Position


@dataclass(frozen=True)
class CleanupOp:
    method_name: str
    receiver_type: TypeRef
    resource_kind: ResourceKind


@dataclass(frozen=True)
class FocalMethod:
    type: TypeRef
    signature: str


@dataclass(frozen=True)
class FixtureAnalysis:
    kind: FixtureKind
    scope: FixtureScope
    origin: FixtureOrigin
    declaring_class: TypeRef
    name: str
    ncloc: int = 0
    cyclomatic_complexity: int = 1
    objects_created: int = 0
    mocks: tuple[MockUse, ...] = ()
    cleanup_operations: tuple[CleanupOp, ...] = ()
    assertions_in_teardown: int = 0


@dataclass(frozen=True)
class TestMethodAnalysis:
    __test__ = False

    name: str
    signature: str
    source_position: Position = (0, 0)
    ncloc: int = 0
    cyclomatic_complexity: int = 1
    objects_created: int = 0
    mocks: tuple[MockUse, ...] = ()
    constructor_calls: int = 0
    application_calls: int = 0
    library_calls: int = 0
    assertion_count: int = 0
    invocation_sequence: tuple[InvocationEntity, ...] = ()
    call_assertion_sequences: tuple[CallAssertionSequence, ...] = ()
    focal_classes: frozenset[TypeRef] = frozenset()
    library_focal_classes: frozenset[TypeRef] = frozenset()
    focal_methods: frozenset[FocalMethod] = frozenset()
    category: TestCategory = TestCategory.UNKNOWN
    structured_inputs: tuple[StructuredInputUse, ...] = ()
    helpers_expanded: tuple[str, ...] = ()

    @property
    def has_structured_input(self) -> bool:
        return bool(self.structured_inputs)


@dataclass(frozen=True)
class TestClassAnalysis:
    __test__ = False

    qualified_name: str
    source_path: str = ""
    source_position: Position = (0, 0)
    framework_ids: frozenset[str] = frozenset()
    superclass_chain: tuple[TypeRef, ...] = ()
    setup_methods: tuple[FixtureAnalysis, ...] = ()
    teardown_methods: tuple[FixtureAnalysis, ...] = ()
    test_methods: tuple[TestMethodAnalysis, ...] = ()


@dataclass(frozen=True)
class ProjectAnalysis:
    project_name: str
    application_types: frozenset[ApplicationType] = frozenset({ApplicationType.JAVA_SE})
    framework_ids: frozenset[str] = frozenset()
    application_class_count: int = 0
    application_method_count: int = 0
    test_classes: tuple[TestClassAnalysis, ...] = ()
    analysis_failures: tuple[tuple[str, str], ...] = ()
    diagnostics: tuple[str, ...] = ()


@dataclass(frozen=True)
class PercentileSummary:
    p25: float
    p50: float
    p75: float
    p90: float
    mean: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise InvariantViolation("count >= 1", "PercentileSummary")
        if not (self.p25 <= self.p50 <= self.p75 <= self.p90):
            raise InvariantViolation("p25 <= p50 <= p75 <= p90", "PercentileSummary")


# ---------------------------------------------------------------------------
# invariants


def _check(cond: bool, invariant: str, where: str) -> None:
    if not cond:
        raise InvariantViolation(invariant, where)


def validate_entity(e: InvocationEntity, where: str = "entity") -> None:
    _check((e.assertion_category is not None) == (e.kind is EntityKind.ASSERTION),
           "assertion_category present iff kind=Assertion", where)
    if e.kind is EntityKind.CONSTRUCTOR_CALL:
        _check(e.classification is CallClass.CONSTRUCTOR,
               "kind=ConstructorCall implies classification=Constructor", where)
    _check((e.classification is CallClass.ASSERTION) == (e.kind is EntityKind.ASSERTION),
           "classification=Assertion iff kind=Assertion", where)
    _check(e.arg_count >= 0, "arg_count >= 0", where)


def validate_partition(seq: tuple[InvocationEntity, ...],
                       parts: tuple[CallAssertionSequence, ...], where: str) -> None:
    flat: list[int] = []
    for part in parts:
        idx = list(part.call_entities) + list(part.assertion_entities)
        _check(all(a < b for a, b in zip(idx, idx[1:])),
               "call-assertion indices strictly increasing, calls before assertions", where)
        _check(all(0 <= i < len(seq) and seq[i].kind is not EntityKind.ASSERTION
                   for i in part.call_entities),
               "call part holds only non-assertion entities", where)
        _check(all(0 <= i < len(seq) and seq[i].kind is EntityKind.ASSERTION
                   for i in part.assertion_entities),
               "assertion part holds only assertion entities", where)
        _check(bool(idx), "call-assertion sequence is non-empty", where)
        flat.extend(idx)
    _check(flat == list(range(len(seq))),
           "call-assertion sequences cover the invocation sequence exactly once", where)


def validate_test_method(m: TestMethodAnalysis, where: str) -> None:
    for i, e in enumerate(m.invocation_sequence):
        validate_entity(e, f"{where}/invocation_sequence/{i}")
    n_assert = sum(1 for e in m.invocation_sequence if e.kind is EntityKind.ASSERTION)
    _check(m.assertion_count == n_assert,
           "assertion_count equals Assertion entities in invocation_sequence", where)
    validate_partition(m.invocation_sequence, m.call_assertion_sequences, where)
    _check(all(fm.type in m.focal_classes for fm in m.focal_methods),
           "focal_methods' owning types are focal classes", where)
    if m.category in (TestCategory.UNIT, TestCategory.INTEGRATION):
        _check(bool(m.focal_classes), "category Unit/Integration implies focal classes", where)
    if m.category is TestCategory.UNKNOWN:
        _check(not m.focal_classes and not m.library_focal_classes,
               "category Unknown implies no application or library focal class", where)
    for i, mock in enumerate(m.mocks):
        validate_mock(mock, f"{where}/mocks/{i}")


def validate_mock(mock: MockUse, where: str) -> None:
    if mock.mocked_type_origin is TypeOrigin.APPLICATION:
        _check(mock.mocked_type.resolved, "Application mocked type must be resolved", where)


def validate_fixture(f: FixtureAnalysis, owner: str, where: str) -> None:
    if f.cleanup_operations:
        _check(f.kind is FixtureKind.TEARDOWN, "cleanup operations only on teardowns", where)
    if f.origin is FixtureOrigin.INHERITED:
        _check(f.declaring_class.key != owner,
               "inherited fixture declared outside the analyzed class", where)
    for op in f.cleanup_operations:
        if op.resource_kind is not ResourceKind.UNKNOWN:
            _check(op.receiver_type.resolved, "known resource kind needs a resolved receiver", where)
    for i, mock in enumerate(f.mocks):
        validate_mock(mock, f"{where}/mocks/{i}")


def validate_project(p: ProjectAnalysis) -> None:
    _check(all(isinstance(t, ApplicationType) for t in p.application_types),
           "application_types within the five categories", "project")
    names = [c.qualified_name for c in p.test_classes]
    _check(len(names) == len(set(names)), "test class qualified names are distinct", "project")
    for ci, c in enumerate(p.test_classes):
        where = f"test_classes/{ci}"
        _check(bool(c.test_methods), "test class has at least one test method", where)
        for fi, f in enumerate(c.setup_methods):
            _check(f.kind is FixtureKind.SETUP, "setup_methods hold kind=Setup", where)
            validate_fixture(f, c.qualified_name, f"{where}/setup_methods/{fi}")
        for fi, f in enumerate(c.teardown_methods):
            _check(f.kind is FixtureKind.TEARDOWN, "teardown_methods hold kind=Teardown", where)
            validate_fixture(f, c.qualified_name, f"{where}/teardown_methods/{fi}")
        for mi, m in enumerate(c.test_methods):
            validate_test_method(m, f"{where}/test_methods/{mi}")


# ---------------------------------------------------------------------------
# canonical JSON


def _ref(t: TypeRef) -> dict:
    return {"name": t.name, "fqn": t.fqn, "resolved": t.resolved}


def _ref_key(t: TypeRef):
    return (t.key, t.name)


def _mock(m: MockUse) -> dict:
    return {"mocked_type": _ref(m.mocked_type), "framework_id": m.framework_id,
            "site": m.site.value, "mocked_type_origin": m.mocked_type_origin.value}


def _entity(e: InvocationEntity) -> dict:
    return {
        "kind": e.kind.value,
        "method_name": e.method_name,
        "receiver_type": _ref(e.receiver_type),
        "arg_count": e.arg_count,
        "classification": e.classification.value,
        "assertion_category": e.assertion_category.value if e.assertion_category else None,
        "source_position": list(e.source_position),
    }


def _fixture(f: FixtureAnalysis) -> dict:
    return {
        "kind": f.kind.value,
        "scope": f.scope.value,
        "origin": f.origin.value,
        "declaring_class": _ref(f.declaring_class),
        "name": f.name,
        "ncloc": f.ncloc,
        "cyclomatic_complexity": f.cyclomatic_complexity,
        "objects_created": f.objects_created,
        "mocks": [_mock(m) for m in f.mocks],
        "cleanup_operations": [
            {"method_name": c.method_name, "receiver_type": _ref(c.receiver_type),
             "resource_kind": c.resource_kind.value}
            for c in f.cleanup_operations
        ],
        "assertions_in_teardown": f.assertions_in_teardown,
    }


def _method(m: TestMethodAnalysis) -> dict:
    return {
        "name": m.name,
        "signature": m.signature,
        "source_position": list(m.source_position),
        "ncloc": m.ncloc,
        "cyclomatic_complexity": m.cyclomatic_complexity,
        "objects_created": m.objects_created,
        "mocks": [_mock(x) for x in m.mocks],
        "constructor_calls": m.constructor_calls,
        "application_calls": m.application_calls,
        "library_calls": m.library_calls,
        "assertion_count": m.assertion_count,
        "invocation_sequence": [_entity(e) for e in m.invocation_sequence],
        "call_assertion_sequences": [
            {"call_entities": list(s.call_entities), "assertion_entities": list(s.assertion_entities)}
            for s in m.call_assertion_sequences
        ],
        "focal_classes": [_ref(t) for t in sorted(m.focal_classes, key=_ref_key)],
        "library_focal_classes": [_ref(t) for t in sorted(m.library_focal_classes, key=_ref_key)],
        "focal_methods": [
            {"type": _ref(fm.type), "signature": fm.signature}
            for fm in sorted(m.focal_methods, key=lambda fm: (_ref_key(fm.type), fm.signature))
        ],
        "category": m.category.value,
        "structured_inputs": [
            {"format": s.format.value, "evidence": s.evidence.value, "site": s.site.value,
             "source_position": list(s.source_position)}
            for s in m.structured_inputs
        ],
        "helpers_expanded": list(m.helpers_expanded),
    }


def _class(c: TestClassAnalysis) -> dict:
    return {
        "qualified_name": c.qualified_name,
        "source_path": c.source_path,
        "source_position": list(c.source_position),
        "framework_ids": sorted(c.framework_ids),
        "superclass_chain": [_ref(t) for t in c.superclass_chain],
        "setup_methods": [_fixture(f) for f in c.setup_methods],
        "teardown_methods": [_fixture(f) for f in c.teardown_methods],
        "test_methods": [_method(m) for m in c.test_methods],
    }


def to_document(project: ProjectAnalysis) -> dict:
    validate_project(project)
    return {
        "hamster_schema": SCHEMA_VERSION,
        "project_name": project.project_name,
        "application_types": sorted(t.value for t in project.application_types),
        "framework_ids": sorted(project.framework_ids),
        "application_class_count": project.application_class_count,
        "application_method_count": project.application_method_count,
        "test_classes": [_class(c) for c in project.test_classes],
        "analysis_failures": [[p, r] for p, r in project.analysis_failures],
        "diagnostics": list(project.diagnostics),
    }


def dumps_canonical(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def serialize_model(project: ProjectAnalysis) -> str:
    """Canonical, byte-stable JSON text for a project model."""
    return dumps_canonical(to_document(project))


# -- loading -----------------------------------------------------------------

_SCHEMA = None


def load_schema() -> dict:
    global _SCHEMA
    if _SCHEMA is None:
        ref = resources.files("testlens") / "data" / "hamster-v1.json"
        _SCHEMA = json.loads(ref.read_text(encoding="utf-8"))
    return _SCHEMA


def validate_document(doc: Any) -> None:
    """Raise SchemaError (with a path to the offending field) on mismatch."""
    import jsonschema

    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = "/".join(str(p) for p in err.absolute_path)
        raise SchemaError(path, err.message)


def _load_ref(d: dict) -> TypeRef:
    return TypeRef(name=d["name"], fqn=d.get("fqn"), resolved=d.get("resolved", False))


def _load_mock(d: dict) -> MockUse:
    return MockUse(_load_ref(d["mocked_type"]), d["framework_id"], Site(d["site"]),
                   TypeOrigin(d.get("mocked_type_origin", "Unresolved")))


def _pos(v) -> Position:
    return (int(v[0]), int(v[1])) if v else (0, 0)


def _load_entity(d: dict) -> InvocationEntity:
    cat = d.get("assertion_category")
    return InvocationEntity(
        kind=EntityKind(d["kind"]),
        method_name=d["method_name"],
        receiver_type=_load_ref(d["receiver_type"]) if d.get("receiver_type") else UNKNOWN_TYPE,
        arg_count=d.get("arg_count", 0),
        classification=CallClass(d["classification"]),
        assertion_category=AssertionCategory(cat) if cat else None,
        source_position=_pos(d.get("source_position")),
    )


def _load_fixture(d: dict) -> FixtureAnalysis:
    return FixtureAnalysis(
        kind=FixtureKind(d["kind"]),
        scope=FixtureScope(d["scope"]),
        origin=FixtureOrigin(d.get("origin", "Declared")),
        declaring_class=_load_ref(d["declaring_class"]),
        name=d["name"],
        ncloc=d.get("ncloc", 0),
        cyclomatic_complexity=d.get("cyclomatic_complexity", 1),
        objects_created=d.get("objects_created", 0),
        mocks=tuple(_load_mock(m) for m in d.get("mocks", [])),
        cleanup_operations=tuple(
            CleanupOp(c["method_name"], _load_ref(c["receiver_type"]), ResourceKind(c["resource_kind"]))
            for c in d.get("cleanup_operations", [])
        ),
        assertions_in_teardown=d.get("assertions_in_teardown", 0),
    )


def _load_method(d: dict) -> TestMethodAnalysis:
    return TestMethodAnalysis(
        name=d["name"],
        signature=d.get("signature", d["name"] + "()"),
        source_position=_pos(d.get("source_position")),
        ncloc=d.get("ncloc", 0),
        cyclomatic_complexity=d.get("cyclomatic_complexity", 1),
        objects_created=d.get("objects_created", 0),
        mocks=tuple(_load_mock(m) for m in d.get("mocks", [])),
        constructor_calls=d.get("constructor_calls", 0),
        application_calls=d.get("application_calls", 0),
        library_calls=d.get("library_calls", 0),
        assertion_count=d.get("assertion_count", 0),
        invocation_sequence=tuple(_load_entity(e) for e in d.get("invocation_sequence", [])),
        call_assertion_sequences=tuple(
            CallAssertionSequence(tuple(s["call_entities"]), tuple(s["assertion_entities"]))
            for s in d.get("call_assertion_sequences", [])
        ),
        focal_classes=frozenset(_load_ref(t) for t in d.get("focal_classes", [])),
        library_focal_classes=frozenset(_load_ref(t) for t in d.get("library_focal_classes", [])),
        focal_methods=frozenset(
            FocalMethod(_load_ref(f["type"]), f["signature"]) for f in d.get("focal_methods", [])
        ),
        category=TestCategory(d.get("category", "Unknown")),
        structured_inputs=tuple(
            StructuredInputUse(InputFormat(s["format"]), Evidence(s["evidence"]), Site(s["site"]),
                               _pos(s.get("source_position")))
            for s in d.get("structured_inputs", [])
        ),
        helpers_expanded=tuple(d.get("helpers_expanded", [])),
    )


def _load_class(d: dict) -> TestClassAnalysis:
    return TestClassAnalysis(
        qualified_name=d["qualified_name"],
        source_path=d.get("source_path", ""),
        source_position=_pos(d.get("source_position")),
        framework_ids=frozenset(d.get("framework_ids", [])),
        superclass_chain=tuple(_load_ref(t) for t in d.get("superclass_chain", [])),
        setup_methods=tuple(_load_fixture(f) for f in d.get("setup_methods", [])),
        teardown_methods=tuple(_load_fixture(f) for f in d.get("teardown_methods", [])),
        test_methods=tuple(_load_method(m) for m in d.get("test_methods", [])),
    )


def from_document(doc: Any) -> ProjectAnalysis:
    validate_document(doc)
    project = ProjectAnalysis(
        project_name=doc["project_name"],
        application_types=frozenset(
            ApplicationType(t) for t in doc.get("application_types", ["JavaSE"])
        ),
        framework_ids=frozenset(doc.get("framework_ids", [])),
        application_class_count=doc.get("application_class_count", 0),
        application_method_count=doc.get("application_method_count", 0),
        test_classes=tuple(_load_class(c) for c in doc.get("test_classes", [])),
        analysis_failures=tuple((p, r) for p, r in doc.get("analysis_failures", [])),
        diagnostics=tuple(doc.get("diagnostics", [])),
    )
    validate_project(project)
    return project


def deserialize_model(document: str) -> ProjectAnalysis:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"not valid JSON: {exc}") from exc
    return from_document(doc)


def field_names(cls) -> list[str]:
    return [f.name for f in fields(cls)]
