"""Invocation sequences: evaluation-order linearization of method bodies.

The builder walks a body the way the JVM would evaluate it, as far as a
syntax tree allows: a receiver before its call, arguments left to right before
the call they feed, lambda bodies in place, anonymous-class initializers right
after the creation. Same-class helper methods are inlined at their call site.

Alongside the public ``InvocationEntity`` list, every entity keeps the facts
the scope and input analyzers need (which candidate objects flow into its
receiver and arguments, argument types, the syntax node).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .catalog import FrameworkCatalog, prefix_matches
from .detect import dotted_name, extends_junit3, fixture_info, is_test_method
from .model import (
    UNKNOWN_TYPE, AssertionCategory, CallAssertionSequence, CallClass, EntityKind,
    InvocationEntity, MockUse, Site, TypeOrigin, TypeRef,
)
from .project import InheritanceGraph, ProjectIndex, binary_name, resolve_type
from .syntax import MethodModel, Node, TypeDeclModel

_TOLERANCE_NAME = re.compile(r"(delta|eps|epsilon|tolerance|tol|precision|error|accuracy)", re.I)
_CONSTANT = re.compile(r"^[A-Z][A-Z0-9_]*$")

STATEMENT_KINDS = {
    "block", "local_var", "expr", "if", "for", "foreach", "while", "do", "switch", "case",
    "try", "catch", "finally", "return", "throw", "yield", "sync", "labeled", "assert",
    "break", "continue", "local_class", "anon_method",
}

PRINT_STREAM = "java.io.PrintStream"

OBJECT_METHODS = frozenset({"getClass", "hashCode", "equals", "toString", "notify", "notifyAll",
                            "wait", "clone", "finalize"})


@dataclass(frozen=True)
class Val:
    """Abstract value of an expression."""

    fqn: str | None = None
    name: str | None = None
    lib: bool = False
    roots: frozenset = frozenset()
    fluent: bool = False
    static: bool = False
    text: str | None = None
    mock: bool = False


NOTHING = Val()


@dataclass
class RawEntity:
    kind: EntityKind
    method_name: str
    receiver_type: TypeRef
    arg_count: int
    classification: CallClass
    assertion_category: AssertionCategory | None
    position: tuple[int, int]
    site: Site
    node: Node
    owner: str | None = None
    static: bool = False
    recv_roots: frozenset = frozenset()
    arg_roots: tuple = ()
    arg_types: tuple = ()
    arg_texts: tuple = ()
    returns_void: bool = False
    mock: MockUse | None = None
    fluent: bool = False
    candidate: bool = False
    helper_depth: int = 0
    value_type: TypeRef | None = None  # type of the object a static factory hands out

    def to_model(self) -> InvocationEntity:
        return InvocationEntity(self.kind, self.method_name, self.receiver_type, self.arg_count,
                                self.classification, self.assertion_category, self.position)


@dataclass
class HelperExpansion:
    root: str
    expanded: list = field(default_factory=list)  # (call position, helper signature)
    cycle_detected: bool = False


def type_ref(fqn: str | None, name: str | None = None) -> TypeRef:
    if fqn:
        return TypeRef.of(fqn)
    if name:
        return TypeRef.unresolved(name)
    return UNKNOWN_TYPE


class ClassContext:
    """Per-class lookups: fields, helpers, receiverless call owners."""

    def __init__(self, decl: TypeDeclModel, index: ProjectIndex, graph: InheritanceGraph,
                 catalog: FrameworkCatalog):
        self.decl = decl
        self.index = index
        self.graph = graph
        self.catalog = catalog
        self.unit = index.unit_of[decl.qualified_name]
        self.junit3 = extends_junit3(decl, graph, catalog)
        self.ancestors = graph.ancestors(decl.qualified_name)
        self._helpers = None
        self._field_types = {}

    def resolve(self, name: str, decl: TypeDeclModel | None = None):
        decl = decl or self.decl
        return resolve_type(name, self.index.unit_of[decl.qualified_name], self.index, decl)

    # -- helpers -----------------------------------------------------------
    def helpers(self) -> list[MethodModel]:
        if self._helpers is None:
            out = []
            for m in self.decl.methods:
                if m.body is None:
                    continue
                if is_test_method(m, self.decl, self.unit, self.index, self.graph, self.catalog, self.junit3):
                    continue
                if fixture_info(m, self.decl, self.unit, self.index, self.catalog, self.junit3):
                    continue
                out.append(m)
            self._helpers = out
        return self._helpers

    def helper(self, name: str, argc: int) -> MethodModel | None:
        for m in self.helpers():
            if m.name == name and _arity_ok(m, argc):
                return m
        return None

    # -- fields ------------------------------------------------------------
    def field_type(self, name: str) -> Val | None:
        if name in self._field_types:
            return self._field_types[name]
        found = None
        chain = [self.decl] + [self.index.decls[a] for a in self.ancestors]
        outer = self.decl.outer
        while outer and outer in self.index.decls:
            chain.append(self.index.decls[outer])
            outer = self.index.decls[outer].outer
        for d in chain:
            for f in d.fields:
                if f.name == name:
                    r = self.resolve(f.type_name, d)
                    text = f.initializer.value if f.initializer is not None and f.initializer.kind == "string" else None
                    found = Val(fqn=r.fqn, name=r.simple_name, text=text)
                    break
            if found:
                break
        self._field_types[name] = found
        return found

    # -- receiverless calls ------------------------------------------------
    def receiverless_owner(self, name: str, argc: int):
        """``(owner fqn, owner simple name, static, declaring method)``."""
        scopes = [self.decl]
        outer = self.decl.outer
        while outer and outer in self.index.decls:
            scopes.append(self.index.decls[outer])
            outer = self.index.decls[outer].outer
        scopes.extend(self.index.decls[a] for a in self.ancestors)
        for d in scopes:
            ms = d.method_named(name, argc) or d.method_named(name)
            if ms:
                return d.qualified_name, d.simple_name, "static" in ms[0].modifiers, ms[0]
        imports = self.unit.imports
        for imp in imports:
            if imp.is_static and not imp.is_wildcard and imp.path.rsplit(".", 1)[-1] == name:
                owner = binary_name(imp.path.rsplit(".", 1)[0])
                return owner, owner.rsplit(".", 1)[-1].rsplit("$", 1)[-1], True, None
        owners = [binary_name(imp.path) for imp in imports if imp.is_static and imp.is_wildcard]
        preferred = []
        for o in owners:
            if (self.catalog.assertion_entry(o, name) or self.catalog.mock_call(o, name)
                    or (o in self.index.decls and self.index.decls[o].method_named(name))):
                preferred.append(o)
        pick = preferred[0] if preferred else (owners[0] if len(owners) == 1 else None)
        if pick is not None:
            return pick, pick.rsplit(".", 1)[-1].rsplit("$", 1)[-1], True, None
        root = self.graph.external_root(self.decl.qualified_name)
        if root is not None and root.fqn and root.fqn != "java.lang.Object":
            return root.fqn, root.simple_name, False, None
        if name in OBJECT_METHODS:
            return "java.lang.Object", "Object", False, None
        return None, None, False, None


def _arity_ok(m: MethodModel, argc: int) -> bool:
    return len(m.parameters) == argc


def find_method(index: ProjectIndex, graph: InheritanceGraph, fqn: str | None, name: str,
                argc: int | None = None):
    """Declaration of ``name`` on a project type or its project ancestors."""
    if not fqn or fqn not in index.decls:
        return None, None
    for d in [fqn] + graph.ancestors(fqn):
        decl = index.decls[d]
        ms = decl.method_named(name, argc) if argc is not None else decl.method_named(name)
        if ms:
            return decl, ms[0]
    return None, None


class SequenceBuilder:
    """Builds one stream of entities over one or more bodies sharing field state."""

    def __init__(self, catalog: FrameworkCatalog, index: ProjectIndex, graph: InheritanceGraph):
        self.catalog = catalog
        self.index = index
        self.graph = graph
        self.entities: list[RawEntity] = []
        self.env: dict[str, Val] = {}
        self.literals: list[tuple[Node, Site, int]] = []  # (node, site, entities so far)
        self.arrays: list[tuple[Site, int]] = []  # (site, depth) of array creations
        self.expansion = HelperExpansion("")
        self._path: list[str] = []
        self._frames = 0
        self._frame = "t"
        self._site = Site.TEST_BODY
        self._ret: list[list[Val]] = []
        self._ctx: ClassContext | None = None
        self._expect: str | None = None
        self._assertion_receivers = {}
        for entry in catalog["assertion_map"]:
            self._assertion_receivers.setdefault(entry["receiver"].rsplit(".", 1)[-1], entry["receiver"])
        self._fluent_prefixes = [e["receiver"] for e in catalog["assertion_map"] if e.get("fluent")]

    # -- entry points ------------------------------------------------------
    def run_method(self, method: MethodModel, ctx: ClassContext, site: Site, frame: str) -> range:
        start = len(self.entities)
        self._ctx, self._site, self._frame = ctx, site, frame
        self._path = [f"{ctx.decl.qualified_name}#{method.signature}"]
        for p in method.parameters:
            r = ctx.resolve(p.type_name)
            self.env[f"{frame}:{p.name}"] = Val(fqn=r.fqn, name=r.simple_name)
        if method.body is not None:
            self.visit(method.body)
        return range(start, len(self.entities))

    def run_field_initializers(self, ctx: ClassContext) -> range:
        start = len(self.entities)
        self._ctx, self._site, self._frame = ctx, Site.FIXTURE, "f"
        self._path = [ctx.decl.qualified_name + "#<fields>"]
        for f in ctx.decl.fields:
            if f.initializer is None:
                continue
            ft = ctx.field_type(f.name) or NOTHING
            self._expect = ft.fqn
            v = self.ev(f.initializer)
            self._expect = None
            self.env["field:" + f.name] = Val(fqn=ft.fqn or v.fqn, name=ft.name or v.name,
                                              roots=v.roots, text=v.text, mock=v.mock)
        return range(start, len(self.entities))

    # -- statements --------------------------------------------------------
    def visit(self, n: Node) -> None:
        if n.kind in STATEMENT_KINDS:
            self.st(n)
        else:
            self.ev(n)

    def st(self, n: Node) -> None:
        k = n.kind
        if k == "local_var":
            declared = None
            if n.type_name and n.type_name != "var":
                declared = self._ctx.resolve(n.type_name)
            v = NOTHING
            if n.children:
                self._expect = declared.fqn if declared else None
                v = self.ev(n.children[0])
                self._expect = None
            self.bind_local(n.name, Val(
                fqn=declared.fqn if declared else v.fqn,
                name=declared.simple_name if declared else v.name,
                lib=v.lib if declared is None else False,
                roots=v.roots, text=v.text, mock=v.mock))
            return
        if k == "foreach":
            it = self.ev(n.children[0])
            declared = self._ctx.resolve(n.type_name) if n.type_name and n.type_name != "var" else None
            self.bind_local(n.name, Val(fqn=declared.fqn if declared else None,
                                        name=declared.simple_name if declared else None,
                                        roots=it.roots))
            self.visit(n.children[1])
            return
        if k == "catch":
            if n.name and n.names:
                r = self._ctx.resolve(n.names[0])
                self.bind_local(n.name, Val(fqn=r.fqn, name=r.simple_name))
            for c in n.children:
                self.visit(c)
            return
        if k == "return":
            for c in n.children:
                v = self.ev(c)
                if self._ret:
                    self._ret[-1].append(v)
            return
        if k in ("local_class", "anon_method", "break", "continue"):
            return
        for c in n.children:
            self.visit(c)

    def bind_local(self, name: str | None, v: Val) -> None:
        if name:
            self.env[f"{self._frame}:{name}"] = v

    # -- expressions -------------------------------------------------------
    def ev(self, n: Node) -> Val:
        k = n.kind
        if k == "call":
            return self.call(n)
        if k == "new":
            return self.new(n)
        if k == "new_array":
            for c in n.children:
                self.ev(c)
            self.arrays.append((self._site, len(self._path) - 1))
            return Val(fqn=None, name=(n.type_name or "?") + "[]")
        if k == "array_init":
            vals = [self.ev(c) for c in n.children]
            return Val(roots=frozenset().union(*[v.roots for v in vals]) if vals else frozenset())
        if k == "method_ref":
            return self.method_ref(n)
        if k == "lambda":
            for p in n.names:
                self.bind_local(p, NOTHING)
            for b in n.body or ():
                self.visit(b)
            return NOTHING
        if k == "name":
            return self.lookup(n.name)
        if k == "field":
            return self.field_access(n)
        if k == "this":
            return Val(fqn=self._ctx.decl.qualified_name, name=self._ctx.decl.simple_name)
        if k == "super":
            return self.super_val()
        if k == "string":
            self.literals.append((n, self._site, len(self.entities)))
            return Val(fqn="java.lang.String", name="String", text=n.value)
        if k == "class_lit":
            return Val(fqn="java.lang.Class", name="Class")
        if k == "assign":
            left, right = n.children
            if left.kind not in ("name", "field"):
                self.ev(left)
            elif left.kind == "field" and left.receiver is not None and left.receiver.kind not in ("this", "name"):
                self.ev(left.receiver)
            v = self.ev(right)
            if n.value == "=":
                self.assign(left, v)
            return v
        if k == "binary":
            lv = self.ev(n.children[0])
            rv = self.ev(n.children[1])
            if n.value == "+" and (lv.fqn == "java.lang.String" or rv.fqn == "java.lang.String"):
                text = None
                if lv.text is not None:
                    text = lv.text + (rv.text if rv.text is not None else "?")
                return Val(fqn="java.lang.String", name="String", text=text)
            return NOTHING
        if k == "ternary":
            self.ev(n.children[0])
            a = self.ev(n.children[1])
            b = self.ev(n.children[2])
            return Val(fqn=a.fqn or b.fqn, name=a.name or b.name, roots=a.roots | b.roots,
                       lib=a.lib and b.lib)
        if k == "cast":
            v = self.ev(n.children[0])
            r = self._ctx.resolve(n.type_name) if n.type_name else None
            return Val(fqn=r.fqn if r else v.fqn, name=r.simple_name if r else v.name,
                       roots=v.roots, text=v.text, mock=v.mock)
        if k == "index":
            a = self.ev(n.children[0])
            self.ev(n.children[1])
            return Val(roots=a.roots)
        if k == "type":
            r = self._ctx.resolve(n.type_name)
            return Val(fqn=r.fqn, name=r.simple_name, static=True)
        if k in STATEMENT_KINDS:
            self.st(n)
            return NOTHING
        for c in n.children:
            self.visit(c)
        return NOTHING

    def assign(self, left: Node, v: Val) -> None:
        if left.kind == "name":
            key = f"{self._frame}:{left.name}"
            if key in self.env or self._ctx.field_type(left.name) is None:
                old = self.env.get(key, NOTHING)
                self.env[key] = Val(fqn=old.fqn or v.fqn, name=old.name or v.name, roots=v.roots,
                                    text=v.text, mock=v.mock, lib=v.lib and not old.fqn)
                return
            self.assign_field(left.name, v)
        elif left.kind == "field" and left.receiver is not None and left.receiver.kind == "this":
            self.assign_field(left.name, v)

    def assign_field(self, name: str, v: Val) -> None:
        ft = self._ctx.field_type(name) or NOTHING
        self.env["field:" + name] = Val(fqn=ft.fqn or v.fqn, name=ft.name or v.name,
                                        roots=v.roots, text=v.text, mock=v.mock)

    def lookup(self, name: str) -> Val:
        key = f"{self._frame}:{name}"
        if key in self.env:
            return self.env[key]
        ft = self._ctx.field_type(name)
        if ft is not None:
            return self.env.get("field:" + name, ft)
        if name[:1].isupper() and not _CONSTANT.match(name):
            r = self._ctx.resolve(name)
            return Val(fqn=r.fqn, name=r.simple_name, static=True)
        return NOTHING

    def super_val(self) -> Val:
        parent = self.graph.parent(self._ctx.decl.qualified_name)
        if parent:
            return Val(fqn=parent, name=self.index.decls[parent].simple_name)
        root = self.graph.external_root(self._ctx.decl.qualified_name)
        if root is not None:
            return Val(fqn=root.fqn, name=root.simple_name)
        return NOTHING

    def field_access(self, n: Node) -> Val:
        dotted = dotted_name(n)
        if dotted and dotted[:1].islower() and dotted.split(".", 1)[0] not in self._locals_and_fields():
            last = dotted.rsplit(".", 1)[-1]
            if last[:1].isupper() and not _CONSTANT.match(last):
                fqn = binary_name(dotted)
                return Val(fqn=fqn, name=last, static=True)
            return NOTHING
        if n.receiver is not None and n.receiver.kind == "this":
            ft = self._ctx.field_type(n.name)
            if ft is not None:
                return self.env.get("field:" + n.name, ft)
            return NOTHING
        rv = self.ev(n.receiver) if n.receiver is not None else NOTHING
        if rv.static:
            if rv.fqn == "java.lang.System" and n.name in ("out", "err"):
                return Val(fqn=PRINT_STREAM, name="PrintStream")
            if rv.fqn and (rv.fqn + "$" + n.name) in self.index.decls:
                return Val(fqn=rv.fqn + "$" + n.name, name=n.name, static=True)
            decl, fdecl = self._project_field(rv.fqn, n.name)
            if fdecl is not None:
                r = resolve_type(fdecl.type_name, self.index.unit_of[decl.qualified_name], self.index, decl)
                return Val(fqn=r.fqn, name=r.simple_name)
            if n.name[:1].isupper() and not _CONSTANT.match(n.name):
                return Val(fqn=(rv.fqn + "$" + n.name) if rv.fqn else None, name=n.name, static=True)
            return Val(lib=bool(rv.fqn) and not self.index.is_project(rv.fqn))
        if rv.fqn is not None:
            decl, fdecl = self._project_field(rv.fqn, n.name)
            if fdecl is not None:
                r = resolve_type(fdecl.type_name, self.index.unit_of[decl.qualified_name], self.index, decl)
                return Val(fqn=r.fqn, name=r.simple_name, roots=rv.roots)
            return Val(lib=not self.index.is_project(rv.fqn), roots=rv.roots)
        return Val(lib=rv.lib, roots=rv.roots)

    def _locals_and_fields(self) -> set:
        prefix = self._frame + ":"
        names = {k[len(prefix):] for k in self.env if k.startswith(prefix)}
        return names | {f.name for f in self._ctx.decl.fields}

    def _project_field(self, fqn: str | None, name: str):
        if not fqn or fqn not in self.index.decls:
            return None, None
        for d in [fqn] + self.graph.ancestors(fqn):
            decl = self.index.decls[d]
            for f in decl.fields:
                if f.name == name:
                    return decl, f
        return None, None

    # -- calls -------------------------------------------------------------
    def call(self, n: Node) -> Val:
        recv = n.receiver
        argc = len(n.children)
        ctx = self._ctx
        if recv is None or recv.kind == "this" or (
                recv.kind == "name" and recv.name == ctx.decl.simple_name
                and f"{self._frame}:{recv.name}" not in self.env):
            helper = ctx.helper(n.name, argc)
            if helper is not None:
                return self.inline(helper, n)

        rv = None
        if recv is not None:
            rv = self.ev(recv)
        avs = [self.ev(a) for a in n.children]

        static = False
        owner = owner_name = None
        decl_method = None
        if recv is None:
            owner, owner_name, static, decl_method = ctx.receiverless_owner(n.name, argc)
        else:
            owner, owner_name, static = rv.fqn, rv.name, rv.static

        cat, fluent = self.assertion_category(n, recv, rv, owner, owner_name, avs)
        mock_fw = None if cat else self.mock_framework(owner, n.name, recv is None)
        idx = len(self.entities)

        if cat is not None:
            classification = CallClass.ASSERTION
            kind = EntityKind.ASSERTION
        else:
            kind = EntityKind.METHOD_CALL
            classification = self.classify_owner(owner, rv)
        rtype = type_ref(owner, owner_name) if owner or owner_name else UNKNOWN_TYPE

        returns_void = False
        ret = NOTHING
        if owner and self.index.is_project(owner):
            d, m = (None, decl_method) if decl_method is not None else find_method(
                self.index, self.graph, owner, n.name, argc)
            if m is None and decl_method is None:
                d, m = find_method(self.index, self.graph, owner, n.name)
            if m is not None:
                returns_void = m.return_type == "void"
                if not returns_void:
                    home = d or self._declaring(owner, m)
                    r = resolve_type(m.return_type, self.index.unit_of[home.qualified_name], self.index, home)
                    ret = Val(fqn=r.fqn, name=r.simple_name)

        mock = None
        if mock_fw is not None:
            mock = self.make_mock(n, avs, mock_fw)

        candidate = (kind is EntityKind.METHOD_CALL and static and mock is None
                     and self.candidate_type(owner))
        recv_roots = rv.roots if (rv is not None and not static) else frozenset()
        ent = RawEntity(
            kind=kind, method_name=n.name, receiver_type=rtype, arg_count=argc,
            classification=classification, assertion_category=cat, position=n.position,
            site=self._site, node=n, owner=owner, static=static, recv_roots=recv_roots,
            arg_roots=tuple(v.roots for v in avs), arg_types=tuple(v.fqn for v in avs),
            arg_texts=tuple(v.text for v in avs), returns_void=returns_void, mock=mock,
            fluent=fluent, candidate=bool(candidate), helper_depth=len(self._path) - 1,
            value_type=TypeRef.of(ret.fqn) if (candidate and ret.fqn and self.index.is_project(ret.fqn))
            else None,
        )
        self.entities.append(ent)

        if mock is not None:
            return Val(fqn=mock.mocked_type.fqn, name=mock.mocked_type.name, mock=True)
        if fluent:
            return Val(fluent=True, lib=True)
        roots = frozenset({idx}) if candidate else (recv_roots if not static else frozenset())
        if ret is not NOTHING:
            return Val(fqn=ret.fqn, name=ret.name, roots=roots)
        if classification is CallClass.LIBRARY:
            return Val(lib=True, roots=roots)
        return Val(roots=roots)

    def _declaring(self, owner: str, m: MethodModel) -> TypeDeclModel:
        for d in [owner] + self.graph.ancestors(owner):
            if m in self.index.decls[d].methods:
                return self.index.decls[d]
        return self.index.decls[owner]

    def classify_owner(self, owner: str | None, rv: Val | None) -> CallClass:
        if owner:
            if self.index.is_application(owner):
                return CallClass.APPLICATION
            if self.index.is_project(owner):
                return CallClass.UNRESOLVED
            return CallClass.LIBRARY
        if rv is not None and rv.lib:
            return CallClass.LIBRARY
        return CallClass.UNRESOLVED

    def candidate_type(self, owner: str | None) -> bool:
        if not owner:
            return False
        if self.catalog.framework_for(owner) is not None:
            return False
        if self.index.is_test_side(owner):
            return False
        return True

    def assertion_category(self, n, recv, rv, owner, owner_name, avs):
        cat = None
        fluent = False
        fluent_map = self.catalog["fluent_assertion_methods"]
        if rv is not None and rv.fluent:
            return AssertionCategory(fluent_map.get(n.name, "Other")), True
        entry = None
        if owner:
            entry = self.catalog.assertion_entry(owner, n.name)
            if entry is None and rv is not None and not rv.static and any(
                    prefix_matches(owner, p) for p in self._fluent_prefixes):
                return AssertionCategory(fluent_map.get(n.name, "Other")), True
        elif recv is None:
            guess = self.catalog.assertion_names().get(n.name)
            if guess is not None:
                entry = (guess, False)
        elif rv is not None and rv.static and owner_name in self._assertion_receivers:
            entry = self.catalog.assertion_entry(self._assertion_receivers[owner_name], n.name)
        if entry is None:
            return None, False
        cat, fluent = entry
        if (cat == "Equality" and not fluent and n.name in self.catalog["numeric_tolerance_overloads"]
                and len(n.children) >= 3 and _tolerance_shape(n.children)):
            cat = "NumericTolerance"
        return AssertionCategory(cat), fluent

    def mock_framework(self, owner: str | None, name: str, receiverless: bool) -> str | None:
        if owner:
            return self.catalog.mock_call(owner, name)
        if not receiverless:
            return None
        # owner unknown (ambiguous static wildcards): fall back on the imports
        for sig in self.catalog["mock_signatures"]["calls"]:
            if not any(m == name or (m.endswith("*") and name.startswith(m[:-1])) for m in sig["methods"]):
                continue
            for imp in self._ctx.unit.imports:
                if prefix_matches(imp.path, sig["receiver"]) or prefix_matches(sig["receiver"], imp.path):
                    return sig["framework"]
        return None

    def make_mock(self, n: Node, avs: list, fw: str) -> MockUse:
        fqn = name = None
        if n.children and n.children[0].kind == "class_lit":
            r = self._ctx.resolve(n.children[0].type_name)
            fqn, name = r.fqn, r.simple_name
        elif avs:
            fqn, name = avs[0].fqn, avs[0].name
        elif self._expect:
            fqn = self._expect
        ref = type_ref(fqn, name)
        if fqn and self.index.is_project(fqn):
            origin = TypeOrigin.APPLICATION
        elif fqn:
            origin = TypeOrigin.LIBRARY
        else:
            origin = TypeOrigin.UNRESOLVED
        return MockUse(ref, fw, self._site, origin)

    def new(self, n: Node) -> Val:
        avs = [self.ev(a) for a in n.children]
        r = self._ctx.resolve(n.type_name or "?")
        idx = len(self.entities)
        candidate = self.candidate_type(r.fqn)
        self.entities.append(RawEntity(
            kind=EntityKind.CONSTRUCTOR_CALL, method_name="<init>",
            receiver_type=type_ref(r.fqn, r.simple_name), arg_count=len(n.children),
            classification=CallClass.CONSTRUCTOR, assertion_category=None, position=n.position,
            site=self._site, node=n, owner=r.fqn, static=False,
            arg_roots=tuple(v.roots for v in avs), arg_types=tuple(v.fqn for v in avs),
            arg_texts=tuple(v.text for v in avs), candidate=candidate,
            helper_depth=len(self._path) - 1,
        ))
        for b in n.body or ():
            self.visit(b)
        return Val(fqn=r.fqn, name=r.simple_name, roots=frozenset({idx}) if candidate else frozenset())

    def method_ref(self, n: Node) -> Val:
        recv = n.receiver
        rv = self.ev(recv) if recv is not None else NOTHING
        owner, owner_name = rv.fqn, rv.name
        classification = self.classify_owner(owner, rv)
        self.entities.append(RawEntity(
            kind=EntityKind.METHOD_REFERENCE, method_name=n.name,
            receiver_type=type_ref(owner, owner_name), arg_count=0,
            classification=classification, assertion_category=None, position=n.position,
            site=self._site, node=n, owner=owner, static=rv.static,
            recv_roots=rv.roots if not rv.static else frozenset(),
            helper_depth=len(self._path) - 1,
        ))
        return NOTHING

    def inline(self, helper: MethodModel, n: Node) -> Val:
        avs = [self.ev(a) for a in n.children]
        ctx = self._ctx
        sig = helper.signature
        key = f"{ctx.decl.qualified_name}#{sig}"
        if key in self._path:
            self.expansion.cycle_detected = True
            return NOTHING
        self.expansion.expanded.append((n.position, sig))
        self._frames += 1
        frame = f"h{self._frames}"
        for p, v in zip(helper.parameters, avs):
            r = ctx.resolve(p.type_name)
            self.env[f"{frame}:{p.name}"] = Val(fqn=r.fqn or v.fqn, name=r.simple_name,
                                                roots=v.roots, text=v.text, mock=v.mock)
        saved = (self._frame, self._site)
        self._frame = frame
        if self._site is Site.TEST_BODY:
            self._site = Site.HELPER
        self._path.append(key)
        self._ret.append([])
        self.visit(helper.body)
        rets = self._ret.pop()
        self._path.pop()
        self._frame, self._site = saved
        if helper.return_type == "void" or not rets:
            return NOTHING
        r = ctx.resolve(helper.return_type)
        roots = frozenset().union(*[v.roots for v in rets])
        return Val(fqn=r.fqn, name=r.simple_name, roots=roots,
                   mock=all(v.mock for v in rets), text=rets[0].text)


def _tolerance_shape(args: list[Node]) -> bool:
    if len(args) == 3 and args[0].kind == "string":
        return False
    cands = [args[-1]]
    if len(args) == 4:
        cands.append(args[2])
    for a in cands:
        if a.kind == "unary" and a.children:
            a = a.children[0]
        if a.kind == "number":
            return True
        if a.kind in ("name", "field") and a.name and _TOLERANCE_NAME.search(a.name):
            return True
    return False


def partition_call_assertion(seq) -> list[CallAssertionSequence]:
    """Greedy split into (non-assertion run, following assertion run) blocks."""
    parts = []
    calls: list[int] = []
    asserts: list[int] = []
    for i, e in enumerate(seq):
        if e.kind is EntityKind.ASSERTION:
            asserts.append(i)
        else:
            if asserts:
                parts.append(CallAssertionSequence(tuple(calls), tuple(asserts)))
                calls, asserts = [], []
            calls.append(i)
    if calls or asserts:
        parts.append(CallAssertionSequence(tuple(calls), tuple(asserts)))
    return parts


def build_invocation_sequence(method: MethodModel, decl: TypeDeclModel, index: ProjectIndex,
                              graph: InheritanceGraph, catalog: FrameworkCatalog,
                              site: Site = Site.TEST_BODY):
    """Stand-alone sequence of one body: ``(entities, expansion, builder)``."""
    b = SequenceBuilder(catalog, index, graph)
    ctx = ClassContext(decl, index, graph, catalog)
    b.expansion.root = method.signature
    b.run_method(method, ctx, site, "t")
    return [e.to_model() for e in b.entities], b.expansion, b


def expand_helpers(method: MethodModel, decl: TypeDeclModel, index: ProjectIndex,
                   graph: InheritanceGraph, catalog: FrameworkCatalog) -> HelperExpansion:
    return build_invocation_sequence(method, decl, index, graph, catalog)[1]


def detect_mocks(builder: SequenceBuilder, span: range | None = None) -> list[MockUse]:
    ents = builder.entities if span is None else builder.entities[span.start:span.stop]
    return [e.mock for e in ents if e.mock is not None]
