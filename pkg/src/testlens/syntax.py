"""Java source -> language-neutral syntax model.

tree-sitter produces the concrete syntax tree; everything downstream works on
the small ``Node`` tree built here, so no analyzer touches tree-sitter types.
Positions are 1-based ``(line, column)`` with columns counted in characters.
Type names have generic arguments erased.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import tree_sitter
import tree_sitter_java

CLASS_KINDS = {
    "class_declaration": "Class",
    "interface_declaration": "Interface",
    "enum_declaration": "Enum",
    "record_declaration": "Record",
    "annotation_type_declaration": "Annotation",
}

_TYPE_NODES = {
    "type_identifier", "generic_type", "scoped_type_identifier", "array_type",
    "integral_type", "floating_point_type", "boolean_type", "void_type",
}

_NUMBER_NODES = {
    "decimal_integer_literal", "hex_integer_literal", "octal_integer_literal",
    "binary_integer_literal", "decimal_floating_point_literal", "hex_floating_point_literal",
}


@dataclass(slots=True)
class Node:
    """One statement or expression.

    ``name`` holds the callee, variable or field name; ``type_name`` the type of
    a creation, cast, declaration or class literal; ``value`` literal text or an
    operator; ``receiver`` the qualifier of a call, field access or method
    reference; ``body`` the statements of a lambda or the initializer blocks of
    an anonymous class.
    """

    kind: str
    line: int = 0
    column: int = 0
    children: list = field(default_factory=list)
    name: str | None = None
    type_name: str | None = None
    value: str | None = None
    receiver: "Node | None" = None
    body: list | None = None
    names: tuple = ()

    @property
    def position(self) -> tuple[int, int]:
        return (self.line, self.column)

    def walk(self) -> Iterator["Node"]:
        """Pre-order traversal including receivers and bodies."""
        stack = [self]
        while stack:
            n = stack.pop()
            yield n
            nxt = []
            if n.receiver is not None:
                nxt.append(n.receiver)
            nxt.extend(n.children)
            if n.body:
                nxt.extend(n.body)
            stack.extend(reversed(nxt))


@dataclass(slots=True)
class Annotation:
    name: str
    arguments: str = ""

    @property
    def simple_name(self) -> str:
        return self.name.rsplit(".", 1)[-1]


@dataclass(slots=True)
class Parameter:
    name: str
    type_name: str
    annotations: list = field(default_factory=list)


@dataclass(slots=True)
class FieldModel:
    name: str
    type_name: str
    initializer: Node | None
    annotations: list = field(default_factory=list)
    modifiers: frozenset = frozenset()
    position: tuple[int, int] = (0, 0)


@dataclass(slots=True)
class MethodModel:
    name: str
    parameters: list
    modifiers: frozenset
    annotations: list
    return_type: str
    body: Node | None
    source_span: tuple[int, int]
    position: tuple[int, int]
    is_constructor: bool = False

    @property
    def signature(self) -> str:
        return f"{self.name}({','.join(p.type_name for p in self.parameters)})"

    def has_annotation(self, simple: str) -> bool:
        return any(a.simple_name == simple for a in self.annotations)


@dataclass(slots=True)
class TypeDeclModel:
    simple_name: str
    qualified_name: str
    kind: str
    annotations: list
    superclass: str | None
    interfaces: list
    methods: list
    fields: list
    modifiers: frozenset = frozenset()
    constructors: list = field(default_factory=list)
    outer: str | None = None
    record_components: list = field(default_factory=list)
    position: tuple[int, int] = (0, 0)
    source_span: tuple[int, int] = (0, 0)
    source_path: str = ""

    def method_named(self, name: str, argc: int | None = None) -> list:
        return [m for m in self.methods
                if m.name == name and (argc is None or len(m.parameters) == argc)]


@dataclass(slots=True)
class ImportModel:
    path: str
    is_wildcard: bool = False
    is_static: bool = False


@dataclass(slots=True)
class CompilationUnitModel:
    source_path: str
    package_name: str
    imports: list
    type_decls: list
    parse_errors: list
    text: str = ""

    def top_level(self) -> list:
        return [t for t in self.type_decls if t.outer is None]


@lru_cache(maxsize=1)
def _parser() -> tree_sitter.Parser:
    return tree_sitter.Parser(tree_sitter.Language(tree_sitter_java.language()))


class _Converter:
    def __init__(self, src: bytes, text: str, package: str, path: str):
        self.src = src
        self.package = package
        self.path = path
        self.lines = src.split(b"\n")
        self.decls: list[TypeDeclModel] = []

    # -- helpers --------------------------------------------------------
    def text(self, n) -> str:
        return self.src[n.start_byte:n.end_byte].decode("utf-8", "replace")

    def pos(self, n) -> tuple[int, int]:
        row, col = n.start_point
        line = self.lines[row] if row < len(self.lines) else b""
        if col and not line[:col].isascii():
            col = len(line[:col].decode("utf-8", "replace"))
        return (row + 1, col + 1)

    def node(self, kind, ts, **kw) -> Node:
        line, col = self.pos(ts)
        return Node(kind, line, col, **kw)

    def type_text(self, n) -> str:
        if n is None:
            return "?"
        t = n.type
        if t == "generic_type":
            return self.type_text(n.named_children[0])
        if t == "scoped_type_identifier":
            return ".".join(self.type_text(c) for c in n.named_children if c.type != "annotation"
                            and c.type != "marker_annotation")
        if t == "array_type":
            return self.type_text(n.child_by_field_name("element")) + "[]" * self.text(
                n.child_by_field_name("dimensions")).count("[")
        if t == "annotated_type":
            for c in n.named_children:
                if c.type not in ("annotation", "marker_annotation"):
                    return self.type_text(c)
        if t == "type_identifier" or t == "identifier":
            return self.text(n)
        return self.text(n)

    def annotations(self, mods) -> list:
        out = []
        if mods is None:
            return out
        for c in mods.named_children:
            if c.type in ("annotation", "marker_annotation"):
                name = self.text(c.child_by_field_name("name"))
                args = c.child_by_field_name("arguments")
                out.append(Annotation(name, self.text(args)[1:-1].strip() if args else ""))
        return out

    def modifiers(self, mods) -> frozenset:
        if mods is None:
            return frozenset()
        return frozenset(self.text(c) for c in mods.children
                         if c.type not in ("annotation", "marker_annotation"))

    # -- declarations ---------------------------------------------------
    def type_decl(self, n, outer: TypeDeclModel | None) -> None:
        kind = CLASS_KINDS[n.type]
        simple = self.text(n.child_by_field_name("name"))
        if outer is not None:
            qname = f"{outer.qualified_name}${simple}"
        else:
            qname = f"{self.package}.{simple}" if self.package else simple
        mods = next((c for c in n.children if c.type == "modifiers"), None)
        sup = n.child_by_field_name("superclass")
        superclass = None
        if sup is not None:
            superclass = self.type_text(sup.named_children[-1])
        interfaces = []
        ifs = n.child_by_field_name("interfaces") or next(
            (c for c in n.children if c.type == "extends_interfaces"), None)
        if ifs is not None:
            for tl in ifs.named_children:
                interfaces.extend(self.type_text(t) for t in tl.named_children)
        decl = TypeDeclModel(
            simple_name=simple, qualified_name=qname, kind=kind,
            annotations=self.annotations(mods), superclass=superclass, interfaces=interfaces,
            methods=[], fields=[], modifiers=self.modifiers(mods),
            outer=outer.qualified_name if outer else None,
            position=self.pos(n.child_by_field_name("name")),
            source_span=(n.start_point[0] + 1, n.end_point[0] + 1), source_path=self.path,
        )
        if kind == "Interface" and "static" not in decl.modifiers:
            decl.modifiers = decl.modifiers | {"abstract"}
        self.decls.append(decl)
        if kind == "Record":
            params = n.child_by_field_name("parameters")
            if params is not None:
                for p in params.named_children:
                    if p.type == "formal_parameter":
                        decl.record_components.append(self.text(p.child_by_field_name("name")))
        body = n.child_by_field_name("body")
        if body is None:
            return
        members = list(body.named_children)
        for c in body.named_children:
            if c.type == "enum_body_declarations":
                members.extend(c.named_children)
        for m in members:
            if m.type in CLASS_KINDS:
                self.type_decl(m, decl)
            elif m.type == "method_declaration":
                decl.methods.append(self.method(m, interface=kind == "Interface"))
            elif m.type == "constructor_declaration" or m.type == "compact_constructor_declaration":
                decl.constructors.append(self.method(m, constructor=True))
            elif m.type == "field_declaration" or m.type == "constant_declaration":
                decl.fields.extend(self.field_decl(m))

    def method(self, n, interface=False, constructor=False) -> MethodModel:
        mods = next((c for c in n.children if c.type == "modifiers"), None)
        modifiers = self.modifiers(mods)
        body_ts = n.child_by_field_name("body")
        if interface and body_ts is None:
            modifiers = modifiers | {"abstract"}
        params = []
        plist = n.child_by_field_name("parameters")
        if plist is not None:
            for p in plist.named_children:
                if p.type in ("formal_parameter", "spread_parameter"):
                    pmods = next((c for c in p.children if c.type == "modifiers"), None)
                    name_n = p.child_by_field_name("name")
                    if name_n is None:
                        decl = next((c for c in p.named_children if c.type == "variable_declarator"), None)
                        name_n = decl.child_by_field_name("name") if decl else None
                    tnode = p.child_by_field_name("type") or next(
                        (c for c in p.named_children if c.type in _TYPE_NODES), None)
                    tname = self.type_text(tnode)
                    if p.type == "spread_parameter":
                        tname += "[]"
                    params.append(Parameter(self.text(name_n) if name_n else "?", tname,
                                            self.annotations(pmods)))
        name_n = n.child_by_field_name("name")
        return MethodModel(
            name="<init>" if constructor else self.text(name_n),
            parameters=params,
            modifiers=modifiers,
            annotations=self.annotations(mods),
            return_type="void" if constructor else self.type_text(n.child_by_field_name("type")),
            body=self.stmt_block(body_ts) if body_ts is not None else None,
            source_span=(n.start_point[0] + 1, n.end_point[0] + 1),
            position=self.pos(name_n) if name_n is not None else self.pos(n),
            is_constructor=constructor,
        )

    def field_decl(self, n) -> list:
        mods = next((c for c in n.children if c.type == "modifiers"), None)
        tname = self.type_text(n.child_by_field_name("type"))
        anns = self.annotations(mods)
        modifiers = self.modifiers(mods)
        out = []
        for d in n.children_by_field_name("declarator"):
            name_n = d.child_by_field_name("name")
            val = d.child_by_field_name("value")
            dims = d.child_by_field_name("dimensions")
            out.append(FieldModel(
                name=self.text(name_n),
                type_name=tname + ("[]" * self.text(dims).count("[") if dims else ""),
                initializer=self.expr(val) if val is not None else None,
                annotations=anns, modifiers=modifiers, position=self.pos(name_n),
            ))
        return out

    # -- statements -----------------------------------------------------
    def stmt_block(self, n) -> Node:
        blk = self.node("block", n)
        if n.type != "block":
            blk.children = self.stmts(n)
            return blk
        for c in n.named_children:
            blk.children.extend(self.stmts(c))
        return blk

    def stmts(self, n) -> list:
        t = n.type
        if t == "local_variable_declaration":
            tname = self.type_text(n.child_by_field_name("type"))
            out = []
            for d in n.children_by_field_name("declarator"):
                name_n = d.child_by_field_name("name")
                val = d.child_by_field_name("value")
                nd = self.node("local_var", name_n, name=self.text(name_n), type_name=tname)
                if val is not None:
                    nd.children.append(self.expr(val))
                out.append(nd)
            return out
        if t in ("line_comment", "block_comment", ";"):
            return []
        return [self.stmt(n)]

    def stmt(self, n) -> Node:
        t = n.type
        if t == "block":
            return self.stmt_block(n)
        if t == "expression_statement":
            return self.node("expr", n, children=[self.expr(n.named_children[0])])
        if t == "if_statement":
            kids = [self.expr(n.child_by_field_name("condition")),
                    self.stmt(n.child_by_field_name("consequence"))]
            alt = n.child_by_field_name("alternative")
            if alt is not None:
                kids.append(self.stmt(alt))
            return self.node("if", n, children=kids)
        if t == "for_statement":
            kids = []
            for c in n.children_by_field_name("init"):
                kids.extend(self.stmts(c) if c.type == "local_variable_declaration" else [self.expr(c)])
            cond = n.child_by_field_name("condition")
            if cond is not None:
                kids.append(self.expr(cond))
            for c in n.children_by_field_name("update"):
                kids.append(self.expr(c))
            kids.append(self.stmt(n.child_by_field_name("body")))
            return self.node("for", n, children=kids)
        if t == "enhanced_for_statement":
            name_n = n.child_by_field_name("name")
            return self.node("foreach", n, name=self.text(name_n) if name_n else None,
                             type_name=self.type_text(n.child_by_field_name("type")),
                             children=[self.expr(n.child_by_field_name("value")),
                                       self.stmt(n.child_by_field_name("body"))])
        if t == "while_statement":
            return self.node("while", n, children=[self.expr(n.child_by_field_name("condition")),
                                                   self.stmt(n.child_by_field_name("body"))])
        if t == "do_statement":
            return self.node("do", n, children=[self.stmt(n.child_by_field_name("body")),
                                                self.expr(n.child_by_field_name("condition"))])
        if t in ("switch_expression", "switch_statement"):
            return self.switch(n)
        if t in ("try_statement", "try_with_resources_statement"):
            kids = []
            res = n.child_by_field_name("resources")
            if res is not None:
                for r in res.named_children:
                    if r.type == "resource":
                        name_n = r.child_by_field_name("name")
                        val = r.child_by_field_name("value")
                        if name_n is not None:
                            nd = self.node("local_var", name_n, name=self.text(name_n),
                                           type_name=self.type_text(r.child_by_field_name("type")))
                            if val is not None:
                                nd.children.append(self.expr(val))
                            kids.append(nd)
                        elif r.named_children:
                            kids.append(self.node("expr", r, children=[self.expr(r.named_children[0])]))
            kids.append(self.stmt(n.child_by_field_name("body")))
            for c in n.named_children:
                if c.type == "catch_clause":
                    param = next((p for p in c.named_children if p.type == "catch_formal_parameter"), None)
                    types, var = (), None
                    if param is not None:
                        ct = next((p for p in param.named_children if p.type == "catch_type"), None)
                        if ct is not None:
                            types = tuple(self.type_text(x) for x in ct.named_children)
                        vn = param.child_by_field_name("name")
                        var = self.text(vn) if vn is not None else None
                    kids.append(self.node("catch", c, names=types, name=var,
                                          children=[self.stmt(c.child_by_field_name("body"))]))
                elif c.type == "finally_clause":
                    blk = next(x for x in c.named_children if x.type == "block")
                    kids.append(self.node("finally", c, children=[self.stmt(blk)]))
            return self.node("try", n, children=kids)
        if t in ("return_statement", "throw_statement", "yield_statement"):
            kind = t.split("_")[0]
            return self.node(kind, n, children=[self.expr(c) for c in n.named_children
                                                if c.type not in ("line_comment", "block_comment")])
        if t == "synchronized_statement":
            kids = [self.expr(c) if c.type != "block" else self.stmt(c) for c in n.named_children]
            return self.node("sync", n, children=kids)
        if t == "labeled_statement":
            return self.node("labeled", n, children=[self.stmt(c) for c in n.named_children
                                                     if c.type != "identifier"])
        if t == "assert_statement":
            return self.node("assert", n, children=[self.expr(c) for c in n.named_children])
        if t in ("break_statement", "continue_statement"):
            return self.node(t.split("_")[0], n)
        if t in CLASS_KINDS or t == "local_class_declaration":
            return self.node("local_class", n)
        if t == "explicit_constructor_invocation":
            args = n.child_by_field_name("arguments")
            ctor = n.child_by_field_name("constructor")
            return self.node("expr", n, children=[self.node(
                "call", ctor if ctor is not None else n, name=self.text(ctor) if ctor else "this",
                children=[self.expr(a) for a in args.named_children] if args else [])])
        if t == "local_variable_declaration":
            return self.node("block", n, children=self.stmts(n))
        if t == "ERROR":
            return self.node("other", n, children=[self.stmt(c) for c in n.named_children])
        return self.expr(n)

    def switch(self, n) -> Node:
        kids = [self.expr(n.child_by_field_name("condition"))]
        body = n.child_by_field_name("body")
        if body is not None:
            for grp in body.named_children:
                if grp.type not in ("switch_block_statement_group", "switch_rule"):
                    continue
                labels: list[str] = []
                is_default = False
                stmts = []
                for c in grp.named_children:
                    if c.type == "switch_label":
                        vals = [x for x in c.named_children if x.type not in ("line_comment", "block_comment")]
                        if not vals or self.text(c).startswith("default"):
                            is_default = True
                        labels.extend(self.text(v) for v in vals)
                    elif c.type == "expression_statement" and grp.type == "switch_rule":
                        stmts.append(self.node("expr", c, children=[self.expr(c.named_children[0])]))
                    else:
                        stmts.extend(self.stmts(c))
                kids.append(self.node("case", grp, value="default" if is_default else None,
                                      names=tuple(labels), children=stmts))
        return self.node("switch", n, children=kids)

    # -- expressions ----------------------------------------------------
    def args(self, n) -> list:
        if n is None:
            return []
        return [self.expr(a) for a in n.named_children if a.type not in ("line_comment", "block_comment")]

    def expr(self, n) -> Node:
        t = n.type
        if t == "parenthesized_expression":
            inner = [c for c in n.named_children if c.type not in ("line_comment", "block_comment")]
            return self.expr(inner[0]) if inner else self.node("other", n)
        if t == "method_invocation":
            obj = n.child_by_field_name("object")
            name_n = n.child_by_field_name("name")
            recv = None
            if obj is not None:
                recv = self.expr(obj)
            elif n.children and n.children[0].type == "super":
                recv = self.node("super", n.children[0])
            return self.node("call", name_n, name=self.text(name_n), receiver=recv,
                             children=self.args(n.child_by_field_name("arguments")))
        if t == "object_creation_expression":
            tnode = n.child_by_field_name("type")
            body = next((c for c in n.named_children if c.type == "class_body"), None)
            nd = self.node("new", n, type_name=self.type_text(tnode),
                           children=self.args(n.child_by_field_name("arguments")))
            if body is not None:
                nd.body = self.anon_body(body)
            return nd
        if t == "array_creation_expression":
            kids = []
            for c in n.named_children:
                if c.type == "dimensions_expr":
                    kids.extend(self.expr(x) for x in c.named_children)
                elif c.type == "array_initializer":
                    kids.append(self.expr(c))
            return self.node("new_array", n, type_name=self.type_text(n.child_by_field_name("type")),
                             children=kids)
        if t == "array_initializer":
            return self.node("array_init", n, children=[self.expr(c) for c in n.named_children
                                                        if c.type not in ("line_comment", "block_comment")])
        if t == "method_reference":
            parts = [c for c in n.children if c.type not in ("line_comment", "block_comment")]
            head = parts[0]
            last = parts[-1]
            name = "new" if last.type == "new" else self.text(last)
            if head.type in _TYPE_NODES:
                recv = self.node("type", head, type_name=self.type_text(head))
            else:
                recv = self.expr(head)
            return self.node("method_ref", n, name=name, receiver=recv)
        if t == "lambda_expression":
            params = n.child_by_field_name("parameters")
            names: tuple = ()
            if params is not None:
                if params.type == "identifier":
                    names = (self.text(params),)
                else:
                    found = []
                    for p in params.named_children:
                        if p.type == "identifier":
                            found.append(self.text(p))
                        else:
                            pn = p.child_by_field_name("name")
                            if pn is not None:
                                found.append(self.text(pn))
                    names = tuple(found)
            body = n.child_by_field_name("body")
            if body is not None and body.type == "block":
                b = [self.stmt_block(body)]
            elif body is not None:
                b = [self.expr(body)]
            else:
                b = []
            return self.node("lambda", n, names=names, body=b)
        if t == "identifier":
            return self.node("name", n, name=self.text(n))
        if t == "field_access":
            obj = n.child_by_field_name("object")
            fld = n.child_by_field_name("field")
            return self.node("field", fld if fld is not None else n,
                             name=self.text(fld) if fld is not None else "?",
                             receiver=self.expr(obj) if obj is not None else None)
        if t in ("this", "super"):
            return self.node(t, n)
        if t == "string_literal":
            return self.node("string", n, value=self.string_value(n))
        if t == "character_literal":
            return self.node("char", n, value=self.text(n))
        if t in _NUMBER_NODES:
            return self.node("number", n, value=self.text(n))
        if t in ("true", "false"):
            return self.node("bool", n, value=t)
        if t == "null_literal":
            return self.node("null", n)
        if t == "class_literal":
            return self.node("class_lit", n, type_name=self.type_text(n.named_children[0]))
        if t == "assignment_expression":
            op = n.child_by_field_name("operator")
            return self.node("assign", n, value=self.text(op) if op else "=",
                             children=[self.expr(n.child_by_field_name("left")),
                                       self.expr(n.child_by_field_name("right"))])
        if t == "binary_expression":
            op = n.child_by_field_name("operator")
            return self.node("binary", n, value=self.text(op) if op else "?",
                             children=[self.expr(n.child_by_field_name("left")),
                                       self.expr(n.child_by_field_name("right"))])
        if t in ("unary_expression", "update_expression"):
            return self.node("unary", n, children=[self.expr(c) for c in n.named_children])
        if t == "ternary_expression":
            return self.node("ternary", n, children=[
                self.expr(n.child_by_field_name("condition")),
                self.expr(n.child_by_field_name("consequence")),
                self.expr(n.child_by_field_name("alternative"))])
        if t == "cast_expression":
            return self.node("cast", n, type_name=self.type_text(n.child_by_field_name("type")),
                             children=[self.expr(n.child_by_field_name("value"))])
        if t == "instanceof_expression":
            right = n.child_by_field_name("right") or n.child_by_field_name("pattern")
            return self.node("instanceof", n,
                             type_name=self.type_text(right) if right is not None else None,
                             children=[self.expr(n.child_by_field_name("left"))])
        if t == "array_access":
            return self.node("index", n, children=[self.expr(n.child_by_field_name("array")),
                                                   self.expr(n.child_by_field_name("index"))])
        if t in ("switch_expression", "switch_statement"):
            return self.switch(n)
        if t in _TYPE_NODES:
            return self.node("type", n, type_name=self.type_text(n))
        if t == "scoped_identifier":
            # qualified name in expression position, e.g. inside annotations
            scope = n.child_by_field_name("scope")
            nm = n.child_by_field_name("name")
            return self.node("field", nm, name=self.text(nm),
                             receiver=self.expr(scope) if scope is not None else None)
        kids = []
        for c in n.named_children:
            if c.type in ("line_comment", "block_comment"):
                continue
            kids.append(self.stmt(c) if c.type.endswith("statement") or c.type == "block"
                        else self.expr(c))
        return self.node("other", n, children=kids)

    def anon_body(self, body) -> list:
        """Initializer blocks and field initializers run at creation time."""
        out = []
        for m in body.named_children:
            if m.type == "block":
                out.append(self.stmt_block(m))
            elif m.type == "field_declaration":
                for f in self.field_decl(m):
                    if f.initializer is not None:
                        out.append(Node("local_var", f.position[0], f.position[1],
                                        name=f.name, type_name=f.type_name, children=[f.initializer]))
            elif m.type in ("method_declaration", "constructor_declaration"):
                meth = self.method(m)
                if meth.body is not None:
                    out.append(Node("anon_method", meth.position[0], meth.position[1],
                                    name=meth.name, children=[meth.body]))
        return out

    def string_value(self, n) -> str:
        parts = []
        for c in n.named_children:
            if c.type in ("string_fragment", "multiline_string_fragment"):
                parts.append(self.text(c))
            elif c.type == "escape_sequence":
                parts.append(_unescape(self.text(c)))
            elif c.type == "string_interpolation":
                parts.append(self.text(c))
        if not parts:
            raw = self.text(n)
            if raw.startswith('"""'):
                return raw[3:-3]
            return raw[1:-1]
        return "".join(parts)


def _errors(root, conv: _Converter) -> list:
    if not root.has_error:
        return []
    out = []
    stack = [root]
    while stack:
        n = stack.pop()
        if n.is_missing:
            out.append((conv.pos(n), f"missing {n.type}"))
            continue
        if n.type == "ERROR":
            out.append((conv.pos(n), "syntax error"))
            continue
        if n.has_error:
            stack.extend(reversed(n.children))
    return sorted(out)


_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", "s": " ",
            '"': '"', "'": "'", "\\": "\\"}


def _unescape(esc: str) -> str:
    body = esc[1:]
    if body in _ESCAPES:
        return _ESCAPES[body]
    try:
        if body.startswith("u"):
            return chr(int(body.lstrip("u"), 16))
        if body.isdigit():
            return chr(int(body, 8))
    except ValueError:
        pass
    return body  # line continuation and anything unexpected


def decode_source(raw: bytes) -> str:
    """UTF-8 (BOM stripped); files that are not valid UTF-8 are read as Latin-1."""
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        text = raw.decode("latin-1")
    return text[1:] if text.startswith("\ufeff") else text


def parse_source(text: str | bytes, path: str = "<memory>") -> CompilationUnitModel:
    """Parse one Java file. Never raises for malformed input."""
    if isinstance(text, bytes):
        text = decode_source(text)
    src = text.encode("utf-8", errors="replace")
    tree = _parser().parse(src)
    root = tree.root_node
    package = ""
    conv = _Converter(src, text, package, path)
    for c in root.named_children:
        if c.type == "package_declaration":
            ident = next((x for x in c.named_children if x.type in ("identifier", "scoped_identifier")), None)
            if ident is not None:
                package = conv.text(ident)
    conv.package = package
    imports = []
    errors = _errors(root, conv)
    for c in root.named_children:
        if c.type == "import_declaration":
            ident = next((x for x in c.named_children if x.type in ("identifier", "scoped_identifier")), None)
            if ident is None:
                continue
            imports.append(ImportModel(
                path=conv.text(ident),
                is_wildcard=any(x.type == "asterisk" for x in c.children),
                is_static=any(x.type == "static" for x in c.children),
            ))
    for c in root.named_children:
        if c.type in CLASS_KINDS:
            try:
                conv.type_decl(c, None)
            except RecursionError:
                errors.append((conv.pos(c), "nesting too deep to analyze"))
        elif c.type == "ERROR":
            # salvage declarations swallowed by an error node
            for x in c.named_children:
                if x.type in CLASS_KINDS:
                    try:
                        conv.type_decl(x, None)
                    except RecursionError:
                        errors.append((conv.pos(x), "nesting too deep to analyze"))
    return CompilationUnitModel(
        source_path=path, package_name=package, imports=imports,
        type_decls=conv.decls, parse_errors=errors, text=text,
    )


def parse_file(path, display_path: str | None = None) -> CompilationUnitModel:
    """Read and parse a file; OSError propagates (distinct from parse errors)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    return parse_source(decode_source(raw), display_path or str(path))
