"""Structured external inputs (files, classpath resources, SQL) used by a test."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .catalog import FrameworkCatalog, prefix_matches
from .model import EntityKind, Evidence, InputFormat, Site, StructuredInputUse
from .sequences import RawEntity, SequenceBuilder

_SPACE = re.compile(r"\s")


@dataclass
class Signal:
    order: tuple
    node: object
    site: Site
    evidence: Evidence
    format: InputFormat | None
    scope: set  # ids of nodes inside the signal's argument expressions


def literal_format(text: str, catalog: FrameworkCatalog):
    """``(matched, format)`` for a string literal; format None means unknown."""
    cfg = catalog["structured_input"]
    stripped = text.strip()
    if stripped.startswith(cfg["classpath_literal_prefix"]):
        return True, extension_format(stripped, catalog) or InputFormat.CLASSPATH_RESOURCE
    if stripped and not _SPACE.search(stripped):
        lower = stripped.lower()
        for ext, fmt in cfg["extensions"].items():
            if lower.endswith(ext) and len(lower) > len(ext):
                return True, InputFormat(fmt) if fmt else None
        return False, None
    if is_sql_text(stripped, catalog):
        return True, InputFormat.SQL
    return False, None


def extension_format(text: str, catalog: FrameworkCatalog):
    lower = text.lower()
    for ext, fmt in catalog["structured_input"]["extensions"].items():
        if lower.endswith(ext):
            return InputFormat(fmt) if fmt else None
    return None


def is_sql_text(text: str | None, catalog: FrameworkCatalog) -> bool:
    if not text:
        return False
    head = text.lstrip()
    for kw in catalog["structured_input"]["sql_keywords"]:
        if head[: len(kw)].upper() == kw and len(head) > len(kw) and head[len(kw)].isspace():
            return True
    return False


def _subtree(node) -> set:
    ids = set()
    for c in node.children:
        ids.update(id(n) for n in c.walk())
    for b in node.body or ():
        ids.update(id(n) for n in b.walk())
    return ids


def _api_signal(e: RawEntity, catalog: FrameworkCatalog):
    if e.kind is EntityKind.ASSERTION:
        return None
    for sig in catalog["structured_input"]["api_signals"]:
        if sig["kind"] == "new":
            if e.kind is not EntityKind.CONSTRUCTOR_CALL or not e.owner:
                continue
            if not prefix_matches(e.owner, sig["receiver"]):
                continue
            return sig
        if e.kind not in (EntityKind.METHOD_CALL,):
            continue
        if e.method_name not in sig["methods"]:
            continue
        if "receiver" in sig and not (e.owner and prefix_matches(e.owner, sig["receiver"])):
            continue
        return sig
    return None


def _has_source(e: RawEntity, scope: set, by_node: dict, literal_ids: dict,
                catalog: FrameworkCatalog) -> bool:
    cfg = catalog["structured_input"]
    types = set(cfg["source_types"])
    if any(t in types for t in e.arg_types if t):
        return True
    for nid in scope:
        inner = by_node.get(nid)
        if inner is not None:
            if inner.kind is EntityKind.CONSTRUCTOR_CALL and inner.owner in types:
                return True
            if inner.kind is EntityKind.METHOD_CALL:
                if inner.method_name in cfg["source_calls"]:
                    return True
                for f in cfg["source_factories"]:
                    if inner.owner and prefix_matches(inner.owner, f["receiver"]) and inner.method_name in f["methods"]:
                        return True
        lit = literal_ids.get(nid)
        if lit is not None and literal_format(lit, catalog)[0]:
            return True
    return False


def detect_structured_inputs(builder: SequenceBuilder, entity_ranges, literal_range: range,
                             catalog: FrameworkCatalog) -> list[StructuredInputUse]:
    ents = builder.entities
    by_node = {}
    for r in entity_ranges:
        for i in r:
            by_node.setdefault(id(ents[i].node), ents[i])
    literal_ids = {id(builder.literals[i][0]): builder.literals[i][0].value or ""
                   for i in literal_range}

    signals: list[Signal] = []
    for r in entity_ranges:
        for i in r:
            e = ents[i]
            sig = _api_signal(e, catalog)
            if sig is None:
                continue
            scope = _subtree(e.node)
            if sig.get("requires_source") and not _has_source(e, scope, by_node, literal_ids, catalog):
                continue
            if sig.get("sql_text"):
                texts = list(e.arg_texts) + [literal_ids[n] for n in scope if n in literal_ids]
                if not any(is_sql_text(t, catalog) for t in texts):
                    continue
            fmt = InputFormat(sig["format"]) if sig.get("format") else None
            signals.append(Signal((i, 1), e.node, e.site, Evidence.API_CALL, fmt, scope))
    for li in literal_range:
        node, site, count = builder.literals[li]
        ok, fmt = literal_format(node.value or "", catalog)
        if ok:
            signals.append(Signal((count, 0), node, site, Evidence.LITERAL_PATH, fmt, set()))

    signals.sort(key=lambda s: s.order)
    out: list[StructuredInputUse] = []
    seen = set()
    for s in signals:
        if any(id(s.node) in o.scope for o in signals if o is not s):
            continue  # nested: merged into its enclosing signal
        pos = s.node.position
        if pos in seen:
            continue
        seen.add(pos)
        fmt = s.format
        if fmt is None or s.evidence is Evidence.LITERAL_PATH:
            inner = [o for o in signals if id(o.node) in s.scope]
            inner_fmt = next((o.format for o in inner if o.evidence is Evidence.API_CALL and o.format), None) \
                or next((o.format for o in inner if o.format), None)
            fmt = fmt or inner_fmt
        out.append(StructuredInputUse(fmt or InputFormat.UNKNOWN, s.evidence, s.site, pos))
    return out
