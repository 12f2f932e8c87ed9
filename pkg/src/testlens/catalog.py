"""Framework catalog: the externalized knowledge base used by every analyzer.

The built-in catalog ships as ``data/default_catalog.json``. A user catalog
(JSON or TOML) replaces whole top-level sections of the default one, so a file
holding only ``cleanup_names`` leaves every other section untouched.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

CATEGORIES = ("Core", "Assertion", "Mocking", "Android", "API", "UI", "BDD")
CATALOG_ENV = "HAMSTER_CATALOG"

_DOTTED = re.compile(r"^[A-Za-z_$][\w$]*(\.[A-Za-z_$][\w$]*)*$")


class CatalogError(ValueError):
    """Raised for a malformed catalog file."""


def prefix_matches(name: str, prefix: str) -> bool:
    """True when ``prefix`` equals ``name`` or is a dotted-segment prefix of it."""
    return name == prefix or name.startswith(prefix + ".") or name.startswith(prefix + "$")


def longest_prefix(name: str, prefixes) -> str | None:
    best = None
    for p in prefixes:
        if prefix_matches(name, p) and (best is None or len(p) > len(best)):
            best = p
    return best


@dataclass(frozen=True)
class FrameworkCatalog:
    raw: dict[str, Any]

    def __post_init__(self):
        _validate(self.raw)
        # framework prefix table, flattened for longest-prefix lookups
        table = {}
        for cat, fws in self.raw["frameworks"].items():
            for fid, prefixes in fws.items():
                for p in prefixes:
                    table[p] = (fid, cat)
        object.__setattr__(self, "_framework_prefixes", table)

    def __getitem__(self, key):
        return self.raw[key]

    # -- frameworks -----------------------------------------------------
    def framework_for(self, qualified_name: str) -> tuple[str, str] | None:
        """Return ``(framework_id, category)`` owning a qualified name."""
        p = longest_prefix(qualified_name, self._framework_prefixes)
        return self._framework_prefixes[p] if p else None

    def is_test_framework_type(self, fqn: str | None) -> bool:
        return bool(fqn) and self.framework_for(fqn) is not None

    @property
    def categories(self) -> dict[str, dict[str, list[str]]]:
        return self.raw["frameworks"]

    def category_of(self, framework_id: str) -> str | None:
        for cat, fws in self.raw["frameworks"].items():
            if framework_id in fws:
                return cat
        return None

    # -- assertions -----------------------------------------------------
    def assertion_entry(self, owner_fqn: str | None, method: str):
        """Match (owner, method) against the assertion map.

        Returns ``(category, fluent)`` or None. Owners that belong to an
        assertion library but use an unmapped ``assert*``/``fail*`` name map to
        ``Other``.
        """
        if not owner_fqn:
            return None
        for entry in self.raw["assertion_map"]:
            if not prefix_matches(owner_fqn, entry["receiver"]):
                continue
            fluent = bool(entry.get("fluent"))
            if method in entry["methods"]:
                return entry["methods"][method], fluent
            if method.startswith(tuple(self.raw["assertion_other_prefixes"])):
                return "Other", fluent
        return None

    def assertion_names(self) -> dict[str, str]:
        """Method name -> category over the JUnit-style entries (first wins)."""
        names: dict[str, str] = {}
        for entry in self.raw["assertion_map"]:
            if entry.get("fluent"):
                continue
            for m, cat in entry["methods"].items():
                names.setdefault(m, cat)
        return names

    # -- mocks ----------------------------------------------------------
    def mock_call(self, owner_fqn: str | None, method: str) -> str | None:
        """Framework id when (owner, method) creates a mock."""
        if not owner_fqn:
            return None
        for sig in self.raw["mock_signatures"]["calls"]:
            if not prefix_matches(owner_fqn, sig["receiver"]):
                continue
            for m in sig["methods"]:
                if m == method or (m.endswith("*") and method.startswith(m[:-1])):
                    return sig["framework"]
        return None

    def mock_annotation(self, fqn: str | None, simple: str) -> str | None:
        table = self.raw["mock_signatures"]["annotations"]
        if fqn:
            return table.get(fqn)
        for k, fw in table.items():
            if k.rsplit(".", 1)[-1] == simple:
                return fw
        return None

    # -- misc lookups ---------------------------------------------------
    def resource_kind(self, fqn: str | None) -> str:
        if not fqn:
            return "Unknown"
        table = self.raw["resource_libraries"]
        p = longest_prefix(fqn, table)
        return table[p] if p else "Unknown"

    def ui_api_kind(self, fqn: str | None) -> str | None:
        if not fqn:
            return None
        for kind in ("UI", "API"):
            if longest_prefix(fqn, self.raw["ui_api_receivers"][kind]):
                return kind
        return None


def _validate(raw: dict[str, Any]) -> None:
    required = (
        "frameworks", "test_annotations", "junit3_base_classes", "fixture_annotations",
        "assertion_map", "assertion_other_prefixes", "fluent_assertion_methods",
        "numeric_tolerance_overloads", "mock_signatures", "injected_subject_annotations",
        "cleanup_names", "resource_libraries", "app_type_markers", "ui_api_receivers",
        "structured_input",
    )
    missing = [k for k in required if k not in raw]
    if missing:
        raise CatalogError(f"catalog missing sections: {', '.join(missing)}")
    unknown = set(raw["frameworks"]) - set(CATEGORIES)
    if unknown:
        raise CatalogError(f"unknown framework categories: {sorted(unknown)}")
    seen = set()
    for cat, fws in raw["frameworks"].items():
        for fid, prefixes in fws.items():
            if fid in seen:
                raise CatalogError(f"duplicate framework id {fid!r}")
            seen.add(fid)
            for p in prefixes:
                if not _DOTTED.match(p):
                    raise CatalogError(f"invalid package prefix {p!r} for {fid}")
    for section in ("resource_libraries",):
        for p in raw[section]:
            if not _DOTTED.match(p):
                raise CatalogError(f"invalid package prefix {p!r} in {section}")
    for kind, prefixes in raw["app_type_markers"].items():
        if kind not in ("WebApp", "WebAPI", "Android", "JavaEE"):
            raise CatalogError(f"unknown application type {kind!r}")
        for p in prefixes:
            if not _DOTTED.match(p):
                raise CatalogError(f"invalid package prefix {p!r} in app_type_markers")
    for kind, (fkind, scope) in raw["fixture_annotations"].items():
        if fkind not in ("Setup", "Teardown") or scope not in ("PerTest", "PerClass"):
            raise CatalogError(f"bad fixture annotation entry for {kind}")


def _read(path: Path) -> dict[str, Any]:
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".toml":
        try:
            import tomllib
        except ImportError:  # Python < 3.11
            import tomli as tomllib
        return tomllib.loads(text)
    return json.loads(text)


def default_catalog_data() -> dict[str, Any]:
    ref = resources.files("testlens") / "data" / "default_catalog.json"
    return json.loads(ref.read_text(encoding="utf-8"))


def load_catalog(path: str | os.PathLike | None = None) -> FrameworkCatalog:
    """Load the default catalog, overlaid with ``path`` or ``$HAMSTER_CATALOG``."""
    data = default_catalog_data()
    path = path or os.environ.get(CATALOG_ENV)
    if path:
        try:
            user = _read(Path(path))
        except (OSError, ValueError) as exc:
            raise CatalogError(f"cannot read catalog {path}: {exc}") from exc
        if not isinstance(user, dict):
            raise CatalogError(f"catalog {path} must be a mapping")
        data.update(user)
    return FrameworkCatalog(data)
