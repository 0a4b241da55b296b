"""JSON encoding of units, dependency lists and manifests.

Encoders return plain dicts; ``dumps`` gives the canonical byte form
(sorted keys, compact separators, trailing newline).
"""

from __future__ import annotations

import json
from typing import Any

from spectrim.errors import ParseError
from spectrim.model import (
    BuildCheck,
    ChecksumCheck,
    ClassUnit,
    Dependency,
    Member,
    MemberKind,
    MemberRef,
    PackageId,
    ProjectManifest,
    RequireUnitCheck,
    Scope,
    parse_coordinates,
)


def dumps(obj: Any, *, indent: int | None = None) -> bytes:
    separators = (",", ": ") if indent else (",", ":")
    return (json.dumps(obj, sort_keys=True, indent=indent, separators=separators, ensure_ascii=False) + "\n").encode("utf-8")


def _require(obj: dict, key: str, where: str) -> Any:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise ParseError(f"{where}: missing field {key!r}")
    return obj[key]


def _str_list(value: Any, where: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ParseError(f"{where}: expected a list of strings")
    return tuple(value)


def encode_unit(unit: ClassUnit) -> dict:
    return {
        "name": unit.name,
        "isTest": unit.is_test,
        "members": [{"name": m.name, "kind": m.kind.value} for m in unit.members],
        "staticRefs": [{"unit": r.unit, "member": r.member, "kind": r.kind.value} for r in unit.static_refs],
        "dynamicLiteralRefs": list(unit.dynamic_literal_refs),
        "hiddenRefs": list(unit.hidden_refs),
    }


def decode_unit(obj: dict, where: str = "unit") -> ClassUnit:
    name = _require(obj, "name", where)
    if not isinstance(name, str):
        raise ParseError(f"{where}: unit name must be a string")
    where = f"{where} {name}"
    members = []
    for m in obj.get("members", []):
        members.append(Member(_require(m, "name", where), MemberKind.parse(_require(m, "kind", where))))
    refs = []
    for r in obj.get("staticRefs", []):
        refs.append(MemberRef(_require(r, "unit", where), r.get("member"), MemberKind.parse(r.get("kind", "class"))))
    is_test = obj.get("isTest", False)
    if not isinstance(is_test, bool):
        raise ParseError(f"{where}: isTest must be a boolean")
    return ClassUnit(
        name=name,
        members=tuple(members),
        static_refs=tuple(refs),
        dynamic_literal_refs=_str_list(obj.get("dynamicLiteralRefs", []), where),
        hidden_refs=_str_list(obj.get("hiddenRefs", []), where),
        is_test=is_test,
    )


def encode_dependencies(deps) -> list[dict]:
    return [{"id": str(d.id), "scope": d.scope.value} for d in deps]


def decode_dependencies(items: Any, where: str) -> tuple[Dependency, ...]:
    if not isinstance(items, list):
        raise ParseError(f"{where}: dependencies must be a list")
    return tuple(
        Dependency(parse_coordinates(_require(d, "id", where)), Scope.parse(d.get("scope")))
        for d in items
    )


def encode_build_check(check: BuildCheck) -> dict:
    if isinstance(check, ChecksumCheck):
        return {"kind": "checksum", "dep": str(check.dep), "algorithm": check.algorithm, "expected": check.expected}
    return {"kind": "requireUnit", "unit": check.unit}


def decode_build_check(obj: dict, where: str) -> BuildCheck:
    kind = _require(obj, "kind", where)
    if kind == "checksum":
        return ChecksumCheck(
            dep=parse_coordinates(_require(obj, "dep", where)),
            expected=_require(obj, "expected", where).lower(),
            algorithm=obj.get("algorithm", "SHA-256"),
        )
    if kind == "requireUnit":
        return RequireUnitCheck(_require(obj, "unit", where))
    raise ParseError(f"{where}: unknown build check kind {kind!r}")


def encode_manifest(manifest: ProjectManifest) -> dict:
    out: dict[str, Any] = {
        "id": str(manifest.id),
        "dependencies": encode_dependencies(manifest.dependencies),
        "buildChecks": [encode_build_check(c) for c in manifest.build_checks],
        "ignoreDependencies": [str(p) for p in manifest.ignore_dependencies],
        "pins": [{"from": str(k), "to": str(v)} for k, v in sorted(manifest.pins.items())],
    }
    if manifest.entry_points is not None:
        out["entryPoints"] = list(manifest.entry_points)
    return out


def decode_manifest(obj: dict, where: str = "project.json") -> ProjectManifest:
    pins: dict[PackageId, PackageId] = {}
    for p in obj.get("pins", []):
        original = parse_coordinates(_require(p, "from", where))
        if original in pins:
            raise ParseError(f"{where}: duplicate pin for {original}")
        pins[original] = parse_coordinates(_require(p, "to", where))
    entry = obj.get("entryPoints")
    return ProjectManifest(
        id=parse_coordinates(_require(obj, "id", where)),
        dependencies=decode_dependencies(obj.get("dependencies", []), where),
        entry_points=None if entry is None else _str_list(entry, where),
        build_checks=tuple(decode_build_check(c, where) for c in obj.get("buildChecks", [])),
        ignore_dependencies=tuple(parse_coordinates(p) for p in _str_list(obj.get("ignoreDependencies", []), where)),
        pins=pins,
    )
