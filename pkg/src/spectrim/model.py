"""Shared domain types: coordinates, scopes, class units, archives and manifests."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from spectrim.errors import ConfigError, ParseError

SEPARATOR = ":"


class Scope(str, enum.Enum):
    COMPILE = "compile"
    TEST = "test"
    RUNTIME = "runtime"
    PROVIDED = "provided"
    SYSTEM = "system"
    IMPORT = "import"

    @classmethod
    def parse(cls, text: Optional[str]) -> "Scope":
        if text is None:
            return cls.COMPILE
        try:
            return cls(text)
        except ValueError:
            raise ParseError(f"unknown scope {text!r}") from None

    def __str__(self) -> str:
        return self.value


class MemberKind(str, enum.Enum):
    METHOD = "method"
    FIELD = "field"
    ANNOTATION = "annotation"
    CLASS = "class"

    @classmethod
    def parse(cls, text: str) -> "MemberKind":
        try:
            return cls(text)
        except ValueError:
            raise ParseError(f"unknown member kind {text!r}") from None


@dataclass(frozen=True, order=True)
class PackageId:
    """A ``group:artifact:version`` coordinate."""

    group: str
    artifact: str
    version: str

    def __post_init__(self) -> None:
        for part in (self.group, self.artifact, self.version):
            if not isinstance(part, str) or not part or SEPARATOR in part:
                raise ParseError(f"invalid coordinate part {part!r} in {self.group}:{self.artifact}:{self.version}")

    @property
    def key(self) -> tuple[str, str]:
        """The (group, artifact) pair used for version mediation."""
        return (self.group, self.artifact)

    def with_group(self, group: str) -> "PackageId":
        return PackageId(group, self.artifact, self.version)

    def __str__(self) -> str:
        return f"{self.group}:{self.artifact}:{self.version}"


def parse_coordinates(text: str) -> PackageId:
    if not isinstance(text, str):
        raise ParseError(f"coordinates must be a string, got {text!r}")
    parts = text.split(SEPARATOR)
    if len(parts) != 3 or not all(parts):
        raise ParseError(f"malformed coordinates {text!r}: expected group:artifact:version")
    return PackageId(*parts)


def render_coordinates(pid: PackageId) -> str:
    return str(pid)


@dataclass(frozen=True)
class MemberRef:
    unit: str
    member: Optional[str] = None
    kind: MemberKind = MemberKind.CLASS

    def __post_init__(self) -> None:
        if not self.unit:
            raise ParseError("member reference with empty unit name")
        if self.kind is MemberKind.CLASS and self.member is not None:
            raise ParseError(f"class-level reference to {self.unit} must not name a member")
        if self.kind is not MemberKind.CLASS and not self.member:
            raise ParseError(f"{self.kind.value} reference to {self.unit} needs a member name")

    def __str__(self) -> str:
        return self.unit if self.member is None else f"{self.unit}#{self.member}"


@dataclass(frozen=True)
class Member:
    name: str
    kind: MemberKind

    def __post_init__(self) -> None:
        if not self.name:
            raise ParseError("member with empty name")
        if self.kind is MemberKind.CLASS:
            raise ParseError(f"member {self.name!r} cannot have kind 'class'")


@dataclass(frozen=True)
class ClassUnit:
    """A compiled class descriptor.

    ``static_refs`` and ``dynamic_literal_refs`` are what a bytecode scanner
    would find; ``hidden_refs`` stand for runtime-only loads (configuration
    files, serialization, native code) that static analysis cannot see.
    """

    name: str
    members: tuple[Member, ...] = ()
    static_refs: tuple[MemberRef, ...] = ()
    dynamic_literal_refs: tuple[str, ...] = ()
    hidden_refs: tuple[str, ...] = ()
    is_test: bool = False

    def __post_init__(self) -> None:
        if not self.name:
            raise ParseError("class unit with empty name")
        names = [m.name for m in self.members]
        if len(names) != len(set(names)):
            raise ParseError(f"duplicate member names in unit {self.name}")

    def member_names(self) -> frozenset[str]:
        return frozenset(m.name for m in self.members)


@dataclass(frozen=True)
class Dependency:
    id: PackageId
    scope: Scope = Scope.COMPILE


@dataclass(frozen=True)
class Archive:
    id: PackageId
    units: Mapping[str, ClassUnit] = field(default_factory=dict)
    resources: Mapping[str, bytes] = field(default_factory=dict)
    declared_dependencies: tuple[Dependency, ...] = ()

    def __post_init__(self) -> None:
        for key, unit in self.units.items():
            if key != unit.name:
                raise ParseError(f"unit key {key!r} does not match unit name {unit.name!r} in {self.id}")

    def unit_names(self) -> frozenset[str]:
        return frozenset(self.units)


@dataclass(frozen=True)
class ChecksumCheck:
    dep: PackageId
    expected: str
    algorithm: str = "SHA-256"

    def __post_init__(self) -> None:
        if self.algorithm != "SHA-256":
            raise ConfigError(f"unsupported checksum algorithm {self.algorithm!r}")


@dataclass(frozen=True)
class RequireUnitCheck:
    unit: str


BuildCheck = Union[ChecksumCheck, RequireUnitCheck]


@dataclass(frozen=True)
class ProjectManifest:
    id: PackageId
    dependencies: tuple[Dependency, ...] = ()
    entry_points: Optional[tuple[str, ...]] = None
    build_checks: tuple[BuildCheck, ...] = ()
    ignore_dependencies: tuple[PackageId, ...] = ()
    pins: Mapping[PackageId, PackageId] = field(default_factory=dict)

    def __post_init__(self) -> None:
        seen: set[tuple[str, str]] = set()
        for dep in self.dependencies:
            if dep.id.key in seen:
                raise ConfigError(f"duplicate direct dependency {dep.id.group}:{dep.id.artifact} in {self.id}")
            seen.add(dep.id.key)
        for original, replacement in self.pins.items():
            if original == replacement:
                raise ConfigError(f"pin for {original} points at itself")
