"""Member-level static reachability graph and dependency classification.

Every unit contributes one class node plus one node per member. A member
points at its owning class node; a class node points at everything the unit
references (static references and string literals naming an existing unit).
A unit is *reachable* when its class node is reached from the entry set,
which happens as soon as any of its members is.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from spectrim import _reach
from spectrim.errors import ConfigError, NotInGraphError
from spectrim.model import Archive, ClassUnit, MemberRef, PackageId, Scope
from spectrim.resolver import ResolvedTree


@dataclass(frozen=True)
class Unresolved:
    source_unit: str
    target: str
    reason: str


class CallGraph:
    def __init__(
        self,
        nodes: list[MemberRef],
        adjacency: list[list[int]],
        entries: list[int],
        unit_owner: dict[str, Optional[PackageId]],
        owner_units: dict[PackageId, list[str]],
        diagnostics: list[Unresolved],
    ):
        self.node_list = nodes
        self.index = {n: i for i, n in enumerate(nodes)}
        self.entry_indices = entries
        self.unit_owner = unit_owner
        self.owner_units = owner_units
        self.diagnostics = diagnostics
        indptr = array("q", [0])
        indices = array("q")
        for targets in adjacency:
            indices.extend(targets)
            indptr.append(len(indices))
        self.indptr = indptr
        self.indices = indices
        self._reached: Optional[bytearray] = None

    @property
    def nodes(self) -> frozenset[MemberRef]:
        return frozenset(self.node_list)

    @property
    def entry_set(self) -> frozenset[MemberRef]:
        return frozenset(self.node_list[i] for i in self.entry_indices)

    @property
    def edges(self) -> list[tuple[MemberRef, MemberRef]]:
        out = []
        for v in range(len(self.node_list)):
            for i in range(self.indptr[v], self.indptr[v + 1]):
                out.append((self.node_list[v], self.node_list[self.indices[i]]))
        return out

    def successors(self, node: MemberRef) -> list[MemberRef]:
        v = self.index[node]
        return [self.node_list[self.indices[i]] for i in range(self.indptr[v], self.indptr[v + 1])]

    def reached(self) -> bytearray:
        if self._reached is None:
            self._reached = _reach.reach(self.indptr, self.indices, array("q", self.entry_indices))
        return self._reached

    def is_reachable(self, node: MemberRef) -> bool:
        return bool(self.reached()[self.index[node]])

    def reachable_unit_names(self) -> set[str]:
        seen = self.reached()
        return {n.unit for i, n in enumerate(self.node_list) if n.member is None and seen[i]}


def _class_node(unit: str) -> MemberRef:
    return MemberRef(unit)


def build_call_graph(
    project_units: Iterable[ClassUnit],
    classpath_archives: Sequence[Archive],
    entry_points: Optional[Sequence[str]] = None,
) -> CallGraph:
    units: dict[str, ClassUnit] = {}
    owner: dict[str, Optional[PackageId]] = {}
    owner_units: dict[PackageId, list[str]] = {}
    diagnostics: list[Unresolved] = []

    project_units = sorted(project_units, key=lambda u: u.name)
    for unit in project_units:
        units[unit.name] = unit
        owner[unit.name] = None
    for archive in classpath_archives:
        owned = owner_units.setdefault(archive.id, [])
        for name in sorted(archive.units):
            if name in units:
                where = "project" if owner[name] is None else str(owner[name])
                diagnostics.append(Unresolved(name, str(archive.id), f"shadowed by {where}"))
                continue
            units[name] = archive.units[name]
            owner[name] = archive.id
            owned.append(name)

    nodes: list[MemberRef] = []
    index: dict[MemberRef, int] = {}

    def add(node: MemberRef) -> int:
        i = index.get(node)
        if i is None:
            i = index[node] = len(nodes)
            nodes.append(node)
        return i

    member_index: dict[tuple[str, str], int] = {}
    for name, unit in units.items():
        add(_class_node(name))
        for m in unit.members:
            member_index[(name, m.name)] = add(MemberRef(name, m.name, m.kind))

    adjacency: list[list[int]] = [[] for _ in nodes]
    for name, unit in units.items():
        cls = index[_class_node(name)]
        for m in unit.members:
            adjacency[member_index[(name, m.name)]].append(cls)
        out = adjacency[cls]
        for ref in unit.static_refs:
            if ref.unit not in units:
                diagnostics.append(Unresolved(name, str(ref), "unknown unit"))
                continue
            if ref.member is None:
                out.append(index[_class_node(ref.unit)])
                continue
            target = member_index.get((ref.unit, ref.member))
            if target is None:
                diagnostics.append(Unresolved(name, str(ref), "unknown member"))
                target = index[_class_node(ref.unit)]
            out.append(target)
        for literal in unit.dynamic_literal_refs:
            if literal in units:
                out.append(index[_class_node(literal)])

    project_names = {u.name for u in project_units if not u.is_test}
    if entry_points is None:
        entry_units = sorted(project_names)
    else:
        for ep in entry_points:
            if ep not in project_names:
                raise ConfigError(f"entry point {ep!r} is not a project source unit")
        entry_units = list(dict.fromkeys(entry_points))
    entries: list[int] = []
    for name in entry_units:
        entries.append(index[_class_node(name)])
        entries.extend(member_index[(name, m.name)] for m in units[name].members)

    diagnostics.sort(key=lambda d: (d.source_unit, d.target, d.reason))
    return CallGraph(nodes, adjacency, entries, owner, owner_units, diagnostics)


def reachable_units(cg: CallGraph, dep: PackageId) -> set[str]:
    if dep not in cg.owner_units:
        raise NotInGraphError(f"{dep} is not on the analyzed classpath")
    seen = cg.reached()
    return {u for u in cg.owner_units[dep] if seen[cg.index[_class_node(u)]]}


@dataclass(frozen=True)
class DependencyClassification:
    bloated: frozenset[PackageId] = frozenset()
    non_bloated: frozenset[PackageId] = frozenset()
    totally_used: frozenset[PackageId] = frozenset()
    ignored: frozenset[PackageId] = frozenset()
    reachable_units: dict = field(default_factory=dict)
    unit_counts: dict = field(default_factory=dict)


def classify_dependencies(
    cg: CallGraph,
    tree: ResolvedTree,
    ignore_dependencies: Iterable[PackageId] = (),
) -> DependencyClassification:
    ignore = set(ignore_dependencies)
    bloated, non_bloated, totally_used, ignored = set(), set(), set(), set()
    reach: dict[PackageId, frozenset[str]] = {}
    counts: dict[PackageId, int] = {}
    for node in tree.nodes.values():
        if node.scope is not Scope.COMPILE:
            continue
        pid = node.id
        all_units = frozenset(node.archive.units)
        counts[pid] = len(all_units)
        if pid in ignore or node.original in ignore:
            ignored.add(pid)
            non_bloated.add(pid)
            totally_used.add(pid)
            reach[pid] = all_units
            continue
        used = frozenset(reachable_units(cg, pid)) if pid in cg.owner_units else frozenset()
        reach[pid] = used
        if not used:
            bloated.add(pid)
        else:
            non_bloated.add(pid)
            if used == all_units:
                totally_used.add(pid)
    return DependencyClassification(
        bloated=frozenset(bloated),
        non_bloated=frozenset(non_bloated),
        totally_used=frozenset(totally_used),
        ignored=frozenset(ignored),
        reachable_units=reach,
        unit_counts=counts,
    )
