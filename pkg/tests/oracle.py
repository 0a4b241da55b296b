"""Brute-force reference implementations used to cross-check the real code.

Nothing here shares code with the call graph or the tree search.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

from spectrim.buildcheck import full_build
from spectrim.treebuilder import build_tst_manifest

MAX_EXHAUSTIVE = 12


@dataclass
class OracleGraph:
    adjacency: dict = field(default_factory=dict)
    entries: set = field(default_factory=set)

    def __post_init__(self):
        nodes = set(self.adjacency)
        for targets in self.adjacency.values():
            nodes.update(targets)
        missing = set(self.entries) - nodes
        if missing:
            raise ValueError(f"entries not in graph: {sorted(missing)}")


def bfs_reachable(g: OracleGraph) -> set:
    seen = set(g.entries)
    queue = deque(g.entries)
    while queue:
        node = queue.popleft()
        for nxt in g.adjacency.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def unit_graph(project_units, archives, entry_points=None) -> OracleGraph:
    """Unit-level view of the raw references: a unit links to every existing unit it names.

    The first definition of a unit name wins, project units before archives.
    """
    units = {}
    for u in project_units:
        units.setdefault(u.name, u)
    for archive in archives:
        for name, u in archive.units.items():
            units.setdefault(name, u)
    adjacency = {}
    for name, u in units.items():
        targets = [r.unit for r in u.static_refs if r.unit in units]
        targets += [lit for lit in u.dynamic_literal_refs if lit in units]
        adjacency[name] = targets
    if entry_points is None:
        entries = {u.name for u in project_units if not u.is_test}
    else:
        entries = set(entry_points)
    return OracleGraph(adjacency, entries)


def oracle_reachable_units(project_units, archives, entry_points=None) -> dict:
    """Map each archive id to the set of its units the project reaches."""
    reached = bfs_reachable(unit_graph(project_units, archives, entry_points))
    owner = {u.name: None for u in project_units}
    out = {}
    for archive in archives:
        mine = set()
        for name in archive.units:
            if name not in owner:
                owner[name] = archive.id
                if name in reached:
                    mine.add(name)
        out[archive.id] = mine
    return out


def exhaustive_pst(project, debloated, artifacts, repo):
    """Largest set of artifacts whose joint pins still build; ties go to the lexicographically first."""
    if len(artifacts) > MAX_EXHAUSTIVE:
        raise ValueError(f"exhaustive search is limited to {MAX_EXHAUSTIVE} artifacts, got {len(artifacts)}")
    ordered = sorted(artifacts, key=lambda a: str(a.original_id))
    for size in range(len(ordered), -1, -1):
        for subset in combinations(ordered, size):
            manifest = build_tst_manifest(debloated, list(subset))
            if full_build(project.directory, manifest, repo, project=project).ok:
                return frozenset(a.original_id for a in subset)
    raise AssertionError("even the empty pin set fails to build")
