import pytest

from oracle import OracleGraph, bfs_reachable, oracle_reachable_units
from spectrim.callgraph import build_call_graph, classify_dependencies, reachable_units
from spectrim.errors import ConfigError, NotInGraphError
from spectrim.model import Archive, ClassUnit, Member, MemberKind, MemberRef, PackageId, parse_coordinates as c
from spectrim.resolver import classpath, resolve_tree

LIBX = c("libx:libx:1.0")
LIBY = c("liby:liby:1.0")
M = MemberKind.METHOD


def demo_graph(project, repo):
    tree = resolve_tree(project.manifest, repo)
    archives = [tree.nodes[p].archive for p in classpath(tree, "compile")]
    return tree, archives, build_call_graph(project.src_units, archives)


def test_demo_edges(demo_project, demo):
    _, _, cg = demo_graph(demo_project, demo.repo)
    assert (MemberRef("Main"), MemberRef("x.X1", "run", M)) in cg.edges
    # only X2's own members point at it
    assert all(src.unit == "x.X2" for src, dst in cg.edges if dst.unit == "x.X2")
    assert cg.entry_set == {MemberRef("Main"), MemberRef("Main", "main", M)}


def test_demo_reachability(demo_project, demo):
    tree, archives, cg = demo_graph(demo_project, demo.repo)
    assert reachable_units(cg, LIBX) == {"x.X1"}
    assert reachable_units(cg, LIBY) == set()
    expected = oracle_reachable_units(demo_project.src_units, archives)
    for pid in (LIBX, LIBY):
        assert reachable_units(cg, pid) == expected[pid]
    cls = classify_dependencies(cg, tree)
    assert cls.bloated == {LIBY} and cls.non_bloated == {LIBX} and cls.totally_used == set()


def test_not_in_graph(demo_project, demo):
    _, _, cg = demo_graph(demo_project, demo.repo)
    with pytest.raises(NotInGraphError):
        reachable_units(cg, c("tst:tst:1.0"))


def _lib(units):
    return Archive(c("l:l:1"), {u.name: u for u in units})


def test_literal_exact_match_adds_edge():
    main = ClassUnit("Main", (Member("main", M),), dynamic_literal_refs=("x.X2", "x.X", "not.there"))
    lib = _lib([ClassUnit("x.X1"), ClassUnit("x.X2")])
    cg = build_call_graph([main], [lib])
    assert reachable_units(cg, lib.id) == {"x.X2"}
    assert cg.diagnostics == []


def test_hidden_refs_add_no_edge():
    main = ClassUnit("Main", (Member("main", M),), hidden_refs=("x.X1",))
    lib = _lib([ClassUnit("x.X1")])
    assert reachable_units(build_call_graph([main], [lib]), lib.id) == set()


def test_reaching_a_class_does_not_reach_its_other_members():
    lib = _lib([
        ClassUnit("x.A", (Member("used", M), Member("unused", M)), static_refs=(MemberRef("x.B"),)),
        ClassUnit("x.B"),
        ClassUnit("x.C", (Member("m", M),)),
    ])
    main = ClassUnit("Main", static_refs=(MemberRef("x.A", "used", M),))
    cg = build_call_graph([main], [lib])
    assert not cg.is_reachable(MemberRef("x.A", "unused", M))
    assert reachable_units(cg, lib.id) == {"x.A", "x.B"}


def test_unknown_references_become_diagnostics():
    main = ClassUnit("Main", static_refs=(MemberRef("nope.N"), MemberRef("x.A", "ghost", M)))
    lib = _lib([ClassUnit("x.A")])
    cg = build_call_graph([main], [lib])
    assert [d.reason for d in cg.diagnostics] == ["unknown unit", "unknown member"]
    assert reachable_units(cg, lib.id) == {"x.A"}


def test_entry_points_restrict_roots():
    lib = _lib([ClassUnit("x.A"), ClassUnit("x.B")])
    a = ClassUnit("App", static_refs=(MemberRef("x.A"),))
    b = ClassUnit("Tool", static_refs=(MemberRef("x.B"),))
    cg = build_call_graph([a, b], [lib], entry_points=["App"])
    assert reachable_units(cg, lib.id) == {"x.A"}
    with pytest.raises(ConfigError):
        build_call_graph([a, b], [lib], entry_points=["Missing"])


def test_empty_project_reaches_nothing():
    lib = _lib([ClassUnit("x.A")])
    assert reachable_units(build_call_graph([], [lib]), lib.id) == set()


def test_ignored_dependency_is_totally_used(demo_project, demo):
    tree, _, cg = demo_graph(demo_project, demo.repo)
    cls = classify_dependencies(cg, tree, [LIBY])
    assert LIBY in cls.ignored and LIBY in cls.totally_used and LIBY not in cls.bloated


def test_oracle_bfs_basics():
    assert bfs_reachable(OracleGraph({"a": ["b"], "b": ["c"]}, {"a"})) == {"a", "b", "c"}
    assert bfs_reachable(OracleGraph({"a": ["b"]}, set())) == set()
