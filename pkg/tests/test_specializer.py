import pytest

from spectrim.callgraph import build_call_graph, classify_dependencies
from spectrim.errors import ConfigError, DeploymentError
from spectrim.model import Archive, ClassUnit, PackageId, parse_coordinates as c
from spectrim.repository import Repository, compute_checksum
from spectrim.resolver import classpath, resolve_tree
from spectrim.specializer import debloat_manifest, deploy_specialized, specialize_dependency, specialized_coordinates

LIBX = c("libx:libx:1.0")


def test_specialize_libx(demo):
    archive = demo.repo.lookup(LIBX)
    stripped, art = specialize_dependency(archive, {"x.X1"}, "deptrim.spl")
    assert stripped.id == c("deptrim.spl.libx:libx:1.0")
    assert list(stripped.units) == ["x.X1"]
    assert (art.kept_units, art.removed_units) == (1, 1)
    assert stripped.resources == archive.resources
    assert stripped.declared_dependencies == archive.declared_dependencies
    assert art.checksum == compute_checksum(stripped)


def test_totally_used_keeps_everything(demo):
    archive = demo.repo.lookup(LIBX)
    stripped, art = specialize_dependency(archive, archive.units)
    assert stripped.units == archive.units and art.removed_units == 0


def test_coordinates_are_idempotent():
    once = specialized_coordinates(LIBX)
    assert specialized_coordinates(once) == once
    assert specialized_coordinates(LIBX, "org.example.spl").group == "org.example.spl.libx"
    with pytest.raises(ConfigError):
        specialized_coordinates(LIBX, "")


def test_empty_or_unknown_reachable_set(demo):
    archive = demo.repo.lookup(LIBX)
    with pytest.raises(ConfigError):
        specialize_dependency(archive, set())
    with pytest.raises(ConfigError):
        specialize_dependency(archive, {"x.Nope"})


def test_debloat_drops_liby(demo_project, demo):
    tree = resolve_tree(demo_project.manifest, demo.repo)
    archives = [tree.nodes[p].archive for p in classpath(tree, "compile")]
    cls = classify_dependencies(build_call_graph(demo_project.src_units, archives), tree)
    debloated = debloat_manifest(demo_project.manifest, cls, tree)
    assert [str(d.id) for d in debloated.dependencies] == ["libx:libx:1.0", "tst:tst:1.0"]
    assert len(demo_project.manifest.dependencies) == 3  # original untouched


def test_debloat_keeps_direct_dep_with_used_child(tmp_path):
    from spectrim.model import Dependency, ProjectManifest, MemberRef

    repo = Repository(tmp_path)
    repo.store(Archive(c("g:leaf:1"), {"leaf.L": ClassUnit("leaf.L")}))
    repo.store(Archive(c("g:wrap:1"), {"wrap.W": ClassUnit("wrap.W")}, {}, (Dependency(c("g:leaf:1")),)))
    manifest = ProjectManifest(c("p:p:1"), (Dependency(c("g:wrap:1")),))
    tree = resolve_tree(manifest, repo)
    main = ClassUnit("Main", static_refs=(MemberRef("leaf.L"),))
    cls = classify_dependencies(build_call_graph([main], [n.archive for n in tree.compile_nodes()]), tree)
    assert cls.bloated == {c("g:wrap:1")}
    assert debloat_manifest(manifest, cls, tree) == manifest


def test_deploy_and_failure(tmp_path, demo):
    pair = specialize_dependency(demo.repo.lookup(LIBX), {"x.X1"})
    repo = Repository(tmp_path / "r")
    assert deploy_specialized(repo, [pair]) == [pair[1].specialized_id]
    assert repo.lookup(pair[1].specialized_id) == pair[0]
    blocker = tmp_path / "blocked"
    blocker.write_text("")
    with pytest.raises(DeploymentError) as info:
        deploy_specialized(Repository(blocker), [pair])
    assert info.value.coordinates == (pair[1].specialized_id,)
