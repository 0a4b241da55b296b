from fractions import Fraction

from hypothesis import given, settings, strategies as st

from oracle import OracleGraph, bfs_reachable
from spectrim import _reach
from spectrim.codec import decode_manifest, encode_manifest
from spectrim.model import Archive, ClassUnit, Dependency, PackageId, ProjectManifest
from spectrim.report import compute_ratios, round_half_up
from spectrim.repository import compute_checksum, parse_archive, serialize_archive
from spectrim.specializer import specialize_dependency, specialized_coordinates

from array import array

ident = st.text("abcdefghijklmnopqrstuvwxyz0123456789.-_", min_size=1, max_size=12)
coords = st.builds(PackageId, ident, ident, ident)


@st.composite
def archives(draw):
    names = draw(st.lists(ident, min_size=1, max_size=12, unique=True))
    resources = draw(st.dictionaries(ident, st.binary(max_size=20), max_size=3))
    deps = draw(st.lists(coords, max_size=3, unique_by=lambda p: p.key))
    return Archive(draw(coords), {n: ClassUnit(n) for n in names}, resources, tuple(Dependency(d) for d in deps))


@given(archives())
def test_serialization_round_trip(archive):
    data = serialize_archive(archive)
    again = parse_archive(data)
    assert again == archive
    assert serialize_archive(again) == data


@given(archives(), st.data())
def test_specialization_properties(archive, data):
    keep = data.draw(st.sets(st.sampled_from(sorted(archive.units)), min_size=1))
    stripped, art = specialize_dependency(archive, keep)
    assert set(stripped.units) == keep
    assert stripped.resources == archive.resources
    assert stripped.declared_dependencies == archive.declared_dependencies
    assert art.kept_units + art.removed_units == len(archive.units)
    assert specialize_dependency(stripped, keep)[0] == stripped
    if keep == set(archive.units):
        assert stripped.units == archive.units
    else:
        assert compute_checksum(stripped) != compute_checksum(archive)


@given(coords)
def test_specialized_coordinates_idempotent(pid):
    once = specialized_coordinates(pid)
    assert specialized_coordinates(once) == once
    assert (once.artifact, once.version) == (pid.artifact, pid.version)


@given(st.integers(1, 10_000), st.integers(0, 10_000), st.data())
def test_ratio_monotonicity(project, cd, data):
    debloat = data.draw(st.integers(0, cd))
    spec = data.draw(st.integers(0, cd - debloat))
    r = compute_ratios(project, cd, debloat, spec)
    assert r.ratio_s <= r.ratio_d <= r.ratio_o


@given(st.fractions(min_value=0, max_value=1000))
def test_rounding_is_within_half_step(value):
    shown = Fraction(round_half_up(value))
    assert abs(shown - value) <= Fraction(1, 20)


@given(coords, st.lists(coords, max_size=4, unique_by=lambda p: p.key))
def test_manifest_codec(root, deps):
    m = ProjectManifest(root, tuple(Dependency(d) for d in deps if d.key != root.key))
    assert decode_manifest(encode_manifest(m)) == m


@settings(max_examples=60)
@given(st.integers(1, 200).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.lists(st.integers(0, n - 1), max_size=4), min_size=n, max_size=n),
    st.sets(st.integers(0, n - 1), max_size=5),
)))
def test_kernel_matches_bfs(case):
    n, adjacency, entries = case
    indptr, indices = array("q", [0]), array("q")
    for targets in adjacency:
        indices.extend(targets)
        indptr.append(len(indices))
    expected = bfs_reachable(OracleGraph(dict(enumerate(adjacency)), set(entries)))
    for kernel in _reach.available_kernels().values():
        seen = kernel(indptr, indices, array("q", sorted(entries)))
        assert {i for i in range(n) if seen[i]} == expected
