import pytest

from spectrim.codec import decode_manifest, decode_unit, encode_manifest, encode_unit
from spectrim.errors import ConfigError, ParseError
from spectrim.model import (
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
    render_coordinates,
)


def test_coordinates_round_trip():
    pid = parse_coordinates("org.slf4j:slf4j-api:1.7.36")
    assert pid == PackageId("org.slf4j", "slf4j-api", "1.7.36")
    assert render_coordinates(pid) == "org.slf4j:slf4j-api:1.7.36"
    assert pid.key == ("org.slf4j", "slf4j-api")


@pytest.mark.parametrize("text", ["", "a:b", "a:b:c:d", "a::1", ":b:1"])
def test_bad_coordinates(text):
    with pytest.raises(ParseError):
        parse_coordinates(text)


def test_scope_defaults_to_compile():
    assert Scope.parse(None) is Scope.COMPILE
    assert Scope.parse("test") is Scope.TEST


def test_member_ref_kinds():
    assert str(MemberRef("x.X1")) == "x.X1"
    assert str(MemberRef("x.X1", "run", MemberKind.METHOD)) == "x.X1#run"
    with pytest.raises(ParseError):
        MemberRef("x.X1", "run")  # class kind with a member
    with pytest.raises(ParseError):
        MemberRef("x.X1", None, MemberKind.FIELD)
    with pytest.raises(ParseError):
        Member("m", MemberKind.CLASS)


def test_duplicate_members_rejected():
    with pytest.raises(ParseError):
        ClassUnit("A", (Member("m", MemberKind.METHOD), Member("m", MemberKind.FIELD)))


def test_manifest_rejects_duplicate_direct_deps():
    with pytest.raises(ConfigError):
        ProjectManifest(
            PackageId("p", "p", "1"),
            (Dependency(PackageId("a", "a", "1")), Dependency(PackageId("a", "a", "2"))),
        )


def test_unit_codec_round_trip():
    unit = ClassUnit(
        "a.B",
        (Member("f", MemberKind.FIELD), Member("m", MemberKind.METHOD)),
        static_refs=(MemberRef("c.D"), MemberRef("c.D", "go", MemberKind.METHOD)),
        dynamic_literal_refs=("e.F",),
        hidden_refs=("g.H",),
        is_test=True,
    )
    assert decode_unit(encode_unit(unit)) == unit


def test_manifest_codec_round_trip():
    a = PackageId("a", "a", "1")
    m = ProjectManifest(
        PackageId("p", "p", "1"),
        (Dependency(a), Dependency(PackageId("t", "t", "1"), Scope.TEST)),
        entry_points=("Main",),
        build_checks=(ChecksumCheck(a, "0" * 64), RequireUnitCheck("a.A")),
        ignore_dependencies=(a,),
        pins={a: PackageId("deptrim.spl.a", "a", "1")},
    )
    obj = encode_manifest(m)
    assert obj["pins"] == [{"from": "a:a:1", "to": "deptrim.spl.a:a:1"}]
    assert decode_manifest(obj) == m


def test_manifest_missing_id():
    with pytest.raises(ParseError):
        decode_manifest({"dependencies": []})
