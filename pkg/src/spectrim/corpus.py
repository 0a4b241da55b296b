"""Synthetic projects and repositories with known ground truth.

A corpus is described by a list of :class:`DepPlan` entries saying how many
units each dependency has and how many of them the project reaches. The
generator wires static references so that exactly those units are reachable,
then optionally poisons some dependencies so that their specialization fails
the build in a chosen way.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from spectrim.codec import dumps
from spectrim.errors import CorpusSpecError
from spectrim.model import (
    Archive,
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
from spectrim.project import write_project
from spectrim.repository import Repository, compute_checksum

POISON_CHECKSUM = "checksum"
POISON_REQUIRE_UNIT = "requireUnit"
POISON_HIDDEN = "hidden"
POISON_TEST_LITERAL = "testLiteral"
COMPILE_POISONS = (POISON_CHECKSUM, POISON_REQUIRE_UNIT)
TEST_POISONS = (POISON_HIDDEN, POISON_TEST_LITERAL)

PROJECT_DIR = "project"
REPOSITORY_DIR = "repository"

_MEMBER_KINDS = (MemberKind.METHOD, MemberKind.METHOD, MemberKind.FIELD, MemberKind.ANNOTATION)


@dataclass
class DepPlan:
    id: PackageId
    units: int
    reachable: int = 0
    scope: Scope = Scope.COMPILE
    parent: Optional[PackageId] = None
    poison: Optional[str] = None
    resources: int = 0
    # declared but mediated away because a nearer declaration wins
    extra_declared: tuple[PackageId, ...] = ()

    @property
    def bloated(self) -> bool:
        return self.scope is Scope.COMPILE and self.reachable == 0

    @property
    def totally_used(self) -> bool:
        return self.scope is Scope.COMPILE and self.units > 0 and self.reachable == self.units


@dataclass
class CorpusPlan:
    project_id: PackageId
    project_units: int
    test_units: int
    deps: list[DepPlan]
    seed: int = 0
    literal_link_fraction: float = 0.1


@dataclass
class CorpusSpec:
    seed: int = 0
    dep_count: int = 4
    units_per_dep: tuple[int, int] = (4, 20)
    usage_density: float = 0.3
    bloated_fraction: float = 0.0
    hidden_ref_count: int = 0
    build_check_count: int = 0
    build_check_kind: str = POISON_CHECKSUM
    tud_count: int = 0
    project_units: int = 8
    test_units: int = 2
    test_dep_count: int = 1
    transitive_fraction: float = 0.3

    @classmethod
    def from_json(cls, obj: dict) -> "CorpusSpec":
        known = {f for f in cls.__dataclass_fields__}
        snake = {_snake(k): v for k, v in obj.items()}
        unknown = set(snake) - known
        if unknown:
            raise CorpusSpecError(f"unknown corpus fields {sorted(unknown)}")
        if "units_per_dep" in snake:
            snake["units_per_dep"] = tuple(snake["units_per_dep"])
        return cls(**snake)

    def to_json(self) -> dict:
        return {_camel(k): (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()}


def _snake(name: str) -> str:
    return "".join("_" + c.lower() if c.isupper() else c for c in name)


def _camel(name: str) -> str:
    head, *rest = name.split("_")
    return head + "".join(p.capitalize() for p in rest)


@dataclass
class GroundTruth:
    project_units: int
    cd_units: int
    bloated: list[str]
    non_bloated: list[str]
    totally_used: list[str]
    reachable_counts: dict[str, int]
    unit_counts: dict[str, int]
    bloated_removed_units: int
    specialized_removed_units: int
    tree_kind: str
    reverted: dict[str, str]
    specialized: list[str]

    def to_json(self) -> dict:
        return {_camel(k): v for k, v in asdict(self).items()}

    @classmethod
    def from_json(cls, obj: dict) -> "GroundTruth":
        return cls(**{_snake(k): v for k, v in obj.items()})


@dataclass
class GeneratedCorpus:
    project_dir: Path
    repo: Repository
    ground_truth: GroundTruth
    plan: CorpusPlan = field(repr=False, default=None)


class _Draft:
    __slots__ = ("name", "members", "static", "literal", "hidden", "is_test")

    def __init__(self, name: str, members: list[Member], is_test: bool = False):
        self.name = name
        self.members = members
        self.static: list[MemberRef] = []
        self.literal: list[str] = []
        self.hidden: list[str] = []
        self.is_test = is_test

    def freeze(self) -> ClassUnit:
        return ClassUnit(
            name=self.name,
            members=tuple(self.members),
            static_refs=tuple(dict.fromkeys(self.static)),
            dynamic_literal_refs=tuple(dict.fromkeys(self.literal)),
            hidden_refs=tuple(dict.fromkeys(self.hidden)),
            is_test=self.is_test,
        )


def _package(pid: PackageId) -> str:
    clean = lambda s: "".join(c if c.isalnum() else "_" for c in s)
    return f"{clean(pid.group)}.{clean(pid.artifact)}"


def _new_draft(rng: random.Random, name: str, is_test: bool = False) -> _Draft:
    count = rng.randint(1, 3)
    members = [Member(f"m{i}", rng.choice(_MEMBER_KINDS)) for i in range(count)]
    return _Draft(name, members, is_test)


def _ref(rng: random.Random, target: _Draft) -> MemberRef:
    if rng.random() < 0.2:
        return MemberRef(target.name)
    m = rng.choice(target.members)
    return MemberRef(target.name, m.name, m.kind)


def _link(rng: random.Random, source: _Draft, target: _Draft, literal_fraction: float) -> None:
    if rng.random() < literal_fraction:
        source.literal.append(target.name)
    else:
        source.static.append(_ref(rng, target))


def ground_truth_for(plan: CorpusPlan) -> GroundTruth:
    compile_deps = [d for d in plan.deps if d.scope is Scope.COMPILE]
    reverted = {}
    for d in compile_deps:
        if d.poison in COMPILE_POISONS:
            reverted[str(d.id)] = "revertedCompileError"
        elif d.poison in TEST_POISONS:
            reverted[str(d.id)] = "revertedTestFailure"
    candidates = [d for d in compile_deps if not d.bloated and not d.totally_used]
    specialized = [d for d in candidates if str(d.id) not in reverted]
    return GroundTruth(
        project_units=plan.project_units,
        cd_units=sum(d.units for d in compile_deps),
        bloated=sorted(str(d.id) for d in compile_deps if d.bloated),
        non_bloated=sorted(str(d.id) for d in compile_deps if not d.bloated),
        totally_used=sorted(str(d.id) for d in compile_deps if d.totally_used),
        reachable_counts={str(d.id): d.reachable for d in compile_deps},
        unit_counts={str(d.id): d.units for d in compile_deps},
        bloated_removed_units=sum(d.units for d in compile_deps if d.bloated),
        specialized_removed_units=sum(d.units - d.reachable for d in specialized),
        tree_kind="PST" if reverted else "TST",
        reverted=reverted,
        specialized=sorted(str(d.id) for d in specialized),
    )


def _validate_plan(plan: CorpusPlan) -> None:
    ids = {d.id for d in plan.deps}
    keys = [d.id.key for d in plan.deps]
    if len(keys) != len(set(keys)):
        raise CorpusSpecError("two planned dependencies share group:artifact")
    by_id = {d.id: d for d in plan.deps}
    seen: set[PackageId] = set()
    for d in plan.deps:
        if d.units < 0 or not 0 <= d.reachable <= d.units:
            raise CorpusSpecError(f"{d.id}: reachable count {d.reachable} outside [0, {d.units}]")
        if d.parent is not None:
            if d.parent not in ids:
                raise CorpusSpecError(f"{d.id}: unknown parent {d.parent}")
            if d.parent not in seen:
                raise CorpusSpecError(f"{d.id}: parent {d.parent} must be planned first")
            parent = by_id[d.parent]
            if parent.scope is not d.scope:
                raise CorpusSpecError(f"{d.id}: scope differs from parent {d.parent}")
            if d.scope is Scope.COMPILE and parent.bloated != d.bloated:
                raise CorpusSpecError(f"{d.id}: bloated and used dependencies cannot be nested")
        if d.poison is not None:
            if d.scope is not Scope.COMPILE or d.bloated or d.totally_used:
                raise CorpusSpecError(f"{d.id}: only partially used compile dependencies can be poisoned")
            if d.poison not in COMPILE_POISONS + TEST_POISONS:
                raise CorpusSpecError(f"{d.id}: unknown poison {d.poison!r}")
        seen.add(d.id)
    if plan.project_units <= 0 and any(not d.bloated for d in plan.deps if d.scope is Scope.COMPILE):
        raise CorpusSpecError("used dependencies need at least one project unit to reference them")


def materialize(plan: CorpusPlan, out_dir) -> GeneratedCorpus:
    """Write the planned project and repository under ``out_dir``."""
    _validate_plan(plan)
    rng = random.Random(plan.seed)
    out_dir = Path(out_dir)
    project_dir = out_dir / PROJECT_DIR
    repo = Repository(out_dir / REPOSITORY_DIR)
    lit = plan.literal_link_fraction

    proj_pkg = _package(plan.project_id)
    src = [_new_draft(rng, f"{proj_pkg}.P{i:04d}") for i in range(plan.project_units)]
    tests = [_new_draft(rng, f"{proj_pkg}.T{i:04d}Test", is_test=True) for i in range(plan.test_units)]
    for i in range(1, len(src)):
        if rng.random() < 0.5:
            src[i].static.append(_ref(rng, src[rng.randrange(i)]))
    for t in tests:
        for target in rng.sample(src, min(len(src), rng.randint(1, 3))):
            t.static.append(_ref(rng, target))

    drafts: dict[PackageId, list[_Draft]] = {}
    reachable: dict[PackageId, list[_Draft]] = {}
    unreachable: dict[PackageId, list[_Draft]] = {}
    for d in plan.deps:
        pkg = _package(d.id)
        units = [_new_draft(rng, f"{pkg}.C{i:04d}") for i in range(d.units)]
        drafts[d.id] = units
        order = list(units)
        rng.shuffle(order)
        if d.scope is Scope.COMPILE:
            reachable[d.id] = order[: d.reachable]
            unreachable[d.id] = order[d.reachable:]
        else:
            reachable[d.id] = []
            unreachable[d.id] = order

    for d in plan.deps:
        units = drafts[d.id]
        if d.scope is not Scope.COMPILE:
            for i, u in enumerate(units):
                if i and rng.random() < 0.6:
                    u.static.append(_ref(rng, units[rng.randrange(i)]))
                if d.parent is not None and rng.random() < 0.3 and drafts[d.parent]:
                    rng.choice(drafts[d.parent]).static.append(_ref(rng, u))
            for t in tests:
                if units:
                    t.static.append(_ref(rng, rng.choice(units)))
            continue
        if d.bloated:
            for i, u in enumerate(units):
                if i and rng.random() < 0.6:
                    u.static.append(_ref(rng, units[rng.randrange(i)]))
            if d.parent is not None and units and drafts[d.parent]:
                rng.choice(drafts[d.parent]).static.append(_ref(rng, rng.choice(units)))
            continue
        used = reachable[d.id]
        for i, u in enumerate(used):
            if i == 0 or rng.random() < 0.1:
                if d.parent is None or rng.random() < 0.25:
                    _link(rng, rng.choice(src), u, lit)
                else:
                    _link(rng, rng.choice(reachable[d.parent]), u, lit)
            else:
                _link(rng, used[rng.randrange(i)], u, lit)
        pool = used + unreachable[d.id]
        for u in unreachable[d.id]:
            for _ in range(rng.randint(0, 2)):
                target = rng.choice(pool)
                if target is not u:
                    u.static.append(_ref(rng, target))
            if rng.random() < 0.1:
                u.literal.append(rng.choice(pool).name)

    checks = []
    archives: dict[PackageId, Archive] = {}
    children: dict[PackageId, list[DepPlan]] = {}
    for d in plan.deps:
        if d.parent is not None:
            children.setdefault(d.parent, []).append(d)
    for d in plan.deps:
        declared = [Dependency(c.id, Scope.COMPILE) for c in children.get(d.id, [])]
        declared += [Dependency(x, Scope.COMPILE) for x in d.extra_declared]
        resources = {f"META-INF/res{i}.txt": f"{d.id} resource {i}\n".encode() for i in range(d.resources)}
        if d.poison == POISON_HIDDEN:
            rng.choice(tests).hidden.append(rng.choice(unreachable[d.id]).name)
        elif d.poison == POISON_TEST_LITERAL:
            rng.choice(tests).literal.append(rng.choice(unreachable[d.id]).name)
        elif d.poison == POISON_REQUIRE_UNIT:
            checks.append(RequireUnitCheck(rng.choice(unreachable[d.id]).name))
        units = {u.name: u.freeze() for u in drafts[d.id]}
        archives[d.id] = Archive(d.id, units, resources, tuple(declared))
        if d.poison == POISON_CHECKSUM:
            checks.append(ChecksumCheck(d.id, compute_checksum(archives[d.id]).checksum))

    for archive in archives.values():
        repo.store(archive)
    manifest = ProjectManifest(
        id=plan.project_id,
        dependencies=tuple(Dependency(d.id, d.scope) for d in plan.deps if d.parent is None),
        build_checks=tuple(checks),
    )
    write_project(project_dir, manifest, [u.freeze() for u in src], [t.freeze() for t in tests])
    truth = ground_truth_for(plan)
    (out_dir / "ground-truth.json").write_bytes(dumps(truth.to_json(), indent=2))
    return GeneratedCorpus(project_dir, repo, truth, plan)


def plan_from_spec(spec: CorpusSpec) -> CorpusPlan:
    lo, hi = spec.units_per_dep
    for name in ("usage_density", "bloated_fraction", "transitive_fraction"):
        value = getattr(spec, name)
        if not 0.0 <= value <= 1.0:
            raise CorpusSpecError(f"{name} must lie in [0, 1], got {value}")
    if spec.dep_count < 0 or lo < 0 or hi < lo:
        raise CorpusSpecError(f"invalid dependency sizes: count={spec.dep_count}, units={spec.units_per_dep}")
    kind = spec.build_check_kind
    if kind not in COMPILE_POISONS + ("mixed",):
        raise CorpusSpecError(f"unknown build check kind {kind!r}")
    rng = random.Random(spec.seed)

    n_bloated = math.floor(spec.bloated_fraction * spec.dep_count + 0.5)
    bloated_idx = set(rng.sample(range(spec.dep_count), n_bloated))
    used_idx = [i for i in range(spec.dep_count) if i not in bloated_idx]
    if spec.tud_count > len(used_idx):
        raise CorpusSpecError("more totally used dependencies requested than used dependencies")
    tud_idx = set(rng.sample(used_idx, spec.tud_count))

    deps: list[DepPlan] = []
    group = f"gen.seed{spec.seed}"
    for i in range(spec.dep_count):
        pid = PackageId(group, f"lib{i}", f"1.{i}.0")
        units = rng.randint(lo, hi)
        if i in bloated_idx:
            reach = 0
        elif units == 0:
            raise CorpusSpecError(f"lib{i} must be used but has zero units; raise units_per_dep")
        elif i in tud_idx:
            reach = units
        else:
            reach = min(units, max(1, math.floor(spec.usage_density * units + 0.5)))
            if reach == units and units > 1 and spec.usage_density < 1.0:
                reach = units - 1
        parent = None
        same_kind = [p for p in deps if p.scope is Scope.COMPILE and p.bloated == (reach == 0)]
        if same_kind and rng.random() < spec.transitive_fraction:
            parent = rng.choice(same_kind).id
        deps.append(DepPlan(pid, units, reach, parent=parent, resources=rng.randint(0, 2)))

    candidates = [d for d in deps if not d.bloated and not d.totally_used]
    wanted = spec.hidden_ref_count + spec.build_check_count
    if wanted > len(candidates):
        raise CorpusSpecError(f"{wanted} poisoned dependencies requested but only {len(candidates)} are partially used")
    poisoned = rng.sample(candidates, wanted)
    for d in poisoned[: spec.hidden_ref_count]:
        d.poison = POISON_HIDDEN
    for j, d in enumerate(poisoned[spec.hidden_ref_count:]):
        d.poison = kind if kind != "mixed" else COMPILE_POISONS[j % 2]

    for j in range(spec.test_dep_count):
        deps.append(DepPlan(PackageId(f"{group}.test", f"testlib{j}", "1.0"), rng.randint(2, 6), scope=Scope.TEST))
    return CorpusPlan(
        project_id=PackageId(group, "app", "1.0"),
        project_units=spec.project_units,
        test_units=spec.test_units,
        deps=deps,
        seed=spec.seed,
    )


def generate_corpus(spec: CorpusSpec, out_dir) -> GeneratedCorpus:
    corpus = materialize(plan_from_spec(spec), out_dir)
    (Path(out_dir) / "corpus.json").write_bytes(dumps(spec.to_json(), indent=2))
    return corpus


def load_spec(path) -> CorpusSpec:
    return CorpusSpec.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def jacop_plan() -> CorpusPlan:
    """Dependency tree shaped like jacop 4.10.0: 833 project classes, 9 compile and 2 test dependencies."""
    c = parse_coordinates
    compiler = c("org.scala-lang:scala-compiler:2.13.0")
    library = c("org.scala-lang:scala-library:2.13.0")
    reflect = c("org.scala-lang:scala-reflect:2.13.0")
    parsers = c("org.scala-lang.modules:scala-parser-combinators_2.13:1.1.2")
    jline = c("org.jline:jline:3.21.0")
    jansi = c("org.fusesource.jansi:jansi:2.4.0")
    slf4j_log4j = c("org.slf4j:slf4j-log4j12:1.7.36")
    slf4j_api = c("org.slf4j:slf4j-api:1.7.36")
    log4j = c("log4j:log4j:1.2.17")
    junit = c("junit:junit:4.13.2")
    hamcrest = c("org.hamcrest:hamcrest-core:1.3")
    deps = [
        DepPlan(compiler, 2984, 2, resources=2, extra_declared=(library,)),
        DepPlan(library, 2596, 1400, resources=1),
        # smallest used dependency; an integrity check on it fails once it is trimmed
        DepPlan(parsers, 168, 40, poison=POISON_CHECKSUM, extra_declared=(library,)),
        DepPlan(jline, 171, 0),
        DepPlan(slf4j_log4j, 9, 0),
        DepPlan(junit, 30, scope=Scope.TEST),
        DepPlan(reflect, 2235, 709, parent=compiler, extra_declared=(library,)),
        DepPlan(jansi, 81, 0, parent=jline),
        DepPlan(slf4j_api, 34, 0, parent=slf4j_log4j),
        DepPlan(log4j, 209, 0, parent=slf4j_log4j),
        DepPlan(hamcrest, 12, scope=Scope.TEST, parent=junit),
    ]
    return CorpusPlan(c("org.jacop:jacop:4.10.0"), 833, 6, deps, seed=4100)


def commons_validator_plan() -> CorpusPlan:
    """Four used dependencies, 780 classes of which 155 are needed by 64 project classes."""
    c = parse_coordinates
    beanutils = c("commons-beanutils:commons-beanutils:1.9.4")
    deps = [
        DepPlan(beanutils, 140, 80, resources=1),
        DepPlan(c("commons-digester:commons-digester:2.1"), 150, 55),
        DepPlan(c("commons-logging:commons-logging:1.2"), 30, 13),
        DepPlan(c("junit:junit:4.13.2"), 30, scope=Scope.TEST),
        DepPlan(c("commons-collections:commons-collections:3.2.2"), 460, 7, parent=beanutils),
    ]
    return CorpusPlan(c("commons-validator:commons-validator:1.8.0"), 64, 4, deps, seed=180)


def demo_fixture(out_dir) -> GeneratedCorpus:
    """The smallest interesting project: one used, one bloated and one test dependency.

    ``Main`` calls ``x.X1.run``; ``x.X2`` and all of liby are dead weight.
    """
    out_dir = Path(out_dir)
    repo = Repository(out_dir / REPOSITORY_DIR)
    method = MemberKind.METHOD
    libx = Archive(
        PackageId("libx", "libx", "1.0"),
        {
            "x.X1": ClassUnit("x.X1", (Member("run", method),)),
            "x.X2": ClassUnit("x.X2", (Member("idle", method),), static_refs=(MemberRef("x.X1", "run", method),)),
        },
        {"META-INF/libx.properties": b"name=libx\n"},
    )
    liby = Archive(PackageId("liby", "liby", "1.0"), {"y.Y1": ClassUnit("y.Y1", (Member("noop", method),))})
    tst = Archive(PackageId("tst", "tst", "1.0"), {"t.Assert": ClassUnit("t.Assert", (Member("check", method),))})
    for archive in (libx, liby, tst):
        repo.store(archive)
    main = ClassUnit("Main", (Member("main", method),), static_refs=(MemberRef("x.X1", "run", method),))
    test = ClassUnit(
        "MainTest",
        (Member("testMain", method),),
        static_refs=(MemberRef("Main", "main", method), MemberRef("t.Assert", "check", method)),
        is_test=True,
    )
    manifest = ProjectManifest(
        id=PackageId("demo", "app", "1.0"),
        dependencies=(
            Dependency(libx.id, Scope.COMPILE),
            Dependency(liby.id, Scope.COMPILE),
            Dependency(tst.id, Scope.TEST),
        ),
    )
    project_dir = write_project(out_dir / PROJECT_DIR, manifest, [main], [test])
    plan = CorpusPlan(
        manifest.id,
        1,
        1,
        [DepPlan(libx.id, 2, 1, resources=1), DepPlan(liby.id, 1, 0), DepPlan(tst.id, 1, scope=Scope.TEST)],
    )
    truth = ground_truth_for(plan)
    (out_dir / "ground-truth.json").write_bytes(dumps(truth.to_json(), indent=2))
    return GeneratedCorpus(project_dir, repo, truth, plan)


PRESETS = {
    "jacop": jacop_plan,
    "commons-validator": commons_validator_plan,
}

FIXTURES = {"demo": demo_fixture}


def replicate_jacop(out_dir) -> GeneratedCorpus:
    return materialize(jacop_plan(), out_dir)


def generate_preset(name: str, out_dir) -> GeneratedCorpus:
    if name in FIXTURES:
        return FIXTURES[name](out_dir)
    try:
        factory = PRESETS[name]
    except KeyError:
        raise CorpusSpecError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return materialize(factory(), out_dir)
