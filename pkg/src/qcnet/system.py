"""Storage-network model: drives, chunks, users, and timeslot modes.

A physical storage network is a set of physical drives, each holding a
subset of the T file chunks and offering one or more service units.  Every
service unit becomes a *virtual drive* that can read one stored chunk per
timeslot and transmit it to a subset of the N users, subject to the active
traffic pattern.  A simultaneous set of deliveries is a *mode*; this module
decides mode validity and enumerates all valid modes by brute force.
"""

from __future__ import annotations

import enum
import hashlib
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

__all__ = [
    "TrafficPattern",
    "PhysicalDrive",
    "StorageSystem",
    "KnowledgeState",
    "Mode",
    "ModeVerdict",
    "SystemBuildError",
    "SizeGuardError",
    "build_system",
    "validate_mode",
    "enumerate_valid_modes",
    "parse_system_description",
    "SystemDescription",
]

MAX_USERS = 16
MODE_ENUM_TRIPLE_GUARD = 24


class SystemBuildError(ValueError):
    """Raised when a system description violates a build-time invariant."""


class SizeGuardError(RuntimeError):
    """Raised when an exhaustive operation would exceed its size guard."""


class TrafficPattern(enum.Enum):
    SINGLE_UNICAST = "single_unicast"
    MULTIPLE_UNICAST = "multiple_unicast"
    BROADCAST = "broadcast"
    MULTICAST = "multicast"
    BROADCAST_OR_SINGLE_UNICAST = "broadcast_or_single_unicast"
    BROADCAST_OR_MULTIPLE_UNICAST = "broadcast_or_multiple_unicast"

    @property
    def members(self) -> tuple["TrafficPattern", ...]:
        """Member patterns of a composite pattern; ``(self,)`` otherwise."""
        if self is TrafficPattern.BROADCAST_OR_SINGLE_UNICAST:
            return (TrafficPattern.BROADCAST, TrafficPattern.SINGLE_UNICAST)
        if self is TrafficPattern.BROADCAST_OR_MULTIPLE_UNICAST:
            return (TrafficPattern.BROADCAST, TrafficPattern.MULTIPLE_UNICAST)
        return (self,)

    @property
    def is_composite(self) -> bool:
        return len(self.members) > 1


@dataclass(frozen=True)
class PhysicalDrive:
    """One physical drive: ``units`` service units, all sharing ``stores``."""

    units: int
    stores: frozenset[int]


@dataclass(frozen=True)
class StorageSystem:
    """Immutable storage network with expanded virtual drives.

    ``rx[j-1]`` is user j's multipacket-reception budget: the number of
    chunk deliveries that user may absorb in one timeslot.  When
    ``always_innovative`` is set (coded upper-bound systems), every stored
    chunk counts as innovative for every user regardless of history.
    """

    num_chunks: int
    num_users: int
    drives: tuple[PhysicalDrive, ...]
    rx: tuple[int, ...]
    always_innovative: bool = False

    @cached_property
    def virtual_drives(self) -> tuple[frozenset[int], ...]:
        """Chunk set per virtual drive, ordered by (physical drive, unit)."""
        out: list[frozenset[int]] = []
        for drive in self.drives:
            out.extend([drive.stores] * drive.units)
        return tuple(out)

    @property
    def num_virtual_drives(self) -> int:
        return len(self.virtual_drives)

    @cached_property
    def physical_index(self) -> tuple[int, ...]:
        """Physical drive number (1-based) behind each virtual drive."""
        out: list[int] = []
        for n, drive in enumerate(self.drives, start=1):
            out.extend([n] * drive.units)
        return tuple(out)

    def stores(self, chunk: int, vdrive: int) -> bool:
        """Connectivity matrix entry: is ``chunk`` on virtual drive ``vdrive``."""
        return chunk in self.virtual_drives[vdrive - 1]

    @cached_property
    def stored_pairs(self) -> tuple[tuple[int, int], ...]:
        """All (chunk, virtual drive) pairs with connectivity 1, chunk-major."""
        return tuple(
            (i, k)
            for i in range(1, self.num_chunks + 1)
            for k in range(1, self.num_virtual_drives + 1)
            if self.stores(i, k)
        )

    def flows(self) -> tuple[tuple[int, int], ...]:
        """All (chunk, user) pairs, chunk-major."""
        return tuple(
            (i, j)
            for i in range(1, self.num_chunks + 1)
            for j in range(1, self.num_users + 1)
        )

    def content_hash(self) -> str:
        text = "|".join(
            [
                f"T={self.num_chunks}",
                f"N={self.num_users}",
                f"rx={','.join(map(str, self.rx))}",
                f"inn={int(self.always_innovative)}",
            ]
            + [
                f"d{n}:u{d.units}:{','.join(map(str, sorted(d.stores)))}"
                for n, d in enumerate(self.drives, start=1)
            ]
        )
        return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class KnowledgeState:
    """Per-(chunk, user, virtual drive) innovation indicator.

    Stored sparsely as the set of *non-innovative* triples; entries for
    unstored (chunk, drive) pairs are always 0.
    """

    zeros: frozenset[tuple[int, int, int]] = frozenset()

    @classmethod
    def all_innovative(cls) -> "KnowledgeState":
        return cls(frozenset())

    @classmethod
    def from_delivered(cls, sys: StorageSystem, delivered: set[tuple[int, int]]) -> "KnowledgeState":
        """Uncoded history: chunk i already delivered to user j zeroes S(i,j,k) for all k."""
        zeros = frozenset(
            (i, j, k)
            for (i, j) in delivered
            for k in range(1, sys.num_virtual_drives + 1)
            if sys.stores(i, k)
        )
        return cls(zeros)

    def innovative(self, sys: StorageSystem, i: int, j: int, k: int) -> bool:
        if not sys.stores(i, k):
            return False
        if sys.always_innovative:
            return True
        return (i, j, k) not in self.zeros


@dataclass(frozen=True)
class Mode:
    """A set of simultaneous deliveries (chunk i, user j, virtual drive k)."""

    deliveries: frozenset[tuple[int, int, int]]

    @property
    def delivery_count(self) -> int:
        return len(self.deliveries)

    def usage_pairs(self) -> set[tuple[int, int]]:
        """Chunk-drive usage indicator support: pairs (i, k) with a delivery."""
        return {(i, k) for (i, _j, k) in self.deliveries}

    def users_of(self, i: int, k: int) -> set[int]:
        return {j for (ii, j, kk) in self.deliveries if ii == i and kk == k}

    def sort_key(self) -> tuple:
        return (len(self.deliveries), tuple(sorted(self.deliveries)))


@dataclass(frozen=True)
class ModeVerdict:
    valid: bool
    violations: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.valid


@dataclass(frozen=True)
class SystemDescription:
    """Parsed system description file: topology plus optional run sections."""

    system: StorageSystem
    pattern: TrafficPattern | None = None
    coding: "object | None" = None  # CodedLayout, kept untyped to avoid an import cycle


def build_system(
    num_chunks: int,
    num_users: int,
    drives: list[tuple[int, set[int]]],
    rx: tuple[int, ...] | None = None,
    always_innovative: bool = False,
) -> StorageSystem:
    """Build and validate a StorageSystem.

    ``drives`` lists (service units, stored chunk ids) per physical drive,
    in drive order.  Raises SystemBuildError for uncovered chunks, empty or
    out-of-range stored sets, or a reception budget outside the edge-based
    set {1} | {T, T+1, ...}.
    """
    if num_chunks < 1 or num_users < 1:
        raise SystemBuildError("need at least one chunk and one user")
    if num_users > MAX_USERS:
        raise SystemBuildError(f"user count {num_users} exceeds cap {MAX_USERS}")
    if not drives:
        raise SystemBuildError("need at least one drive")
    if rx is None:
        rx = (1,) * num_users
    if len(rx) != num_users:
        raise SystemBuildError("rx must list one budget per user")
    for j, r in enumerate(rx, start=1):
        if r < 1:
            raise SystemBuildError(f"rx({j})={r} must be positive")
        if 1 < r < num_chunks:
            raise SystemBuildError(
                f"rx({j})={r} is not edge-based: need 1 or at least T={num_chunks}"
            )

    built: list[PhysicalDrive] = []
    covered: set[int] = set()
    for n, (units, stored) in enumerate(drives, start=1):
        if units < 1:
            raise SystemBuildError(f"drive {n}: units must be positive")
        stored_list = list(stored)
        if len(stored_list) != len(set(stored_list)):
            raise SystemBuildError(f"drive {n}: duplicate chunk replica on one drive")
        if not stored_list:
            raise SystemBuildError(f"drive {n}: stores no chunks")
        for i in stored_list:
            if not 1 <= i <= num_chunks:
                raise SystemBuildError(f"drive {n}: chunk f{i} out of range 1..{num_chunks}")
        covered.update(stored_list)
        built.append(PhysicalDrive(units=units, stores=frozenset(stored_list)))

    missing = set(range(1, num_chunks + 1)) - covered
    if missing:
        names = " ".join(f"f{i}" for i in sorted(missing))
        raise SystemBuildError(f"uncovered chunk: {names} stored on no drive")

    return StorageSystem(
        num_chunks=num_chunks,
        num_users=num_users,
        drives=tuple(built),
        rx=tuple(rx),
        always_innovative=always_innovative,
    )


def _pattern_violations(sys: StorageSystem, mode: Mode, pattern: TrafficPattern) -> list[str]:
    """Violated pattern constraints, treating a composite as satisfied when
    any one member pattern accepts the whole mode."""
    if pattern.is_composite:
        member_fails = [_pattern_violations(sys, mode, p) for p in pattern.members]
        if any(not f for f in member_fails):
            return []
        return [f"pattern:{pattern.value}"]

    out: list[str] = []
    if pattern is TrafficPattern.SINGLE_UNICAST:
        if mode.delivery_count > 1:
            out.append("pattern:single_unicast")
    elif pattern is TrafficPattern.MULTIPLE_UNICAST:
        for (i, k) in mode.usage_pairs():
            if len(mode.users_of(i, k)) > 1:
                out.append("pattern:multiple_unicast")
                break
    elif pattern is TrafficPattern.BROADCAST:
        for (i, k) in mode.usage_pairs():
            if len(mode.users_of(i, k)) != sys.num_users:
                out.append("pattern:broadcast")
                break
    elif pattern is TrafficPattern.MULTICAST:
        pass  # any fan-out up to N is allowed, which holds by construction
    return out


def validate_mode(
    sys: StorageSystem,
    knowledge: KnowledgeState,
    mode: Mode,
    pattern: TrafficPattern,
) -> ModeVerdict:
    """Check every timeslot constraint; constraint failure is a verdict.

    Raises ValueError only on shape mismatch (indices out of range).
    """
    for (i, j, k) in mode.deliveries:
        if not (1 <= i <= sys.num_chunks and 1 <= j <= sys.num_users and 1 <= k <= sys.num_virtual_drives):
            raise ValueError(f"delivery ({i},{j},{k}) out of range for system shape")

    violations: list[str] = []

    if any(not sys.stores(i, k) for (i, _j, k) in mode.deliveries):
        violations.append("unstored_delivery")
    if any(not knowledge.innovative(sys, i, j, k) for (i, j, k) in mode.deliveries):
        violations.append("innovation")

    for j in range(1, sys.num_users + 1):
        received = sum(1 for (i, jj, k) in mode.deliveries if jj == j and sys.stores(i, k))
        if received > sys.rx[j - 1]:
            violations.append(f"reception:u{j}")

    for k in range(1, sys.num_virtual_drives + 1):
        read = {i for (i, _j, kk) in mode.deliveries if kk == k}
        if len(read) > 1:
            violations.append(f"drive_read:D{k}")

    violations.extend(_pattern_violations(sys, mode, pattern))
    return ModeVerdict(valid=not violations, violations=tuple(violations))


def _drive_states(sys: StorageSystem, k: int) -> list[frozenset[tuple[int, int, int]]]:
    """All local states of virtual drive k: idle, or one stored chunk
    fanned out to one nonempty user subset."""
    states: list[frozenset[tuple[int, int, int]]] = [frozenset()]
    users = range(1, sys.num_users + 1)
    for i in sorted(sys.virtual_drives[k - 1]):
        for size in range(1, sys.num_users + 1):
            for subset in itertools.combinations(users, size):
                states.append(frozenset((i, j, k) for j in subset))
    return states


def enumerate_valid_modes(
    sys: StorageSystem,
    knowledge: KnowledgeState,
    pattern: TrafficPattern,
) -> tuple[Mode, ...]:
    """All nonempty valid modes, in canonical (size, delivery-tuple) order.

    Brute force over the product of per-drive local states, each candidate
    re-checked by validate_mode.  Guarded by the delivery-triple count.
    """
    triples = sys.num_users * sum(len(f) for f in sys.virtual_drives)
    if triples > MODE_ENUM_TRIPLE_GUARD:
        raise SizeGuardError(
            f"{triples} delivery triples exceed the exhaustive guard {MODE_ENUM_TRIPLE_GUARD}"
        )
    per_drive = [_drive_states(sys, k) for k in range(1, sys.num_virtual_drives + 1)]
    modes: list[Mode] = []
    for combo in itertools.product(*per_drive):
        deliveries = frozenset().union(*combo)
        if not deliveries:
            continue
        mode = Mode(deliveries)
        if validate_mode(sys, knowledge, mode, pattern).valid:
            modes.append(mode)
    modes.sort(key=Mode.sort_key)
    return tuple(modes)


# --- system description text format ---------------------------------------

_PATTERNS_BY_NAME = {p.value: p for p in TrafficPattern}


def _parse_chunk_list(raw: str, where: str) -> list[int]:
    chunks = []
    for tok in raw.split():
        if not tok.startswith("f") or not tok[1:].isdigit():
            raise SystemBuildError(f"{where}: expected chunk tokens like f1, got {tok!r}")
        chunks.append(int(tok[1:]))
    if not chunks:
        raise SystemBuildError(f"{where}: empty chunk list")
    return chunks


def parse_system_description(text: str) -> SystemDescription:
    """Parse the line-oriented system description format.

    Sections: [system] (users/chunks), repeated [drive <n>] (units/stores),
    optional [traffic] (pattern/rx) and [coding] (generations, per-drive
    coded-chunk counts, coefficient_cycling).  '#' starts a comment.
    """
    from .coding import CodedLayout, Generation  # deferred: coding depends on system

    section: str | None = None
    sys_kv: dict[str, str] = {}
    drive_kv: dict[int, dict[str, str]] = {}
    traffic_kv: dict[str, str] = {}
    generations: dict[str, Generation] = {}
    coded_counts: dict[tuple[int, str], int] = {}
    coefficient_cycling = False
    saw_coding = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            header = line[1:-1].strip()
            if header == "system":
                section = "system"
            elif header == "traffic":
                section = "traffic"
            elif header == "coding":
                section = "coding"
                saw_coding = True
            elif header.startswith("drive "):
                try:
                    n = int(header.split()[1])
                except (IndexError, ValueError):
                    raise SystemBuildError(f"line {lineno}: bad drive section {line!r}")
                section = f"drive:{n}"
                drive_kv.setdefault(n, {})
            else:
                raise SystemBuildError(f"line {lineno}: unknown section {line!r}")
            continue
        if section is None:
            raise SystemBuildError(f"line {lineno}: content before any section")

        if section == "coding":
            if line.startswith("generation "):
                head, _, tail = line.partition("=")
                gen_id = head.split(None, 1)[1].strip()
                chunk_part, _, s_part = tail.partition(";")
                members = _parse_chunk_list(chunk_part.strip(), f"line {lineno}")
                s_key, _, s_val = s_part.partition("=")
                if s_key.strip() != "s":
                    raise SystemBuildError(f"line {lineno}: generation line needs '; s = <int>'")
                generations[gen_id] = Generation(
                    gen_id=gen_id, members=frozenset(members), s=int(s_val.strip())
                )
            elif line.startswith("drive "):
                toks = line.split()
                if len(toks) != 6 or toks[2] != "stores" or toks[4] != "of":
                    raise SystemBuildError(
                        f"line {lineno}: expected 'drive <n> stores <count> of <gen-id>'"
                    )
                coded_counts[(int(toks[1]), toks[5])] = int(toks[3])
            elif line.startswith("coefficient_cycling"):
                _, _, val = line.partition("=")
                coefficient_cycling = val.strip().lower() == "true"
            else:
                raise SystemBuildError(f"line {lineno}: unknown [coding] entry {line!r}")
            continue

        key, eq, val = (part.strip() for part in line.partition("="))
        if eq != "=":
            raise SystemBuildError(f"line {lineno}: expected 'key = value', got {line!r}")
        target = {
            "system": sys_kv,
            "traffic": traffic_kv,
        }.get(section)
        if target is None:
            n = int(section.split(":")[1])
            target = drive_kv[n]
        allowed = {
            "system": {"users", "chunks"},
            "traffic": {"pattern", "rx"},
        }.get(section, {"units", "stores"})
        if key not in allowed:
            raise SystemBuildError(f"line {lineno}: unknown key {key!r} in [{section.split(':')[0]}]")
        target[key] = val

    if "users" not in sys_kv or "chunks" not in sys_kv:
        raise SystemBuildError("[system] must define users and chunks")
    num_users = int(sys_kv["users"])
    num_chunks = int(sys_kv["chunks"])

    if not drive_kv:
        raise SystemBuildError("no [drive <n>] sections")
    expected = list(range(1, len(drive_kv) + 1))
    if sorted(drive_kv) != expected:
        raise SystemBuildError("drive sections must be numbered 1..D consecutively")
    drives: list[tuple[int, set[int]]] = []
    for n in expected:
        kv = drive_kv[n]
        units = int(kv.get("units", "1"))
        if "stores" not in kv:
            raise SystemBuildError(f"[drive {n}] missing stores")
        drives.append((units, set(_parse_chunk_list(kv["stores"], f"[drive {n}]"))))

    pattern = None
    rx: tuple[int, ...] | None = None
    if "pattern" in traffic_kv:
        name = traffic_kv["pattern"]
        if name not in _PATTERNS_BY_NAME:
            raise SystemBuildError(f"unknown traffic pattern {name!r}")
        pattern = _PATTERNS_BY_NAME[name]
    if "rx" in traffic_kv:
        rx = tuple(int(tok) for tok in traffic_kv["rx"].split())

    system = build_system(num_chunks, num_users, drives, rx=rx)

    coding = None
    if saw_coding:
        coding = CodedLayout(
            generations=dict(sorted(generations.items())),
            counts=dict(sorted(coded_counts.items())),
            coefficient_cycling=coefficient_cycling,
        )
        coding.validate(system)

    return SystemDescription(system=system, pattern=pattern, coding=coding)
