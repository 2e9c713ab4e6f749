"""Finite posets with a height function, the category of increasing sequences,
subdivision/condensation and the path category P_A.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import SchemaError, UsageError
from .rational import format_rational, parse_rational


def _transitive_closure(elements: Sequence[Hashable], pairs: Iterable[tuple]) -> frozenset:
    index = {e: k for k, e in enumerate(elements)}
    n = len(elements)
    reach = [[False] * n for _ in range(n)]
    for k in range(n):
        reach[k][k] = True
    for a, b in pairs:
        reach[index[a]][index[b]] = True
    # Warshall
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return frozenset(
        (elements[i], elements[j]) for i in range(n) for j in range(n) if reach[i][j]
    )


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def _parse_poset_data(data: Mapping) -> tuple[tuple, list[tuple], dict]:
    if not isinstance(data, Mapping):
        raise SchemaError("poset data must be an object")
    for key in ("elements", "leq", "f"):
        if key not in data:
            raise SchemaError(f"poset data lacks '{key}'")
    elements = tuple(data["elements"])
    if len(set(elements)) != len(elements):
        raise SchemaError("duplicate element labels")
    known = set(elements)
    pairs = []
    for pair in data["leq"]:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise SchemaError(f"bad relation entry {pair!r}")
        a, b = pair
        if a not in known or b not in known:
            raise SchemaError(f"relation {pair!r} mentions an unknown element")
        pairs.append((a, b))
    raw_f = data["f"]
    if not isinstance(raw_f, Mapping):
        raise SchemaError("'f' must map elements to rationals")
    missing = known - set(raw_f)
    if missing:
        raise SchemaError(f"no height given for {sorted(map(str, missing))}")
    f = {e: parse_rational(raw_f[e]) for e in elements}
    return elements, pairs, f


def validate_poset(data: Mapping) -> ValidationReport:
    """Check a raw poset description.

    The pair list is closed under reflexivity and transitivity before the
    axioms are checked, so the violations that can actually show up are
    antisymmetry and the strict decrease of ``f``.  Schema problems raise.
    """
    elements, pairs, f = _parse_poset_data(data)
    leq = _transitive_closure(elements, pairs)
    violations = []
    for a in elements:
        if (a, a) not in leq:
            violations.append(f"reflexivity fails at {a}")
    for a, b in sorted(leq, key=repr):
        if a != b and (b, a) in leq:
            if repr(a) < repr(b):
                violations.append(f"antisymmetry fails: {a} <= {b} <= {a}")
    for a, b in leq:
        for c, d in leq:
            if b == c and (a, d) not in leq:
                violations.append(f"transitivity fails at {a} <= {b} <= {d}")
    for a, b in sorted(leq, key=repr):
        if a != b and not f[a] > f[b]:
            violations.append(
                f"f not strictly decreasing: {a} < {b} but f={format_rational(f[a])}, "
                f"{format_rational(f[b])}"
            )
    for a in elements:
        up = {b for b in elements if (a, b) in leq}
        for b in up:
            for c in elements:
                if (b, c) in leq and c not in up:
                    violations.append(f"up-set of {a} not closed upwards at {c}")
    return ValidationReport(tuple(violations))


@dataclass(frozen=True)
class FinitePoset:
    """A finite poset ``A`` with a strictly decreasing rational height ``f``."""

    elements: tuple
    leq_pairs: frozenset
    heights: tuple[Fraction, ...]

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise SchemaError("duplicate element labels")
        if len(self.heights) != len(self.elements):
            raise SchemaError("one height per element required")

    @classmethod
    def from_relations(cls, elements: Sequence, leq: Iterable[tuple], f: Mapping) -> "FinitePoset":
        data = {"elements": list(elements), "leq": [list(p) for p in leq], "f": dict(f)}
        return cls.from_json(data)

    @classmethod
    def from_json(cls, data: Mapping) -> "FinitePoset":
        report = validate_poset(data)
        if not report.ok:
            raise SchemaError("invalid poset: " + "; ".join(report.violations))
        elements, pairs, f = _parse_poset_data(data)
        leq = _transitive_closure(elements, pairs)
        return cls(elements, leq, tuple(f[e] for e in elements))

    @classmethod
    def chain(cls, labels: Sequence, heights: Sequence | None = None) -> "FinitePoset":
        """``labels[0] < labels[1] < ...``; default heights are ``len-1, ..., 0``."""
        k = len(labels)
        if heights is None:
            heights = [k - 1 - j for j in range(k)]
        pairs = [(labels[j], labels[j + 1]) for j in range(k - 1)]
        return cls.from_relations(labels, pairs, dict(zip(labels, heights)))

    def to_json(self) -> dict:
        covers = [
            [a, b] for a, b in sorted(self.leq_pairs, key=lambda p: (self.index(p[0]), self.index(p[1])))
            if a != b
        ]
        return {
            "elements": list(self.elements),
            "leq": covers,
            "f": {e: format_rational(h) for e, h in zip(self.elements, self.heights)},
        }

    def index(self, a) -> int:
        return self.elements.index(a)

    def f(self, a) -> Fraction:
        return self.heights[self.elements.index(a)]

    def __contains__(self, a) -> bool:
        return a in self.elements

    def __len__(self) -> int:
        return len(self.elements)

    def le(self, a, b) -> bool:
        return (a, b) in self.leq_pairs

    def lt(self, a, b) -> bool:
        return a != b and (a, b) in self.leq_pairs

    def up_set(self, a) -> frozenset:
        return frozenset(b for b in self.elements if self.le(a, b))

    def interval(self, a, b) -> tuple:
        return tuple(c for c in self.elements if self.le(a, c) and self.le(c, b))

    def sorted(self, items: Iterable) -> list:
        """Sort by decreasing height (a linear extension), ties by element order."""
        return sorted(items, key=lambda e: (-self.f(e), self.index(e)))

    def increasing_sequences(self, length: int) -> Iterator["IncreasingSequence"]:
        """All ``a_0 <= ... <= a_length``, in a deterministic order."""
        order = self.sorted(self.elements)

        def extend(prefix):
            if len(prefix) == length + 1:
                yield IncreasingSequence(self, tuple(prefix))
                return
            for e in order:
                if not prefix or self.le(prefix[-1], e):
                    yield from extend(prefix + [e])

        yield from extend([])


def _check_member(poset: FinitePoset, entries: Sequence) -> None:
    for e in entries:
        if e not in poset:
            raise UsageError(f"{e!r} is not an element of the poset")


@dataclass(frozen=True)
class IncreasingSequence:
    """An object of Δ_A: ``a_0 <= a_1 <= ... <= a_n``."""

    poset: FinitePoset = field(repr=False)
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise UsageError("an increasing sequence needs at least one entry")
        _check_member(self.poset, self.entries)
        for x, y in zip(self.entries, self.entries[1:]):
            if not self.poset.le(x, y):
                raise UsageError(f"entries not increasing: {x!r} then {y!r}")

    @property
    def length(self) -> int:
        return len(self.entries) - 1

    def __getitem__(self, k):
        return self.entries[k]

    def heights(self) -> tuple[Fraction, ...]:
        return tuple(self.poset.f(e) for e in self.entries)

    def bands(self) -> list[int]:
        """Indices ``i`` with ``a_i < a_{i+1}`` (the noncritical bands)."""
        return [k for k in range(self.length) if self.entries[k] != self.entries[k + 1]]

    def band_midpoint(self, i: int) -> Fraction:
        h = self.heights()
        if not h[i] > h[i + 1]:
            raise UsageError(f"no band between positions {i} and {i + 1}")
        return (h[i] + h[i + 1]) / 2


@dataclass(frozen=True)
class StrictSequence:
    """A strictly increasing sequence; an element of sd A or of some P_A(a, b)."""

    poset: FinitePoset = field(repr=False)
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise UsageError("a strict sequence needs at least one entry")
        _check_member(self.poset, self.entries)
        for x, y in zip(self.entries, self.entries[1:]):
            if not self.poset.lt(x, y):
                raise UsageError(f"entries not strictly increasing: {x!r} then {y!r}")

    @property
    def source(self):
        return self.entries[0]

    @property
    def target(self):
        return self.entries[-1]

    def is_subsequence_of(self, other: "StrictSequence") -> bool:
        it = iter(other.entries)
        return all(any(x == y for y in it) for x in self.entries)


@dataclass(frozen=True)
class DeltaAMorphism:
    """A monotone ``map: [n] -> [m]`` with ``target[map(k)] == source[k]``."""

    source: IncreasingSequence
    target: IncreasingSequence
    map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(self.map))
        if self.source.poset != self.target.poset:
            raise UsageError("source and target live over different posets")
        if len(self.map) != self.source.length + 1:
            raise UsageError("map has the wrong arity")
        m = self.target.length
        if any(not 0 <= v <= m for v in self.map):
            raise UsageError("map value out of range")
        if any(x > y for x, y in zip(self.map, self.map[1:])):
            raise UsageError("map is not order preserving")
        for k, v in enumerate(self.map):
            if self.target[v] != self.source[k]:
                raise UsageError(f"triangle over A fails at {k}")

    @classmethod
    def identity(cls, seq: IncreasingSequence) -> "DeltaAMorphism":
        return cls(seq, seq, tuple(range(seq.length + 1)))

    def then(self, other: "DeltaAMorphism") -> "DeltaAMorphism":
        """``other ∘ self``."""
        if other.source != self.target:
            raise UsageError("morphisms are not composable")
        return DeltaAMorphism(self.source, other.target, tuple(other.map[v] for v in self.map))

    @property
    def injective(self) -> bool:
        return len(set(self.map)) == len(self.map)


def sequence_maps(src: IncreasingSequence, dst: IncreasingSequence) -> list[DeltaAMorphism]:
    """Every morphism ``src -> dst`` of Δ_A (possibly none)."""
    if src.poset != dst.poset:
        raise UsageError("sequences over different posets")
    n, m = src.length, dst.length
    candidates = [[v for v in range(m + 1) if dst[v] == src[k]] for k in range(n + 1)]
    out: list[DeltaAMorphism] = []

    def extend(prefix):
        k = len(prefix)
        if k == n + 1:
            out.append(DeltaAMorphism(src, dst, tuple(prefix)))
            return
        low = prefix[-1] if prefix else 0
        for v in candidates[k]:
            if v >= low:
                extend(prefix + [v])

    extend([])
    return out


def monotone_maps(n: int, m: int) -> Iterator[tuple[int, ...]]:
    """All order-preserving maps ``[n] -> [m]`` as value tuples."""
    yield from combinations_with_replacement(range(m + 1), n + 1)


@dataclass(frozen=True)
class HomPoset:
    """P_A(a, b): strict sequences from a to b, ``s <= t`` iff ``t`` is a subsequence of ``s``."""

    source: Hashable
    target: Hashable
    elements: tuple[StrictSequence, ...]

    def leq(self, s: StrictSequence, t: StrictSequence) -> bool:
        return t.is_subsequence_of(s)

    def maximum(self) -> StrictSequence | None:
        tops = [t for t in self.elements if all(self.leq(s, t) for s in self.elements)]
        return tops[0] if tops else None

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def path_hom(poset: FinitePoset, a, b) -> HomPoset:
    _check_member(poset, (a, b))
    if not poset.le(a, b):
        return HomPoset(a, b, ())
    if a == b:
        return HomPoset(a, b, (StrictSequence(poset, (a,)),))
    inner = poset.sorted(c for c in poset.elements if poset.lt(a, c) and poset.lt(c, b))
    found = []
    for r in range(len(inner) + 1):
        for subset in combinations(inner, r):
            chain = (a,) + subset + (b,)
            if all(poset.lt(x, y) for x, y in zip(chain, chain[1:])):
                found.append(StrictSequence(poset, chain))
    return HomPoset(a, b, tuple(found))


def path_compose(s1: StrictSequence, s2: StrictSequence) -> StrictSequence:
    """Concatenate ``a...b`` and ``b...c`` keeping one copy of ``b``."""
    if s1.target != s2.source:
        raise UsageError(f"endpoint mismatch: {s1.target!r} vs {s2.source!r}")
    return StrictSequence(s1.poset, s1.entries + s2.entries[1:])


def condense(seq: IncreasingSequence | Sequence) -> StrictSequence | tuple:
    """E(a): the ordered distinct entries.  Plain tuples give back plain tuples."""
    entries = seq.entries if isinstance(seq, IncreasingSequence) else tuple(seq)
    out = [entries[0]]
    for e in entries[1:]:
        if e != out[-1]:
            out.append(e)
    if isinstance(seq, IncreasingSequence):
        return StrictSequence(seq.poset, tuple(out))
    return tuple(out)


def path_compose_condense(s1: StrictSequence, s2: StrictSequence) -> StrictSequence:
    return path_compose(s1, s2)


@dataclass(frozen=True)
class CubePoset:
    """P_{n,i,j} = {E ⊆ [i, j] : i, j ∈ E} under inclusion."""

    n: int
    i: int
    j: int
    elements: tuple[frozenset, ...]

    def leq(self, e1: frozenset, e2: frozenset) -> bool:
        return e1 <= e2

    def coordinates(self, e: frozenset) -> tuple[int, ...]:
        """The product map (p_k)_k into (0<1)^(j-i-1)."""
        return tuple(int(k in e) for k in range(self.i + 1, self.j))


def cube_poset(n: int, i: int, j: int) -> CubePoset:
    if not 0 <= i <= j <= n:
        raise UsageError(f"need 0 <= i <= j <= n, got {(n, i, j)}")
    inner = range(i + 1, j)
    elements = tuple(
        frozenset({i, j} | {k for k, bit in zip(inner, bits) if bit})
        for bits in product((0, 1), repeat=len(inner))
    )
    P = CubePoset(n, i, j, elements)
    coords = {e: P.coordinates(e) for e in elements}
    assert len(set(coords.values())) == 2 ** len(inner)
    for e1 in elements:
        for e2 in elements:
            componentwise = all(x <= y for x, y in zip(coords[e1], coords[e2]))
            assert (e1 <= e2) == componentwise
    return P


def enumerate_posets(size: int) -> list[FinitePoset]:
    """One representative per isomorphism class of posets on ``size`` elements.

    Elements are ``"p0", "p1", ...`` numbered along a linear extension, with
    heights ``size-1, ..., 0``.
    """
    labels = [f"p{k}" for k in range(size)]
    slots = list(combinations(range(size), 2))
    seen: set = set()
    out = []
    for bits in product((0, 1), repeat=len(slots)):
        rel = {pair for pair, bit in zip(slots, bits) if bit}
        if any((a, b) in rel and (b, c) in rel and (a, c) not in rel
               for a in range(size) for b in range(size) for c in range(size)):
            continue
        key = min(
            tuple(sorted((perm[a], perm[b]) for a, b in rel))
            for perm in permutations(range(size))
            if all(perm[a] < perm[b] for a, b in rel)
        )
        if key in seen:
            continue
        seen.add(key)
        out.append(FinitePoset.from_relations(
            labels, [(labels[a], labels[b]) for a, b in sorted(rel)],
            {labels[k]: size - 1 - k for k in range(size)},
        ))
    return out
