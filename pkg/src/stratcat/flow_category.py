"""Discrete stratified categories: finite morphism sets labelled by breaking
sequences, their nerves, unbroken chains, and Morse complexes with functor
coefficients over ℤ and ℤ/2.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import CoefficientError, DataError, SchemaError, UsageError
from .linalg import rank_mod2, smith_invariants
from .poset_core import FinitePoset, StrictSequence, path_compose, path_hom
from .simplicial_kit import FiniteCategory, FiniteSimplicialSet, make_shape

_PAIR = re.compile(r"^\s*\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)\s*$")


@dataclass(frozen=True)
class Morphism:
    id: str
    source: str
    target: str
    label: StrictSequence
    weight: int | None = None


@dataclass(frozen=True)
class StratifiedCategoryData:
    poset: FinitePoset
    morphisms: Mapping[str, Morphism]
    identities: Mapping[str, str]
    composition: Mapping[tuple[str, str], str]
    grading: Mapping[str, int] | None = None

    # ------------------------------------------------------------- access
    def homs(self, a, b) -> list[str]:
        return [g for g, m in self.morphisms.items() if m.source == a and m.target == b]

    def is_identity(self, g: str) -> bool:
        return self.identities.get(self.morphisms[g].source) == g

    def compose(self, g: str, f: str) -> str:
        """``g ∘ f`` (f first)."""
        mf, mg = self.morphisms[f], self.morphisms[g]
        if mf.target != mg.source:
            raise UsageError(f"{g} ∘ {f} is not composable")
        if self.is_identity(f):
            return g
        if self.is_identity(g):
            return f
        try:
            return self.composition[(g, f)]
        except KeyError:
            raise SchemaError(f"composition table lacks ({g},{f})") from None

    def category(self) -> FiniteCategory:
        return FiniteCategory(
            tuple(self.poset.elements),
            {g: (m.source, m.target) for g, m in self.morphisms.items()},
            dict(self.identities),
            dict(self.composition),
        )

    # ------------------------------------------------------------- JSON
    @classmethod
    def from_json(cls, data: Mapping) -> "StratifiedCategoryData":
        if not isinstance(data, Mapping):
            raise SchemaError("category data must be an object")
        for key in ("poset", "homs"):
            if key not in data:
                raise SchemaError(f"category data lacks '{key}'")
        poset = FinitePoset.from_json(data["poset"])
        morphisms: dict[str, Morphism] = {}
        identities: dict[str, str] = {}
        if not isinstance(data["homs"], Mapping):
            raise SchemaError("'homs' must be an object")
        for pair, entries in data["homs"].items():
            if "->" not in pair:
                raise SchemaError(f"bad hom key {pair!r}")
            a, b = (x.strip() for x in pair.split("->", 1))
            if a not in poset or b not in poset:
                raise SchemaError(f"hom key {pair!r} mentions an unknown object")
            for entry in entries:
                if not isinstance(entry, Mapping) or "id" not in entry or "label" not in entry:
                    raise SchemaError(f"bad morphism entry in {pair!r}")
                gid = str(entry["id"])
                if gid in morphisms:
                    raise SchemaError(f"duplicate morphism id {gid!r}")
                try:
                    label = StrictSequence(poset, tuple(entry["label"]))
                except UsageError as exc:
                    raise SchemaError(f"label of {gid}: {exc}") from None
                weight = entry.get("weight")
                if weight is not None and (isinstance(weight, bool) or not isinstance(weight, int)):
                    raise SchemaError(f"weight of {gid} must be an integer")
                morphisms[gid] = Morphism(gid, a, b, label, weight)
                if a == b:
                    if a in identities:
                        raise SchemaError(f"two endomorphisms of {a}; only identities are allowed")
                    identities[a] = gid
        for a in poset.elements:
            if a not in identities:
                gid = f"id_{a}"
                if gid in morphisms:
                    raise SchemaError(f"cannot create identity {gid!r}: id taken")
                morphisms[gid] = Morphism(gid, a, a, StrictSequence(poset, (a,)), 1)
                identities[a] = gid
        composition = {}
        for key, value in (data.get("compose") or {}).items():
            match = _PAIR.match(key)
            if not match:
                raise SchemaError(f"bad composition key {key!r}")
            g, f = match.groups()
            for x in (g, f, value):
                if x not in morphisms:
                    raise SchemaError(f"composition mentions unknown morphism {x!r}")
            composition[(g, f)] = value
        grading = data.get("grading")
        if grading is not None:
            if set(grading) != set(poset.elements):
                raise SchemaError("grading must cover exactly the objects")
            if any(isinstance(v, bool) or not isinstance(v, int) for v in grading.values()):
                raise SchemaError("grading values must be integers")
            grading = dict(grading)
        cat = cls(poset, morphisms, identities, composition, grading)
        for f in morphisms:
            for g in morphisms:
                if (morphisms[f].target == morphisms[g].source
                        and not cat.is_identity(f) and not cat.is_identity(g)
                        and (g, f) not in composition):
                    raise SchemaError(f"composition table lacks ({g},{f})")
        return cat

    def to_json(self) -> dict:
        homs: dict[str, list] = {}
        for g, m in self.morphisms.items():
            entry = {"id": g, "label": list(m.label.entries)}
            if m.weight is not None:
                entry["weight"] = m.weight
            homs.setdefault(f"{m.source}->{m.target}", []).append(entry)
        out = {
            "poset": self.poset.to_json(),
            "homs": homs,
            "compose": {f"({g},{f})": h for (g, f), h in self.composition.items()},
        }
        if self.grading is not None:
            out["grading"] = dict(self.grading)
        return out


@dataclass(frozen=True)
class CategoryReport:
    violations: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_category(data) -> CategoryReport:
    """Table-level checks: typing, associativity, unit laws, label functoriality."""
    cat = data if isinstance(data, StratifiedCategoryData) else StratifiedCategoryData.from_json(data)
    A = cat.poset
    violations, warnings = [], []
    for g, m in cat.morphisms.items():
        if not A.le(m.source, m.target):
            violations.append(f"{g}: Hom({m.source},{m.target}) nonempty but {m.source} ≰ {m.target}")
        if m.label.source != m.source or m.label.target != m.target:
            violations.append(f"{g}: label {list(m.label.entries)} does not run from source to target")
    for a, g in cat.identities.items():
        if cat.morphisms[g].label.entries != (a,):
            violations.append(f"identity {g} must carry label [{a}]")
    for a in A.elements:
        for b in A.elements:
            if A.lt(a, b) and not cat.homs(a, b):
                warnings.append(f"{a} < {b} but Hom({a},{b}) is empty")
    for (g, f), h in cat.composition.items():
        mf, mg, mh = cat.morphisms[f], cat.morphisms[g], cat.morphisms[h]
        if mf.target != mg.source:
            violations.append(f"table entry ({g},{f}) is not composable")
            continue
        if (mh.source, mh.target) != (mf.source, mg.target):
            violations.append(f"({g},{f}) -> {h} has the wrong endpoints")
        if cat.is_identity(f) and h != g or cat.is_identity(g) and h != f:
            violations.append(f"unit law fails at ({g},{f})")
        expected = path_compose(mf.label, mg.label)
        if mh.label != expected:
            violations.append(
                f"label functoriality fails: label({g}∘{f}) = {list(mh.label.entries)}, "
                f"expected {list(expected.entries)}")
    non_id = [g for g in cat.morphisms if not cat.is_identity(g)]
    for f in non_id:
        for g in non_id:
            if cat.morphisms[f].target != cat.morphisms[g].source:
                continue
            for h in non_id:
                if cat.morphisms[g].target != cat.morphisms[h].source:
                    continue
                left = cat.compose(cat.compose(h, g), f)
                right = cat.compose(h, cat.compose(g, f))
                if left != right:
                    violations.append(f"associativity fails at ({h},{g},{f}): {left} vs {right}")
    if cat.grading is not None:
        for g in non_id:
            m = cat.morphisms[g]
            if len(m.label.entries) == 2 and not cat.grading[m.source] > cat.grading[m.target]:
                warnings.append(f"unbroken {g}: |{m.source}| = {cat.grading[m.source]} "
                                f"not above |{m.target}| = {cat.grading[m.target]}")
    return CategoryReport(tuple(violations), tuple(warnings))


def nerve(data: StratifiedCategoryData, D: int = 6) -> FiniteSimplicialSet:
    if not 0 <= D <= 6:
        raise UsageError("nerve truncation must lie in 0..6")
    return make_shape("category_nerve", category=data.category(), max_dim=D)


def unbroken_check(data: StratifiedCategoryData, chain: Sequence[str]) -> bool:
    """Whether every sub-composite of the chain is in the top stratum of its Hom."""
    if not chain:
        raise UsageError("empty chain")
    for f, g in zip(chain, chain[1:]):
        if data.morphisms[f].target != data.morphisms[g].source:
            raise UsageError(f"chain not composable at {f}, {g}")
    objects = [data.morphisms[chain[0]].source] + [data.morphisms[g].target for g in chain]
    for i in range(len(chain)):
        composite = chain[i]
        for j in range(i + 1, len(chain) + 1):
            if j > i + 1:
                composite = data.compose(chain[j - 1], composite)
            top = path_hom(data.poset, objects[i], objects[j]).maximum()
            if data.morphisms[composite].label != top:
                return False
    return True


# ---------------------------------------------------------------- coefficients
@dataclass(frozen=True)
class CoefficientFunctor:
    """Free module of rank ``ranks[a]`` per object, integer matrix per morphism.

    ``matrices[g]`` has shape ``ranks[target] x ranks[source]`` and acts on
    column vectors.  Identities may be omitted.
    """

    ranks: Mapping[str, int]
    matrices: Mapping[str, tuple[tuple[int, ...], ...]]

    @classmethod
    def trivial(cls, data: StratifiedCategoryData) -> "CoefficientFunctor":
        return cls({a: 1 for a in data.poset.elements}, {g: ((1,),) for g in data.morphisms})

    @classmethod
    def from_json(cls, raw: Mapping) -> "CoefficientFunctor":
        if not isinstance(raw, Mapping) or "ranks" not in raw or "matrices" not in raw:
            raise SchemaError("coefficient data needs 'ranks' and 'matrices'")
        ranks = {}
        for a, r in raw["ranks"].items():
            if isinstance(r, bool) or not isinstance(r, int) or r < 0:
                raise SchemaError(f"rank of {a} must be a nonnegative integer")
            ranks[a] = r
        mats = {}
        for g, m in raw["matrices"].items():
            if not isinstance(m, list) or any(not isinstance(row, list) for row in m):
                raise SchemaError(f"matrix of {g} must be a list of rows")
            if any(isinstance(x, bool) or not isinstance(x, int) for row in m for x in row):
                raise SchemaError(f"matrix of {g} must have integer entries")
            mats[g] = tuple(tuple(row) for row in m)
        return cls(ranks, mats)

    def matrix(self, data: StratifiedCategoryData, g: str) -> tuple[tuple[int, ...], ...]:
        m = data.morphisms[g]
        if g in self.matrices:
            return self.matrices[g]
        if data.is_identity(g):
            r = self.ranks[m.source]
            return tuple(tuple(int(i == j) for j in range(r)) for i in range(r))
        raise CoefficientError(f"no matrix for morphism {g}")

    def check(self, data: StratifiedCategoryData) -> None:
        for a in data.poset.elements:
            if a not in self.ranks:
                raise CoefficientError(f"no rank for object {a}")
        for g, m in data.morphisms.items():
            mat = self.matrix(data, g)
            rows, cols = self.ranks[m.target], self.ranks[m.source]
            if len(mat) != rows or any(len(row) != cols for row in mat):
                raise CoefficientError(f"matrix of {g} should be {rows}x{cols}")
            if data.is_identity(g) and mat != tuple(tuple(int(i == j) for j in range(rows)) for i in range(rows)):
                raise CoefficientError(f"identity {g} must act as the identity")
        for (g, f), h in data.composition.items():
            if _matmul(self.matrix(data, g), self.matrix(data, f), self.ranks[data.morphisms[f].source]) \
                    != self.matrix(data, h):
                raise CoefficientError(f"G({g}∘{f}) != G({g})·G({f})")


def _matmul(a, b, inner_cols: int):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(inner_cols))
        for i in range(len(a))
    )


# ---------------------------------------------------------------- complexes
@dataclass(frozen=True)
class ChainComplexZ:
    """Graded free module with differentials ``d[k]: C_k -> C_{k-1}``.

    ``differentials[k]`` is a row-major integer matrix with one row per
    generator of degree k-1 and one column per generator of degree k.
    """

    ring: str
    generators: Mapping[int, tuple[tuple[str, int], ...]]
    differentials: Mapping[int, tuple[tuple[int, ...], ...]]

    def degrees(self) -> list[int]:
        return sorted(self.generators)

    def boundary_of(self, obj: str, basis: int = 0) -> dict[tuple[str, int], int]:
        """∂ of one generator as a sparse combination."""
        k = next(d for d, gens in self.generators.items() if (obj, basis) in gens)
        col = self.generators[k].index((obj, basis))
        out = {}
        for r, gen in enumerate(self.generators.get(k - 1, ())):
            x = self.differentials[k][r][col]
            if x:
                out[gen] = x
        return out


def morse_complex(data: StratifiedCategoryData, ring: str = "z2",
                  coeffs: CoefficientFunctor | None = None) -> ChainComplexZ:
    """∂(g·a) = Σ_{|b|=|a|-1} Σ_{γ∈M(a,b)} weight(γ)·G(γ)(g)·b."""
    if ring not in ("z", "z2"):
        raise UsageError(f"unknown ring {ring!r}")
    if data.grading is None:
        raise DataError("Morse complex needs a grading")
    G = coeffs or CoefficientFunctor.trivial(data)
    G.check(data)
    grading = data.grading
    generators: dict[int, list] = {}
    for a in data.poset.elements:
        generators.setdefault(grading[a], []).extend((a, r) for r in range(G.ranks[a]))
    gens = {k: tuple(v) for k, v in generators.items()}
    differentials = {}
    for k in sorted(gens):
        rows = gens.get(k - 1, ())
        row_index = {gen: r for r, gen in enumerate(rows)}
        mat = [[0] * len(gens[k]) for _ in rows]
        for col, (a, basis) in enumerate(gens[k]):
            for g, m in data.morphisms.items():
                if m.source != a or grading[m.target] != k - 1 or data.is_identity(g):
                    continue
                if ring == "z":
                    if m.weight is None:
                        raise DataError(f"morphism {g} has no weight; ℤ coefficients need signs")
                    w = m.weight
                else:
                    w = 1 if m.weight is None else m.weight
                Gm = G.matrix(data, g)
                for r in range(G.ranks[m.target]):
                    mat[row_index[(m.target, r)]][col] += w * Gm[r][basis]
        if ring == "z2":
            mat = [[x % 2 for x in row] for row in mat]
        differentials[k] = tuple(tuple(row) for row in mat)
    for k in sorted(gens):
        if k - 1 in gens and k - 2 in gens:
            dk, dk1 = differentials[k], differentials[k - 1]
            for r in range(len(gens[k - 2])):
                for c in range(len(gens[k])):
                    x = sum(dk1[r][m] * dk[m][c] for m in range(len(gens[k - 1])))
                    if (x % 2 if ring == "z2" else x) != 0:
                        raise DataError(f"∂∘∂ != 0 from degree {k} to {k - 2}")
    return ChainComplexZ(ring, gens, differentials)


@dataclass(frozen=True)
class HomologyGroup:
    degree: int
    rank: int
    torsion: tuple[int, ...] = ()
    ring: str = "z"

    def describe(self) -> str:
        if self.ring == "z2":
            return "0" if self.rank == 0 else ("Z/2" if self.rank == 1 else f"(Z/2)^{self.rank}")
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def _matrix_rank(mat, ring: str) -> int:
    if not mat or not mat[0]:
        return 0
    if ring == "z2":
        return rank_mod2(mat)
    return len(smith_invariants(mat))


def homology(complex_: ChainComplexZ) -> list[HomologyGroup]:
    out = []
    ring = complex_.ring
    for k in complex_.degrees():
        dim = len(complex_.generators[k])
        rk_out = _matrix_rank(complex_.differentials.get(k, ()), ring)
        incoming = complex_.differentials.get(k + 1, ())
        rk_in = _matrix_rank(incoming, ring)
        torsion = ()
        if ring == "z" and incoming and incoming[0]:
            torsion = tuple(d for d in smith_invariants(incoming) if d > 1)
        out.append(HomologyGroup(k, dim - rk_out - rk_in, torsion, ring))
    return out


def betti(complex_: ChainComplexZ) -> dict[int, int]:
    return {g.degree: g.rank for g in homology(complex_)}


# ------------------------------------------------------------------ builtins
def _other_sphere() -> dict:
    return {
        "poset": {
            "elements": ["a", "b", "c", "d"],
            "leq": [["a", "b"], ["c", "b"], ["b", "d"]],
            "f": {"a": "3", "c": "2", "b": "1", "d": "0"},
        },
        "homs": {
            "a->b": [{"id": "ab", "label": ["a", "b"], "weight": 1}],
            "c->b": [{"id": "cb", "label": ["c", "b"], "weight": 1}],
            "b->d": [{"id": "bd1", "label": ["b", "d"], "weight": 1},
                     {"id": "bd2", "label": ["b", "d"], "weight": -1}],
            "a->d": [{"id": "ad", "label": ["a", "d"]},
                     {"id": "ad1", "label": ["a", "b", "d"]},
                     {"id": "ad2", "label": ["a", "b", "d"]}],
            "c->d": [{"id": "cd", "label": ["c", "d"]},
                     {"id": "cd1", "label": ["c", "b", "d"]},
                     {"id": "cd2", "label": ["c", "b", "d"]}],
        },
        "compose": {
            "(bd1,ab)": "ad1", "(bd2,ab)": "ad2",
            "(bd1,cb)": "cd1", "(bd2,cb)": "cd2",
        },
        "grading": {"a": 2, "c": 2, "b": 1, "d": 0},
    }


def _round_sphere() -> dict:
    return {
        "poset": {"elements": ["max", "min"], "leq": [["max", "min"]],
                  "f": {"max": "1", "min": "0"}},
        "homs": {"max->min": [{"id": "meridian", "label": ["max", "min"]}]},
        "compose": {},
        "grading": {"max": 2, "min": 0},
    }


BUILTINS = {"other_sphere": _other_sphere, "round_sphere": _round_sphere}


def builtin_json(name: str) -> dict:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise UsageError(f"unknown builtin example {name!r}; choose from {sorted(BUILTINS)}") from None


def builtin_example(name: str) -> StratifiedCategoryData:
    return StratifiedCategoryData.from_json(builtin_json(name))
