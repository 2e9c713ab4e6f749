"""Truncated finite simplicial sets, standard shapes, nerves, horn filling and
stratifications by vertex labels.

A simplex is stored in Eilenberg-Zilber normal form ``Simplex(sigma, base)``:
``base`` is the id of a nondegenerate m-simplex and ``sigma`` a monotone
surjection ``[n] -> [m]`` written as its value tuple, the simplex being
``sigma^*(base)``.  Every simplex has exactly one such form, so equality of
simplices is equality of tuples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Iterable, Iterator, Mapping, NamedTuple, Sequence

from .errors import StratificationError, UsageError
from .poset_core import FinitePoset

DEFAULT_MAX_DIM = 6


class Simplex(NamedTuple):
    sigma: tuple[int, ...]
    base: Hashable

    @property
    def dim(self) -> int:
        return len(self.sigma) - 1

    @property
    def degenerate(self) -> bool:
        return len(set(self.sigma)) < len(self.sigma)


def nondegenerate(base: Hashable, dim: int) -> Simplex:
    return Simplex(tuple(range(dim + 1)), base)


def _factor(theta: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split a monotone map as ``iota ∘ tau`` (tau surjective, iota injective)."""
    image = sorted(set(theta))
    pos = {v: k for k, v in enumerate(image)}
    return tuple(pos[v] for v in theta), tuple(image)


def surjections(n: int, m: int) -> Iterator[tuple[int, ...]]:
    """Monotone surjections ``[n] -> [m]``: choose the m steps among n gaps."""
    for steps in combinations(range(1, n + 1), m):
        out, level = [], 0
        step_set = set(steps)
        for v in range(n + 1):
            if v in step_set:
                level += 1
            out.append(level)
        yield tuple(out)


@dataclass
class FiniteSimplicialSet:
    """Nondegenerate simplices up to ``max_dim`` plus their face tables.

    ``faces[x]`` holds ``(d_0 x, ..., d_m x)`` in normal form for every stored
    nondegenerate m-simplex ``x`` with ``m >= 1``.
    """

    max_dim: int
    nondegen: dict[int, list]
    faces: dict
    dims: dict = field(init=False, repr=False)
    _cache: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        self.dims = {}
        for d, ids in self.nondegen.items():
            if d > self.max_dim:
                raise UsageError(f"simplex of dimension {d} above truncation {self.max_dim}")
            for x in ids:
                if x in self.dims:
                    raise UsageError(f"simplex id {x!r} used twice")
                self.dims[x] = d
        for d in range(self.max_dim + 1):
            self.nondegen.setdefault(d, [])
        self.check()

    # ------------------------------------------------------------------ basics
    def counts(self) -> tuple[int, ...]:
        top = max((d for d, ids in self.nondegen.items() if ids), default=-1)
        return tuple(len(self.nondegen[d]) for d in range(top + 1))

    def pullback(self, theta: Sequence[int], x: Simplex) -> Simplex:
        """``theta^* x`` for a monotone ``theta: [k] -> [dim x]``."""
        theta = tuple(theta)
        key = (theta, x)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        composite = tuple(x.sigma[v] for v in theta)
        tau, iota = _factor(composite)
        m = self.dims[x.base]
        if len(iota) == m + 1:
            result = Simplex(tau, x.base)
        else:
            missing = max(v for v in range(m + 1) if v not in iota)
            inner = tuple(v if v < missing else v - 1 for v in iota)
            face = self.faces[x.base][missing]
            result = self.pullback(tau, self.pullback(inner, face))
        self._cache[key] = result
        return result

    def face(self, i: int, x: Simplex) -> Simplex:
        n = x.dim
        if not 0 <= i <= n or n == 0:
            raise UsageError(f"face d_{i} undefined in dimension {n}")
        return self.pullback(tuple(v for v in range(n + 1) if v != i), x)

    def degeneracy(self, i: int, x: Simplex) -> Simplex:
        n = x.dim
        if not 0 <= i <= n:
            raise UsageError(f"degeneracy s_{i} undefined in dimension {n}")
        return self.pullback(tuple(v if v <= i else v - 1 for v in range(n + 2)), x)

    def all_faces(self, x: Simplex) -> tuple[Simplex, ...]:
        return tuple(self.face(i, x) for i in range(x.dim + 1))

    def vertex(self, x: Simplex, v: int):
        return self.pullback((v,), x).base

    def vertices(self, x: Simplex) -> tuple:
        return tuple(self.vertex(x, v) for v in range(x.dim + 1))

    def simplices(self, n: int) -> list[Simplex]:
        """Every n-simplex, degenerate ones included (n <= max_dim)."""
        if n > self.max_dim:
            raise UsageError(f"dimension {n} above truncation {self.max_dim}")
        key = ("simplices", n)
        if key not in self._cache:
            out = []
            for m in range(n + 1):
                for sigma in surjections(n, m):
                    out.extend(Simplex(sigma, x) for x in self.nondegen[m])
            self._cache[key] = out
        return self._cache[key]

    # -------------------------------------------------------------- validation
    def check(self) -> None:
        """Face-table sanity and the simplicial identities d_i d_j = d_{j-1} d_i."""
        for d, ids in self.nondegen.items():
            for x in ids:
                if d == 0:
                    continue
                table = self.faces.get(x)
                if table is None or len(table) != d + 1:
                    raise UsageError(f"face table of {x!r} is incomplete")
                for y in table:
                    if y.dim != d - 1 or y.base not in self.dims:
                        raise UsageError(f"face of {x!r} has wrong dimension or unknown base")
                    if self.dims[y.base] != len(set(y.sigma)) - 1:
                        raise UsageError(f"face of {x!r} is not in normal form")
                s = nondegenerate(x, d)
                for j in range(d + 1):
                    for i in range(j):
                        if d >= 2 and self.face(i, self.face(j, s)) != self.face(j - 1, self.face(i, s)):
                            raise UsageError(f"simplicial identity d_{i}d_{j} fails on {x!r}")

    def to_json(self) -> dict:
        out = {"max_dim": self.max_dim, "nondegenerate": {}, "faces": {}}
        for d in range(self.max_dim + 1):
            if self.nondegen[d]:
                out["nondegenerate"][str(d)] = [repr(x) for x in self.nondegen[d]]
        for x, table in self.faces.items():
            out["faces"][repr(x)] = [[list(y.sigma), repr(y.base)] for y in table]
        return out


def _from_chains(chains: Iterable[tuple], max_dim: int) -> FiniteSimplicialSet:
    """Simplicial set whose nondegenerate simplices are given vertex tuples.

    The family must be closed under deleting entries (faces of a chain are
    nondegenerate chains), as for subcomplexes of Δ^n and poset nerves.
    """
    nondegen: dict[int, list] = {}
    faces = {}
    for c in sorted(set(chains), key=lambda c: (len(c), c)):
        d = len(c) - 1
        if d > max_dim:
            continue
        nondegen.setdefault(d, []).append(c)
        if d >= 1:
            faces[c] = tuple(nondegenerate(c[:k] + c[k + 1:], d - 1) for k in range(d + 1))
    return FiniteSimplicialSet(max_dim, nondegen, faces)


@dataclass(frozen=True)
class FiniteCategory:
    """An ordinary finite category given by tables.

    ``morphisms`` maps an id to ``(source, target)``; ``identities`` maps each
    object to its identity id; ``composition`` maps ``(g, f)`` to ``g ∘ f`` for
    composable non-identity pairs.
    """

    objects: tuple
    morphisms: Mapping
    identities: Mapping
    composition: Mapping

    def source(self, g):
        return self.morphisms[g][0]

    def target(self, g):
        return self.morphisms[g][1]

    def is_identity(self, g) -> bool:
        return self.identities.get(self.source(g)) == g

    def compose(self, g, f):
        if self.target(f) != self.source(g):
            raise UsageError(f"{g!r} ∘ {f!r} is not composable")
        if self.is_identity(f):
            return g
        if self.is_identity(g):
            return f
        return self.composition[(g, f)]


def _category_chains(C: FiniteCategory, max_dim: int):
    non_id = [g for g in C.morphisms if not C.is_identity(g)]
    by_source: dict = {}
    for g in non_id:
        by_source.setdefault(C.source(g), []).append(g)
    layers = {0: list(C.objects), 1: [(g,) for g in non_id]}
    for d in range(2, max_dim + 1):
        layers[d] = [c + (g,) for c in layers[d - 1] for g in by_source.get(C.target(c[-1]), [])]
    return layers


def _normalize_chain(C: FiniteCategory, arrows: Sequence, start) -> Simplex:
    """Normal form of the nerve simplex given by a chain that may contain identities."""
    sigma, level, kept = [0], 0, []
    for g in arrows:
        if not C.is_identity(g):
            level += 1
            kept.append(g)
        sigma.append(level)
    return Simplex(tuple(sigma), tuple(kept) if kept else start)


def _category_nerve(C: FiniteCategory, max_dim: int) -> FiniteSimplicialSet:
    layers = _category_chains(C, max_dim)
    faces = {}
    for d in range(1, max_dim + 1):
        for c in layers[d]:
            if d == 1:
                g = c[0]
                faces[c] = (nondegenerate(C.target(g), 0), nondegenerate(C.source(g), 0))
                continue
            table = [_normalize_chain(C, c[1:], C.source(c[1]))]
            for k in range(1, d):
                merged = c[:k - 1] + (C.compose(c[k], c[k - 1]),) + c[k + 1:]
                table.append(_normalize_chain(C, merged, C.source(c[0])))
            table.append(_normalize_chain(C, c[:-1], C.source(c[0])))
            faces[c] = tuple(table)
    return FiniteSimplicialSet(max_dim, {d: list(v) for d, v in layers.items()}, faces)


def poset_category(A: FinitePoset) -> FiniteCategory:
    """A poset viewed as a category with one arrow ``(a, b)`` per relation a <= b."""
    morphisms = {(a, b): (a, b) for (a, b) in A.leq_pairs}
    identities = {a: (a, a) for a in A.elements}
    composition = {
        ((b, c), (a, b)): (a, c)
        for (a, b) in A.leq_pairs for (b2, c) in A.leq_pairs
        if b == b2 and a != b and b != c
    }
    return FiniteCategory(tuple(A.elements), morphisms, identities, composition)


def make_shape(kind: str, *, n: int | None = None, k: int | None = None,
               poset: FinitePoset | None = None, category: FiniteCategory | None = None,
               max_dim: int = DEFAULT_MAX_DIM) -> FiniteSimplicialSet:
    """Build Δ^n, ∂Δ^n, Λ^n_k, Spine(Δ^n), N(A) or N(C) truncated at ``max_dim``."""
    if kind in ("simplex", "boundary", "horn", "spine"):
        if n is None or n < 0:
            raise UsageError(f"{kind} needs n >= 0")
        if max_dim < n:
            raise UsageError(f"truncation {max_dim} below shape dimension {n}")
        full = tuple(range(n + 1))
        subsets = [c for r in range(1, n + 2) for c in combinations(full, r)]
        if kind == "simplex":
            chains = subsets
        elif kind == "boundary":
            chains = [c for c in subsets if c != full]
        elif kind == "horn":
            if k is None or not 0 <= k <= n:
                raise UsageError(f"horn index k={k} outside 0..{n}")
            if n == 0:
                raise UsageError("horns need n >= 1")
            opposite = tuple(v for v in full if v != k)
            chains = [c for c in subsets if c != full and c != opposite]
        else:
            chains = [c for c in subsets if len(c) == 1 or (len(c) == 2 and c[1] == c[0] + 1)]
        return _from_chains(chains, max_dim)
    if kind == "poset_nerve":
        if poset is None:
            raise UsageError("poset_nerve needs a poset")
        order = {e: r for r, e in enumerate(poset.sorted(poset.elements))}
        elements = sorted(poset.elements, key=order.get)
        chains = [(e,) for e in elements]
        frontier = list(chains)
        for _ in range(max_dim):
            frontier = [c + (e,) for c in frontier for e in elements if poset.lt(c[-1], e)]
            chains.extend(frontier)
        return _from_chains(chains, max_dim)
    if kind == "category_nerve":
        if category is None:
            raise UsageError("category_nerve needs a category")
        return _category_nerve(category, max_dim)
    raise UsageError(f"unknown shape kind {kind!r}")


# ---------------------------------------------------------------- horn filling
def _horn_facets(n: int, k: int) -> list[int]:
    return [i for i in range(n + 1) if i != k]


def normalize_horn_assignment(S: FiniteSimplicialSet, n: int, k: int,
                              assignment: Mapping) -> dict[int, Simplex]:
    """Validate a map Λ^n_k -> S and return it as ``{i: image of d_i}``.

    ``assignment`` is keyed by nondegenerate simplices of the horn, written as
    vertex tuples of Δ^n; it must at least cover the facets ``[n] minus {i}``
    for ``i != k``.  Any further entries, and the face relations between the
    facets, are checked for consistency.
    """
    if not 0 <= k <= n or n < 1:
        raise UsageError(f"no horn Λ^{n}_{k}")
    if n > S.max_dim:
        raise UsageError(f"dimension {n} above truncation {S.max_dim}")
    full = tuple(range(n + 1))
    opposite = tuple(v for v in full if v != k)
    images = {}
    for key, value in assignment.items():
        key = tuple(key)
        if key == full or key == opposite or list(key) != sorted(set(key)) or not set(key) <= set(full):
            raise UsageError(f"{key!r} is not a nondegenerate simplex of the horn")
        if not isinstance(value, Simplex) or value.dim != len(key) - 1:
            raise UsageError(f"image of {key!r} has the wrong dimension")
        images[key] = value
    facets = {}
    for i in _horn_facets(n, k):
        key = tuple(v for v in full if v != i)
        if key not in images:
            raise UsageError(f"assignment misses the facet opposite {i}")
        facets[i] = images[key]
    for j in facets:
        for i in facets:
            if i < j and S.face(i, facets[j]) != S.face(j - 1, facets[i]):
                raise UsageError(f"facets opposite {i} and {j} disagree on their common face")
    for key, value in images.items():
        for i, facet_key in ((i, tuple(v for v in full if v != i)) for i in _horn_facets(n, k)):
            if set(key) <= set(facet_key):
                theta = tuple(facet_key.index(v) for v in key)
                if S.pullback(theta, facets[i]) != value:
                    raise UsageError(f"assignment inconsistent on {key!r}")
    return facets


def horn_fillers(S: FiniteSimplicialSet, n: int, k: int, assignment: Mapping) -> list[Simplex]:
    """All n-simplices of S restricting to the given horn."""
    facets = normalize_horn_assignment(S, n, k, assignment)
    return [z for z in S.simplices(n)
            if all(S.face(i, z) == y for i, y in facets.items())]


def _horn_families(S: FiniteSimplicialSet, n: int, k: int) -> Iterator[dict[int, Simplex]]:
    """Every compatible family ``{i: y_i}`` (i != k), i.e. every map Λ^n_k -> S."""
    idx = _horn_facets(n, k)
    candidates = S.simplices(n - 1)
    faces_of = {y: S.all_faces(y) for y in candidates} if n >= 2 else {}

    def extend(chosen: dict, pos: int):
        if pos == len(idx):
            yield dict(chosen)
            return
        j = idx[pos]
        for y in candidates:
            # d_i y_j = d_{j-1} y_i for every earlier i < j
            if all(faces_of[y][i] == faces_of[chosen[i]][j - 1] for i in chosen):
                chosen[j] = y
                yield from extend(chosen, pos + 1)
                del chosen[j]

    yield from extend({}, 0)


@dataclass(frozen=True)
class InfinityVerdict:
    inner_fillers_exist: bool
    inner_fillers_unique: bool
    is_kan: bool
    horns_checked: int
    witness: dict | None = None
    kan_witness: dict | None = None

    def to_json(self) -> dict:
        return {
            "inner_fillers_exist": self.inner_fillers_exist,
            "inner_fillers_unique": self.inner_fillers_unique,
            "is_kan": self.is_kan,
            "horns_checked": self.horns_checked,
            "witness": self.witness,
            "kan_witness": self.kan_witness,
        }


def infinity_check(S: FiniteSimplicialSet, up_to_dim: int) -> InfinityVerdict:
    """Exhaustive horn-filling census for horns of dimension 1..up_to_dim."""
    if up_to_dim > S.max_dim:
        raise UsageError(f"dimension {up_to_dim} above truncation {S.max_dim}")
    exist = unique = kan = True
    checked = 0
    witness = kan_witness = None
    for n in range(1, up_to_dim + 1):
        filler_count: dict = {}
        for z in S.simplices(n):
            faces = S.all_faces(z)
            for k in range(n + 1):
                key = (k,) + faces[:k] + faces[k + 1:]
                filler_count[key] = filler_count.get(key, 0) + 1
        for k in range(n + 1):
            inner = 0 < k < n
            for family in _horn_families(S, n, k):
                checked += 1
                key = (k,) + tuple(family[i] for i in _horn_facets(n, k))
                count = filler_count.get(key, 0)
                if count == 0:
                    kan = False
                    if inner:
                        exist = False
                if inner and count > 1:
                    unique = False
                bad_inner = inner and count != 1
                if (bad_inner and witness is None) or (count == 0 and kan_witness is None):
                    found = {"n": n, "k": k, "fillers": count,
                             "horn": {str(i): [list(y.sigma), repr(y.base)] for i, y in family.items()}}
                    if bad_inner and witness is None:
                        witness = found
                    if count == 0 and kan_witness is None:
                        kan_witness = found
    return InfinityVerdict(exist, unique, kan, checked, witness, kan_witness)


def spine_bijection(S: FiniteSimplicialSet, n: int) -> bool:
    """Whether restriction Hom(Δ^n, S) -> Hom(Spine(Δ^n), S) is bijective."""
    edges = S.simplices(1)
    restricted = {}
    for z in S.simplices(n):
        spine = tuple(S.pullback((v, v + 1), z) for v in range(n)) if n >= 1 else (z,)
        if spine in restricted:
            return False
        restricted[spine] = z
    if n == 0:
        return True
    by_start: dict = {}
    for e in edges:
        by_start.setdefault(S.vertex(e, 0), []).append(e)
    paths = [(e,) for e in edges]
    for _ in range(n - 1):
        paths = [p + (e,) for p in paths for e in by_start.get(S.vertex(p[-1], 1), [])]
    return set(paths) == set(restricted)


# ---------------------------------------------------------------- stratification
@dataclass(frozen=True)
class StratifiedSimplicialSet:
    base: FiniteSimplicialSet
    poset: FinitePoset
    labels: Mapping

    def label_of(self, x: Simplex) -> tuple:
        return tuple(self.labels[v] for v in self.base.vertices(x))


def stratify_and_fiber(S: FiniteSimplicialSet, labels: Mapping, a, poset: FinitePoset):
    """Stratify S by vertex labels and return it with the fiber over ``a``.

    ``labels`` maps vertex ids to poset elements; a plain sequence is read in
    the order of ``S.nondegen[0]``.
    """
    if not isinstance(labels, Mapping):
        labels = dict(zip(S.nondegen[0], labels))
    for v in S.nondegen[0]:
        if v not in labels:
            raise UsageError(f"vertex {v!r} has no label")
        if labels[v] not in poset:
            raise UsageError(f"label {labels[v]!r} not in the poset")
    for x in S.nondegen.get(1, []):
        s, t = S.vertices(nondegenerate(x, 1))
        if not poset.le(labels[s], labels[t]):
            raise StratificationError(f"edge {x!r} goes from {labels[s]!r} to {labels[t]!r}")
    stratified = StratifiedSimplicialSet(S, poset, dict(labels))
    nondegen = {}
    faces = {}
    for d in range(S.max_dim + 1):
        for x in S.nondegen[d]:
            if all(labels[v] == a for v in S.vertices(nondegenerate(x, d))):
                nondegen.setdefault(d, []).append(x)
                if d >= 1:
                    faces[x] = S.faces[x]
    return stratified, FiniteSimplicialSet(S.max_dim, nondegen, faces)
