"""Exact calculus on the morphism cubes F(Δ^n)(i, j) ≅ I^(j-i-1).

Coordinates of a point of F(Δ^n)(i, j) are indexed by the objects strictly
between ``i`` and ``j``: ``coords[l]`` is ``t_{i+1+l}``.  Where the relation
~_a is concerned the two endpoints are treated as virtual coordinates equal
to 1; they are never stored.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .errors import UsageError
from .poset_core import DeltaAMorphism, IncreasingSequence, StrictSequence, condense
from .rational import as_fractions, format_rational

ZERO, ONE = Fraction(0), Fraction(1)


@dataclass(frozen=True)
class CubePoint:
    """A point of F(Δ^n)(i, j)."""

    n: int
    i: int
    j: int
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", as_fractions(self.coords))
        if not 0 <= self.i <= self.j <= self.n:
            raise UsageError(f"need 0 <= i <= j <= n, got {(self.n, self.i, self.j)}")
        expected = max(self.j - self.i - 1, 0)
        if len(self.coords) != expected:
            raise UsageError(f"F(Δ^{self.n})({self.i},{self.j}) has {expected} coordinates, "
                             f"got {len(self.coords)}")
        if any(not ZERO <= t <= ONE for t in self.coords):
            raise UsageError(f"coordinate outside [0,1]: {self.coords}")

    def t(self, k: int) -> Fraction:
        """Object-indexed coordinate with virtual endpoints ``t_i = t_j = 1``."""
        if k == self.i or k == self.j:
            return ONE
        return self.coords[k - self.i - 1]


def cube_point(n: int, coords: Iterable) -> CubePoint:
    """A point of the top cube F(Δ^n)(0, n)."""
    return CubePoint(n, 0, n, tuple(coords))


def _zeros(n: int, i: int, j: int) -> CubePoint:
    return CubePoint(n, i, j, (ZERO,) * max(j - i - 1, 0))


# ------------------------------------------------------------ structural maps
def face(n: int, i: int, p: CubePoint) -> CubePoint:
    """F(δ^i) on F(Δ^{n-1})(0, n-1); inserts ``t_i = 0``.

    The outer faces keep the coordinates and land in F(Δ^n)(1, n) for i = 0
    and in F(Δ^n)(0, n-1) for i = n.
    """
    if not 0 <= i <= n or n < 1:
        raise UsageError(f"face index {i} out of range for n={n}")
    if (p.n, p.i, p.j) != (n - 1, 0, n - 1):
        raise UsageError("face expects a point of F(Δ^{n-1})(0, n-1)")
    if i == 0:
        return CubePoint(n, 1, n, p.coords)
    if i == n:
        return CubePoint(n, 0, n - 1, p.coords)
    return CubePoint(n, 0, n, p.coords[:i - 1] + (ZERO,) + p.coords[i - 1:])


def compose(p: CubePoint, q: CubePoint) -> CubePoint:
    """Composition F(Δ^n)(i, k) x F(Δ^n)(k, j) -> F(Δ^n)(i, j); inserts ``t_k = 1``."""
    if p.n != q.n or p.j != q.i:
        raise UsageError("points are not composable")
    if p.i == p.j:
        return q
    if q.i == q.j:
        return p
    return CubePoint(p.n, p.i, q.j, p.coords + (ONE,) + q.coords)


def compose_at(n: int, k: int, p: CubePoint, q: CubePoint) -> CubePoint:
    if not 0 <= k <= n:
        raise UsageError(f"composition index {k} out of range for n={n}")
    if (p.n, p.i, p.j) != (n, 0, k) or (q.n, q.i, q.j) != (n, k, n):
        raise UsageError("compose_at expects points of F(0,k) and F(k,n)")
    return compose(p, q)


def degeneracy(n: int, i: int, p: CubePoint) -> CubePoint:
    """F(σ^i): F(Δ^{n+1})(0, n+1) = I^n -> F(Δ^n)(0, n) = I^{n-1}."""
    if not 0 <= i <= n or n < 1:
        raise UsageError(f"degeneracy index {i} out of range for n={n}")
    if (p.n, p.i, p.j) != (n + 1, 0, n + 1):
        raise UsageError("degeneracy expects a point of F(Δ^{n+1})(0, n+1)")
    t = p.coords
    if i == 0:
        out = t[1:]
    elif i == n:
        out = t[:-1]
    else:
        out = t[:i - 1] + (max(t[i - 1], t[i]),) + t[i + 1:]
    return CubePoint(n, 0, n, out)


def structural_cube_map(kind: str, n: int, index: int, *points: CubePoint) -> CubePoint:
    if kind == "face":
        return face(n, index, *points)
    if kind == "compose":
        return compose_at(n, index, *points)
    if kind == "degeneracy":
        return degeneracy(n, index, *points)
    raise UsageError(f"unknown structural map {kind!r}")


def delta_map(phi: Sequence[int], m: int, p: CubePoint) -> CubePoint:
    """F(φ)(i, j) for a monotone ``φ: [n] -> [m]``.

    On the poset level E ↦ φ(E), which in coordinates makes each target slot
    the maximum of the source coordinates hitting it (0 if none does).
    """
    phi = tuple(phi)
    if len(phi) != p.n + 1 or any(x > y for x, y in zip(phi, phi[1:])) or phi[-1] > m:
        raise UsageError("φ must be a monotone map [n] -> [m]")
    lo, hi = phi[p.i], phi[p.j]
    slots = {k: ZERO for k in range(lo + 1, hi)}
    for l in range(p.i + 1, p.j):
        k = phi[l]
        if lo < k < hi:
            slots[k] = max(slots[k], p.t(l))
    return CubePoint(m, lo, hi, tuple(slots[k] for k in range(lo + 1, hi)))


# ----------------------------------------------------------- decompositions
def break_indices(p: CubePoint) -> list[int]:
    """``[i_0 = i, i_1, ..., i_{k+1} = j]``: endpoints plus the coordinates equal to 1."""
    return [p.i] + [k for k in range(p.i + 1, p.j) if p.t(k) == ONE] + [p.j] if p.i < p.j else [p.i]


def unbroken_decomposition(p: CubePoint) -> list[tuple[tuple[int, int], CubePoint]]:
    """Unique factorisation into pieces with no interior coordinate equal to 1."""
    idx = break_indices(p)
    pieces = []
    for a, b in zip(idx, idx[1:]):
        pieces.append(((a, b), CubePoint(p.n, a, b, tuple(p.t(k) for k in range(a + 1, b)))))
    if not pieces:
        pieces.append(((p.i, p.i), p))
    return pieces


def recompose(pieces: Sequence[tuple[tuple[int, int], CubePoint]]) -> CubePoint:
    result = pieces[0][1]
    for _, q in pieces[1:]:
        result = compose(result, q)
    return result


def breaking_sequence(seq: IncreasingSequence, p: CubePoint) -> StrictSequence:
    """τ(γ): the condensed sequence of objects at which γ breaks."""
    _check_top(seq, p)
    return condense(IncreasingSequence(seq.poset, tuple(seq[k] for k in break_indices(p))))


# ----------------------------------------------------------- leveled points
def _check_top(seq: IncreasingSequence, p: CubePoint) -> None:
    if (p.n, p.i, p.j) != (seq.length, 0, seq.length):
        raise UsageError("point must lie in F(Δ^n)(0, n) with n the sequence length")


def _check_level(seq: IncreasingSequence, s: Fraction) -> None:
    h = seq.heights()
    if not h[-1] <= s <= h[0]:
        raise UsageError(f"level {s} outside [{h[-1]}, {h[0]}]")


@dataclass(frozen=True)
class LeveledPoint:
    """A pair (γ, s) with γ ∈ F(Δ^n)(0, n) and f(a_n) <= s <= f(a_0)."""

    seq: IncreasingSequence
    point: CubePoint
    s: Fraction

    def __post_init__(self):
        object.__setattr__(self, "s", Fraction(self.s))
        _check_top(self.seq, self.point)
        _check_level(self.seq, self.s)

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return self.point.coords

    def to_json(self) -> dict:
        return {
            "seq": list(self.seq.entries),
            "coords": [format_rational(t) for t in self.coords],
            "s": format_rational(self.s),
        }


def leveled(seq: IncreasingSequence, coords: Iterable, s) -> LeveledPoint:
    return LeveledPoint(seq, cube_point(seq.length, coords), Fraction(s))


def stratum_of(seq: IncreasingSequence, p: CubePoint, s) -> object:
    """π_a(γ, s)."""
    s = Fraction(s)
    _check_top(seq, p)
    _check_level(seq, s)
    h = seq.heights()
    if s == h[0]:
        return seq[0]
    idx = break_indices(p)
    for a, b in zip(idx, idx[1:]):
        if h[b] <= s < h[a]:
            return seq[b]
    raise AssertionError("break intervals do not cover the level")  # pragma: no cover


def plateau(seq: IncreasingSequence, s: Fraction) -> tuple[int, int] | None:
    """The maximal ``[p, q]`` with ``f(a_p) = ... = f(a_q) = s``, if s is critical."""
    h = seq.heights()
    hits = [k for k, v in enumerate(h) if v == s]
    if not hits:
        return None
    return hits[0], hits[-1]


def canonical_form(seq: IncreasingSequence, p: CubePoint | Iterable, s) -> LeveledPoint:
    """Chosen representative of the ~_a class of (p, s).

    Noncritical level in the band ``i``: keep the window between the last
    coordinate equal to 1 at or before ``i`` and the first one at or after
    ``i+1``, zero the rest.  Critical level on a plateau ``[p, q]``: if the
    plateau carries a 1 the class is that of the basis point ``e_p``,
    otherwise the same window rule applies around the plateau.
    """
    n = seq.length
    if not isinstance(p, CubePoint):
        p = cube_point(n, p)
    s = Fraction(s)
    _check_top(seq, p)
    _check_level(seq, s)
    if n <= 1:
        return LeveledPoint(seq, p, s)
    t = [p.t(k) for k in range(n + 1)]
    flat = plateau(seq, s)
    if flat is not None and any(t[k] == ONE for k in range(flat[0], flat[1] + 1)):
        lead = flat[0]
        coords = tuple(ONE if k == lead else ZERO for k in range(1, n))
        return LeveledPoint(seq, cube_point(n, coords), s)
    if flat is not None:
        low, high = flat[1], flat[0]
    else:
        h = seq.heights()
        band = next(k for k in range(n) if h[k] > s > h[k + 1])
        low, high = band, band + 1
    M = max(m for m in range(low + 1) if t[m] == ONE)
    L = min(l for l in range(high, n + 1) if t[l] == ONE)
    coords = tuple(t[k] if M <= k <= L else ZERO for k in range(1, n))
    return LeveledPoint(seq, cube_point(n, coords), s)


def same_class(x: LeveledPoint, y: LeveledPoint) -> bool:
    if x.seq != y.seq or x.s != y.s:
        return False
    return canonical_form(x.seq, x.point, x.s).point == canonical_form(y.seq, y.point, y.s).point


# ------------------------------------------------------------------ C_A maps
def ca_structural_map_padded(phi: DeltaAMorphism, lp: LeveledPoint,
                             delta: CubePoint, theta: CubePoint) -> LeveledPoint:
    """C_A(φ) with explicit padding δ ∈ F(0, φ(0)) and θ ∈ F(φ(n), m)."""
    if lp.seq != phi.source:
        raise UsageError("point does not lie over the source of φ")
    m = phi.target.length
    middle = delta_map(phi.map, m, lp.point)
    if (delta.n, delta.i, delta.j) != (m, 0, middle.i) or (theta.n, theta.i, theta.j) != (m, middle.j, m):
        raise UsageError("padding points live in the wrong cubes")
    image = compose(compose(delta, middle), theta)
    h = phi.target.heights()
    assert h[-1] <= lp.s <= h[0], "C_A(φ) left the level range of the target"
    return canonical_form(phi.target, image, lp.s)


def ca_structural_map(phi: DeltaAMorphism, lp: LeveledPoint) -> LeveledPoint:
    """C_A(φ)(γ, s) = canonical(θ ∘ F(φ)(0,n)(γ) ∘ δ, s) with all-zero padding."""
    m = phi.target.length
    lo, hi = phi.map[0], phi.map[-1]
    return ca_structural_map_padded(phi, lp, _zeros(m, 0, lo), _zeros(m, hi, m))


# -------------------------------------------------------- brute-force oracle
def grid_points(n: int, grid: Sequence[Fraction]) -> list[tuple[Fraction, ...]]:
    return [tuple(c) for c in product(grid, repeat=max(n - 1, 0))]


def generating_moves(seq: IncreasingSequence, coords: Sequence[Fraction], s: Fraction,
                     grid: Sequence[Fraction]) -> set[tuple[Fraction, ...]]:
    """Grid points reachable in one step of the defining relation of ~_a.

    A step picks ``i <= j`` with ``t_i = t_j = 1`` (virtual endpoints count)
    and ``f(a_j) <= s <= f(a_i)``, keeps the coordinates in ``[i, j]`` and
    replaces all others freely.
    """
    n = seq.length
    h = seq.heights()
    t = [ONE] + list(coords) + [ONE]
    out = set()
    for i in range(n + 1):
        if t[i] != ONE or not s <= h[i]:
            continue
        for j in range(i, n + 1):
            if t[j] != ONE or not h[j] <= s:
                continue
            free = [k for k in range(1, n) if not i <= k <= j]
            for values in product(grid, repeat=len(free)):
                u = list(coords)
                for k, v in zip(free, values):
                    u[k - 1] = v
                out.add(tuple(u))
    return out


def closure_classes(seq: IncreasingSequence, s, grid: Sequence[Fraction]) -> dict:
    """Connected components of the generating relation on the grid, by BFS.

    Restricting to grid points loses nothing as long as the grid contains 0
    and 1: pushing every off-grid value of a chain of moves to 0 gives a
    chain of moves between the same grid endpoints.
    """
    s = Fraction(s)
    component: dict = {}
    label = 0
    for start in grid_points(seq.length, grid):
        if start in component:
            continue
        component[start] = label
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in generating_moves(seq, x, s, grid):
                if y not in component:
                    component[y] = label
                    queue.append(y)
        label += 1
    return component


def oracle_mismatches(seq: IncreasingSequence, s, grid: Sequence[Fraction]) -> list[dict]:
    """Pairs on which canonical-form equality and BFS closure disagree."""
    comp = closure_classes(seq, s, grid)
    canon = {x: canonical_form(seq, x, s).coords for x in comp}
    bad = []
    reps: dict = {}
    for x in comp:
        if canon[x] in comp and comp[canon[x]] != comp[x]:
            bad.append({"point": x, "canonical": canon[x], "reason": "representative outside class"})
        reps.setdefault(canon[x], set()).add(comp[x])
    by_comp: dict = {}
    for x in comp:
        by_comp.setdefault(comp[x], set()).add(canon[x])
    for c, comps in reps.items():
        if len(comps) > 1:
            bad.append({"canonical": c, "reason": "one canonical form, several classes"})
    for k, forms in by_comp.items():
        if len(forms) > 1:
            bad.append({"class": k, "forms": sorted(forms), "reason": "one class, several canonical forms"})
    return bad


def critical_and_midpoint_levels(seq: IncreasingSequence) -> list[Fraction]:
    h = seq.heights()
    levels = set(h)
    for k in range(seq.length):
        if h[k] > h[k + 1]:
            levels.add((h[k] + h[k + 1]) / 2)
    return sorted(levels)
