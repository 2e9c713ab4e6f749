"""Exact polytopes P^a_i, the vertex maps q and their multilinear extensions
q̄, fiber polytopes of the simplex filtration, and the audits built on them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Iterable, Mapping, Sequence

from .cube_calculus import canonical_form, cube_point, plateau
from .errors import UsageError
from .linalg import det_bareiss, det_fraction, rank
from .poset_core import IncreasingSequence
from .rational import DEFAULT_GRID, format_rational

Vector = tuple[Fraction, ...]
VertexMap = Callable[[IncreasingSequence, int, Sequence[int]], tuple[int, ...]]


def _dot(c: Sequence, x: Sequence) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(c, x)), Fraction(0))


@dataclass(frozen=True)
class RationalPolytope:
    """``{x : <c, x> <= c0 for each inequality, <a, x> = a0 for each equality}``.

    ``vertices`` are supplied in closed form and certified; ``faces`` is the
    family of vertex-index sets cut out by subsets of the inequalities.
    """

    dim: int
    inequalities: tuple[tuple[Vector, Fraction], ...]
    vertices: tuple[Vector, ...]
    equalities: tuple[tuple[Vector, Fraction], ...] = ()
    labels: tuple = ()
    faces: frozenset = field(default=frozenset(), compare=False)

    def __post_init__(self):
        for v in self.vertices:
            if len(v) != self.dim:
                raise UsageError("vertex of the wrong dimension")
            if not self.contains(v):
                raise UsageError(f"listed vertex {v} violates the constraints")
            normals = [c for c, _ in self.equalities] + [c for c in self.tight_normals(v)]
            if rank(normals) != self.dim:
                raise UsageError(f"listed vertex {v} fails the tight-rank certificate")
        object.__setattr__(self, "faces", self._face_lattice())

    def contains(self, x: Sequence) -> bool:
        return (all(_dot(c, x) <= c0 for c, c0 in self.inequalities)
                and all(_dot(a, x) == a0 for a, a0 in self.equalities))

    def tight(self, x: Sequence) -> frozenset[int]:
        return frozenset(k for k, (c, c0) in enumerate(self.inequalities) if _dot(c, x) == c0)

    def tight_normals(self, x: Sequence) -> list[Vector]:
        return [self.inequalities[k][0] for k in sorted(self.tight(x))]

    def on_boundary(self, x: Sequence) -> bool:
        """Whether x ∈ P lies on a proper face (some nontrivial inequality is tight)."""
        return any(any(c) for c in self.tight_normals(x))

    def _face_lattice(self) -> frozenset:
        every = frozenset(range(len(self.vertices)))
        incidences = {frozenset(k for k, v in enumerate(self.vertices) if row in self.tight(v))
                      for row in range(len(self.inequalities))}
        faces = {every, frozenset()}
        frontier = set(faces)
        while frontier:
            new = set()
            for face in frontier:
                for inc in incidences:
                    meet = face & inc
                    if meet not in faces:
                        new.add(meet)
            faces |= new
            frontier = new
        return frozenset(faces)

    def face_dims(self) -> dict[frozenset, int]:
        """Dimension of each face: affine rank of its vertices (-1 for the empty face)."""
        out = {}
        for face in self.faces:
            pts = [self.vertices[k] for k in sorted(face)]
            if not pts:
                out[face] = -1
                continue
            out[face] = rank([[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]) if len(pts) > 1 else 0
        return out

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "inequalities": [[format_rational(x) for x in c] + [format_rational(c0)]
                             for c, c0 in self.inequalities],
            "equalities": [[format_rational(x) for x in a] + [format_rational(a0)]
                           for a, a0 in self.equalities],
            "vertices": [[format_rational(x) for x in v] for v in self.vertices],
            "faces": sorted(sorted(f) for f in self.faces),
        }


def _band_check(seq: IncreasingSequence, i: int) -> None:
    if not 0 <= i < seq.length or seq[i] == seq[i + 1]:
        raise UsageError(f"position {i} does not start a band of the sequence")


def build_P(seq: IncreasingSequence, i: int) -> RationalPolytope:
    """P = I^{n-1} ∩ {Σ_{j<=i} x_j <= 1} ∩ {Σ_{j>=i+1} x_j <= 1}."""
    _band_check(seq, i)
    n = seq.length
    d = n - 1
    unit = lambda k, val: tuple(Fraction(val) if r == k else Fraction(0) for r in range(d))
    ineqs = []
    for k in range(d):
        ineqs.append((unit(k, -1), Fraction(0)))
        ineqs.append((unit(k, 1), Fraction(1)))
    if i >= 1:
        ineqs.append((tuple(Fraction(int(r < i)) for r in range(d)), Fraction(1)))
    if i + 1 <= n - 1:
        ineqs.append((tuple(Fraction(int(r >= i)) for r in range(d)), Fraction(1)))
    vertices, labels = [], []
    for j in range(i + 1):
        for k in range(i + 1, n + 1):
            vertices.append(tuple(Fraction(int(r + 1 in (j, k))) for r in range(d)))
            labels.append((j, k))
    return RationalPolytope(d, tuple(ineqs), tuple(vertices), labels=tuple(labels))


def simplex_fiber(seq: IncreasingSequence, s) -> RationalPolytope:
    """``{t ∈ |Δ^n| : Σ t_k f(a_k) = s}`` for a level strictly inside a band."""
    s = Fraction(s)
    h = seq.heights()
    n = seq.length
    band = next((k for k in range(n) if h[k] > s > h[k + 1]), None)
    if band is None:
        raise UsageError(f"level {s} is not strictly inside a band")
    d = n + 1
    ineqs = tuple((tuple(Fraction(-1 if r == m else 0) for r in range(d)), Fraction(0)) for m in range(d))
    eqs = ((tuple(Fraction(1) for _ in range(d)), Fraction(1)), (tuple(h), s))
    vertices, labels = [], []
    for j in range(band + 1):
        for k in range(band + 1, n + 1):
            lam = (s - h[k]) / (h[j] - h[k])
            vertices.append(tuple(lam if r == j else (1 - lam if r == k else Fraction(0)) for r in range(d)))
            labels.append((j, k))
    return RationalPolytope(d, ineqs, tuple(vertices), eqs, tuple(labels))


def canonical_bijection(P: RationalPolytope, Q: RationalPolytope) -> dict[int, int]:
    """Match vertices carrying the same (j, k) label."""
    where = {lab: k for k, lab in enumerate(Q.labels)}
    return {k: where[lab] for k, lab in enumerate(P.labels) if lab in where}


def comb_equiv(P: RationalPolytope, Q: RationalPolytope, bijection: Mapping[int, int] | None = None) -> bool:
    """Whether the vertex bijection carries the face lattice of P onto that of Q."""
    if bijection is None:
        bijection = canonical_bijection(P, Q)
    if len(P.vertices) != len(Q.vertices):
        return False
    if sorted(bijection) != list(range(len(P.vertices))):
        return False
    if sorted(bijection.values()) != list(range(len(Q.vertices))):
        return False
    image = {frozenset(bijection[v] for v in face) for face in P.faces}
    return image == set(Q.faces)


def ray_hit(P: RationalPolytope, p: Sequence, q: Sequence) -> Vector:
    """The point where the half-line p + R_+(q - p) leaves P."""
    p = tuple(Fraction(x) for x in p)
    q = tuple(Fraction(x) for x in q)
    if p == q:
        raise UsageError("q must differ from p")
    if any(not _dot(c, p) < c0 for c, c0 in P.inequalities if any(c)):
        raise UsageError("p is not an interior point")
    direction = tuple(b - a for a, b in zip(p, q))
    if any(_dot(a, direction) != 0 for a, _ in P.equalities):
        raise UsageError("direction leaves the affine hull")
    ratios = [(c0 - _dot(c, p)) / _dot(c, direction)
              for c, c0 in P.inequalities if _dot(c, direction) > 0]
    if not ratios:
        raise UsageError("the half-line never leaves P")
    lam = min(ratios)
    return tuple(a + lam * b for a, b in zip(p, direction))


# ------------------------------------------------------------------ q and q̄
def q_vertex(seq: IncreasingSequence, i: int, v: Sequence[int]) -> tuple[int, ...]:
    """Vertex map: keep only the last 1 of the low block and the first 1 of the high block."""
    n = seq.length
    if len(v) != n - 1:
        raise UsageError(f"expected a vertex of I^{n - 1}")
    low = [r for r in range(min(i, n - 1)) if v[r]]
    high = [r for r in range(i, n - 1) if v[r]]
    out = [0] * (n - 1)
    if low:
        out[low[-1]] = 1
    if high:
        out[high[0]] = 1
    return tuple(out)


@dataclass(frozen=True)
class CRep:
    """C-representation: t = Σ_v coef(v)·v with product-form coefficients."""

    point: Vector
    coefficients: Mapping[tuple[int, ...], Fraction]

    def total(self) -> Fraction:
        return sum(self.coefficients.values(), Fraction(0))


def c_rep(t: Sequence) -> CRep:
    t = tuple(Fraction(x) for x in t)
    coeffs = {}
    for v in product((0, 1), repeat=len(t)):
        c = Fraction(1)
        for bit, x in zip(v, t):
            c *= x if bit else 1 - x
        coeffs[v] = c
    return CRep(t, coeffs)


def multilinear_extension(g: Callable[[tuple[int, ...]], Sequence], t: Sequence) -> Vector:
    """ḡ(t) = Σ_v coef_t(v)·g(v), linear on C-representations."""
    rep = c_rep(t)
    total = None
    for v, c in rep.coefficients.items():
        if c == 0:
            continue
        image = g(v)
        total = [c * Fraction(x) for x in image] if total is None else \
            [acc + c * Fraction(x) for acc, x in zip(total, image)]
    if total is None:  # every coefficient vanished; only possible off the cube
        total = [Fraction(0)] * len(g(tuple(0 for _ in t)))
    return tuple(total)


def qbar(seq: IncreasingSequence, i: int, t: Sequence, vertex_map: VertexMap = q_vertex) -> Vector:
    if len(t) != seq.length - 1:
        raise UsageError(f"expected a point of I^{seq.length - 1}")
    return multilinear_extension(lambda v: vertex_map(seq, i, v), t)


def qbar_partial(seq: IncreasingSequence, i: int, t: Sequence, j: int,
                 vertex_map: VertexMap = q_vertex) -> Vector:
    """∂q̄/∂t_j at t (exact: q̄ is affine in each coordinate separately)."""
    up = list(t)
    down = list(t)
    up[j], down[j] = Fraction(1), Fraction(0)
    a = qbar(seq, i, up, vertex_map)
    b = qbar(seq, i, down, vertex_map)
    return tuple(x - y for x, y in zip(a, b))


def jacobian_det(seq: IncreasingSequence, i: int, t: Sequence) -> Fraction:
    """Determinant of the Jacobian of q̄ at t, exactly."""
    cols = [qbar_partial(seq, i, t, j) for j in range(len(t))]
    return det_fraction([[col[r] for col in cols] for r in range(len(cols))])


# ------------------------------------------------------------ Jacobian audit
@dataclass(frozen=True)
class JacobianAudit:
    n: int
    i: int
    class_size: int
    min_det: int
    max_det: int
    all_positive: bool
    variant_count: int
    variant_min_det: int
    variants_nonnegative: bool
    columns_match: bool

    @property
    def ok(self) -> bool:
        return self.all_positive and self.variants_nonnegative and self.columns_match

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _column_choices(N: int, j: int, rows: Iterable[int]) -> list[tuple[int, ...]]:
    out = [tuple(int(r == j) for r in range(N))]
    for r in rows:
        out.append(tuple(1 if x == j else (-1 if x == r else 0) for x in range(N)))
    return out


def s_prime_columns(n: int, i: int) -> list[list[tuple[int, ...]]]:
    """Allowed columns of S': unit diagonal, at most one -1, above the diagonal
    in the low block and below it in the high block (0-based column j)."""
    N = n - 1
    return [_column_choices(N, j, range(j) if j < i else range(j + 1, N)) for j in range(N)]


def r_columns(n: int, i: int) -> list[set[tuple[int, ...]]]:
    """Nonzero columns R_j(v) = q(v with v_j=1) - q(v with v_j=0), over all v."""
    N = n - 1
    dummy = _SeqStub(n)
    out = []
    for j in range(N):
        cols = set()
        for rest in product((0, 1), repeat=N - 1):
            v0 = rest[:j] + (0,) + rest[j:]
            v1 = rest[:j] + (1,) + rest[j:]
            diff = tuple(a - b for a, b in zip(q_vertex(dummy, i, v1), q_vertex(dummy, i, v0)))
            if any(diff):
                cols.add(diff)
        out.append(cols)
    return out


@dataclass(frozen=True)
class _SeqStub:
    """Stand-in carrying only the length; q depends on nothing else."""
    length: int


def jacobian_class_audit(n: int, i: int) -> JacobianAudit:
    if not 1 <= n <= 7:
        raise UsageError("jacobian_class_audit supports 1 <= n <= 7")
    if not 0 <= i < n:
        raise UsageError(f"band index {i} out of range for n={n}")
    N = n - 1
    columns = s_prime_columns(n, i)
    dets = [det_bareiss([[col[r] for col in cols] for r in range(N)]) for cols in product(*columns)]
    variants = [_column_choices(N, j, [r for r in range(N) if r != j]) for j in range(N)]
    vdets = [det_bareiss([[col[r] for col in cols] for r in range(N)]) for cols in product(*variants)]
    match = all(r == set(c) for r, c in zip(r_columns(n, i), columns))
    return JacobianAudit(
        n=n, i=i, class_size=len(dets), min_det=min(dets), max_det=max(dets),
        all_positive=min(dets) >= 1, variant_count=len(vdets), variant_min_det=min(vdets),
        variants_nonnegative=min(vdets) >= 0, columns_match=match,
    )


# ---------------------------------------------------------------- lemma suite
LEMMAS = (
    "zero_coordinate",
    "hyperplane_membership",
    "boundary_to_boundary",
    "prefix_zeros",
    "max_index_nonzero",
    "collision_face",
    "compatibility",
    "quotient_injectivity",
    "collapsed_face",
)


@dataclass
class LemmaReport:
    seq: tuple
    i: int
    cases: dict = field(default_factory=lambda: {name: 0 for name in LEMMAS})
    counterexamples: dict = field(default_factory=lambda: {name: [] for name in LEMMAS})

    def fail(self, lemma: str, **witness) -> None:
        self.counterexamples[lemma].append(
            {k: _jsonable(v) for k, v in witness.items()})

    @property
    def ok(self) -> bool:
        return not any(self.counterexamples.values())

    def total_counterexamples(self) -> int:
        return sum(len(v) for v in self.counterexamples.values())


def _jsonable(v):
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, (tuple, list)):
        return [_jsonable(x) for x in v]
    return v


def verify_qbar_lemmas(seq: IncreasingSequence, i: int, grid: Sequence = DEFAULT_GRID,
                       vertex_map: VertexMap = q_vertex) -> LemmaReport:
    """Evaluate the nine q̄ lemmas on every sample of grid^(n-1) plus all cube vertices."""
    _band_check(seq, i)
    n = seq.length
    N = n - 1
    P = build_P(seq, i)
    s = seq.band_midpoint(i)
    samples = sorted(set(product([Fraction(g) for g in grid], repeat=N)) |
                     set(product((Fraction(0), Fraction(1)), repeat=N)))
    low = range(0, min(i, N))        # 0-based slots of positions 1..i
    high = range(i, N)               # positions i+1..n-1
    image = {t: qbar(seq, i, t, vertex_map) for t in samples}
    canon = {t: canonical_form(seq, t, s).coords for t in samples}
    rep = LemmaReport(tuple(seq.entries), i)

    h = seq.heights()
    plus = plateau(seq, h[i + 1])
    minus = plateau(seq, h[i])

    for t in samples:
        q = image[t]
        any_one = any(x == 1 for x in t)

        rep.cases["zero_coordinate"] += 1
        for j in range(N):
            if t[j] == 0 and q[j] != 0:
                rep.fail("zero_coordinate", t=t, image=q, j=j + 1, direction="t_j=0")
            if not any_one and q[j] == 0 and t[j] != 0:
                rep.fail("zero_coordinate", t=t, image=q, j=j + 1, direction="converse")

        rep.cases["hyperplane_membership"] += 1
        for block, name in ((low, "H1"), (high, "H2")):
            has_one = any(t[j] == 1 for j in block)
            on_plane = bool(block) and sum((q[j] for j in block), Fraction(0)) == 1
            if has_one != on_plane:
                rep.fail("hyperplane_membership", t=t, image=q, plane=name)

        rep.cases["boundary_to_boundary"] += 1
        cube_boundary = any(x in (0, 1) for x in t)
        if not P.contains(q) or cube_boundary != P.on_boundary(q):
            rep.fail("boundary_to_boundary", t=t, image=q, cube_boundary=cube_boundary)

        rep.cases["prefix_zeros"] += 1
        for j in low:
            if t[j] == 1 and any(q[k] != 0 for k in range(j)):
                rep.fail("prefix_zeros", t=t, image=q, j=j + 1, block="low")
        for j in high:
            if t[j] == 1 and any(q[k] != 0 for k in range(j + 1, N)):
                rep.fail("prefix_zeros", t=t, image=q, j=j + 1, block="high")

        rep.cases["max_index_nonzero"] += 1
        ones_low = [j for j in low if t[j] == 1]
        ones_high = [j for j in high if t[j] == 1]
        if ones_low and q[ones_low[-1]] == 0:
            rep.fail("max_index_nonzero", t=t, image=q, k=ones_low[-1] + 1)
        if ones_high and q[ones_high[0]] == 0:
            rep.fail("max_index_nonzero", t=t, image=q, k=ones_high[0] + 1)

        rep.cases["compatibility"] += 1
        rep_image = image.get(canon[t])
        if rep_image is None:
            rep_image = qbar(seq, i, canon[t], vertex_map)
        if rep_image != q:
            rep.fail("compatibility", t=t, canonical=canon[t], image=q)

        rep.cases["collapsed_face"] += 1
        # F^{a,+}: plateau of a_{i+1} ends at q_end < n
        if plus[1] < n:
            q_end = plus[1]
            in_union = any(t[k - 1] == 1 for k in range(i + 1, q_end + 1) if k <= N)
            in_face = (sum((q[j] for j in high), Fraction(0)) == 1
                       and all(q[k - 1] == 0 for k in range(q_end + 1, n)))
            if in_union != in_face:
                rep.fail("collapsed_face", t=t, image=q, face="+")
        if minus[0] > 0:
            p_start = minus[0]
            in_union = any(t[k - 1] == 1 for k in range(p_start, i + 1) if k >= 1)
            in_face = (sum((q[j] for j in low), Fraction(0)) == 1
                       and all(q[k - 1] == 0 for k in range(1, p_start)))
            if in_union != in_face:
                rep.fail("collapsed_face", t=t, image=q, face="-")

    by_image: dict = {}
    for t in samples:
        by_image.setdefault(image[t], []).append(t)
    for q, pre in by_image.items():
        for a, b in combinations(pre, 2):
            rep.cases["collision_face"] += 1
            if not any(a[j] == b[j] and a[j] in (0, 1) for j in range(N)):
                rep.fail("collision_face", t=a, t_prime=b, image=q)

    rep.cases["quotient_injectivity"] += len(samples) * (len(samples) - 1) // 2
    by_canon: dict = {}
    for t in samples:
        by_canon.setdefault(canon[t], set()).add(image[t])
    for c, imgs in by_canon.items():
        if len(imgs) > 1:
            rep.fail("quotient_injectivity", canonical=c, images=sorted(imgs), reason="class splits")
    for q, pre in by_image.items():
        classes = {canon[t] for t in pre}
        if len(classes) > 1:
            rep.fail("quotient_injectivity", image=q, classes=sorted(classes), reason="classes merge")
    return rep


def q_vertex_without_k1_zeroing(seq: IncreasingSequence, i: int, v: Sequence[int]) -> tuple[int, ...]:
    """Mutant of q_vertex that leaves the low block untouched (sensitivity check)."""
    out = list(q_vertex(seq, i, v))
    for r in range(min(i, seq.length - 1)):
        out[r] = int(v[r])
    return tuple(out)
