from fractions import Fraction as Fr
from itertools import combinations, product

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import chain, seq
from stratcat import polytope_lab as pl
from stratcat.errors import UsageError
from stratcat.linalg import solve
from stratcat.rational import DEFAULT_GRID

H = Fr(1, 2)
A6 = chain(8)
C3 = chain(3)


def full(n):
    return seq(A6, *(f"a{k}" for k in range(n + 1)))


def brute_vertices(P):
    """Vertices by solving every square subsystem of tight constraints."""
    eqs = [(list(a), a0) for a, a0 in P.equalities]
    need = P.dim - len(eqs)
    found = set()
    for rows in combinations(P.inequalities, need):
        system = eqs + [(list(c), c0) for c, c0 in rows]
        x = solve([r for r, _ in system], [b for _, b in system])
        if x is not None and P.contains(x):
            found.add(x)
    return found


def square(dim=2):
    ineqs = []
    for k in range(dim):
        e = tuple(Fr(int(r == k)) for r in range(dim))
        ineqs += [(tuple(-x for x in e), Fr(0)), (e, Fr(1))]
    verts = tuple(tuple(Fr(b) for b in v) for v in product((0, 1), repeat=dim))
    return pl.RationalPolytope(dim, tuple(ineqs), verts)


def triangle():
    ineqs = ((( Fr(-1), Fr(0)), Fr(0)), ((Fr(0), Fr(-1)), Fr(0)), ((Fr(1), Fr(1)), Fr(1)))
    verts = ((Fr(0), Fr(0)), (Fr(1), Fr(0)), (Fr(0), Fr(1)))
    return pl.RationalPolytope(2, ineqs, verts)


class TestBuildP:
    def test_square_band(self):
        P = pl.build_P(full(3), 1)
        assert len(P.vertices) == 4
        assert set(P.vertices) == {(0, 0), (1, 0), (0, 1), (1, 1)}

    def test_triangle_band(self):
        P = pl.build_P(full(3), 2)
        assert set(P.vertices) == {(0, 0), (1, 0), (0, 1)}

    def test_point(self):
        P = pl.build_P(full(1), 0)
        assert P.vertices == ((),) and P.dim == 0

    def test_no_band(self):
        with pytest.raises(UsageError):
            pl.build_P(seq(A6, "a0", "a1", "a1"), 1)

    @pytest.mark.parametrize("n", range(1, 6))
    def test_vertices_match_brute_force(self, n):
        for i in range(n):
            P = pl.build_P(full(n), i)
            assert set(P.vertices) == brute_vertices(P)
            assert len(P.vertices) == (i + 1) * (n - i)

    def test_bad_vertex_rejected(self):
        sq = square()
        with pytest.raises(UsageError):
            pl.RationalPolytope(2, sq.inequalities, ((H, H),))

    def test_json(self):
        dump = pl.build_P(full(3), 2).to_json()
        assert dump["dim"] == 2 and len(dump["vertices"]) == 3
        assert len(dump["faces"]) == 8  # empty, 3 vertices, 3 edges, triangle


class TestSimplexFiber:
    def test_segment(self):
        Q = pl.simplex_fiber(seq(C3, "a0", "a1", "a2"), H)
        got = {v for v in Q.vertices}
        assert got == {(Fr(1, 4), 0, Fr(3, 4)), (0, H, H)}

    def test_point(self):
        Q = pl.simplex_fiber(seq(C3, "a0", "a1"), Fr(3, 2))
        assert len(Q.vertices) == 1

    def test_triangle_band(self):
        s4 = seq(A6, "a0", "a1", "a2", "a3")
        Q = pl.simplex_fiber(s4, s4.band_midpoint(2))
        assert sorted(Q.labels) == [(0, 3), (1, 3), (2, 3)]

    def test_critical_level_rejected(self):
        with pytest.raises(UsageError):
            pl.simplex_fiber(seq(C3, "a0", "a1", "a2"), 1)

    @pytest.mark.parametrize("n", range(1, 5))
    def test_vertices_match_brute_force(self, n):
        s_ = full(n)
        for i in range(n):
            Q = pl.simplex_fiber(s_, s_.band_midpoint(i))
            assert set(Q.vertices) == brute_vertices(Q)


class TestCombEquiv:
    def test_segments(self):
        s3 = seq(C3, "a0", "a1", "a2")
        assert pl.comb_equiv(pl.build_P(s3, 1), pl.simplex_fiber(s3, H))

    def test_square_vs_triangle(self):
        assert not pl.comb_equiv(square(), triangle(), {0: 0, 1: 1, 2: 2})

    def test_self(self):
        sq = square()
        assert pl.comb_equiv(sq, sq, {k: k for k in range(4)})

    def test_wrong_bijection(self):
        sq = square()
        # vertices are (0,0),(0,1),(1,0),(1,1); swapping (1,0) and (1,1) breaks edges
        assert not pl.comb_equiv(sq, sq, {0: 0, 1: 1, 2: 3, 3: 2})

    def test_face_dims_of_cube(self):
        dims = square(3).face_dims()
        counts = {}
        for d in dims.values():
            counts[d] = counts.get(d, 0) + 1
        assert counts == {-1: 1, 0: 8, 1: 12, 2: 6, 3: 1}


class TestRayHit:
    def test_axis(self):
        assert pl.ray_hit(square(), (H, H), (1, H)) == (1, H)

    def test_diagonal(self):
        assert pl.ray_hit(square(), (H, H), (Fr(3, 4), Fr(3, 4))) == (1, 1)

    def test_triangle(self):
        assert pl.ray_hit(triangle(), (Fr(1, 4), Fr(1, 4)), (H, H)) == (H, H)

    def test_not_interior(self):
        with pytest.raises(UsageError):
            pl.ray_hit(square(), (0, H), (1, H))

    @settings(max_examples=100, deadline=None)
    @given(st.tuples(*[st.fractions(Fr(1, 10), Fr(9, 10), max_denominator=12)] * 2),
           st.tuples(*[st.fractions(-2, 2, max_denominator=12)] * 2))
    def test_hit_is_on_boundary(self, p, q):
        P = triangle()
        if not P.contains(p) or any(pl._dot(c, p) == c0 for c, c0 in P.inequalities) or p == q:
            return
        x = pl.ray_hit(P, p, q)
        assert P.contains(x) and P.on_boundary(x)
        assert pl.rank(P.tight_normals(x)) >= 1
        beyond = tuple(a + (b - a) * Fr(101, 100) for a, b in zip(p, x))
        assert not P.contains(beyond)


class TestQ:
    def test_vertex_examples(self):
        s4 = full(4)
        for a, b in product((0, 1), repeat=2):
            assert pl.q_vertex(s4, 0, (1, a, b)) == (1, 0, 0)
        assert pl.q_vertex(s4, 1, (1, 1, 1)) == (1, 1, 0)
        assert pl.q_vertex(s4, 1, (0, 0, 0)) == (0, 0, 0)

    def test_vertex_images_are_vertices(self):
        for n in range(1, 7):
            for i in range(n):
                P = pl.build_P(full(n), i)
                verts = set(P.vertices)
                for v in product((0, 1), repeat=n - 1):
                    assert tuple(Fr(x) for x in pl.q_vertex(full(n), i, v)) in verts

    def test_c_rep_examples(self):
        assert pl.c_rep([H]).coefficients == {(0,): H, (1,): H}
        third = pl.c_rep([Fr(1, 3), H]).coefficients
        assert third == {(0, 0): Fr(1, 3), (1, 0): Fr(1, 6), (0, 1): Fr(1, 3), (1, 1): Fr(1, 6)}
        point = pl.c_rep([1, 0]).coefficients
        assert point[(1, 0)] == 1 and sum(point.values()) == 1

    def test_c_rep_sums_to_one_symbolically(self):
        for N in range(1, 5):
            ts = sympy.symbols(f"t0:{N}")
            total = 0
            for v in product((0, 1), repeat=N):
                term = 1
                for bit, x in zip(v, ts):
                    term *= x if bit else 1 - x
                total += term
            assert sympy.expand(total) == 1

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.fractions(-3, 3, max_denominator=50), min_size=1, max_size=5))
    def test_c_rep_reconstructs(self, t):
        rep = pl.c_rep(t)
        assert rep.total() == 1
        recon = [sum(c * v[k] for v, c in rep.coefficients.items()) for k in range(len(t))]
        assert recon == list(t)
        if all(0 <= x <= 1 for x in t):
            assert all(c >= 0 for c in rep.coefficients.values())

    def test_qbar_examples(self):
        s4 = full(4)
        for u in DEFAULT_GRID:
            assert pl.qbar(s4, 1, (1, 1, u)) == (1, 1, 0)
        # the value printed next to this example upstream is (3/8, 1/4); the
        # four listed vertex images give (1/4, 1/2)
        assert pl.qbar(full(3), 2, (H, H)) == (Fr(1, 4), H)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_qbar_extends_q(self, n):
        for i in range(n):
            for v in product((0, 1), repeat=n - 1):
                assert pl.qbar(full(n), i, v) == tuple(Fr(x) for x in pl.q_vertex(full(n), i, v))

    @settings(max_examples=100, deadline=None)
    @given(n=st.integers(2, 5), data=st.data())
    def test_qbar_lands_in_P_and_is_multilinear(self, n, data):
        i = data.draw(st.integers(0, n - 1))
        t = data.draw(st.lists(st.sampled_from(DEFAULT_GRID + (Fr(2, 3), Fr(1, 5))),
                               min_size=n - 1, max_size=n - 1))
        s_ = full(n)
        q = pl.qbar(s_, i, t)
        assert pl.build_P(s_, i).contains(q)
        j = data.draw(st.integers(0, n - 2))
        lo, hi = list(t), list(t)
        lo[j], hi[j] = Fr(0), Fr(1)
        c = t[j]
        blend = tuple((1 - c) * a + c * b for a, b in zip(pl.qbar(s_, i, lo), pl.qbar(s_, i, hi)))
        assert q == blend

    def test_qbar_matches_sympy_polynomial(self):
        s_ = full(4)
        ts = sympy.symbols("t0:3")
        for i in range(4):
            poly = [0, 0, 0]
            for v in product((0, 1), repeat=3):
                w = 1
                for bit, x in zip(v, ts):
                    w *= x if bit else 1 - x
                img = pl.q_vertex(s_, i, v)
                poly = [p + w * b for p, b in zip(poly, img)]
            J = sympy.Matrix(poly).jacobian(ts)
            for t in product((Fr(1, 3), H, Fr(3, 4)), repeat=3):
                sub = dict(zip(ts, (sympy.Rational(x.numerator, x.denominator) for x in t)))
                assert tuple(Fr(str(sympy.nsimplify(p.subs(sub)))) for p in poly) == pl.qbar(s_, i, t)
                assert Fr(str(J.subs(sub).det())) == pl.jacobian_det(s_, i, t)

    def test_jacobian_positive_inside(self):
        for n in range(2, 5):
            for i in range(n):
                for t in product((Fr(1, 3), H, Fr(2, 3)), repeat=n - 1):
                    assert pl.jacobian_det(full(n), i, t) > 0


class TestJacobianAudit:
    def test_triangular_examples(self):
        from stratcat.linalg import det_bareiss
        assert det_bareiss([[1, -1], [0, 1]]) == 1
        assert det_bareiss([[1, 0], [-1, 1]]) == 1

    def test_n3_i1(self):
        audit = pl.jacobian_class_audit(3, 1)
        # both columns sit at the edge of their block, so only the identity remains
        assert audit.class_size == 1 and audit.min_det == audit.max_det == 1 and audit.ok

    @pytest.mark.parametrize("n", range(1, 7))
    def test_class_size_formula(self, n):
        N = n - 1
        for i in range(n):
            expected = 1
            for j in range(N):
                expected *= 1 + (j if j < i else N - 1 - j)
            assert pl.jacobian_class_audit(n, i).class_size == expected

    @pytest.mark.parametrize("n", range(1, 8))
    def test_full_class(self, n):
        for i in range(n):
            audit = pl.jacobian_class_audit(n, i)
            assert audit.ok and audit.min_det >= 1
            assert audit.variant_min_det >= 0

    def test_dets_agree_with_sympy(self):
        from stratcat.linalg import det_bareiss
        for cols in product(*pl.s_prime_columns(5, 2)):
            M = [[c[r] for c in cols] for r in range(4)]
            assert det_bareiss(M) == sympy.Matrix(M).det()

    def test_bounds(self):
        with pytest.raises(UsageError):
            pl.jacobian_class_audit(8, 0)


class TestLemmaSuite:
    def test_report_shape(self):
        rep = pl.verify_qbar_lemmas(full(3), 1)
        assert rep.ok and set(rep.cases) == set(pl.LEMMAS)
        # q̄ is the identity here, so no two samples collide
        assert rep.cases["collision_face"] == 0
        assert all(rep.cases[name] > 0 for name in pl.LEMMAS
                   if name not in ("collapsed_face", "collision_face"))
        assert pl.verify_qbar_lemmas(full(3), 2).cases["collision_face"] > 0

    def test_empty_low_block(self):
        rep = pl.verify_qbar_lemmas(full(4), 0)
        assert rep.ok and rep.counterexamples["hyperplane_membership"] == []

    @pytest.mark.parametrize("entries", [
        ("a0", "a1", "a1", "a2", "a3"), ("a0", "a0", "a1", "a2"), ("a0", "a1", "a2", "a2", "a2"),
    ])
    def test_sequences_with_plateaus(self, entries):
        s_ = seq(A6, *entries)
        for i in s_.bands():
            assert pl.verify_qbar_lemmas(s_, i).ok

    def test_mutation_is_caught(self):
        rep = pl.verify_qbar_lemmas(full(3), 2, DEFAULT_GRID, pl.q_vertex_without_k1_zeroing)
        assert rep.counterexamples["compatibility"]
        witness = rep.counterexamples["compatibility"][0]
        assert set(witness) == {"t", "canonical", "image"}
