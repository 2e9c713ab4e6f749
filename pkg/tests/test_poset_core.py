from itertools import combinations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import chain, seq
from stratcat.errors import SchemaError, UsageError
from stratcat.poset_core import (FinitePoset, IncreasingSequence, StrictSequence, condense,
                                 cube_poset, enumerate_posets, path_compose,
                                 path_compose_condense, path_hom, sequence_maps, validate_poset)


def raw(elements, leq, f):
    return {"elements": elements, "leq": leq, "f": {k: str(v) for k, v in f.items()}}


class TestValidatePoset:
    def test_chain_is_valid(self):
        assert validate_poset(raw(["a", "b", "c"], [["a", "b"], ["b", "c"]],
                                  {"a": 2, "b": 1, "c": 0})).ok

    def test_antisymmetry_violation(self):
        report = validate_poset(raw(["a", "b"], [["a", "b"], ["b", "a"]], {"a": 1, "b": 0}))
        assert any("antisymmetry" in v for v in report.violations)

    def test_strict_decrease_violation(self):
        report = validate_poset(raw(["a", "b"], [["a", "b"]], {"a": 0, "b": 0}))
        assert [v for v in report.violations if "strictly decreasing" in v]

    def test_duplicate_labels(self):
        with pytest.raises(SchemaError):
            validate_poset(raw(["a", "a"], [], {"a": 0}))

    @pytest.mark.parametrize("bad", [0.5, "x/y", True, None])
    def test_non_rational_height(self, bad):
        with pytest.raises(SchemaError):
            validate_poset({"elements": ["a"], "leq": [], "f": {"a": bad}})

    def test_json_round_trip(self, chain3):
        again = FinitePoset.from_json(chain3.to_json())
        assert again == chain3


class TestSequenceMaps:
    def test_degeneracy_example(self):
        A = FinitePoset.chain(["a", "b"])
        maps = sequence_maps(seq(A, "a", "a", "b"), seq(A, "a", "b"))
        assert [m.map for m in maps] == [(0, 0, 1)]

    def test_identity_only(self):
        A = FinitePoset.chain(["a", "b"])
        assert [m.map for m in sequence_maps(seq(A, "a"), seq(A, "a"))] == [(0,)]

    def test_empty(self):
        A = FinitePoset.chain(["a", "b"])
        assert sequence_maps(seq(A, "a", "b"), seq(A, "a")) == []

    def test_different_posets(self):
        A, B = FinitePoset.chain(["a", "b"]), FinitePoset.chain(["a", "c"])
        with pytest.raises(UsageError):
            sequence_maps(seq(A, "a"), seq(B, "a"))

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_count_matches_brute_force(self, data):
        A = chain(3)
        pool = [s for n in range(5) for s in A.increasing_sequences(n)]
        src = data.draw(st.sampled_from(pool))
        dst = data.draw(st.sampled_from(pool))
        brute = [
            phi for phi in product(range(dst.length + 1), repeat=src.length + 1)
            if all(x <= y for x, y in zip(phi, phi[1:]))
            and all(dst[phi[k]] == src[k] for k in range(src.length + 1))
        ]
        assert sorted(m.map for m in sequence_maps(src, dst)) == sorted(brute)

    def test_composition_is_associative(self):
        A = chain(2)
        seqs = [s for n in range(3) for s in A.increasing_sequences(n)]
        for a, b, c, d in product(seqs, repeat=4):
            for f in sequence_maps(a, b):
                for g in sequence_maps(b, c):
                    for h in sequence_maps(c, d):
                        assert f.then(g).then(h) == f.then(g.then(h))


class TestPathCategory:
    def test_path_hom_chain(self, chain3):
        H = path_hom(chain3, "a", "c")
        entries = sorted(s.entries for s in H)
        assert entries == [("a", "b", "c"), ("a", "c")]
        long, short = (StrictSequence(chain3, e) for e in (("a", "b", "c"), ("a", "c")))
        assert H.leq(long, short) and not H.leq(short, long)
        assert H.maximum().entries == ("a", "c")

    def test_path_hom_loop(self, chain3):
        assert [s.entries for s in path_hom(chain3, "b", "b")] == [("b",)]

    def test_path_hom_incomparable(self):
        V = FinitePoset.from_relations(["x", "y", "z"], [("x", "y"), ("x", "z")],
                                       {"x": 1, "y": 0, "z": 0})
        assert len(path_hom(V, "y", "z")) == 0

    def test_compose_examples(self):
        A = FinitePoset.from_relations(["a", "b", "d"], [("a", "b"), ("b", "d")],
                                       {"a": 2, "b": 1, "d": 0})
        ab, bd = StrictSequence(A, ("a", "b")), StrictSequence(A, ("b", "d"))
        assert path_compose_condense(ab, bd).entries == ("a", "b", "d")
        assert path_compose(StrictSequence(A, ("a",)), StrictSequence(A, ("a", "d"))).entries == ("a", "d")
        with pytest.raises(UsageError):
            path_compose(bd, ab)

    def test_condense(self):
        A = FinitePoset.chain(["a", "b", "c"])
        assert condense(IncreasingSequence(A, ("a", "a", "b", "b", "c"))).entries == ("a", "b", "c")
        assert condense(("a", "a", "b")) == ("a", "b")

    @pytest.mark.parametrize("size", range(1, 6))
    def test_associative_and_unital(self, size):
        for A in enumerate_posets(size):
            els = A.elements
            for a, b, c, d in product(els, repeat=4):
                if not (A.le(a, b) and A.le(b, c) and A.le(c, d)):
                    continue
                for s1 in path_hom(A, a, b):
                    unit_a, unit_b = StrictSequence(A, (a,)), StrictSequence(A, (b,))
                    assert path_compose(unit_a, s1) == s1 == path_compose(s1, unit_b)
                    for s2 in path_hom(A, b, c):
                        for s3 in path_hom(A, c, d):
                            assert (path_compose(path_compose(s1, s2), s3)
                                    == path_compose(s1, path_compose(s2, s3)))

    def test_condense_commutes_with_concatenation(self):
        A = chain(3)
        for n in range(5):
            for s in A.increasing_sequences(n):
                for k in range(n + 1):
                    left = IncreasingSequence(A, s.entries[:k + 1])
                    right = IncreasingSequence(A, s.entries[k:])
                    assert path_compose(condense(left), condense(right)) == condense(s)

    def test_hom_matches_subset_oracle(self):
        for A in enumerate_posets(4):
            for a, b in product(A.elements, repeat=2):
                got = {s.entries for s in path_hom(A, a, b)}
                if a == b:
                    want = {(a,)}
                else:
                    subsets = (sub for r in range(len(A.elements) + 1)
                               for sub in combinations(A.sorted(A.elements), r))
                    chains = ((a,) + sub + (b,) for sub in subsets)
                    want = {ch for ch in chains if all(A.lt(x, y) for x, y in zip(ch, ch[1:]))}
                assert got == want


class TestCubePoset:
    def test_p303(self):
        P = cube_poset(3, 0, 3)
        assert {tuple(sorted(e)) for e in P.elements} == {(0, 3), (0, 1, 3), (0, 2, 3), (0, 1, 2, 3)}

    def test_degenerate_intervals(self):
        assert [set(e) for e in cube_poset(4, 2, 2).elements] == [{2}]
        assert [set(e) for e in cube_poset(4, 2, 3).elements] == [{2, 3}]

    @pytest.mark.parametrize("n", range(1, 7))
    def test_product_structure(self, n):
        P = cube_poset(n, 0, n)
        assert len(P.elements) == 2 ** (n - 1)

    def test_out_of_range(self):
        with pytest.raises(UsageError):
            cube_poset(2, 1, 3)


def test_enumerate_posets_counts():
    assert [len(enumerate_posets(k)) for k in range(6)] == [1, 1, 2, 5, 16, 63]


def test_band_midpoint_requires_strict_step():
    A = chain(3)
    s = seq(A, "a0", "a0", "a1")
    assert s.bands() == [1]
    with pytest.raises(UsageError):
        s.band_midpoint(0)
