import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratcat import flow_category as fc
from stratcat.errors import CoefficientError, DataError, SchemaError, UsageError
from stratcat.poset_core import enumerate_posets
from stratcat.simplicial_kit import make_shape


def other():
    return fc.builtin_example("other_sphere")


def two_arrows(w1=1, w2=1):
    return {
        "poset": {"elements": ["x", "y"], "leq": [["x", "y"]], "f": {"x": "1", "y": "0"}},
        "homs": {"x->y": [{"id": "u", "label": ["x", "y"], "weight": w1},
                          {"id": "v", "label": ["x", "y"], "weight": w2}]},
        "grading": {"x": 1, "y": 0},
    }


def edge_id(e):
    return f"id_{e.base}" if isinstance(e.base, str) else e.base[0]


def poset_category_data(A):
    homs, compose = {}, {}
    for a in A.elements:
        for b in A.elements:
            if A.lt(a, b):
                homs[f"{a}->{b}"] = [{"id": f"{a}{b}", "label": [a, b]}]
    for a in A.elements:
        for b in A.elements:
            for c in A.elements:
                if A.lt(a, b) and A.lt(b, c):
                    compose[f"({b}{c},{a}{b})"] = f"{a}{c}"
    return homs, compose


class TestBuiltins:
    def test_other_sphere_shape(self):
        data = other()
        assert len(data.poset.elements) == 4
        labels = sorted(data.morphisms[g].label.entries for g in data.homs("a", "d"))
        assert labels == [("a", "b", "d"), ("a", "b", "d"), ("a", "d")]
        assert dict(data.grading) == {"a": 2, "c": 2, "b": 1, "d": 0}
        assert fc.validate_category(data).ok

    def test_round_sphere_shape(self):
        data = fc.builtin_example("round_sphere")
        assert len(data.poset.elements) == 2
        assert [g for g in data.morphisms if not data.is_identity(g)] == ["meridian"]

    def test_unknown(self):
        with pytest.raises(UsageError):
            fc.builtin_example("torus")

    def test_json_round_trip(self):
        data = other()
        assert fc.StratifiedCategoryData.from_json(data.to_json()).to_json() == data.to_json()


class TestValidation:
    def test_label_mutation_detected(self):
        raw = fc.builtin_json("other_sphere")
        raw["compose"]["(bd1,ab)"] = "ad"
        report = fc.validate_category(raw)
        assert not report.ok
        assert any("functoriality" in v for v in report.violations)

    def test_missing_composite(self):
        raw = fc.builtin_json("other_sphere")
        del raw["compose"]["(bd2,cb)"]
        with pytest.raises(SchemaError):
            fc.validate_category(raw)

    def test_single_object(self):
        raw = {"poset": {"elements": ["p"], "leq": [], "f": {"p": "0"}}, "homs": {}}
        assert fc.validate_category(raw).ok

    def test_hom_against_order(self):
        raw = two_arrows()
        raw["homs"]["y->x"] = [{"id": "w", "label": ["y"]}]
        with pytest.raises(SchemaError):
            fc.StratifiedCategoryData.from_json(raw)

    def test_index_warning(self):
        raw = two_arrows()
        raw["grading"] = {"x": 0, "y": 0}
        report = fc.validate_category(raw)
        assert report.ok and report.warnings

    def test_malformed(self):
        with pytest.raises(SchemaError):
            fc.StratifiedCategoryData.from_json({"homs": {}})
        raw = two_arrows()
        raw["homs"]["x->y"][0]["weight"] = 1.5
        with pytest.raises(SchemaError):
            fc.StratifiedCategoryData.from_json(raw)


class TestNerve:
    def test_other_sphere_edges(self):
        data = other()
        S = fc.nerve(data, 2)
        assert len(S.simplices(1)) == len(data.morphisms) == 14
        assert S.counts()[1] == 10

    def test_point(self):
        raw = {"poset": {"elements": ["p"], "leq": [], "f": {"p": "0"}}, "homs": {}}
        S = fc.nerve(fc.StratifiedCategoryData.from_json(raw), 3)
        assert S.counts() == (1,)

    def test_chain_category(self):
        raw = {"poset": {"elements": ["a", "b", "c"], "leq": [["a", "b"], ["b", "c"]],
                         "f": {"a": "2", "b": "1", "c": "0"}}}
        raw["homs"], raw["compose"] = poset_category_data(fc.FinitePoset.from_json(raw["poset"]))
        S = fc.nerve(fc.StratifiedCategoryData.from_json(raw), 3)
        assert S.counts() == (3, 3, 1)

    @pytest.mark.parametrize("index", range(16))
    def test_poset_categories_match_poset_nerves(self, index):
        A = enumerate_posets(4)[index]
        homs, compose = poset_category_data(A)
        data = fc.StratifiedCategoryData.from_json(
            {"poset": A.to_json(), "homs": homs, "compose": compose})
        N = make_shape("poset_nerve", poset=A, max_dim=3)
        S = fc.nerve(data, 3)
        assert S.counts() == N.counts()
        for n in range(4):
            assert len(S.simplices(n)) == len(N.simplices(n))

    def test_bound(self):
        with pytest.raises(UsageError):
            fc.nerve(other(), 7)


class TestUnbroken:
    def test_examples(self):
        data = other()
        assert fc.unbroken_check(data, ["ab"])
        assert not fc.unbroken_check(data, ["ab", "bd1"])
        assert fc.unbroken_check(data, ["id_a"])
        assert fc.unbroken_check(data, ["ad"])
        assert not fc.unbroken_check(data, ["ad1"])

    def test_not_composable(self):
        with pytest.raises(UsageError):
            fc.unbroken_check(other(), ["bd1", "ab"])

    def test_monotone_under_subchains(self):
        data = other()
        S = fc.nerve(data, 3)
        for n in range(1, 4):
            for z in S.simplices(n):
                chain = [edge_id(S.pullback((k, k + 1), z)) for k in range(n)]
                if fc.unbroken_check(data, chain):
                    for i in range(n):
                        for j in range(i + 1, n + 1):
                            assert fc.unbroken_check(data, chain[i:j])


class TestMorse:
    def test_other_sphere_z2(self):
        cx = fc.morse_complex(other(), "z2")
        assert cx.boundary_of("a") == {("b", 0): 1}
        assert cx.boundary_of("c") == {("b", 0): 1}
        assert cx.boundary_of("b") == {}
        assert fc.betti(cx) == {0: 1, 1: 0, 2: 1}

    def test_other_sphere_z(self):
        groups = fc.homology(fc.morse_complex(other(), "z"))
        assert [g.describe() for g in groups] == ["Z", "0", "Z"]

    def test_round_sphere(self):
        cx = fc.morse_complex(fc.builtin_example("round_sphere"), "z2")
        assert [g.describe() for g in fc.homology(cx)] == ["Z/2", "Z/2"]

    def test_empty(self):
        raw = {"poset": {"elements": [], "leq": [], "f": {}}, "homs": {}, "grading": {}}
        cx = fc.morse_complex(fc.StratifiedCategoryData.from_json(raw))
        assert fc.homology(cx) == []

    def test_torsion(self):
        groups = fc.homology(fc.morse_complex(fc.StratifiedCategoryData.from_json(two_arrows()), "z"))
        assert [(g.degree, g.describe()) for g in groups] == [(0, "Z/2"), (1, "0")]
        groups = fc.homology(fc.morse_complex(fc.StratifiedCategoryData.from_json(two_arrows(1, -1)), "z"))
        assert [(g.degree, g.describe()) for g in groups] == [(0, "Z"), (1, "Z")]

    def test_d_squared_nonzero(self):
        raw = fc.builtin_json("other_sphere")
        raw["homs"]["b->d"][1]["weight"] = 1
        with pytest.raises(DataError, match="degree 2"):
            fc.morse_complex(fc.StratifiedCategoryData.from_json(raw), "z")

    def test_z_needs_weights(self):
        raw = two_arrows()
        del raw["homs"]["x->y"][1]["weight"]
        with pytest.raises(DataError):
            fc.morse_complex(fc.StratifiedCategoryData.from_json(raw), "z")
        # degrees 2 and 0 never meet in ∂, so the unweighted meridian is harmless
        fc.morse_complex(fc.builtin_example("round_sphere"), "z")

    def test_rank_two_coefficients(self):
        data = other()
        eye = [[1, 0], [0, 1]]
        G = fc.CoefficientFunctor.from_json({
            "ranks": {a: 2 for a in data.poset.elements},
            "matrices": {g: eye for g in data.morphisms if not data.is_identity(g)}})
        assert fc.betti(fc.morse_complex(data, "z", G)) == {0: 2, 1: 0, 2: 2}

    def test_non_functorial_coefficients(self):
        data = other()
        mats = {g: [[1]] for g in data.morphisms if not data.is_identity(g)}
        mats["ad1"] = [[-1]]
        with pytest.raises(CoefficientError):
            fc.morse_complex(data, "z", fc.CoefficientFunctor.from_json({
                "ranks": {a: 1 for a in data.poset.elements}, "matrices": mats}))

    def test_twisted_coefficients(self):
        # A sign on every arrow into d flips ∂b; the complex stays exact in the middle.
        data = other()
        sign = {"bd1": -1, "bd2": -1, "ad1": -1, "ad2": -1, "cd1": -1, "cd2": -1}
        mats = {g: [[sign.get(g, 1)]] for g in data.morphisms if not data.is_identity(g)}
        G = fc.CoefficientFunctor.from_json({"ranks": {a: 1 for a in data.poset.elements},
                                             "matrices": mats})
        assert fc.betti(fc.morse_complex(data, "z", G)) == {0: 1, 1: 0, 2: 1}

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_homology_invariant_under_generator_shuffle(self, seed):
        rng = random.Random(seed)
        cx = fc.morse_complex(other(), "z")
        perms = {k: rng.sample(range(len(g)), len(g)) for k, g in cx.generators.items()}
        gens = {k: tuple(cx.generators[k][p] for p in perms[k]) for k in cx.generators}
        diffs = {}
        for k, mat in cx.differentials.items():
            rows = perms.get(k - 1, [])
            diffs[k] = tuple(tuple(mat[r][c] for c in perms[k]) for r in rows)
        shuffled = fc.ChainComplexZ("z", gens, diffs)
        assert [g.describe() for g in fc.homology(shuffled)] == [g.describe() for g in fc.homology(cx)]

    def test_unknown_ring(self):
        with pytest.raises(UsageError):
            fc.morse_complex(other(), "q")
