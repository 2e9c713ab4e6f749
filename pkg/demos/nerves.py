"""Horn filling on a few nerves: chains, a vee, and the parallel-arrow sphere category."""
from stratcat.flow_category import builtin_example, nerve
from stratcat.poset_core import FinitePoset
from stratcat.simplicial_kit import infinity_check, make_shape, spine_bijection

shapes = {
    "chain of 3": make_shape("poset_nerve", poset=FinitePoset.chain(["a", "b", "c"]), max_dim=3),
    "vee": make_shape("poset_nerve", poset=FinitePoset.from_relations(
        ["x", "y", "z"], [("x", "y"), ("x", "z")], {"x": 1, "y": 0, "z": 0}), max_dim=3),
    "horn 2,1": make_shape("horn", n=2, k=1, max_dim=3),
    "sphere category": nerve(builtin_example("other_sphere"), 3),
}
for name, S in shapes.items():
    dim = 3
    v = infinity_check(S, dim)
    spines = all(spine_bijection(S, n) for n in range(dim + 1))
    print(f"{name:<16} counts={S.counts()}  inner exist={v.inner_fillers_exist} "
          f"unique={v.inner_fillers_unique} kan={v.is_kan} spines={spines}")
    if v.witness:
        print("   inner failure:", v.witness)
