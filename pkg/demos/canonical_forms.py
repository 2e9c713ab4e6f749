"""Walk the canonical form map on a 4-chain and compare it with brute-force closure."""
from fractions import Fraction as F

from stratcat import cube_calculus as cc
from stratcat.poset_core import FinitePoset, IncreasingSequence

A = FinitePoset.chain(["a0", "a1", "a2", "a3"])
s = IncreasingSequence(A, ("a0", "a1", "a2", "a3"))
grid = (F(0), F(1, 2), F(1))

for level in cc.critical_and_midpoint_levels(s):
    classes = {}
    for x in cc.grid_points(3, grid):
        rep = cc.canonical_form(s, x, level)
        classes.setdefault(rep.coords, []).append(x)
    print(f"level {level}: {len(classes)} classes over {3 ** 2} grid points")
    for rep, members in sorted(classes.items()):
        if len(members) > 1:
            print("   ", [str(c) for c in rep], "<-", [[str(c) for c in m] for m in members])
    assert cc.oracle_mismatches(s, level, grid) == []

p = cc.cube_point(3, [F(1, 2), 1])
print("breaks of", p.coords, "->", [iv for iv, _ in cc.unbroken_decomposition(p)])
