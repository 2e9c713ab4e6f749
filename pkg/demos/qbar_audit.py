"""Jacobian audit of the multilinear vertex map and the effect of one mutation."""
from fractions import Fraction as F

from stratcat import polytope_lab as pl
from stratcat.poset_core import FinitePoset, IncreasingSequence
from stratcat.rational import DEFAULT_GRID

print(" n  i  |class|  det range   variants  variant min")
for n in range(1, 6):
    for i in range(n):
        a = pl.jacobian_class_audit(n, i)
        print(f"{n:2} {i:2}  {a.class_size:6}  [{a.min_det}, {a.max_det}]   {a.variant_count:8}  {a.variant_min_det}")

A = FinitePoset.chain(["c0", "c1", "c2", "c3"])
s = IncreasingSequence(A, ("c0", "c1", "c2", "c3"))
t = (F(1, 2), F(1, 2))
print("qbar at", [str(x) for x in t], "->", [str(x) for x in pl.qbar(s, 2, t)])
print("jacobian there:", pl.jacobian_det(s, 2, t))

honest = pl.verify_qbar_lemmas(s, 2, DEFAULT_GRID)
broken = pl.verify_qbar_lemmas(s, 2, DEFAULT_GRID, vertex_map=pl.q_vertex_without_k1_zeroing)
print("faithful map counterexamples:", honest.total_counterexamples())
print("mutated map counterexamples:", broken.total_counterexamples(),
      {k: len(v) for k, v in broken.counterexamples.items() if v})
