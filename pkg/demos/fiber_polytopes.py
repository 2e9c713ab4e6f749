"""Compare the band polytopes with slices of the simplex at the band midpoint."""
from stratcat import polytope_lab as pl
from stratcat.poset_core import FinitePoset

A = FinitePoset.chain(["c0", "c1", "c2", "c3"])
rows = []
for n in range(1, 4):
    for s in A.increasing_sequences(n):
        for i in s.bands():
            P = pl.build_P(s, i)
            Q = pl.simplex_fiber(s, s.band_midpoint(i))
            rows.append((",".join(s.entries), i, len(P.vertices), len(Q.vertices), pl.comb_equiv(P, Q)))

for entries, i, nv, nq, same in rows:
    print(f"{entries:<12} band {i}  |V(P)|={nv}  |V(fiber)|={nq}  {'same' if same else 'DIFFERENT'}")
print(sum(r[-1] for r in rows), "of", len(rows), "combinatorially equivalent")
