"""Morse homology of the two small sphere categories shipped with the package."""
from stratcat import flow_category as fc

for name in ("other_sphere", "round_sphere"):
    data = fc.builtin_example(name)
    print(f"== {name}")
    for g in sorted(data.morphisms):
        m = data.morphisms[g]
        if not data.is_identity(g):
            print(f"  {g}: {m.source} -> {m.target}  label {'/'.join(m.label.entries)}  weight {m.weight}")
    rings = ("z2", "z") if name == "other_sphere" else ("z2",)
    for ring in rings:
        groups = fc.homology(fc.morse_complex(data, ring))
        print(f"  over {ring}: " + ", ".join(f"H{g.degree}={g.describe()}" for g in groups))

# The same category with the sign on bd2 flipped no longer squares to zero.
raw = fc.builtin_json("other_sphere")
raw["homs"]["b->d"][1]["weight"] = 1
try:
    fc.morse_complex(fc.StratifiedCategoryData.from_json(raw), "z")
except fc.DataError as exc:
    print("flipped sign:", exc)
