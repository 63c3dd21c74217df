# Deforming the standard map with all ranks one on K^3 with K^3 along quiver triangles.
from twistlab.algebra import build_algebra, jacobson_radical
from twistlab.quasistd import deform, deformation_sites, explore_chains, mu1_table
from twistlab.standard import classify, enumerate_standard, quiver_of
from twistlab.twistmap import orbit_members, rank_matrices

report = classify(enumerate_standard(3, 3))
print("classes:", len(report.classes))  # 82
cycle = report.classes[-1].representative  # trace sum 3, three vertices and six arrows
diagonal = {(1, 1), (2, 2), (3, 3)}
base = next(g for g, _, _ in orbit_members(cycle) if quiver_of(g).vertices == diagonal)

sites = deformation_sites(base)
print("first-level sites:", [s.label() for s in sites])  # one per ordering of {1,2,3}

spec = sites[0].with_lambda(1)
g = deform(base, spec)
print("ranks preserved:", rank_matrices(g) == rank_matrices(base))
print("radical square zero:", jacobson_radical(build_algebra(g), g).square_zero)  # False
print("first-order change:", mu1_table(base, g, 1))

for mode in ("none", "family", "iso"):
    levels = explore_chains(base, dedupe=mode)
    print(mode, [len(level) for level in levels])  # 6/18/12, 6/9/2, 1/2/1
