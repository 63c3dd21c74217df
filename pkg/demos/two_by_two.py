# Twisting maps of K^2 with K^2: seven standard maps, three classes, four algebras.
from twistlab.algebra import build_algebra, jacobson_radical
from twistlab.families import SAMPLE_PARAMETERS, family_2x2
from twistlab.standard import classify, enumerate_standard, quiver_grid_text

report = classify(enumerate_standard(2, 2))
print("standard maps:", report.total)  # 7
for c in report.classes:
    print(f"trace sum {c.sum_trace}, orbit {c.orbit_size}, Gamma {c.gamma}")
    print(quiver_grid_text(c.quiver))


def profile(f):
    r = jacobson_radical(build_algebra(f), f, method="search")
    return r.dim, r.quotient_dim, r.quotient_is_product_of_fields


types = {profile(c.representative) for c in report.classes}
types |= {profile(family_2x2(a)) for a in SAMPLE_PARAMETERS}  # M_2(K) away from a = 0, 1
for t in sorted(types):
    print("radical dim %d, quotient dim %d, product of fields %s" % t)
