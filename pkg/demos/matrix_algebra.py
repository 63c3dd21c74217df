# M_3(K) as a twisted tensor product of K^3 with K^3 built from cross products.
from fractions import Fraction

from twistlab.algebra import rep_image_dim, representation
from twistlab.families import crossproduct_xi, reconstruct_from_column
from twistlab.twistmap import rank_matrices, verify

result = crossproduct_xi([(1, 2, 3), (5, 1, Fraction(1, 2))])  # v_1 is the all-ones vector
f = result.family
print("last vector rescaled by", result.scaling)
print("twisting:", verify(f).is_twisting)
print("Gamma:", rank_matrices(f).gamma)  # all ones
print("image dims:", [rep_image_dim(representation(f, l)) for l in (1, 2, 3)])  # 9 each: onto M_3(K)
print("one column determines the map:", reconstruct_from_column(f.column(1), 2) == f)
