"""
From T' to W' and down to a surface
===================================

T' is a complete intersection of two sextics in P(2,2,2,3,3).  The kernel
equations assemble into W' in P(1^4,2^3,3^2), which restricts to T' on
a = b = c = d = 0.  Slicing W' by three linear forms and one quadric gives
a surface; the free parameters add up to 9 + 3 + 4.
"""

import random

from symdetfano.assembly import (
    halfpoint_locus_check,
    hilbert_check,
    model_pair,
    random_slice,
    slice_surface,
    tangency_report,
)
from symdetfano.extension import random_instance

pair = model_pair(random_instance(random.Random(7)))
print("W' restricts to T':", pair.restriction_ok)

# The two branch cubics meet in nine points, transversally, and each is
# totally tangent to the conic y1 y3 = y2^2.
br = halfpoint_locus_check(pair)
print(f"branch cubics: colength {br.colength}, transversal {br.transversal}")
print("tangent to the conic:", tangency_report(pair.instance).ok)

for name, h in hilbert_check(pair, 10).items():
    print(f"{name:7} Hilbert prefix {h.computed}  closed form agrees: {h.ok}")

hs, q2 = random_slice(random.Random(8))
s = slice_surface(pair, hs, q2)
print("slice transverse:", s.transverse)
print(f"parameters: 9 + {s.weight_one_parameters} + {s.weight_two_parameters} = {s.parameter_tally}")
