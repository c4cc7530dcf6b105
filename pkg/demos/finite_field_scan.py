"""
Looking for singular points over a finite field
===============================================

Sampling points of the affine cone over F_q and computing the Jacobian
rank is a cheap test of quasismoothness.  T' passes.  W' always shows rank
drops on the P^3 where every y and z vanishes: both of its equations lie in
the square of the ideal (y, z).  A planted cusp on a branch curve shows up
off that locus.
"""

import random

from symdetfano.assembly import cuspidal_branch_instance, model_pair
from symdetfano.extension import random_instance
from symdetfano.ffscan import quasismooth_scan

YZ = ["y1", "y2", "y3", "z1", "z2"]

pair = model_pair(random_instance(random.Random(1)))
t = quasismooth_scan(list(pair.tprime), pair.tprime[0].ring, 1009, 2000)
print(f"T': {t.points_on_variety} points, {len(t.drops)} drops, half-points {t.half_points}")

w = quasismooth_scan(list(pair.wprime), pair.wprime[0].ring, 101, 500)
print(f"W': {len(w.drops)} drops, supports {w.drop_supports()}, off y=z=0: {len(w.drops_outside(YZ))}")

cusp, p = cuspidal_branch_instance()
cp = model_pair(cusp)
c = quasismooth_scan(list(cp.tprime), cp.tprime[0].ring, 101, 500)
print(f"cusp planted at {tuple(map(str, p))}: {len(c.drops)} drops on T'")
print("first drop:", c.drops[0].point if c.drops else None)
