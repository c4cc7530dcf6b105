"""
Extending the double cover: kernel equations with certificates
===============================================================

A generic instance (alpha, beta, l1, l3) fixes the map phi from P^1 into
the surface T'.  Extending it over the parameters a, b, c, d is a linear
problem; the six resulting equations come with witnesses that replay
exactly through the presentation matrix.
"""

import random

from symdetfano.extension import (
    Instance,
    build_certificate,
    check_certificate,
    coefficient_kernel,
    degenerate_extension,
    random_instance,
)

inst = random_instance(random.Random(2024))
d = inst.deltas
print(f"alpha = ({inst.alpha1}, {inst.alpha2}), beta = ({inst.beta1}, {inst.beta2})")
print(f"delta1 = {d.d1}, Delta = {d.Delta}")

# On the generic stratum the corrections s4, s5, t4, t5 must vanish.
print("coefficient kernel dimension:", coefficient_kernel(inst).dimension)

cert = build_certificate(inst)
for name, k in cert.equations.items():
    print(f"{name:5} via {k.route:10} {len(k.equation.terms):4d} terms")

chk = check_certificate(cert)
print("all pull back to zero:", all(chk.pullbacks_zero.values()))
print("all witnesses replay: ", all(chk.witnesses_replay.values()))

# With delta1 = 0 a one-parameter family of corrections survives, and it
# obstructs the conic equation unless s4 = 0.
rep = degenerate_extension(Instance(2, 1, 1, 3))
print("delta1 = 0 kernel dimension:", rep.kernel.dimension)
print("conic equation with free s4:", rep.conic_member_free_s, "| with s4 = 0:", rep.conic_member_s_zero)
