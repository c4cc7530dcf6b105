"""
A symmetric determinantal quartic and its node
==============================================

A 4 x 4 symmetric matrix of linear forms in y1..y4 defines a quartic
surface det M = 0.  In block form the point (0:0:0:1) is a node, and
projecting from it leaves a double cover of the plane branched in two
cubics F6 and G6.
"""

from symdetfano.detmodel import (
    branch_identity_check,
    build_block_matrix,
    model_equations,
    node_at_halfpoint,
    node_locus_report,
    project_from_halfpoint,
)

# Diagonal entries are linear forms a, b in y1..y3; alpha and beta fill in
# the off-diagonal forms A = y1 + a1 y2 + a2 y3 and B = b1 y1 + b2 y2 + y3.
M = build_block_matrix("y2 + 2*y3", "y1", (1, 3), (-2, 5))
for row in M.m.rows:
    print("[" + ", ".join(x.to_text() for x in row) + "]")
print("node at (0:0:0:1):", node_at_halfpoint(M))

# The graded ring: four linear syzygies z.M = 0 and ten quadrics z_i z_j = cofactor.
eqs = model_equations(M)
print(len(eqs.linear_syzygies), "syzygies,", len(eqs.quadratic), "quadrics")

# det M is quadratic in y4; its discriminant is 4 F6 G6, so the branch
# locus of the projection is F6 G6 = 0.
proj = project_from_halfpoint(M)
print("F6 =", proj.F6.to_text())
print("G6 =", proj.G6.to_text())
print("discriminant / (F6 G6) =", branch_identity_check(M).constant)

# The rank <= 2 locus is ten nodes, counted with multiplicity by a Groebner
# basis.  Over a small prime only some of them are rational.
rep = node_locus_report(M, 101)
print(f"node locus colength {rep.colength}, F_101 points {rep.fq_points}")
