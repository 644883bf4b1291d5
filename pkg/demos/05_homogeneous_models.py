"""The model catalog: flat product, su(2) semidirect sum, Heisenberg.

Structure constants determine the invariant exterior derivative; the
closedness pattern of lambda, omega, Theta, mu decides which variational
statements apply on each model.
"""

import numpy as np

from g2fueter import exterior as ex
from g2fueter import models as md

for name in ("product-flat", "su2-semidirect"):
    m = md.model_by_name(name)
    print(f"== {name}")
    flags = md.closedness_flags(m)
    print("  closed:", {k: v for k, v in flags.closed().items()})

m = md.model_su2_semidirect()
print("  su(2) coframe differentials:")
for k, d in enumerate(m.coframe_differentials(), start=1):
    print(f"    de{k} = {ex.render(d, 'e')}")
_, omega, _, _ = m.forms()
print("  d omega =", ex.render(md.ce_differential(omega, m), "e"))

print("== heisenberg family")
for B in (np.diag([2, 2, -4]), np.diag([4, 2, -6]), np.array([[0, 2, 0], [0, 0, 2], [2, 0, 0]])):
    mh = md.model_heisenberg(B)
    closed = md.closedness_flags(mh).closed()
    print(f"  B = {B.tolist()}")
    print(f"    tr(B) = {np.trace(B)}, symmetric = {np.array_equal(B, B.T)}"
          f" -> dOmega closed: {closed['dOmega']}, dTheta closed: {closed['dTheta']}")

# The vertical distribution twists whenever B is nonzero: the derivative
# of the horizontal volume sits entirely in the algebraic F_V slot.
mh = md.model_heisenberg(np.diag([2, 2, -4]))
split = md.derivative_type_split(mh.forms()[0], mh)
print("d lambda by type:", {k: round(v.norm(), 6) for k, v in split.items()})
print("nonintegrable vertical pairs:", md.vertical_nonintegrability_pairs(mh))

# First homology of the compact quotients, by exact integer reduction.
print("homology of the trace-free diagonal family:")
for n in range(1, 6):
    B = np.diag([2 * n, 2, -2 * n - 2])
    h = md.h1_nilmanifold(B)
    print(f"  n={n}: H_1 = {h}, torsion order {h.torsion_order} = 8n(n+1) = {8 * n * (n + 1)}")

U, D, V = md.smith_normal_form(np.diag([4, 2, -6]))
print("smith normal form of diag(4,2,-6):", [int(D[i, i]) for i in range(3)])
