"""Which operator polynomials survive conjugation by every kinematic
unitary: pairwise structure, the mass sum rule, and particle-number
(non-)conservation.

Run:  python demos/04_invariance.py
"""

import numpy as np

from gqft.fock import ModeLattice, Species
from gqft.invariance import (
    check_mass_sum_rule,
    check_pairwise_invariance,
    number_commutator,
    production_operator,
    realize,
)

L = 2 * np.pi
rng = np.random.default_rng(7)

print("== pairwise-at-the-same-point structure ==")
lat = ModeLattice(L, 3, [Species("phi", mass=1.0)], n_max=2)
reports = check_pairwise_invariance(lat, rng, n_words=10)
print(f"density sum psi+ psi (same point):  {reports.density.verdict:14s} "
      f"max residual {reports.density.max_residual:.1e}")
print(f"lone creation sum psi+:             {reports.unbalanced.verdict:14s} "
      f"max residual {reports.unbalanced.max_residual:.1e} "
      f"(floor {reports.unbalanced.fail_floor:.1e})")
print(f"split pair psi+(x) psi(x+dx):       {reports.split_pair.verdict:14s} "
      f"max residual {reports.split_pair.max_residual:.1e}")
print(f"[density, N] = {reports.density.number_commutator_norm}")

print("\n== the mass sum rule for production ==")


def trio(out_mass):
    return ModeLattice(L, 3, [
        Species("theta", mass=1.0),
        Species("enn", mass=1.0),
        Species("vee", mass=out_mass),
    ], n_max=2)


reports = check_mass_sum_rule(trio(2.0), rng, "vee", "enn", "theta",
                              violating_lattice=trio(1.5), n_words=10)
print(f"m_out = 2.0 = 1.0 + 1.0: {reports.conserving.verdict:14s} "
      f"max residual {reports.conserving.max_residual:.1e}")
print(f"m_out = 1.5 != 2.0:      {reports.violating.verdict:14s} "
      f"max residual {reports.violating.max_residual:.1e}")
print(f"the same mass-violating operator over boost-free elements: "
      f"{reports.boost_only_violating_max:.1e}  (the rule is boost-specific)")

print("\n== production breaks number conservation, never mass conservation ==")
lat3 = trio(2.0)
prod = realize(production_operator(lat3, "vee", "enn", "theta"), lat3)
_, norm = number_commutator(prod, lat3)
print(f"||[production, N]|| = {norm:.3f} > 0, while [production, M] = 0 "
      "exactly (the operator is block diagonal in total mass)")
