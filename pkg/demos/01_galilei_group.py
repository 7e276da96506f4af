"""Tour of the kinematic group: composition, inversion, the space-time
action, and the projective phase that central-extends it.

Run:  python demos/01_galilei_group.py
"""

import numpy as np

from gqft import galilei as G

rng = np.random.default_rng(1)

print("== group arithmetic ==")
g1 = G.element(b=1.0, a=(1, 0, 0), v=(0, 1, 0))
g2 = G.element(b=2.0, v=(1, 0, 0), r=G.Rotation.from_axis_angle((0, 0, 1), np.pi / 2))
g = G.compose(g2, g1)
print(f"g2 g1 = (b={g.b}, a={np.round(g.a, 12)}, v={np.round(g.v, 12)})")

oracle = G.homogeneous_matrix(g2) @ G.homogeneous_matrix(g1)
print("matches the 5x5 homogeneous-matrix product to",
      np.max(np.abs(G.homogeneous_matrix(g) - oracle)))

gi = G.inverse(g1)
print(f"g1^-1 = (b={gi.b}, a={np.round(gi.a, 12)}, v={np.round(gi.v, 12)})")

p = G.SpaceTimePoint((0.0, 0.0, 0.0), 3.0)
boost = G.element(v=(2.0, 0.0, 0.0))
q = G.act(boost, p)
print(f"boost v=(2,0,0) moves (x=0, t=3) to x'={q.x}")

print("\n== associativity over random triples ==")
worst = 0.0
for _ in range(1000):
    a, b, c = (G.random_element(rng) for _ in range(3))
    lhs = G.homogeneous_matrix(G.compose(G.compose(c, b), a))
    rhs = G.homogeneous_matrix(G.compose(c, G.compose(b, a)))
    worst = max(worst, np.max(np.abs(lhs - rhs)))
print("worst residual over 1000 triples:", worst)

print("\n== the boost phase function ==")
gamma = G.boost_cocycle(G.element(v=(1, 0, 0)), G.SpaceTimePoint((2, 0, 0), 3.0))
print("gamma(v=(1,0,0); x=(2,0,0), t=3) =", gamma, "(= 1/2 v^2 t + v.Rx = 3.5)")

print("\n== the projective phase is a genuine 2-cocycle ==")
period = 2 * np.pi
worst = 0.0
for _ in range(2000):
    a, b, c = (G.random_element(rng) for _ in range(3))
    m = rng.uniform(0.5, 2.0)
    lhs = G.projective_phase(c, G.compose(b, a), m) + G.projective_phase(b, a, m)
    rhs = G.projective_phase(G.compose(c, b), a, m) + G.projective_phase(c, b, m)
    worst = max(worst, abs((lhs - rhs + period / 2) % period - period / 2))
print("cocycle identity residual (mod 2 pi):", worst)
print("boost after time shift picks up -m v^2 b / 2:",
      G.projective_phase(G.element(v=(1, 0, 0)), G.element(b=2.0), 1.0))
