import numpy as np

from gqft import galilei as G
from gqft.galilei import Rotation, SpaceTimePoint


def hom(g):
    return G.homogeneous_matrix(g)


def test_identity_element():
    e = G.identity()
    assert e.b == 0.0
    assert e.a == (0.0, 0.0, 0.0)
    assert e.v == (0.0, 0.0, 0.0)
    assert np.allclose(e.r.to_matrix(), np.eye(3))


def test_compose_worked_example():
    # evaluated by hand via the 5x5 homogeneous-matrix product
    g1 = G.element(b=1, a=(1, 0, 0), v=(0, 1, 0))
    g2 = G.element(b=2, v=(1, 0, 0), r=Rotation.from_axis_angle((0, 0, 1), np.pi / 2))
    g = G.compose(g2, g1)
    assert abs(g.b - 3.0) < 1e-12
    assert np.allclose(g.a, (1.0, 1.0, 0.0), atol=1e-12)
    assert np.allclose(g.v, (0.0, 0.0, 0.0), atol=1e-12)
    assert np.allclose(g.r.to_matrix(), [[0, -1, 0], [1, 0, 0], [0, 0, 1]], atol=1e-12)
    oracle = hom(g2) @ hom(g1)
    assert np.max(np.abs(hom(g) - oracle)) < 1e-12


def test_inverse_worked_example():
    g = G.element(b=1, a=(1, 0, 0), v=(0, 1, 0))
    gi = G.inverse(g)
    assert gi.b == -1.0
    assert np.allclose(gi.a, (-1.0, 1.0, 0.0), atol=1e-12)
    assert np.allclose(gi.v, (0.0, -1.0, 0.0), atol=1e-12)
    assert np.max(np.abs(hom(gi) - np.linalg.inv(hom(g)))) < 1e-12


def test_act_worked_example():
    g = G.element(v=(2.0, 0.0, 0.0))
    p = SpaceTimePoint((0.0, 0.0, 0.0), 3.0)
    q = G.act(g, p)
    assert np.allclose(q.x, (6.0, 0.0, 0.0))
    assert q.t == 3.0


def test_group_axioms_randomized(rng):
    e5 = np.eye(5)
    for _ in range(1000):
        g1, g2, g3 = (G.random_element(rng) for _ in range(3))
        assert np.max(np.abs(hom(G.compose(g2, g1)) - hom(g2) @ hom(g1))) < 1e-12
        lhs = hom(G.compose(G.compose(g3, g2), g1))
        rhs = hom(G.compose(g3, G.compose(g2, g1)))
        assert np.max(np.abs(lhs - rhs)) < 1e-12
        assert np.max(np.abs(hom(G.compose(g1, G.inverse(g1))) - e5)) < 1e-12
        assert np.max(np.abs(hom(G.inverse(G.inverse(g1))) - hom(g1))) < 1e-12


def test_left_action(rng):
    for _ in range(1000):
        g1, g2 = G.random_element(rng), G.random_element(rng)
        p = SpaceTimePoint(tuple(rng.normal(size=3)), float(rng.normal()))
        q1 = G.act(g2, G.act(g1, p))
        q2 = G.act(G.compose(g2, g1), p)
        assert np.max(np.abs(np.array(q1.x) - np.array(q2.x))) < 1e-12
        assert abs(q1.t - q2.t) < 1e-12
        col = hom(g1) @ np.array([*p.x, p.t, 1.0])
        q3 = G.act(g1, p)
        assert np.max(np.abs(col[:3] - np.array(q3.x))) < 1e-12


def test_boost_cocycle_values():
    g = G.element(v=(1.0, 0.0, 0.0))
    assert abs(G.boost_cocycle(g, SpaceTimePoint((2, 0, 0), 3.0)) - 3.5) < 1e-12
    g0 = G.element(b=2.0, a=(1, 2, 3),
                   r=Rotation.from_axis_angle((1, 1, 0), 0.7))
    for x in ((0, 0, 0), (1, -2, 3)):
        assert G.boost_cocycle(g0, SpaceTimePoint(x, 5.0)) == 0.0


def test_projective_phase_trivial_cases(rng):
    e = G.identity()
    for _ in range(50):
        g = G.random_element(rng)
        m = float(rng.uniform(0.5, 2.0))
        assert G.projective_phase(e, g, m) == 0.0
        assert G.projective_phase(g, e, m) == 0.0
        r1 = G.element(r=G.random_element(rng).r)
        r2 = G.element(r=G.random_element(rng).r)
        assert G.projective_phase(r2, r1, m) == 0.0


def test_projective_phase_closed_form(rng):
    # hand evaluation: boost after a time shift leaves -(1/2) m v^2 b,
    # boost after a translation leaves -m v . a
    m = 1.7
    boost = G.element(v=(0.3, -0.2, 0.5))
    ts = G.element(b=2.0)
    expect = -m * 0.5 * (0.3 ** 2 + 0.2 ** 2 + 0.5 ** 2) * 2.0
    assert abs(G.projective_phase(boost, ts, m) - expect) < 1e-12
    tr = G.element(a=(1.0, 2.0, -1.0))
    expect = -m * (0.3 * 1.0 - 0.2 * 2.0 - 0.5 * 1.0)
    assert abs(G.projective_phase(boost, tr, m) - expect) < 1e-12


def test_projective_phase_cocycle_identity(rng):
    hbar = 1.0
    period = 2 * np.pi * hbar
    for _ in range(1000):
        g1, g2, g3 = (G.random_element(rng) for _ in range(3))
        m = float(rng.uniform(0.5, 3.0))
        lhs = G.projective_phase(g3, G.compose(g2, g1), m) + G.projective_phase(g2, g1, m)
        rhs = G.projective_phase(G.compose(g3, g2), g1, m) + G.projective_phase(g3, g2, m)
        delta = (lhs - rhs + period / 2) % period - period / 2
        assert abs(delta) < 1e-10


def test_homogeneous_matrix_structure(rng):
    assert np.array_equal(hom(G.identity()), np.eye(5))
    for _ in range(100):
        g = G.random_element(rng)
        m = hom(g)
        assert np.max(np.abs(m[:3, :3] - g.r.to_matrix())) < 1e-15
        assert np.allclose(m[3:, :3], 0.0)


def test_rotation_unit_quaternion(rng):
    for _ in range(200):
        q = Rotation(tuple(rng.normal(size=4)))
        assert abs(sum(c * c for c in q.q) - 1.0) < 1e-12
        m = q.to_matrix()
        assert np.max(np.abs(m @ m.T - np.eye(3))) < 1e-12
        assert abs(np.linalg.det(m) - 1.0) < 1e-12


def test_octahedral_rotations():
    rots = G.octahedral_rotations()
    assert len(rots) == 24
    mats = [np.round(r.to_matrix()).astype(int) for r in rots]
    for r, m in zip(rots, mats):
        assert np.max(np.abs(r.to_matrix() - m)) < 1e-12
        assert np.array_equal(m @ m.T, np.eye(3, dtype=int))
    # closed under products
    as_tuples = {tuple(m.ravel()) for m in mats}
    for a in mats[:6]:
        for b in mats[:6]:
            assert tuple((a @ b).ravel()) in as_tuples
