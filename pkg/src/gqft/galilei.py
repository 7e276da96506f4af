"""Exact arithmetic of the proper Galilei group.

Elements are ``g = (b, a, v, R)``: time shift, space shift, boost velocity
and rotation, acting on space-time as ``x' = R x + v t + a``, ``t' = t + b``.
Rotations are stored as unit quaternions so that the double cover of the
rotation group (needed for half-integer spin) is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_UNIT_TOL = 1e-12


def _normalized(q: tuple[float, float, float, float]) -> tuple[float, float, float, float]:
    w, x, y, z = q
    norm = np.sqrt(w * w + x * x + y * y + z * z)
    if norm == 0.0:
        raise ValueError("zero quaternion")
    return (w / norm, x / norm, y / norm, z / norm)


@dataclass(frozen=True)
class Rotation:
    """A rotation stored as a unit quaternion ``(w, x, y, z)``.

    Quaternions q and -q project to the same orthogonal matrix but are
    distinct elements of the double cover; both are kept.
    """

    q: tuple[float, float, float, float] = (1.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "q", _normalized(self.q))

    @staticmethod
    def identity() -> "Rotation":
        return Rotation((1.0, 0.0, 0.0, 0.0))

    @staticmethod
    def from_axis_angle(axis, angle: float) -> "Rotation":
        axis = np.asarray(axis, dtype=float)
        norm = np.linalg.norm(axis)
        if norm == 0.0:
            raise ValueError("rotation axis must be nonzero")
        axis = axis / norm
        half = 0.5 * angle
        s = np.sin(half)
        return Rotation((np.cos(half), s * axis[0], s * axis[1], s * axis[2]))

    def compose(self, other: "Rotation") -> "Rotation":
        """Quaternion product self * other (other acts first)."""
        w1, x1, y1, z1 = self.q
        w2, x2, y2, z2 = other.q
        return Rotation(
            (
                w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
                w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
                w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
                w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
            )
        )

    def inverse(self) -> "Rotation":
        w, x, y, z = self.q
        return Rotation((w, -x, -y, -z))

    def to_matrix(self) -> np.ndarray:
        w, x, y, z = self.q
        return np.array(
            [
                [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
                [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
                [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
            ]
        )

    def axis_angle(self) -> tuple[np.ndarray, float]:
        """Axis and angle in ``[0, 2*pi]``; distinguishes q from -q."""
        w, x, y, z = self.q
        vec = np.array([x, y, z])
        s = np.linalg.norm(vec)
        angle = 2.0 * np.arctan2(s, w)
        if s < 1e-300:
            return np.array([0.0, 0.0, 1.0]), angle
        return vec / s, angle

    def apply(self, vec) -> np.ndarray:
        return self.to_matrix() @ np.asarray(vec, dtype=float)

    def isclose(self, other: "Rotation", tol: float = 1e-12) -> bool:
        d1 = max(abs(a - b) for a, b in zip(self.q, other.q))
        d2 = max(abs(a + b) for a, b in zip(self.q, other.q))
        return min(d1, d2) < tol  # same orthogonal matrix

    def isclose_cover(self, other: "Rotation", tol: float = 1e-12) -> bool:
        return max(abs(a - b) for a, b in zip(self.q, other.q)) < tol


@dataclass(frozen=True)
class SpaceTimePoint:
    x: tuple[float, float, float]
    t: float

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(c) for c in self.x))
        object.__setattr__(self, "t", float(self.t))


@dataclass(frozen=True)
class GalileiElement:
    """Kinematic transformation ``(b, a, v, R)``."""

    b: float
    a: tuple[float, float, float]
    v: tuple[float, float, float]
    r: Rotation

    def __post_init__(self):
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "a", tuple(float(c) for c in self.a))
        object.__setattr__(self, "v", tuple(float(c) for c in self.v))

    @property
    def a_vec(self) -> np.ndarray:
        return np.array(self.a)

    @property
    def v_vec(self) -> np.ndarray:
        return np.array(self.v)


def identity() -> GalileiElement:
    return GalileiElement(0.0, (0.0, 0.0, 0.0), (0.0, 0.0, 0.0), Rotation.identity())


def element(b=0.0, a=(0.0, 0.0, 0.0), v=(0.0, 0.0, 0.0), r=None) -> GalileiElement:
    """Convenience constructor with keyword defaults."""
    return GalileiElement(b, tuple(a), tuple(v), r if r is not None else Rotation.identity())


def compose(g2: GalileiElement, g1: GalileiElement) -> GalileiElement:
    """Group product g2 * g1 (g1 acts first)."""
    r2 = g2.r.to_matrix()
    a = g2.a_vec + r2 @ g1.a_vec + g1.b * g2.v_vec
    v = g2.v_vec + r2 @ g1.v_vec
    return GalileiElement(g2.b + g1.b, tuple(a), tuple(v), g2.r.compose(g1.r))


def inverse(g: GalileiElement) -> GalileiElement:
    rinv = g.r.inverse()
    rm = rinv.to_matrix()
    a = -(rm @ (g.a_vec - g.b * g.v_vec))
    v = -(rm @ g.v_vec)
    return GalileiElement(-g.b, tuple(a), tuple(v), rinv)


def act(g: GalileiElement, p: SpaceTimePoint) -> SpaceTimePoint:
    x = g.r.to_matrix() @ np.array(p.x) + g.v_vec * p.t + g.a_vec
    return SpaceTimePoint(tuple(x), p.t + g.b)


def boost_cocycle(g: GalileiElement, p: SpaceTimePoint) -> float:
    """The boost phase function ``(1/2)|v|^2 t + v . (R x)``.

    Multiplied by a mass it is the phase exponent (in units of hbar) that a
    local field picks up under g; it vanishes identically when v = 0.
    """
    v = g.v_vec
    return 0.5 * float(v @ v) * p.t + float(v @ (g.r.to_matrix() @ np.array(p.x)))


def projective_phase(g2: GalileiElement, g1: GalileiElement, mass: float) -> float:
    """Phase exponent zeta with U(g2) U(g1) = exp(i zeta / hbar) U(g2 g1).

    Evaluated on the mass-``mass`` one-particle representation. The closed
    form is ``-m ((1/2)|v2|^2 b1 + v2 . R2 a1)``; it is validated against the
    composed one-particle unitaries in the field-operator test suite.
    """
    v2 = g2.v_vec
    return -mass * (0.5 * float(v2 @ v2) * g1.b + float(v2 @ (g2.r.to_matrix() @ g1.a_vec)))


def homogeneous_matrix(g: GalileiElement) -> np.ndarray:
    """5x5 matrix acting on columns (x, t, 1); independent oracle for the
    composition and action formulas."""
    m = np.eye(5)
    m[:3, :3] = g.r.to_matrix()
    m[:3, 3] = g.v
    m[:3, 4] = g.a
    m[3, 4] = g.b
    return m


def random_element(rng: np.random.Generator, scale: float = 1.0) -> GalileiElement:
    """Random element with components of order ``scale``; rotation uniform
    on the double cover."""
    q = rng.normal(size=4)
    return GalileiElement(
        float(rng.uniform(-scale, scale)),
        tuple(rng.uniform(-scale, scale, size=3)),
        tuple(rng.uniform(-scale, scale, size=3)),
        Rotation(tuple(q)),
    )


def octahedral_rotations() -> list[Rotation]:
    """The 24 rotations mapping the cubic lattice to itself, in a fixed
    deterministic order (one quaternion representative per rotation)."""
    gens = [
        Rotation.from_axis_angle((0, 0, 1), np.pi / 2),
        Rotation.from_axis_angle((1, 0, 0), np.pi / 2),
    ]
    found: list[Rotation] = [Rotation.identity()]
    frontier = [Rotation.identity()]
    while frontier:
        nxt = []
        for r in frontier:
            for gen in gens:
                cand = gen.compose(r)
                if not any(cand.isclose(k) for k in found):
                    found.append(cand)
                    nxt.append(cand)
        frontier = nxt
    assert len(found) == 24

    def sort_key(rot: Rotation):
        return tuple(np.round(rot.to_matrix().ravel()).astype(int))

    return sorted(found, key=sort_key)
