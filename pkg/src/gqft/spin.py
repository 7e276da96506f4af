"""Finite unitary representations of the rotation group.

Spin is labeled by the integer ``two_s`` (dimension ``two_s + 1``).  The
basis is ordered by ascending projection ``lambda = -s, ..., s``; everything
else in the package follows the same ordering.  Representations are computed
through the quaternion double cover, so the sign of a 2*pi rotation for
half-integer spin is exact and composition has no sign ambiguity.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .galilei import Rotation


def projections(two_s: int) -> np.ndarray:
    """Spin projections ``-s..s`` in basis order (units of 1, not hbar)."""
    if two_s < 0:
        raise ValueError("two_s must be a non-negative integer")
    return np.arange(-two_s, two_s + 1, 2) / 2.0


def spin_matrices(two_s: int, hbar: float = 1.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Angular-momentum matrices (Jx, Jy, Jz) built from ladder operators.

    They satisfy ``[J_i, J_j] = i hbar eps_ijk J_k`` and
    ``J^2 = hbar^2 s (s+1)``.
    """
    lam = projections(two_s)
    dim = two_s + 1
    s = two_s / 2.0
    jp = np.zeros((dim, dim), dtype=complex)
    for i in range(dim - 1):
        # <lam+1| J+ |lam> = hbar sqrt(s(s+1) - lam(lam+1))
        jp[i + 1, i] = hbar * np.sqrt(s * (s + 1) - lam[i] * (lam[i] + 1))
    jm = jp.conj().T
    jx = 0.5 * (jp + jm)
    jy = (jp - jm) / 2j
    jz = hbar * np.diag(lam).astype(complex)
    return jx, jy, jz


def wigner_d(two_s: int, rotation: Rotation) -> np.ndarray:
    """Representation matrix D(R) = exp(-i theta (n . J) / hbar).

    Axis and angle are extracted from the quaternion with
    ``theta in [0, 2*pi]``, so D is single-valued on the double cover.
    """
    axis, angle = rotation.axis_angle()
    jx, jy, jz = spin_matrices(two_s, hbar=1.0)
    generator = axis[0] * jx + axis[1] * jy + axis[2] * jz
    return expm(-1j * angle * generator)


def conjugation_matrix(two_s: int) -> np.ndarray:
    """Antidiagonal matrix C with D(R)* = C D(R) C^-1 for every rotation.

    Entries ``C[-lam, lam] = (-1)^(s - lam)``; satisfies
    ``C* C = (-1)^(2s)`` and ``C^dag C = 1``.
    """
    lam = projections(two_s)
    dim = two_s + 1
    s = two_s / 2.0
    c = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        # row index of -lam[j] in ascending order
        i = dim - 1 - j
        c[i, j] = (-1.0) ** (s - lam[j])
    return c
