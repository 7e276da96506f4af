"""Finite-matrix realization of the extended kinematic Lie algebra.

The ten generators {H, P_i, K_i, J_i, M} act on a one-particle space built
from harmonic-oscillator levels (``n_levels`` per axis) tensored with a spin
factor.  Position and momentum act exactly through ladder matrices, so every
bracket holds exactly away from the truncation edge; assertions are
projected onto an interior subspace (the lowest ``interior_fraction`` of
levels per axis).  The realization is taken at a fixed instant, with the
boost generator K = m X.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import TruncationTooSmall
from .spin import spin_matrices

_EPS = (1, 2, 0)  # cyclic successor: eps[i, _EPS[i]] chain


@dataclass(frozen=True)
class AlgebraConfig:
    mass: float
    internal_energy: float = 0.0
    two_s: int = 0
    n_levels: int = 12
    interior_fraction: float = 0.5
    hbar: float = 1.0

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if self.n_levels < 8:
            raise ValueError("n_levels must be >= 8")
        if not 0.0 < self.interior_fraction < 1.0:
            raise ValueError("interior_fraction must lie in (0, 1)")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")


class GeneratorSet:
    """Sparse matrices H, P1..P3, K1..K3, J1..J3, M plus the interior projector."""

    def __init__(self, cfg: AlgebraConfig):
        self.cfg = cfg
        n, hbar, m = cfg.n_levels, cfg.hbar, cfg.mass
        spin_dim = cfg.two_s + 1

        ladder = sp.diags(np.sqrt(np.arange(1, n)), offsets=1, format="csr")
        x1 = np.sqrt(hbar / 2.0) * (ladder + ladder.conj().T)
        p1 = 1j * np.sqrt(hbar / 2.0) * (ladder.conj().T - ladder)
        eye = sp.identity(n, format="csr")
        eye_spin = sp.identity(spin_dim, format="csr", dtype=complex)

        def embed(op, axis):
            factors = [eye, eye, eye]
            factors[axis] = op
            out = sp.kron(sp.kron(factors[0], factors[1]), factors[2], format="csr")
            return sp.kron(out, eye_spin, format="csr").astype(complex)

        self.x = [embed(x1, i) for i in range(3)]
        self.p = [embed(p1, i) for i in range(3)]
        sx, sy, sz = spin_matrices(cfg.two_s, hbar=hbar)
        eye_osc = sp.identity(n ** 3, format="csr", dtype=complex)
        self.s = [sp.kron(eye_osc, sp.csr_matrix(sm), format="csr") for sm in (sx, sy, sz)]

        dim = n ** 3 * spin_dim
        self.dimension = dim
        self.m_matrix = (m * sp.identity(dim, dtype=complex, format="csr"))
        self.h = sum(pi @ pi for pi in self.p) / (2.0 * m) \
            + cfg.internal_energy * sp.identity(dim, dtype=complex, format="csr")
        self.k = [m * xi for xi in self.x]
        self.j = [
            self.x[(i + 1) % 3] @ self.p[(i + 2) % 3]
            - self.x[(i + 2) % 3] @ self.p[(i + 1) % 3]
            + self.s[i]
            for i in range(3)
        ]

        n_int = int(cfg.interior_fraction * n)
        if n_int < 1:
            raise TruncationTooSmall("interior subspace is empty")
        level_mask = np.zeros(n)
        level_mask[:n_int] = 1.0
        mask3 = np.einsum("i,j,k->ijk", level_mask, level_mask, level_mask).ravel()
        self.interior = sp.diags(np.repeat(mask3, spin_dim), format="csr", dtype=complex)
        self.n_interior_levels = n_int

    def all_named(self):
        named = [("H", self.h), ("M", self.m_matrix)]
        named += [(f"P{i+1}", self.p[i]) for i in range(3)]
        named += [(f"K{i+1}", self.k[i]) for i in range(3)]
        named += [(f"J{i+1}", self.j[i]) for i in range(3)]
        return named

    def project(self, op):
        return self.interior @ op @ self.interior


def build_generators(cfg: AlgebraConfig) -> GeneratorSet:
    return GeneratorSet(cfg)


def max_abs(matrix) -> float:
    if sp.issparse(matrix):
        return float(np.max(np.abs(matrix.tocoo().data))) if matrix.nnz else 0.0
    return float(np.max(np.abs(matrix))) if matrix.size else 0.0


def commutator(a, b):
    return a @ b - b @ a


@dataclass
class BracketReport:
    """Max interior residual per bracket family."""

    residuals: dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return all(r < self.tol for r in self.residuals.values())

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def check_brackets(gen: GeneratorSet, tol: float = 1e-9) -> BracketReport:
    """Evaluate the ten bracket families on the interior subspace.

    Families: [J,J], [J,K], [J,P] cyclic; [K,H] = i hbar P;
    [K,P] = i hbar m delta; [J,H] = [K,K] = [P,P] = [P,H] = 0; [M, all] = 0.
    """
    hbar = gen.cfg.hbar
    m = gen.cfg.mass
    ih = 1j * hbar
    res: dict[str, float] = {}

    def record(family, value):
        res[family] = max(res.get(family, 0.0), max_abs(gen.project(value)))

    for i in range(3):
        for j in range(3):
            jk = _levi_civita_partner(i, j)
            target_jj = ih * _eps(i, j) * gen.j[jk] if jk is not None else None
            record("[J,J]", commutator(gen.j[i], gen.j[j]) - (target_jj if target_jj is not None else 0))
            target_jk = ih * _eps(i, j) * gen.k[jk] if jk is not None else None
            record("[J,K]", commutator(gen.j[i], gen.k[j]) - (target_jk if target_jk is not None else 0))
            target_jp = ih * _eps(i, j) * gen.p[jk] if jk is not None else None
            record("[J,P]", commutator(gen.j[i], gen.p[j]) - (target_jp if target_jp is not None else 0))
            delta = ih * m if i == j else 0.0
            kp = commutator(gen.k[i], gen.p[j])
            record("[K,P]", kp - delta * sp.identity(gen.dimension, dtype=complex, format="csr"))
            record("[K,K]", commutator(gen.k[i], gen.k[j]))
            record("[P,P]", commutator(gen.p[i], gen.p[j]))
        record("[K,H]", commutator(gen.k[i], gen.h) - ih * gen.p[i])
        record("[J,H]", commutator(gen.j[i], gen.h))
        record("[P,H]", commutator(gen.p[i], gen.h))
    for _, g in gen.all_named():
        record("[M,*]", commutator(gen.m_matrix, g))
    return BracketReport(res, tol)


def _eps(i, j):
    if (i, j) in ((0, 1), (1, 2), (2, 0)):
        return 1.0
    if (i, j) in ((1, 0), (2, 1), (0, 2)):
        return -1.0
    return 0.0


def _levi_civita_partner(i, j):
    if i == j:
        return None
    return 3 - i - j


def casimir_invariants(gen: GeneratorSet):
    """(Q1, Q2, Q3) = (M, 2MH - P^2, (MJ - K x P)^2) as matrices."""
    q1 = gen.m_matrix
    q2 = 2.0 * gen.m_matrix @ gen.h - sum(pi @ pi for pi in gen.p)
    w = [
        gen.m_matrix @ gen.j[i]
        - (gen.k[(i + 1) % 3] @ gen.p[(i + 2) % 3] - gen.k[(i + 2) % 3] @ gen.p[(i + 1) % 3])
        for i in range(3)
    ]
    q3 = sum(wi @ wi for wi in w)
    return q1, q2, q3


@dataclass
class CentralityReport:
    residuals: dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return all(r < self.tol for r in self.residuals.values())


def check_centrality(gen: GeneratorSet, tol: float = 1e-9) -> CentralityReport:
    """Interior residuals of [Q_a, G] for every generator G."""
    qs = casimir_invariants(gen)
    res = {}
    for a, q in enumerate(qs, start=1):
        worst = 0.0
        for _, g in gen.all_named():
            worst = max(worst, max_abs(gen.project(commutator(q, g))))
        res[f"Q{a}"] = worst
    return CentralityReport(res, tol)


def jacobi_residual(gen: GeneratorSet, rng: np.random.Generator, n_triples: int = 20) -> float:
    """Max interior residual of the Jacobi identity over random generator triples."""
    named = gen.all_named()
    worst = 0.0
    for _ in range(n_triples):
        ga, gb, gc = (named[i][1] for i in rng.integers(0, len(named), 3))
        total = (
            commutator(commutator(ga, gb), gc)
            + commutator(commutator(gb, gc), ga)
            + commutator(commutator(gc, ga), gb)
        )
        worst = max(worst, max_abs(gen.project(total)))
    return worst


def monotone_nonincreasing(values, floor: float = 1e-12) -> bool:
    """Non-increasing up to a rounding floor.

    Values at or below ``floor`` compare as ties: sequences that have
    already hit the rounding noise of the arithmetic cannot meaningfully
    decrease further.
    """
    vals = list(values)
    return all(b <= max(a, floor) for a, b in zip(vals, vals[1:]))


def bracket_residual_trend(mass: float, internal_energy: float, two_s: int,
                           n_levels_list, interior_fraction: float = 0.5,
                           hbar: float = 1.0) -> list[float]:
    """Worst bracket residual at each truncation size, for decay checks."""
    out = []
    for n in n_levels_list:
        cfg = AlgebraConfig(mass, internal_energy, two_s, n_levels=n,
                            interior_fraction=interior_fraction, hbar=hbar)
        out.append(check_brackets(build_generators(cfg), tol=np.inf).max_residual)
    return out
