"""Truncated multi-species Fock space over a periodic momentum lattice.

Momenta live on the symmetric cubic grid p = (2 pi hbar / L) k with integer
k in {-(n-1)/2 .. (n-1)/2}^3 (n odd, so the grid is closed under negation
and under the octahedral rotations).  Occupation basis states are truncated
at ``n_max`` total quanta.  On this discretization the Dirac deltas of the
continuum become exact Kronecker deltas:

    delta^3(x - y) -> (n/L)^3 delta_xy,      delta(k - k') -> delta_kk'.

Basis states are labeled by the sorted tuple of occupied mode indices (with
repetition for bosons); the canonical mode order is (species, lexicographic
k, ascending lambda) and fixes all fermionic signs.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np
import scipy.sparse as sp

from .errors import LatticeMismatch

BOSE = "bose"
FERMI = "fermi"


@dataclass(frozen=True)
class Species:
    """One basic field type.

    ``mass`` may be negative (antiparticle partners carry the opposite mass
    and internal energy of their particle).  Statistics is configuration
    input: nothing in the theory fixes it.
    """

    name: str
    mass: float
    internal_energy: float = 0.0
    two_s: int = 0
    statistics: str = BOSE
    antiparticle_of: str | None = None
    xi: complex = 1.0 + 0j
    eta: complex = 0.0 + 0j

    def __post_init__(self):
        if self.mass == 0.0:
            raise ValueError(f"species {self.name}: mass must be nonzero")
        if self.statistics not in (BOSE, FERMI):
            raise ValueError(f"species {self.name}: unknown statistics {self.statistics!r}")
        if self.two_s < 0:
            raise ValueError(f"species {self.name}: two_s must be >= 0")
        if not (np.isfinite(self.xi) and np.isfinite(self.eta)):
            raise ValueError(f"species {self.name}: xi, eta must be finite")
        if self.xi == 0 and self.eta == 0:
            raise ValueError(f"species {self.name}: (xi, eta) must not both vanish")


@dataclass(frozen=True)
class Mode:
    """One-particle label: species, integer momentum triple, spin projection."""

    species: str
    k: tuple[int, int, int]
    two_lambda: int = 0


class ModeLattice:
    """Mode set and occupation basis for a periodic box of size ``L``."""

    def __init__(self, box_length: float, n_per_axis: int, species, n_max: int,
                 hbar: float = 1.0):
        if n_per_axis < 1 or n_per_axis % 2 == 0:
            raise ValueError("n_per_axis must be an odd integer >= 1")
        if n_max < 2:
            raise ValueError("n_max must be >= 2")
        if box_length <= 0 or hbar <= 0:
            raise ValueError("box_length and hbar must be positive")
        self.box_length = float(box_length)
        self.n_per_axis = int(n_per_axis)
        self.n_max = int(n_max)
        self.hbar = float(hbar)
        self.species = tuple(species)
        names = [s.name for s in self.species]
        if len(set(names)) != len(names):
            raise ValueError("species names must be unique")
        self.species_by_name = {s.name: s for s in self.species}

        half = (n_per_axis - 1) // 2
        axis = range(-half, half + 1)
        self.k_grid = [(i, j, k) for i in axis for j in axis for k in axis]

        self.modes: list[Mode] = []
        for s in self.species:
            for k in self.k_grid:
                for two_lambda in range(-s.two_s, s.two_s + 1, 2):
                    self.modes.append(Mode(s.name, k, two_lambda))
        self.mode_index = {m: i for i, m in enumerate(self.modes)}
        self._mode_is_fermi = np.array(
            [self.species_by_name[m.species].statistics == FERMI for m in self.modes]
        )
        self._mode_mass = np.array([self.species_by_name[m.species].mass for m in self.modes])
        self._mode_energy = np.array([self._energy(m) for m in self.modes])

        self.basis: list[tuple[int, ...]] = self._enumerate_basis()
        self.basis_index = {key: i for i, key in enumerate(self.basis)}
        self.dimension = len(self.basis)
        self._ann_cache: dict[int, sp.csr_matrix] = {}

    # -- geometry ------------------------------------------------------

    def momentum(self, k) -> np.ndarray:
        return (2.0 * np.pi * self.hbar / self.box_length) * np.asarray(k, dtype=float)

    def wrap_k(self, k) -> tuple[int, int, int]:
        """Canonical representative on the momentum torus."""
        n, half = self.n_per_axis, (self.n_per_axis - 1) // 2
        return tuple(int((c + half) % n - half) for c in k)

    def _energy(self, mode: Mode) -> float:
        s = self.species_by_name[mode.species]
        p = self.momentum(mode.k)
        return float(p @ p) / (2.0 * s.mass) + s.internal_energy

    def mode_energy(self, mode: Mode) -> float:
        return self._mode_energy[self.mode_index[mode]]

    def signature(self):
        return (self.box_length, self.n_per_axis, self.n_max, self.hbar, self.species)

    # -- basis ---------------------------------------------------------

    def _enumerate_basis(self):
        basis = []
        n_modes = len(self.modes)
        for total in range(self.n_max + 1):
            for key in combinations_with_replacement(range(n_modes), total):
                ok = True
                for i in range(1, len(key)):
                    if key[i] == key[i - 1] and self._mode_is_fermi[key[i]]:
                        ok = False
                        break
                if ok:
                    basis.append(key)
        return basis

    def state_index(self, key) -> int:
        return self.basis_index[tuple(sorted(key))]

    def total_quanta(self, key) -> int:
        return len(key)

    def total_mass(self, key) -> float:
        return float(sum(self._mode_mass[i] for i in key))

    def total_momentum_k(self, key) -> tuple[int, int, int]:
        total = (0, 0, 0)
        for i in key:
            total = tuple(a + b for a, b in zip(total, self.modes[i].k))
        return self.wrap_k(total)

    def free_energy(self, key) -> float:
        return float(sum(self._mode_energy[i] for i in key))

    def species_counts(self, key) -> dict[str, int]:
        counts = {s.name: 0 for s in self.species}
        for i in key:
            counts[self.modes[i].species] += 1
        return counts

    # -- operators -----------------------------------------------------

    def _fermi_sign(self, key, mode_idx) -> int:
        n_before = sum(1 for i in key if i < mode_idx and self._mode_is_fermi[i])
        return -1 if n_before % 2 else 1

    def annihilation_matrix(self, mode_idx: int) -> sp.csr_matrix:
        """Sparse matrix of a(mode) in the occupation basis (cached)."""
        if mode_idx not in self._ann_cache:
            rows, cols, data = [], [], []
            fermi = self._mode_is_fermi[mode_idx]
            for col, key in enumerate(self.basis):
                count = key.count(mode_idx)
                if count == 0:
                    continue
                reduced = list(key)
                reduced.remove(mode_idx)
                rows.append(self.basis_index[tuple(reduced)])
                cols.append(col)
                if fermi:
                    data.append(float(self._fermi_sign(key, mode_idx)))
                else:
                    data.append(np.sqrt(count))
            self._ann_cache[mode_idx] = sp.csr_matrix(
                (data, (rows, cols)), shape=(self.dimension, self.dimension), dtype=complex
            )
        return self._ann_cache[mode_idx]

    def creation_matrix(self, mode_idx: int) -> sp.csr_matrix:
        return self.annihilation_matrix(mode_idx).conj().T.tocsr()

    def number_operator(self) -> sp.csr_matrix:
        return sp.diags([float(len(key)) for key in self.basis], dtype=complex).tocsr()

    def species_number_operator(self, name: str) -> sp.csr_matrix:
        return sp.diags(
            [float(sum(1 for i in key if self.modes[i].species == name)) for key in self.basis],
            dtype=complex,
        ).tocsr()

    def total_mass_operator(self) -> sp.csr_matrix:
        return sp.diags([self.total_mass(key) for key in self.basis], dtype=complex).tocsr()

    def subcap_projector(self) -> sp.csr_matrix:
        """Projector on states with total quanta <= n_max - 1."""
        return sp.diags(
            [1.0 if len(key) < self.n_max else 0.0 for key in self.basis], dtype=complex
        ).tocsr()


class FockVector:
    """Sparse complex amplitude assignment over occupation states."""

    def __init__(self, lattice: ModeLattice, amplitudes=None, truncation_overflow=False):
        self.lattice = lattice
        self.amplitudes: dict[tuple[int, ...], complex] = dict(amplitudes or {})
        self.truncation_overflow = bool(truncation_overflow)

    def copy(self) -> "FockVector":
        return FockVector(self.lattice, self.amplitudes, self.truncation_overflow)

    def scaled(self, factor: complex) -> "FockVector":
        return FockVector(
            self.lattice,
            {k: factor * a for k, a in self.amplitudes.items()},
            self.truncation_overflow,
        )

    def __add__(self, other: "FockVector") -> "FockVector":
        _require_same_lattice(self, other)
        amps = dict(self.amplitudes)
        for k, a in other.amplitudes.items():
            amps[k] = amps.get(k, 0.0) + a
        return FockVector(
            self.lattice, amps, self.truncation_overflow or other.truncation_overflow
        )

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other.scaled(-1.0)

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values())))

    def prune(self, tol: float = 0.0) -> "FockVector":
        return FockVector(
            self.lattice,
            {k: a for k, a in self.amplitudes.items() if abs(a) > tol},
            self.truncation_overflow,
        )

    def to_dense(self) -> np.ndarray:
        vec = np.zeros(self.lattice.dimension, dtype=complex)
        for key, amp in self.amplitudes.items():
            vec[self.lattice.basis_index[key]] = amp
        return vec

    @staticmethod
    def from_dense(lattice: ModeLattice, vec) -> "FockVector":
        amps = {}
        for i, a in enumerate(np.asarray(vec)):
            if a != 0:
                amps[lattice.basis[i]] = complex(a)
        return FockVector(lattice, amps)


def _require_same_lattice(u: FockVector, v: FockVector):
    if u.lattice is not v.lattice and u.lattice.signature() != v.lattice.signature():
        raise LatticeMismatch("vectors live on different lattices")


def vacuum(lattice: ModeLattice) -> FockVector:
    return FockVector(lattice, {(): 1.0 + 0j})


def create(mode: Mode, vec: FockVector) -> FockVector:
    """Apply the creation operator of ``mode``.

    Bosons pick up sqrt(n+1); fermions a reordering sign, with doubly
    occupied modes annihilated.  Amplitudes that would exceed the total
    quanta cap are dropped and flagged on the result.
    """
    lattice = vec.lattice
    idx = lattice.mode_index[mode]
    fermi = lattice._mode_is_fermi[idx]
    amps: dict[tuple[int, ...], complex] = {}
    overflow = vec.truncation_overflow
    for key, amp in vec.amplitudes.items():
        if len(key) + 1 > lattice.n_max:
            if amp != 0:
                overflow = True
            continue
        if fermi and idx in key:
            continue
        pos = bisect.bisect_left(key, idx)
        new_key = key[:pos] + (idx,) + key[pos:]
        if fermi:
            factor = lattice._fermi_sign(key, idx)
        else:
            factor = np.sqrt(key.count(idx) + 1)
        amps[new_key] = amps.get(new_key, 0.0) + factor * amp
    return FockVector(lattice, amps, overflow)


def annihilate(mode: Mode, vec: FockVector) -> FockVector:
    """Apply the annihilation operator of ``mode`` (adjoint of ``create``)."""
    lattice = vec.lattice
    idx = lattice.mode_index[mode]
    fermi = lattice._mode_is_fermi[idx]
    amps: dict[tuple[int, ...], complex] = {}
    for key, amp in vec.amplitudes.items():
        count = key.count(idx)
        if count == 0:
            continue
        reduced = list(key)
        reduced.remove(idx)
        new_key = tuple(reduced)
        if fermi:
            factor = lattice._fermi_sign(key, idx)
        else:
            factor = np.sqrt(count)
        amps[new_key] = amps.get(new_key, 0.0) + factor * amp
    return FockVector(lattice, amps, vec.truncation_overflow)


def inner(u: FockVector, v: FockVector) -> complex:
    """Sesquilinear inner product <u, v> in the orthonormal occupation basis."""
    _require_same_lattice(u, v)
    small, large = u.amplitudes, v.amplitudes
    if len(large) < len(small):
        return complex(sum(np.conj(small[k]) * large[k] for k in large if k in small))
    return complex(sum(np.conj(small[k]) * large[k] for k in small if k in large))


def number_expectation(vec: FockVector) -> float:
    """<v| N |v> for the total number operator."""
    return float(sum(len(key) * abs(a) ** 2 for key, a in vec.amplitudes.items()))


@dataclass
class ModeCommutatorReport:
    tol: float
    max_diagonal_residual: float = 0.0
    max_offdiagonal_residual: float = 0.0
    max_pair_residual: float = 0.0
    passed: bool = True
    worst_pair: tuple | None = None


def mode_commutator_check(lattice: ModeLattice, tol: float = 1e-12,
                          max_modes: int | None = None) -> ModeCommutatorReport:
    """Verify the mode (anti)commutators on the truncated basis.

    [a(k'), a^dag(k)]_-/+ = delta_kk' applied to every state below the total
    quanta cap; on lattices where the cap cannot bind (fermions with
    n_max >= mode count) the domain is the full space.  [a, a] and
    [a^dag, a^dag] vanish on the same domain.  The anticommutator is used
    when both modes are fermionic, the commutator otherwise.
    ``max_modes`` limits the pair sweep on large lattices.
    """
    report = ModeCommutatorReport(tol=tol)
    n_modes = len(lattice.modes)
    indices = list(range(n_modes if max_modes is None else min(n_modes, max_modes)))
    eye = sp.identity(lattice.dimension, dtype=complex, format="csr")
    subcap = lattice.subcap_projector()
    all_fermi = bool(lattice._mode_is_fermi.all())
    cap_can_bind = not (all_fermi and lattice.n_max >= n_modes)
    domain = subcap if cap_can_bind else eye
    for i in indices:
        ai = lattice.annihilation_matrix(i)
        fermi_i = lattice._mode_is_fermi[i]
        for j in indices:
            aj = lattice.annihilation_matrix(j)
            aj_dag = lattice.creation_matrix(j)
            fermi_pair = bool(fermi_i and lattice._mode_is_fermi[j])
            sign = 1.0 if fermi_pair else -1.0
            comm = ai @ aj_dag + sign * aj_dag @ ai
            if i == j:
                comm = comm - eye
            r = _frob(comm @ domain)
            if i == j:
                report.max_diagonal_residual = max(report.max_diagonal_residual, r)
            else:
                report.max_offdiagonal_residual = max(report.max_offdiagonal_residual, r)
            rp = _frob((ai @ aj + sign * aj @ ai) @ domain)
            report.max_pair_residual = max(report.max_pair_residual, rp)
            if r > tol or rp > tol:
                report.passed = False
                report.worst_pair = (i, j)
    return report


def _frob(matrix) -> float:
    if sp.issparse(matrix):
        if matrix.nnz == 0:
            return 0.0
        return float(np.sqrt(np.sum(np.abs(matrix.tocoo().data) ** 2)))
    return float(np.linalg.norm(matrix))


def frobenius(matrix) -> float:
    """Frobenius norm for dense or sparse matrices."""
    return _frob(matrix)
