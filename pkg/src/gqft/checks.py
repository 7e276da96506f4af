"""Named verification checks, grouped into suites.

Every check has a stable identifier, a one-line statement of the law under
test (printed by ``gqft explain``), topic tags used by the coverage census,
and a run function ``fn(config, rng) -> CheckOutcome``.  Checks draw their
randomness only from the supplied generator, so a fixed seed reproduces
every residual exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from . import galilei
from .algebra import (
    AlgebraConfig,
    bracket_residual_trend,
    build_generators,
    casimir_invariants,
    check_brackets,
    check_centrality,
    jacobi_residual,
    max_abs,
    monotone_nonincreasing,
)
from .errors import ConfigInvalid
from .fields import (
    GridPoint,
    GridTransform,
    annihilation_field,
    antiparticle_creation_field,
    creation_field,
    equal_time_commutator,
    equation_of_motion_check,
    galilei_unitary,
    general_field,
    hermiticity_obstruction,
    projective_composition_residual,
    verify_field_transformation,
)
from .fock import (
    FockVector,
    Mode,
    ModeLattice,
    Species,
    annihilate,
    create,
    frobenius,
    inner,
    mode_commutator_check,
    number_expectation,
    vacuum,
)
from .galilei import SpaceTimePoint
from .invariance import (
    INVARIANT,
    check_coefficient_covariance,
    check_mass_sum_rule,
    check_pairwise_invariance,
    density_operator,
    number_commutator,
    production_operator,
    realize,
    sample_elements,
    two_body_operator,
)
from .scattering import (
    ModelSpec,
    QuadratureSpec,
    abel_kernel_exact,
    abel_kernel_quadrature,
    asymptotic_normalization_check,
    evolution,
    free_hamiltonian,
    moller,
    s_matrix,
    sector_partition,
    superselection_report,
)
from .spin import conjugation_matrix, spin_matrices, wigner_d

SUITES = ("group", "algebra", "fock", "fields", "invariance", "scattering")


@dataclass
class CheckOutcome:
    passed: bool
    max_residual: float
    inconclusive: bool = False
    details: str = ""


@dataclass(frozen=True)
class CheckDef:
    check_id: str
    suite: str
    statement: str
    topics: tuple[str, ...]
    run: Callable


REGISTRY: list[CheckDef] = []


def check(check_id: str, suite: str, statement: str, topics: tuple[str, ...]):
    def deco(fn):
        REGISTRY.append(CheckDef(check_id, suite, statement, topics, fn))
        return fn

    return deco


# topics every release must cover (the verification surface of the theory)
REQUIRED_TOPICS = (
    "group-multiplication-law", "group-identity", "group-inverse",
    "group-action", "boost-cocycle", "projective-phase",
    "rotation-representations", "spin-conjugation",
    "lie-brackets", "central-mass-charge", "casimir-invariants",
    "vacuum-state", "state-space-sectors", "exchange-symmetry",
    "mode-commutators", "mode-action", "adjointness", "orthonormality",
    "number-operator", "on-shell-energy", "invariant-measure",
    "field-annihilates-vacuum", "position-basis-bra", "irreducibility",
    "local-commutativity", "field-transformation-law",
    "creation-field-transformation", "antiparticle-field-transformation",
    "general-field", "general-field-commutator", "statistics-freedom",
    "non-hermiticity", "equation-of-motion", "mode-transformation",
    "phase-rearrangement", "pairwise-invariance", "number-conservation",
    "mass-sum-rule", "number-non-conservation", "coefficient-covariance",
    "mass-conservation", "superselection", "free-hamiltonian",
    "moller-operator", "evolution-operator", "scattering-operator",
    "asymptotic-states", "smatrix-pairing", "asymptotic-normalization",
)


# -- shared fixtures -------------------------------------------------------

_LATTICES: dict[tuple, ModeLattice] = {}


def shared_lattice(box_length, n_per_axis, species, n_max, hbar) -> ModeLattice:
    key = (round(box_length, 12), n_per_axis, tuple(species), n_max, round(hbar, 12))
    if key not in _LATTICES:
        _LATTICES[key] = ModeLattice(box_length, n_per_axis, species, n_max, hbar)
    return _LATTICES[key]


def scalar_lattice(cfg) -> ModeLattice:
    return shared_lattice(cfg.box_length, cfg.n_per_axis,
                          [Species("phi", mass=1.0)], cfg.n_max, cfg.hbar)


def half_spin_lattice(cfg) -> ModeLattice:
    return shared_lattice(cfg.box_length, cfg.n_per_axis,
                          [Species("chi", mass=1.0, two_s=1)], cfg.n_max, cfg.hbar)


def pair_lattice(cfg, two_s=0, statistics="bose", xi=1.0, eta=0.5) -> ModeLattice:
    species = [
        Species("q", mass=1.0, internal_energy=0.25, two_s=two_s,
                statistics=statistics, antiparticle_of="qbar", xi=xi, eta=eta),
        Species("qbar", mass=-1.0, internal_energy=-0.25, two_s=two_s,
                statistics=statistics),
    ]
    return shared_lattice(cfg.box_length, cfg.n_per_axis, species, cfg.n_max, cfg.hbar)


def few_mode_lattice(cfg, statistics="bose", n_species=4, n_max=3) -> ModeLattice:
    # nonzero internal energies keep the free Hamiltonian nontrivial on the
    # single-momentum lattice
    species = [Species(f"m{i}", mass=1.0 + 0.5 * i, internal_energy=0.3 + 0.4 * i,
                       statistics=statistics)
               for i in range(n_species)]
    return shared_lattice(cfg.box_length, 1, species, n_max, cfg.hbar)


def production_lattice(cfg, out_mass=2.0) -> ModeLattice:
    species = [
        Species("theta", mass=1.0),
        Species("enn", mass=1.0),
        Species("vee", mass=out_mass),
    ]
    return shared_lattice(cfg.box_length, cfg.n_per_axis, species, cfg.n_max, cfg.hbar)


def transform_samples(lattice: ModeLattice, rng) -> list[galilei.GalileiElement]:
    return sample_elements(lattice, rng, n_words=20)


def random_group_element(rng) -> galilei.GalileiElement:
    return galilei.random_element(rng, scale=2.0)


# -- group suite ------------------------------------------------------------

@check("group-identity-laws", "group",
       "compose(g, e) = compose(e, g) = g and act(e, p) = p",
       ("group-identity",))
def _group_identity(cfg, rng):
    e = galilei.identity()
    worst = 0.0
    for _ in range(200):
        g = random_group_element(rng)
        for h in (galilei.compose(g, e), galilei.compose(e, g)):
            worst = max(worst, np.max(np.abs(
                galilei.homogeneous_matrix(h) - galilei.homogeneous_matrix(g))))
        p = SpaceTimePoint(tuple(rng.normal(size=3)), float(rng.normal()))
        q = galilei.act(e, p)
        worst = max(worst, np.max(np.abs(np.array(q.x) - np.array(p.x))), abs(q.t - p.t))
    return CheckOutcome(worst < 1e-12, worst)


@check("group-composition-oracle", "group",
       "compose(g2, g1) = (b2+b1, a2+R2 a1+b1 v2, v2+R2 v1, R2 R1), "
       "cross-validated against 5x5 homogeneous matrices",
       ("group-multiplication-law",))
def _group_compose(cfg, rng):
    worst = 0.0
    for _ in range(1000):
        g1, g2 = random_group_element(rng), random_group_element(rng)
        lhs = galilei.homogeneous_matrix(galilei.compose(g2, g1))
        rhs = galilei.homogeneous_matrix(g2) @ galilei.homogeneous_matrix(g1)
        worst = max(worst, np.max(np.abs(lhs - rhs)))
    return CheckOutcome(worst < 1e-12, worst)


@check("group-associativity", "group",
       "compose(compose(g3, g2), g1) = compose(g3, compose(g2, g1))",
       ("group-multiplication-law",))
def _group_assoc(cfg, rng):
    worst = 0.0
    for _ in range(1000):
        g1, g2, g3 = (random_group_element(rng) for _ in range(3))
        lhs = galilei.homogeneous_matrix(galilei.compose(galilei.compose(g3, g2), g1))
        rhs = galilei.homogeneous_matrix(galilei.compose(g3, galilei.compose(g2, g1)))
        worst = max(worst, np.max(np.abs(lhs - rhs)))
    return CheckOutcome(worst < 1e-12, worst)


@check("group-inverse", "group",
       "inverse(g) = (-b, -R^-1(a - b v), -R^-1 v, R^-1); g g^-1 = e",
       ("group-inverse",))
def _group_inverse(cfg, rng):
    worst = 0.0
    eye = np.eye(5)
    for _ in range(1000):
        g = random_group_element(rng)
        gi = galilei.inverse(g)
        worst = max(worst, np.max(np.abs(
            galilei.homogeneous_matrix(galilei.compose(g, gi)) - eye)))
        worst = max(worst, np.max(np.abs(
            galilei.homogeneous_matrix(galilei.inverse(gi)) - galilei.homogeneous_matrix(g))))
    return CheckOutcome(worst < 1e-12, worst)


@check("group-space-time-action", "group",
       "x' = R x + v t + a, t' = t + b is a left action",
       ("group-action",))
def _group_action(cfg, rng):
    worst = 0.0
    for _ in range(1000):
        g1, g2 = random_group_element(rng), random_group_element(rng)
        p = SpaceTimePoint(tuple(rng.normal(size=3)), float(rng.normal()))
        q1 = galilei.act(g2, galilei.act(g1, p))
        q2 = galilei.act(galilei.compose(g2, g1), p)
        worst = max(worst, np.max(np.abs(np.array(q1.x) - np.array(q2.x))),
                    abs(q1.t - q2.t))
        col = galilei.homogeneous_matrix(g1) @ np.array([*p.x, p.t, 1.0])
        q3 = galilei.act(g1, p)
        worst = max(worst, np.max(np.abs(col[:3] - np.array(q3.x))), abs(col[3] - q3.t))
    return CheckOutcome(worst < 1e-12, worst)


@check("boost-cocycle-values", "group",
       "gamma(g; x, t) = (1/2)|v|^2 t + v . R x, vanishing when v = 0",
       ("boost-cocycle",))
def _cocycle_values(cfg, rng):
    g = galilei.element(v=(1.0, 0.0, 0.0))
    val = galilei.boost_cocycle(g, SpaceTimePoint((2.0, 0.0, 0.0), 3.0))
    worst = abs(val - 3.5)
    for _ in range(100):
        rot = random_group_element(rng).r
        g0 = galilei.element(b=float(rng.normal()), a=tuple(rng.normal(size=3)), r=rot)
        p = SpaceTimePoint(tuple(rng.normal(size=3)), float(rng.normal()))
        worst = max(worst, abs(galilei.boost_cocycle(g0, p)))
    return CheckOutcome(worst < 1e-12, worst)


@check("projective-phase-cocycle", "group",
       "zeta(g3, g2 g1) + zeta(g2, g1) = zeta(g3 g2, g1) + zeta(g3, g2) "
       "(mod 2 pi hbar)",
       ("projective-phase",))
def _projective_cocycle(cfg, rng):
    period = 2.0 * np.pi * cfg.hbar
    worst = 0.0
    for _ in range(1000):
        g1, g2, g3 = (random_group_element(rng) for _ in range(3))
        m = float(rng.uniform(0.5, 3.0))
        lhs = galilei.projective_phase(g3, galilei.compose(g2, g1), m) \
            + galilei.projective_phase(g2, g1, m)
        rhs = galilei.projective_phase(galilei.compose(g3, g2), g1, m) \
            + galilei.projective_phase(g3, g2, m)
        delta = (lhs - rhs + period / 2) % period - period / 2
        worst = max(worst, abs(delta))
    trivial = max(
        abs(galilei.projective_phase(galilei.identity(), random_group_element(rng), 1.0)),
        abs(galilei.projective_phase(random_group_element(rng), galilei.identity(), 1.0)),
    )
    worst = max(worst, trivial)
    return CheckOutcome(worst < 1e-10, worst)


@check("phase-rearrangement-identity", "group",
       "e^{-i(Et-p.x)/h} e^{-i(E'b-p'.a)/h} = e^{-i(E't'-p'.x')/h} e^{-i m gamma/h}",
       ("phase-rearrangement",))
def _phase_rearrangement(cfg, rng):
    hbar = cfg.hbar
    worst = 0.0
    for _ in range(500):
        g = random_group_element(rng)
        m = float(rng.uniform(-3.0, 3.0)) or 1.0
        w = float(rng.normal())
        x = rng.normal(size=3)
        t = float(rng.normal())
        p = rng.normal(size=3)
        energy = float(p @ p) / (2 * m) + w
        rm = g.r.to_matrix()
        p2 = rm @ p + m * g.v_vec
        e2 = energy + float(g.v_vec @ (rm @ p)) + 0.5 * m * float(g.v_vec @ g.v_vec)
        pt = galilei.act(g, SpaceTimePoint(tuple(x), t))
        gamma = galilei.boost_cocycle(g, SpaceTimePoint(tuple(x), t))
        lhs = np.exp(-1j * (energy * t - p @ x) / hbar) \
            * np.exp(-1j * (e2 * g.b - p2 @ g.a_vec) / hbar)
        rhs = np.exp(-1j * (e2 * pt.t - p2 @ np.array(pt.x)) / hbar) \
            * np.exp(-1j * m * gamma / hbar)
        worst = max(worst, abs(lhs - rhs))
    return CheckOutcome(worst < 1e-12, worst)


@check("rotation-representation", "group",
       "D^(s)(R2 R1) = D^(s)(R2) D^(s)(R1), unitary, for s <= 4",
       ("rotation-representations",))
def _rotation_reps(cfg, rng):
    worst = 0.0
    for two_s in range(0, 9):
        dim = two_s + 1
        for _ in range(56):
            r1, r2 = random_group_element(rng).r, random_group_element(rng).r
            d1, d2 = wigner_d(two_s, r1), wigner_d(two_s, r2)
            worst = max(worst, np.max(np.abs(d2 @ d1 - wigner_d(two_s, r2.compose(r1)))))
            worst = max(worst, np.max(np.abs(d1 @ d1.conj().T - np.eye(dim))))
            worst = max(worst, abs(abs(np.linalg.det(d1)) - 1.0))
            # transpose-conjugate relation through the inverse rotation
            worst = max(worst, np.max(np.abs(wigner_d(two_s, r1.inverse()) - d1.conj().T)))
    return CheckOutcome(worst < 1e-12, worst)


@check("rotation-double-cover", "group",
       "a 2 pi rotation is -1 on half-integer spin, +1 on integer spin",
       ("rotation-representations",))
def _double_cover(cfg, rng):
    worst = 0.0
    for two_s in range(0, 7):
        axis = rng.normal(size=3)
        d = wigner_d(two_s, galilei.Rotation.from_axis_angle(axis, 2.0 * np.pi))
        worst = max(worst, np.max(np.abs(d - (-1.0) ** two_s * np.eye(two_s + 1))))
    return CheckOutcome(worst < 1e-12, worst)


@check("spin-matrix-algebra", "group",
       "[J_i, J_j] = i hbar eps_ijk J_k and J^2 = hbar^2 s(s+1)",
       ("rotation-representations", "lie-brackets"))
def _spin_algebra(cfg, rng):
    hbar = cfg.hbar
    worst = 0.0
    for two_s in range(0, 9):
        jx, jy, jz = spin_matrices(two_s, hbar)
        s = two_s / 2.0
        eye = np.eye(two_s + 1)
        for a, b, c in ((jx, jy, jz), (jy, jz, jx), (jz, jx, jy)):
            worst = max(worst, np.max(np.abs(a @ b - b @ a - 1j * hbar * c)))
        j2 = jx @ jx + jy @ jy + jz @ jz
        worst = max(worst, np.max(np.abs(j2 - hbar ** 2 * s * (s + 1) * eye)))
    return CheckOutcome(worst < 1e-12, worst)


@check("spin-conjugation-matrix", "group",
       "D(R)* = C D(R) C^-1 with C* C = (-1)^(2s) and C^dag C = 1",
       ("spin-conjugation",))
def _conjugation(cfg, rng):
    worst = 0.0
    for two_s in range(0, 9):
        c = conjugation_matrix(two_s)
        dim = two_s + 1
        worst = max(worst, np.max(np.abs(c.conj() @ c - (-1.0) ** two_s * np.eye(dim))))
        worst = max(worst, np.max(np.abs(c.conj().T @ c - np.eye(dim))))
        c_inv = np.linalg.inv(c)
        for _ in range(20):
            d = wigner_d(two_s, random_group_element(rng).r)
            worst = max(worst, np.max(np.abs(d.conj() - c @ d @ c_inv)))
    return CheckOutcome(worst < 1e-12, worst)


# -- algebra suite ----------------------------------------------------------

@check("bracket-table", "algebra",
       "[J,J]=ihJ, [J,K]=ihK, [J,P]=ihP, [K,H]=ihP, [K,P]=ih m delta, "
       "[J,H]=[K,K]=[P,P]=[P,H]=0, [M,*]=0 on the interior subspace",
       ("lie-brackets", "central-mass-charge"))
def _bracket_table(cfg, rng):
    gen = build_generators(cfg.algebra_config())
    report = check_brackets(gen, tol=cfg.algebra_tol)
    detail = ", ".join(f"{k}={v:.1e}" for k, v in report.residuals.items())
    return CheckOutcome(report.passed, report.max_residual, details=detail)


@check("bracket-residual-decay", "algebra",
       "interior bracket residuals do not grow from n_levels = 8 to 16",
       ("lie-brackets",))
def _bracket_decay(cfg, rng):
    ac = cfg.algebra_config()
    trend = bracket_residual_trend(ac.mass, ac.internal_energy, ac.two_s,
                                   [8, 12, 16], ac.interior_fraction, ac.hbar)
    ok = monotone_nonincreasing(trend, floor=1e-12)
    return CheckOutcome(ok and max(trend) < cfg.algebra_tol, max(trend),
                        details=f"trend={['%.1e' % t for t in trend]}")


@check("generator-hermiticity", "algebra",
       "all ten generators are hermitian on the truncated space",
       ("lie-brackets",))
def _generator_hermiticity(cfg, rng):
    gen = build_generators(cfg.algebra_config())
    worst = 0.0
    for _, g in gen.all_named():
        worst = max(worst, max_abs(g - g.conj().T))
    return CheckOutcome(worst < 1e-10, worst)


@check("casimir-values", "algebra",
       "Q2 = 2MH - P^2 = 2mW and Q3 = (MJ - KxP)^2 = m^2 hbar^2 s(s+1)",
       ("casimir-invariants",))
def _casimir_values(cfg, rng):
    worst = 0.0
    details = []
    for two_s in (0, 1, 2):
        ac = AlgebraConfig(mass=2.0, internal_energy=0.5, two_s=two_s,
                           n_levels=10, hbar=cfg.hbar)
        gen = build_generators(ac)
        eye = sp.identity(gen.dimension, dtype=complex, format="csr")
        _, q2, q3 = casimir_invariants(gen)
        r2 = max_abs(q2 - 2.0 * ac.mass * ac.internal_energy * eye)
        s = two_s / 2.0
        r3 = max_abs(gen.project(
            q3 - ac.mass ** 2 * ac.hbar ** 2 * s * (s + 1) * eye))
        worst = max(worst, r2, r3)
        details.append(f"2s={two_s}: Q2 {r2:.1e}, Q3 {r3:.1e}")
    return CheckOutcome(worst < 1e-9, worst, details="; ".join(details))


@check("casimir-centrality", "algebra",
       "[Q_a, G] = 0 on the interior subspace for every generator G",
       ("casimir-invariants", "mass-conservation"))
def _casimir_centrality(cfg, rng):
    gen = build_generators(cfg.algebra_config())
    rep = check_centrality(gen, tol=cfg.algebra_tol)
    return CheckOutcome(rep.passed, max(rep.residuals.values()),
                        details=str({k: f"{v:.1e}" for k, v in rep.residuals.items()}))


@check("jacobi-identity", "algebra",
       "[[A,B],C] + [[B,C],A] + [[C,A],B] = 0 for random generator triples",
       ("lie-brackets",))
def _jacobi(cfg, rng):
    gen = build_generators(cfg.algebra_config())
    worst = jacobi_residual(gen, rng, n_triples=20)
    return CheckOutcome(worst < 1e-8, worst)


# -- fock suite --------------------------------------------------------------

@check("vacuum-state", "fock",
       "<0|0> = 1, a(k)|0> = 0, N|0> = 0",
       ("vacuum-state", "number-operator"))
def _vacuum(cfg, rng):
    lat = scalar_lattice(cfg)
    vac = vacuum(lat)
    worst = abs(inner(vac, vac) - 1.0)
    for k in ((0, 0, 0), (1, 0, -1)):
        worst = max(worst, annihilate(Mode("phi", k), vac).norm())
    worst = max(worst, abs(number_expectation(vac)))
    return CheckOutcome(worst < 1e-12, worst)


@check("creation-normalization", "fock",
       "a^dag carries sqrt(n+1) for bosons; double fermionic creation vanishes",
       ("exchange-symmetry", "state-space-sectors"))
def _creation_norm(cfg, rng):
    lat = scalar_lattice(cfg)
    m = Mode("phi", (0, 0, 0))
    one = create(m, vacuum(lat))
    two = create(m, one)
    worst = abs(inner(one, one) - 1.0)
    worst = max(worst, abs(inner(two, two) - 2.0))
    latf = few_mode_lattice(cfg, statistics="fermi", n_species=2, n_max=2)
    mf = Mode("m0", (0, 0, 0))
    worst = max(worst, create(mf, create(mf, vacuum(latf))).norm())
    return CheckOutcome(worst < 1e-12, worst)


@check("adjointness", "fock",
       "<a^dag(k) u, v> = <u, a(k) v> for random vectors",
       ("adjointness",))
def _adjointness(cfg, rng):
    worst = 0.0
    for stats in ("bose", "fermi"):
        lat = few_mode_lattice(cfg, statistics=stats)
        for _ in range(40):
            u = _random_vector(lat, rng)
            v = _random_vector(lat, rng)
            mode = lat.modes[rng.integers(0, len(lat.modes))]
            worst = max(worst, abs(inner(create(mode, u), v) - inner(u, annihilate(mode, v))))
    return CheckOutcome(worst < 1e-12, worst)


def _random_vector(lat, rng, n_terms=6):
    keys = [lat.basis[i] for i in rng.integers(0, lat.dimension, n_terms)]
    return FockVector(lat, {k: complex(a, b) for k, (a, b)
                            in zip(keys, rng.normal(size=(n_terms, 2)))})


@check("mode-commutators", "fock",
       "[a(k'), a^dag(k)]_-/+ = delta_kk', [a,a]_-/+ = 0, below the cap",
       ("mode-commutators", "local-commutativity"))
def _mode_commutators(cfg, rng):
    worst = 0.0
    ok = True
    for stats in ("bose", "fermi"):
        lat = few_mode_lattice(cfg, statistics=stats)
        rep = mode_commutator_check(lat, tol=1e-12)
        ok = ok and rep.passed
        worst = max(worst, rep.max_diagonal_residual, rep.max_offdiagonal_residual,
                    rep.max_pair_residual)
    return CheckOutcome(ok, worst)


@check("mode-action", "fock",
       "a(k)|k1..kN> = sum_r (+-)^(r+1) delta(k - k_r) |..without k_r..>",
       ("mode-action",))
def _mode_action(cfg, rng):
    worst = 0.0
    for stats in ("bose", "fermi"):
        lat = few_mode_lattice(cfg, statistics=stats)
        modes = lat.modes
        for _ in range(60):
            size = int(rng.integers(1, 4))
            picks = list(rng.integers(0, len(modes), size))
            if stats == "fermi" and len(set(picks)) != len(picks):
                continue
            state = vacuum(lat)
            for i in reversed(picks):  # a+(k1)..a+(kN)|0>, leftmost applied last
                state = create(modes[i], state)
            target = modes[rng.integers(0, len(modes))]
            got = annihilate(target, state)
            expect = FockVector(lat)
            sign = 1.0
            for r, i in enumerate(picks):
                if modes[i] == target:
                    rest = vacuum(lat)
                    for j in reversed([p for q, p in enumerate(picks) if q != r]):
                        rest = create(modes[j], rest)
                    expect = expect + rest.scaled((-1.0 if stats == "fermi" else 1.0) ** r)
            worst = max(worst, (got - expect).norm())
    return CheckOutcome(worst < 1e-12, worst)


@check("exchange-symmetry", "fock",
       "a^dag(k1) a^dag(k2) = +- a^dag(k2) a^dag(k1): only the symmetric "
       "and antisymmetric sectors are constructible",
       ("exchange-symmetry", "state-space-sectors", "statistics-freedom"))
def _exchange(cfg, rng):
    worst = 0.0
    for stats, sign in (("bose", 1.0), ("fermi", -1.0)):
        lat = few_mode_lattice(cfg, statistics=stats)
        for _ in range(40):
            v = _random_vector(lat, rng)
            i, j = rng.integers(0, len(lat.modes), 2)
            m1, m2 = lat.modes[i], lat.modes[j]
            lhs = create(m1, create(m2, v))
            rhs = create(m2, create(m1, v)).scaled(sign if i != j else 1.0)
            worst = max(worst, (lhs - rhs).norm())
    return CheckOutcome(worst < 1e-12, worst)


@check("orthonormality-formula", "fock",
       "<k'_1..k'_N | k_1..k_M> = delta_NM sum_P (+-1)^P prod delta(k_i - k'_Pi)",
       ("orthonormality",))
def _orthonormality(cfg, rng):
    worst = 0.0
    for stats, sign in (("bose", 1.0), ("fermi", -1.0)):
        lat = few_mode_lattice(cfg, statistics=stats)
        modes = lat.modes
        for _ in range(80):
            na, nb = rng.integers(0, 4, 2)
            left = list(rng.integers(0, len(modes), na))
            right = list(rng.integers(0, len(modes), nb))
            if stats == "fermi" and (len(set(left)) != na or len(set(right)) != nb):
                continue
            bra = vacuum(lat)
            for i in reversed(left):
                bra = create(modes[i], bra)
            ket = vacuum(lat)
            for i in reversed(right):
                ket = create(modes[i], ket)
            got = inner(bra, ket)
            expect = 0.0
            if na == nb:
                for perm in itertools.permutations(range(na)):
                    if all(left[perm[i]] == right[i] for i in range(na)):
                        expect += 1.0 if stats == "bose" else _perm_sign(perm)
            worst = max(worst, abs(got - expect))
    return CheckOutcome(worst < 1e-12, worst)


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@check("number-operator", "fock",
       "N is diagonal with eigenvalue = total quanta; [N, a^dag(k)] = a^dag(k)",
       ("number-operator",))
def _number_operator(cfg, rng):
    lat = few_mode_lattice(cfg)
    n_op = lat.number_operator()
    worst = 0.0
    for i, key in enumerate(lat.basis):
        worst = max(worst, abs(n_op[i, i] - len(key)))
    subcap = lat.subcap_projector()
    for idx in range(len(lat.modes)):
        adag = lat.creation_matrix(idx)
        comm = (n_op @ adag - adag @ n_op - adag) @ subcap
        worst = max(worst, frobenius(comm))
    return CheckOutcome(worst < 1e-12, worst)


# -- fields suite -------------------------------------------------------------

@check("field-vacuum-and-position-basis", "fields",
       "psi-(x,t)|0> = 0 and ||psi+(x,t)|0>||^2 = (n/L)^3 (the lattice "
       "delta normalization of the position-basis bra)",
       ("field-annihilates-vacuum", "position-basis-bra", "invariant-measure",
        "vacuum-state"))
def _field_vacuum(cfg, rng):
    lat = scalar_lattice(cfg)
    weight = (lat.n_per_axis / lat.box_length) ** 3
    worst = 0.0
    for j in ((0, 0, 0), (1, -1, 0)):
        point = GridPoint(j, 0.3)
        psi = annihilation_field(lat, "phi", 0, point)
        vec = FockVector.from_dense(lat, psi.matrix @ vacuum(lat).to_dense())
        worst = max(worst, vec.norm())
        plus = FockVector.from_dense(
            lat, creation_field(lat, "phi", 0, point).matrix @ vacuum(lat).to_dense())
        worst = max(worst, abs(inner(plus, plus) - weight))
        # psi(x,t) applied to its own position state returns the vacuum
        # with the same lattice delta weight
        back = FockVector.from_dense(lat, psi.matrix @ plus.to_dense())
        worst = max(worst, (back - vacuum(lat).scaled(weight)).norm())
    return CheckOutcome(worst < 1e-12, worst)


@check("equal-time-commutator", "fields",
       "[psi(x,t), psi^dag(y,t)]_-/+ = delta_ll' delta^3(x-y) -> (n/L)^3 "
       "Kronecker on the grid; [psi, psi]_-/+ = 0",
       ("local-commutativity", "invariant-measure"))
def _equal_time(cfg, rng):
    worst = 0.0
    ok = True
    for make, name, lam in ((scalar_lattice, "phi", 0), (half_spin_lattice, "chi", 1)):
        lat = make(cfg)
        f0 = annihilation_field(lat, name, lam, GridPoint((0, 0, 0), 0.0))
        f1 = annihilation_field(lat, name, lam, GridPoint((1, 0, 0), 0.0))
        for f, g in ((f0, f0), (f0, f1)):
            rep = equal_time_commutator(f, g, tol=1e-11)
            ok = ok and rep.passed
            worst = max(worst, rep.residual)
        rep = equal_time_commutator(f0, f1, dagger=False)
        ok = ok and rep.passed
        worst = max(worst, rep.residual)
        if lat.species_by_name[name].two_s > 0:
            f_other = annihilation_field(lat, name, -1, GridPoint((0, 0, 0), 0.0))
            rep = equal_time_commutator(f0, f_other, tol=1e-11)
            ok = ok and rep.passed and rep.expected_coefficient == 0
            worst = max(worst, rep.residual)
    return CheckOutcome(ok, worst)


@check("general-field-commutator", "fields",
       "[psi, psi^dag]_-/+ = (|xi|^2 -/+ |eta|^2) delta_ll' delta^3(x-y): "
       "either bracket sign is admissible, so no statistics follows",
       ("general-field-commutator", "statistics-freedom", "general-field",
        "local-commutativity"))
def _general_commutator(cfg, rng):
    worst = 0.0
    ok = True
    grid = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0), (2.0, 1.0),
            (1 / np.sqrt(2), 1j / np.sqrt(2)), (0.3, 0.8j)]
    for stats in ("bose", "fermi"):
        lat = pair_lattice(cfg, statistics=stats)
        weight = (lat.n_per_axis / lat.box_length) ** 3
        sign = 1.0 if stats == "fermi" else -1.0
        for xi, eta in grid:
            f = general_field(lat, "q", 0, GridPoint((0, 0, 0), 0.0), xi, eta)
            rep = equal_time_commutator(f, f, tol=1e-11)
            expected = (abs(xi) ** 2 + sign * abs(eta) ** 2) * weight
            ok = ok and rep.passed and abs(rep.expected_coefficient - expected) < 1e-12
            worst = max(worst, rep.residual)
            g = general_field(lat, "q", 0, GridPoint((0, 1, 0), 0.0), xi, eta)
            rep2 = equal_time_commutator(f, g, tol=1e-11)
            ok = ok and rep2.passed
            worst = max(worst, rep2.residual)
    return CheckOutcome(ok, worst)


def _law_residual(cfg, rng, lattice, builder, points) -> float:
    worst = 0.0
    for g in transform_samples(lattice, rng):
        transform = GridTransform(g, lattice)
        u = galilei_unitary(transform)
        for f in (builder(lattice, point) for point in points):
            rep = verify_field_transformation(transform, f, tol=1e-10, unitary=u)
            worst = max(worst, rep.residual)
    # a pure time shift, exact at any time
    shift = galilei.element(b=0.37)
    transform = GridTransform(shift, lattice)
    for f in (builder(lattice, point) for point in points):
        rep = verify_field_transformation(transform, f, tol=1e-10)
        worst = max(worst, rep.residual)
    return worst


@check("field-transformation-annihilation", "fields",
       "U psi U^-1 = e^{+i m gamma/h} sum D_{ll'}(R^-1) psi_l'(x',t') over "
       "rotations, translations, boosts and random words, s in {0, 1/2}",
       ("field-transformation-law", "on-shell-energy"))
def _transform_annihilation(cfg, rng):
    points = [GridPoint((0, 0, 0), 0.0), GridPoint((1, 0, -1), 0.0)]
    worst = _law_residual(cfg, rng, scalar_lattice(cfg),
                          lambda lat, p: annihilation_field(lat, "phi", 0, p), points)
    worst = max(worst, _law_residual(
        cfg, rng, half_spin_lattice(cfg),
        lambda lat, p: annihilation_field(lat, "chi", 1, p), points))
    return CheckOutcome(worst < 1e-10, worst)


@check("field-transformation-creation", "fields",
       "U psi+ U^-1 = e^{-i m gamma/h} sum D_{l'l}(R) psi+_l'(x',t')",
       ("creation-field-transformation",))
def _transform_creation(cfg, rng):
    points = [GridPoint((0, 0, 0), 0.0), GridPoint((0, 1, 0), 0.0)]
    worst = _law_residual(cfg, rng, scalar_lattice(cfg),
                          lambda lat, p: creation_field(lat, "phi", 0, p), points)
    worst = max(worst, _law_residual(
        cfg, rng, half_spin_lattice(cfg),
        lambda lat, p: creation_field(lat, "chi", -1, p), points))
    return CheckOutcome(worst < 1e-10, worst)


@check("field-transformation-antiparticle", "fields",
       "the antiparticle creation field transforms with phase sign (-m): "
       "U psi^c+ U^-1 = e^{-i(-m) gamma/h} sum D_{ll'}(R^-1) psi^c+_l'(x',t')",
       ("antiparticle-field-transformation", "spin-conjugation"))
def _transform_antiparticle(cfg, rng):
    points = [GridPoint((0, 0, 0), 0.0), GridPoint((1, 1, 0), 0.0)]
    worst = _law_residual(cfg, rng, pair_lattice(cfg, two_s=0),
                          lambda lat, p: antiparticle_creation_field(lat, "q", 0, p),
                          points)
    worst = max(worst, _law_residual(
        cfg, rng, pair_lattice(cfg, two_s=1),
        lambda lat, p: antiparticle_creation_field(lat, "q", 1, p), points))
    return CheckOutcome(worst < 1e-10, worst)


@check("field-transformation-general", "fields",
       "xi psi- + eta psi^c+ obeys the local law with the particle mass",
       ("general-field", "field-transformation-law"))
def _transform_general(cfg, rng):
    points = [GridPoint((0, 0, 0), 0.0)]
    worst = _law_residual(cfg, rng, pair_lattice(cfg, two_s=0),
                          lambda lat, p: general_field(lat, "q", 0, p), points)
    worst = max(worst, _law_residual(
        cfg, rng, pair_lattice(cfg, two_s=1),
        lambda lat, p: general_field(lat, "q", -1, p), points))
    return CheckOutcome(worst < 1e-10, worst)


@check("unitary-lift", "fields",
       "U(g) is unitary, leaves the vacuum invariant, and never mixes "
       "total-mass sectors",
       ("superselection", "vacuum-state"))
def _unitary_lift(cfg, rng):
    from .scattering import offblock_max

    lat = pair_lattice(cfg, two_s=0)
    worst = 0.0
    eye = sp.identity(lat.dimension, dtype=complex, format="csr")
    masses = sector_partition(lat, by_momentum=False)
    vac_idx = lat.basis_index[()]
    for g in transform_samples(lat, rng)[:40]:
        u = galilei_unitary(GridTransform(g, lat))
        worst = max(worst, frobenius(u.conj().T @ u - eye))
        worst = max(worst, abs(u[vac_idx, vac_idx] - 1.0))
        worst = max(worst, offblock_max(u, masses))
    return CheckOutcome(worst < 1e-11, worst)


@check("projective-phase-oracle", "fields",
       "U(g2) U(g1) = exp(i zeta(g2,g1) M/hbar) U(g2 g1) with "
       "zeta = -m((1/2)|v2|^2 b1 + v2 . R2 a1)",
       ("projective-phase", "central-mass-charge"))
def _projective_oracle(cfg, rng):
    lat = scalar_lattice(cfg)
    gens = [g for g in transform_samples(lat, rng)[:36]]
    worst = 0.0
    for _ in range(12):
        g1 = gens[rng.integers(0, len(gens))]
        g2 = gens[rng.integers(0, len(gens))]
        if rng.uniform() < 0.5:
            g2 = galilei.compose(galilei.element(b=float(rng.uniform(-1, 1))), g2)
        worst = max(worst, projective_composition_residual(lat, g2, g1))
    return CheckOutcome(worst < 1e-10, worst)


@check("mode-transformation", "fields",
       "U a^dag(k,l) U^-1 = e^{-i(E'b - p'.a)/h} sum D_{l'l}(R) a^dag(k',l') "
       "and the conjugate law for a(k,l)",
       ("mode-transformation",))
def _mode_transformation(cfg, rng):
    lat = half_spin_lattice(cfg)
    worst = 0.0
    species = lat.species_by_name["chi"]
    for g in transform_samples(lat, rng)[:20]:
        transform = GridTransform(g, lat)
        u = galilei_unitary(transform)
        images = transform.mode_images()
        for mode_idx in rng.integers(0, len(lat.modes), 6):
            adag = lat.creation_matrix(int(mode_idx))
            rhs = sp.csr_matrix((lat.dimension, lat.dimension), dtype=complex)
            for idx, coeff in images[int(mode_idx)]:
                rhs = rhs + coeff * lat.creation_matrix(idx)
            worst = max(worst, frobenius(u @ adag @ u.conj().T - rhs))
            a = lat.annihilation_matrix(int(mode_idx))
            worst = max(worst, frobenius(u @ a @ u.conj().T - rhs.conj().T.tocsr()))
    return CheckOutcome(worst < 1e-11, worst, details=f"two_s={species.two_s}")


@check("time-shift-consistency", "fields",
       "the time-shift unitary equals exp(-i H0 b / hbar) and conjugation "
       "moves fields to the shifted time",
       ("evolution-operator", "on-shell-energy"))
def _time_shift(cfg, rng):
    lat = scalar_lattice(cfg)
    b = 0.41
    u = galilei_unitary(GridTransform(galilei.element(b=b), lat)).toarray()
    h0 = free_hamiltonian(lat).toarray()
    w, v = np.linalg.eigh(h0)
    expm = (v * np.exp(-1j * w * b / lat.hbar)) @ v.conj().T
    worst = float(np.max(np.abs(u - expm)))
    psi0 = annihilation_field(lat, "phi", 0, GridPoint((1, 0, 0), 0.0))
    psib = annihilation_field(lat, "phi", 0, GridPoint((1, 0, 0), b))
    worst = max(worst, float(np.linalg.norm(u @ psi0.matrix.toarray() @ u.conj().T
                                            - psib.matrix.toarray())))
    return CheckOutcome(worst < 1e-11, worst)


@check("non-hermiticity-obstruction", "fields",
       "no field of nonzero mass can be hermitian: psi + psi^dag violates "
       "the single-field law by 2|sin(m gamma/h)| ||psi||; the violation "
       "vanishes when the mass phase is zeroed",
       ("non-hermiticity",))
def _obstruction(cfg, rng):
    lat = scalar_lattice(cfg)
    v0 = 2.0 * np.pi * lat.hbar / lat.box_length
    rep = hermiticity_obstruction(lat, "phi", (v0, 0.0, 0.0))
    detail = (f"residual={rep.max_residual:.3e} bound={rep.predicted_bound:.3e} "
              f"zero-phase={rep.zero_phase_residual:.1e}")
    return CheckOutcome(rep.passed, rep.zero_phase_residual, details=detail)


@check("equation-of-motion", "fields",
       "i hbar d/dt psi(t) = [psi(t), H]: centered differences converge at "
       "second order (Richardson ratio in [3.2, 4.8])",
       ("equation-of-motion",))
def _eom(cfg, rng):
    lat = few_mode_lattice(cfg, n_species=2, n_max=2)
    h0 = free_hamiltonian(lat)
    psi = annihilation_field(lat, "m0", 0, GridPoint((0, 0, 0), 0.0))
    rep_free = equation_of_motion_check(psi.matrix, h0, dt=0.1, hbar=lat.hbar)
    v = realize(two_body_operator(lat, "m0", lambda r: 1.0 / (1.0 + r), 0.5), lat)
    rep_int = equation_of_motion_check(psi.matrix, h0 + v, dt=0.1, hbar=lat.hbar)
    zero = equation_of_motion_check(psi.matrix, 0.0 * h0, dt=0.1, hbar=lat.hbar)
    ok = rep_free.passed and rep_int.passed and zero.passed
    detail = f"ratios free={rep_free.ratio:.2f} interacting={rep_int.ratio:.2f}"
    return CheckOutcome(ok, max(rep_free.residual_dt, rep_int.residual_dt),
                        details=detail)


@check("field-irreducibility-probe", "fields",
       "normal-ordered monomials a^dag^n a^m (n,m <= 2) span the full "
       "operator space of the one-mode, two-quanta truncation",
       ("irreducibility",))
def _irreducibility(cfg, rng):
    lat = shared_lattice(cfg.box_length, 1, [Species("solo", mass=1.0)], 2, cfg.hbar)
    a = lat.annihilation_matrix(0).toarray()
    adag = a.conj().T
    rows = []
    for n in range(3):
        for m in range(3):
            op = np.linalg.matrix_power(adag, n) @ np.linalg.matrix_power(a, m)
            rows.append(op.ravel())
    rank = np.linalg.matrix_rank(np.array(rows))
    return CheckOutcome(rank == 9, float(9 - rank), details=f"rank={rank}/9")


# -- invariance suite ---------------------------------------------------------

@check("pairwise-invariance", "invariance",
       "operators built from psi+ psi pairwise at the same point with "
       "invariant coefficients are invariant; unbalanced or split-point "
       "operators are not",
       ("pairwise-invariance", "irreducibility"))
def _pairwise(cfg, rng):
    lat = scalar_lattice(cfg)
    reps = check_pairwise_invariance(lat, rng, pass_tol=cfg.pass_tol,
                                     fail_floor_scale=cfg.fail_floor_scale)
    inconclusive = any(r.verdict == "inconclusive"
                       for r in (reps.density, reps.unbalanced, reps.split_pair))
    detail = (f"density {reps.density.verdict} ({reps.density.max_residual:.1e}), "
              f"unbalanced {reps.unbalanced.verdict} "
              f"({reps.unbalanced.max_residual:.1e}), split "
              f"{reps.split_pair.verdict} ({reps.split_pair.max_residual:.1e})")
    return CheckOutcome(reps.passed, reps.density.max_residual,
                        inconclusive=inconclusive, details=detail)


@check("two-body-invariance", "invariance",
       "the radial two-body interaction (1/2) int psi+ psi+ V(|x-y|) psi psi "
       "is invariant",
       ("pairwise-invariance",))
def _two_body(cfg, rng):
    lat = scalar_lattice(cfg)
    op = realize(two_body_operator(lat, "phi", lambda r: np.exp(-r * r)), lat)
    from .invariance import invariance_verdict
    rep = invariance_verdict(lat, op, sample_elements(lat, rng, n_words=10),
                             cfg.pass_tol, cfg.fail_floor_scale)
    return CheckOutcome(rep.verdict == INVARIANT, rep.max_residual,
                        inconclusive=rep.verdict == "inconclusive")


@check("mass-sum-rule", "invariance",
       "a production monomial is invariant iff the created mass equals the "
       "sum of annihilated masses (rule broken only by boosts)",
       ("mass-sum-rule", "mass-conservation"))
def _mass_sum(cfg, rng):
    lat = production_lattice(cfg, out_mass=2.0)
    bad_lat = production_lattice(cfg, out_mass=1.5)
    reps = check_mass_sum_rule(lat, rng, "vee", "enn", "theta",
                               violating_lattice=bad_lat,
                               pass_tol=cfg.pass_tol,
                               fail_floor_scale=cfg.fail_floor_scale)
    inconclusive = any(r.verdict == "inconclusive"
                       for r in (reps.conserving, reps.violating))
    ok = reps.passed and reps.boost_only_violating_max < cfg.pass_tol
    detail = (f"conserving {reps.conserving.max_residual:.1e}; violating "
              f"{reps.violating.max_residual:.1e} (floor "
              f"{reps.violating.fail_floor:.1e}); boost-free violating "
              f"{reps.boost_only_violating_max:.1e}")
    return CheckOutcome(ok, reps.conserving.max_residual,
                        inconclusive=inconclusive, details=detail)


@check("number-conservation-dichotomy", "invariance",
       "pairwise operators commute with N exactly; production operators do "
       "not ([O, N] norm > 0.5 on the small lattice)",
       ("number-conservation", "number-non-conservation", "number-operator"))
def _number_dichotomy(cfg, rng):
    lat = scalar_lattice(cfg)
    density = realize(density_operator(lat, "phi"), lat)
    _, n_norm = number_commutator(density, lat)
    lat3 = production_lattice(cfg)
    prod = realize(production_operator(lat3, "vee", "enn", "theta"), lat3)
    _, p_norm = number_commutator(prod, lat3)
    h0 = free_hamiltonian(lat)
    _, h_norm = number_commutator(h0, lat)
    ok = n_norm == 0.0 and h_norm == 0.0 and p_norm > 0.5
    return CheckOutcome(ok, n_norm, details=f"[production, N] norm = {p_norm:.3f}")


@check("coefficient-covariance", "invariance",
       "invariant coefficient kernels satisfy C = D(R) C(R^-1 x) D(R^-1); "
       "a spin-axis-selecting kernel fails under a transverse rotation",
       ("coefficient-covariance",))
def _covariance(cfg, rng):
    lat = scalar_lattice(cfg)
    n = lat.n_per_axis
    rot = galilei.Rotation.from_axis_angle((1, 0, 0), np.pi / 2)
    worst = 0.0
    half = (n - 1) // 2
    radial = np.zeros((1, 1, n, n, n), dtype=complex)
    for ix in range(n):
        for iy in range(n):
            for iz in range(n):
                radial[0, 0, ix, iy, iz] = np.exp(
                    -((ix - half) ** 2 + (iy - half) ** 2 + (iz - half) ** 2))
    worst = max(worst, check_coefficient_covariance(radial, rot, 0, lat).residual)
    ident = np.zeros((2, 2, n, n, n), dtype=complex)
    ident[0, 0] = 1.0
    ident[1, 1] = 1.0
    worst = max(worst, check_coefficient_covariance(ident, rot, 1, lat).residual)
    sigma_z = np.zeros((2, 2, n, n, n), dtype=complex)
    sigma_z[0, 0] = -1.0
    sigma_z[1, 1] = 1.0
    bad = check_coefficient_covariance(sigma_z, rot, 1, lat)
    ok = worst < 1e-12 and bad.residual > 0.1
    return CheckOutcome(ok, worst, details=f"sigma_z residual {bad.residual:.2f}")


@check("invariant-mass-blocks", "invariance",
       "every invariant operator commutes with the total mass operator "
       "(exact block structure)",
       ("mass-conservation", "superselection"))
def _invariant_blocks(cfg, rng):
    from .invariance import mass_offblock_magnitude
    lat3 = production_lattice(cfg)
    density = realize(density_operator(lat3, "theta"), lat3)
    prod = realize(production_operator(lat3, "vee", "enn", "theta"), lat3)
    worst = max(mass_offblock_magnitude(density, lat3),
                mass_offblock_magnitude(prod, lat3))
    return CheckOutcome(worst < 1e-12, worst)


# -- scattering suite ---------------------------------------------------------

def _default_model(cfg, coupling=None) -> ModelSpec:
    lat = production_lattice(cfg)
    interaction = production_operator(lat, "vee", "enn", "theta", coupling=1.0)
    return ModelSpec(lat, interaction,
                     coupling=cfg.coupling if coupling is None else coupling,
                     abel_epsilons=cfg.abel_epsilons,
                     quadrature=QuadratureSpec(cfg.time_step, cfg.horizon))


@check("free-hamiltonian", "scattering",
       "H0 = sum E(p) a^dag a is diagonal with E = p^2/2m + W, additive on "
       "multi-particle states, zero on the vacuum",
       ("free-hamiltonian", "on-shell-energy"))
def _free_h(cfg, rng):
    lat = production_lattice(cfg)
    h0 = free_hamiltonian(lat)
    worst = abs(h0[lat.basis_index[()], lat.basis_index[()]])
    for _ in range(50):
        i = int(rng.integers(0, lat.dimension))
        key = lat.basis[i]
        expect = sum(
            float(lat.momentum(lat.modes[m].k) @ lat.momentum(lat.modes[m].k))
            / (2 * lat.species_by_name[lat.modes[m].species].mass)
            + lat.species_by_name[lat.modes[m].species].internal_energy
            for m in key)
        worst = max(worst, abs(h0[i, i] - expect))
    return CheckOutcome(worst < 1e-12, float(worst))


@check("moller-evolution-identities", "scattering",
       "Omega(0) = 1, Omega unitary, U(t,t0) = Omega(t)^dag Omega(t0) "
       "composes, and V = 0 makes both trivial",
       ("moller-operator", "evolution-operator"))
def _moller_identities(cfg, rng):
    lat = few_mode_lattice(cfg, n_species=3, n_max=2)
    h0 = free_hamiltonian(lat).toarray()
    v = realize(production_operator(lat, "m2", "m0", "m1", coupling=0.3), lat).toarray()
    h = h0 + v
    eye = np.eye(lat.dimension)
    worst = float(np.max(np.abs(moller(0.0, h, h0, lat.hbar) - eye)))
    for t in (0.7, 2.3, -1.9):
        om = moller(t, h, h0, lat.hbar)
        worst = max(worst, float(np.linalg.norm(om.conj().T @ om - eye)))
        worst = max(worst, float(np.max(np.abs(moller(t, h0, h0, lat.hbar) - eye))))
    for _ in range(5):
        t, t1, t0 = rng.uniform(-3, 3, 3)
        u = evolution(t, t0, h, h0, lat.hbar)
        u2 = evolution(t, t1, h, h0, lat.hbar) @ evolution(t1, t0, h, h0, lat.hbar)
        worst = max(worst, float(np.linalg.norm(u - u2)))
        worst = max(worst, float(np.max(np.abs(
            evolution(t, t, h, h0, lat.hbar) - eye))))
    return CheckOutcome(worst < 1e-10, worst)


@check("smatrix-free-identity", "scattering",
       "V = 0 gives S = 1 exactly",
       ("scattering-operator",))
def _s_free(cfg, rng):
    model = _default_model(cfg, coupling=0.0)
    res = s_matrix(model)
    eye = sp.identity(model.lattice.dimension, dtype=complex, format="csr")
    worst = frobenius(res.s - eye)
    return CheckOutcome(worst < 1e-12, worst)


@check("smatrix-gali-lee", "scattering",
       "production model: S^dag S = 1 within 5e-3 on the converged "
       "subspace, [S, M] = 0 exactly, ||[S, N]|| > 0, defect and energy "
       "ladders non-increasing down the eps ladder (rounding-floor ties), "
       "flag set stable and explained by shifted levels",
       ("scattering-operator", "superselection", "number-non-conservation",
        "asymptotic-states"))
def _s_gali_lee(cfg, rng):
    model = _default_model(cfg)
    res = s_matrix(model)
    ok = (
        res.unitarity_defects[-1] < 5e-3
        and res.mass_offblock_max == 0.0
        and res.number_commutator_norm > 0.0
        and monotone_nonincreasing(res.unitarity_defects)
        and monotone_nonincreasing(res.energy_commutator_norms)
        and max(res.energy_commutator_norms) < 5e-3
        and res.flags_stable
        and res.unconverged_explained
    )
    detail = (f"defects={['%.1e' % d for d in res.unitarity_defects]} "
              f"full={['%.1e' % d for d in res.unitarity_defects_full]} "
              f"[S,N]={res.number_commutator_norm:.3f} "
              f"conv={int(res.converged_columns.sum())}/{model.lattice.dimension}")
    return CheckOutcome(ok, res.unitarity_defects[-1], details=detail)


@check("smatrix-pairing", "scattering",
       "S_ba = <b|S|a> equals the out/in pairing <b out | a in>",
       ("smatrix-pairing", "asymptotic-states"))
def _s_pairing(cfg, rng):
    model = _default_model(cfg)
    res = s_matrix(model)
    lat = model.lattice
    worst = 0.0
    for _ in range(20):
        a = int(rng.integers(0, lat.dimension))
        b = int(rng.integers(0, lat.dimension))
        in_a = FockVector.from_dense(lat, res.omega_in[:, a].toarray().ravel())
        out_b = FockVector.from_dense(lat, res.omega_out[:, b].toarray().ravel())
        worst = max(worst, abs(res.s[b, a] - inner(out_b, in_a)))
    return CheckOutcome(worst < 1e-12, worst)


@check("superselection-blocks", "scattering",
       "H, U(g) and S are exactly block diagonal in total mass",
       ("superselection", "mass-conservation"))
def _superselection(cfg, rng):
    model = _default_model(cfg)
    lat = model.lattice
    worst = superselection_report(model.h, lat).mass_offblock_max
    res = s_matrix(model)
    worst = max(worst, superselection_report(res.s, lat).mass_offblock_max)
    g = sample_elements(lat, rng, n_words=2)[-1]
    u = galilei_unitary(GridTransform(g, lat))
    worst = max(worst, superselection_report(u, lat).mass_offblock_max)
    return CheckOutcome(worst < 1e-12, worst)


@check("asymptotic-normalization", "scattering",
       "in- and out-states carry the free normalization: the Moller "
       "averages are isometries on the converged subspace",
       ("asymptotic-normalization", "asymptotic-states"))
def _normalization(cfg, rng):
    model = _default_model(cfg)
    rep = asymptotic_normalization_check(model, tol=5e-3)
    model0 = _default_model(cfg, coupling=0.0)
    rep0 = asymptotic_normalization_check(model0, tol=1e-12)
    ok = rep.passed and rep0.passed and rep.vacuum_defect < 1e-12
    detail = f"in={rep.max_in_defect:.2e} out={rep.max_out_defect:.2e}"
    return CheckOutcome(ok, max(rep.max_in_defect, rep.max_out_defect), details=detail)


@check("abel-kernel-oracle", "scattering",
       "the quadrature Abel average matches the closed-form kernel",
       ("scattering-operator",))
def _abel_oracle(cfg, rng):
    quad = QuadratureSpec(time_step=0.01, horizon=60.0)
    w = rng.uniform(-3, 3, size=8)
    e = rng.uniform(-3, 3, size=8)
    worst = 0.0
    for eps in (0.5, 0.25):
        for conj in (False, True):
            kq = abel_kernel_quadrature(w, e, eps, quad, conj)
            kx = abel_kernel_exact(w, e, eps, quad.horizon, conj)
            worst = max(worst, float(np.max(np.abs(kq - kx))))
    return CheckOutcome(worst < 1e-4, worst)


@check("coulomb-rejection", "scattering",
       "long-range Coulomb potentials are rejected: the asymptotic "
       "condition fails for them",
       ("asymptotic-states",))
def _coulomb(cfg, rng):
    lat = scalar_lattice(cfg)
    interaction = density_operator(lat, "phi")
    try:
        ModelSpec(lat, interaction, coupling=0.1, potential_kind="coulomb")
    except ConfigInvalid:
        return CheckOutcome(True, 0.0)
    return CheckOutcome(False, 1.0, details="coulomb model was not rejected")


def registry() -> list[CheckDef]:
    return list(REGISTRY)


def topics_covered() -> set:
    out = set()
    for item in REGISTRY:
        out.update(item.topics)
    return out
