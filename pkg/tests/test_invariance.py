import numpy as np
import pytest

from gqft import galilei as G
from gqft.fields import GridTransform
from gqft.fock import ModeLattice, Species, frobenius
from gqft.invariance import (
    INCONCLUSIVE,
    INVARIANT,
    NON_INVARIANT,
    Leg,
    Monomial,
    OperatorPolynomial,
    check_coefficient_covariance,
    check_mass_sum_rule,
    check_pairwise_invariance,
    conjugate,
    density_operator,
    generating_elements,
    invariance_verdict,
    lone_creation_operator,
    mass_offblock_magnitude,
    minimal_boost_unit,
    number_commutator,
    production_operator,
    realize,
    sample_elements,
    split_pair_operator,
    two_body_operator,
)
from gqft.scattering import free_hamiltonian

L = 2 * np.pi


def scalar_lattice():
    return ModeLattice(L, 3, [Species("phi", mass=1.0)], n_max=2)


def trio_lattice(out_mass=2.0):
    return ModeLattice(L, 3, [
        Species("theta", mass=1.0),
        Species("enn", mass=1.0),
        Species("vee", mass=out_mass),
    ], n_max=2)


def test_realize_single_mode_density_is_number_operator():
    # on a one-mode lattice the grid-summed density reduces exactly to a+a
    lat = ModeLattice(L, 1, [Species("solo", mass=1.0)], n_max=2)
    op = realize(density_operator(lat, "solo"), lat)
    n_op = lat.creation_matrix(0) @ lat.annihilation_matrix(0)
    assert frobenius(op - n_op) < 1e-14


def test_realize_empty_polynomial():
    lat = scalar_lattice()
    op = realize(OperatorPolynomial([]), lat)
    assert op.nnz == 0


def test_hermitian_flag_enforced():
    lat = scalar_lattice()
    leg = Leg("phi", 0, (0, 0, 0))
    bad = OperatorPolynomial([Monomial((leg,), (), 1.0)], hermitian=True)
    with pytest.raises(ValueError):
        realize(bad, lat)
    ok = OperatorPolynomial([Monomial((leg,), (), 1.0)]).plus_hermitian_conjugate()
    mat = realize(ok, lat)
    assert frobenius(mat - mat.conj().T) < 1e-13


def test_conjugation_preserves_spectrum_and_number(rng):
    lat = scalar_lattice()
    op = realize(density_operator(lat, "phi"), lat).toarray()
    g = G.element(v=(1.0, 0, 0), a=(L / 3, 0, 0))
    conj = conjugate(GridTransform(g, lat), op)
    ev1 = np.sort(np.linalg.eigvalsh(op))
    ev2 = np.sort(np.linalg.eigvalsh(conj.toarray()))
    assert np.max(np.abs(ev1 - ev2)) < 1e-10
    n_op = lat.number_operator()
    assert frobenius(conjugate(GridTransform(g, lat), n_op) - n_op) < 1e-12


def test_pairwise_theorem(rng):
    reports = check_pairwise_invariance(scalar_lattice(), rng, n_words=8)
    assert reports.density.verdict == INVARIANT
    assert reports.density.number_commutator_norm == 0.0
    assert reports.density.mass_commutator_offblock == 0.0
    assert reports.unbalanced.verdict == NON_INVARIANT
    assert reports.unbalanced.max_residual > reports.unbalanced.fail_floor
    assert reports.split_pair.verdict == NON_INVARIANT
    assert reports.passed


def test_lone_creation_breaks_only_under_boosts(rng):
    lat = scalar_lattice()
    op = realize(lone_creation_operator(lat, "phi"), lat)
    boost_free = [g for g in generating_elements(lat) if np.allclose(g.v, 0.0)]
    rep = invariance_verdict(lat, op, boost_free)
    assert rep.verdict == INVARIANT
    boosts = [g for g in generating_elements(lat) if not np.allclose(g.v, 0.0)]
    rep = invariance_verdict(lat, op, boosts)
    assert rep.verdict == NON_INVARIANT


def test_split_pair_phase_failure(rng):
    lat = scalar_lattice()
    op = realize(split_pair_operator(lat, "phi", (1, 0, 0)), lat)
    boost = [G.element(v=(1.0, 0.0, 0.0))]
    rep = invariance_verdict(lat, op, boost)
    # residual |e^{i m v . delta} - 1| ||O||_F with m v . delta = 2 pi / 3
    expect = abs(np.exp(2j * np.pi / 3) - 1.0) * rep.operator_norm
    assert rep.verdict == NON_INVARIANT
    assert abs(rep.max_residual - expect) < 1e-9 * max(1.0, expect)


def test_two_body_invariance(rng):
    lat = scalar_lattice()
    op = realize(two_body_operator(lat, "phi", lambda r: np.exp(-r * r)), lat)
    rep = invariance_verdict(lat, op, sample_elements(lat, rng, n_words=6))
    assert rep.verdict == INVARIANT


def test_mass_sum_rule(rng):
    reports = check_mass_sum_rule(
        trio_lattice(2.0), rng, "vee", "enn", "theta",
        violating_lattice=trio_lattice(1.5), n_words=6)
    assert reports.conserving.verdict == INVARIANT
    assert reports.conserving.mass_commutator_offblock == 0.0
    assert reports.violating.verdict == NON_INVARIANT
    assert reports.boost_only_violating_max < 1e-9
    assert reports.passed


def test_number_commutator_dichotomy():
    lat = scalar_lattice()
    density = realize(density_operator(lat, "phi"), lat)
    _, norm = number_commutator(density, lat)
    assert norm == 0.0
    lat3 = trio_lattice()
    prod = realize(production_operator(lat3, "vee", "enn", "theta"), lat3)
    _, norm = number_commutator(prod, lat3)
    assert norm > 0.5
    h0 = free_hamiltonian(lat)
    _, norm = number_commutator(h0, lat)
    assert norm == 0.0


def test_mass_offblock_of_mass_violating_operator():
    lat_bad = trio_lattice(1.5)
    op = realize(production_operator(lat_bad, "vee", "enn", "theta"), lat_bad)
    assert mass_offblock_magnitude(op, lat_bad) > 0.01


def test_verdict_gap_is_inconclusive(rng):
    lat = scalar_lattice()
    invariant = realize(density_operator(lat, "phi"), lat)
    breaker = realize(lone_creation_operator(lat, "phi"), lat)
    # scale the breaking part to land between pass_tol and the fail floor
    op = invariant + 1e-6 * breaker
    rep = invariance_verdict(lat, op, sample_elements(lat, rng, n_words=4),
                             pass_tol=1e-9, fail_floor_scale=1e-2)
    assert rep.verdict == INCONCLUSIVE


def test_verdict_tolerance_ordering():
    lat = scalar_lattice()
    op = realize(density_operator(lat, "phi"), lat)
    with pytest.raises(ValueError):
        invariance_verdict(lat, op, [G.identity()], pass_tol=1.0,
                           fail_floor_scale=1e-8)


def test_minimal_boost_unit():
    assert abs(minimal_boost_unit(trio_lattice(2.0)) - 1.0) < 1e-12
    assert abs(minimal_boost_unit(trio_lattice(1.5)) - 2.0) < 1e-12


def test_coefficient_covariance_cases():
    lat = scalar_lattice()
    n = lat.n_per_axis
    rot = G.Rotation.from_axis_angle((1, 0, 0), np.pi / 2)
    radial = np.ones((1, 1, n, n, n), dtype=complex)
    assert check_coefficient_covariance(radial, rot, 0, lat).passed
    ident = np.zeros((2, 2, n, n, n), dtype=complex)
    ident[0, 0] = ident[1, 1] = 1.0
    assert check_coefficient_covariance(ident, rot, 1, lat).passed
    sigma_z = np.zeros((2, 2, n, n, n), dtype=complex)
    sigma_z[0, 0], sigma_z[1, 1] = -1.0, 1.0
    rep = check_coefficient_covariance(sigma_z, rot, 1, lat)
    assert not rep.passed and rep.residual > 0.1
