import numpy as np
import pytest
import scipy.sparse as sp

from gqft import galilei as G
from gqft.errors import MissingAntiparticle, NotGridCompatible, OffGridImage
from gqft.fields import (
    GridPoint,
    GridTransform,
    annihilation_field,
    antiparticle_creation_field,
    creation_field,
    equal_time_commutator,
    equation_of_motion_check,
    galilei_unitary,
    general_field,
    heisenberg,
    hermiticity_obstruction,
    projective_composition_residual,
    verify_field_transformation,
)
from gqft.fock import (
    FockVector,
    ModeLattice,
    Species,
    create,
    frobenius,
    inner,
    vacuum,
)
from gqft.scattering import free_hamiltonian
from gqft.spin import wigner_d

L = 2 * np.pi


def scalar_lattice(n_max=2):
    return ModeLattice(L, 3, [Species("phi", mass=1.0)], n_max=n_max)


def pair_lattice(two_s=0, statistics="bose"):
    return ModeLattice(L, 3, [
        Species("q", mass=1.0, internal_energy=0.25, two_s=two_s,
                statistics=statistics, antiparticle_of="qbar", xi=1.0, eta=0.5),
        Species("qbar", mass=-1.0, internal_energy=-0.25, two_s=two_s,
                statistics=statistics),
    ], n_max=2)


def rot(axis, angle):
    return G.Rotation.from_axis_angle(axis, angle)


def test_field_annihilates_vacuum():
    lat = scalar_lattice()
    psi = annihilation_field(lat, "phi", 0, GridPoint((1, 0, 0), 0.7))
    assert frobenius(psi.matrix @ vacuum(lat).to_dense().reshape(-1, 1)) == 0.0


def test_position_state_normalization():
    lat = scalar_lattice()
    weight = (3 / L) ** 3
    plus = creation_field(lat, "phi", 0, GridPoint((1, -1, 0), 0.2))
    state = FockVector.from_dense(lat, plus.matrix @ vacuum(lat).to_dense())
    assert abs(inner(state, state) - weight) < 1e-14
    # psi applied to its own position state returns the vacuum times the
    # lattice delta weight
    psi = annihilation_field(lat, "phi", 0, GridPoint((1, -1, 0), 0.2))
    back = FockVector.from_dense(lat, psi.matrix @ state.to_dense())
    assert (back - vacuum(lat).scaled(weight)).norm() < 1e-14


def test_creation_is_adjoint():
    lat = scalar_lattice()
    point = GridPoint((0, 1, 0), 0.1)
    psi = annihilation_field(lat, "phi", 0, point)
    plus = creation_field(lat, "phi", 0, point)
    assert frobenius(plus.matrix - psi.matrix.conj().T) == 0.0


def test_single_mode_field_is_phase_times_mode_operator():
    lat = ModeLattice(L, 1, [Species("solo", mass=1.0, internal_energy=0.3)], n_max=2)
    psi = annihilation_field(lat, "solo", 0, GridPoint((0, 0, 0), 1.1))
    phase = np.exp(1j * 0.3 * 1.1) * L ** -1.5
    expect = phase * lat.annihilation_matrix(0)
    assert frobenius(psi.matrix - expect) < 1e-15
    assert abs(abs(phase) * L ** 1.5 - 1.0) < 1e-15


def test_equal_time_commutator_values():
    lat = scalar_lattice()
    weight = (3 / L) ** 3
    f0 = annihilation_field(lat, "phi", 0, GridPoint((0, 0, 0), 0.0))
    rep = equal_time_commutator(f0, f0)
    assert abs(rep.expected_coefficient - weight) < 1e-15
    assert rep.residual < 1e-12
    f1 = annihilation_field(lat, "phi", 0, GridPoint((1, 0, 0), 0.0))
    rep = equal_time_commutator(f0, f1)
    assert rep.expected_coefficient == 0.0
    assert rep.residual < 1e-12
    rep = equal_time_commutator(f0, f1, dagger=False)
    assert rep.residual < 1e-12
    with pytest.raises(ValueError):
        equal_time_commutator(
            f0, annihilation_field(lat, "phi", 0, GridPoint((0, 0, 0), 1.0)))


def test_general_field_commutator_table():
    weight = (3 / L) ** 3
    cases = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (0.3, 0.8j)]
    for stats, sign in (("bose", -1.0), ("fermi", 1.0)):
        lat = pair_lattice(statistics=stats)
        for xi, eta in cases:
            f = general_field(lat, "q", 0, GridPoint((0, 0, 0), 0.0), xi, eta)
            rep = equal_time_commutator(f, f)
            expect = (abs(xi) ** 2 + sign * abs(eta) ** 2) * weight
            assert abs(rep.expected_coefficient - expect) < 1e-14
            assert rep.residual < 1e-11


def test_commuting_field_at_equal_weights():
    lat = pair_lattice()
    f = general_field(lat, "q", 0, GridPoint((0, 0, 0), 0.0), 1.0, 1.0)
    rep = equal_time_commutator(f, f)
    assert rep.expected_coefficient == 0.0
    assert rep.residual < 1e-12


def test_general_field_undaggered_bracket_vanishes():
    # [psi(x,t), psi(y,t)]_-/+ = 0 with xi eta != 0 (distinct partner species)
    for stats in ("bose", "fermi"):
        lat = pair_lattice(statistics=stats)
        f = general_field(lat, "q", 0, GridPoint((0, 0, 0), 0.0), 1.0, 0.7)
        g = general_field(lat, "q", 0, GridPoint((1, 0, 0), 0.0), 1.0, 0.7)
        assert equal_time_commutator(f, g, dagger=False).residual < 1e-12
        assert equal_time_commutator(f, f, dagger=False).residual < 1e-12


def test_antiparticle_field_vacuum_norm():
    lat = pair_lattice()
    f = antiparticle_creation_field(lat, "q", 0, GridPoint((1, 0, 0), 0.0))
    state = FockVector.from_dense(lat, f.matrix @ vacuum(lat).to_dense())
    assert abs(state.norm() - (3 / L) ** 1.5) < 1e-13


def test_missing_antiparticle():
    lat = scalar_lattice()
    with pytest.raises(MissingAntiparticle):
        antiparticle_creation_field(lat, "phi", 0, GridPoint((0, 0, 0), 0.0))


def test_partner_mass_asserted():
    lat = ModeLattice(L, 3, [
        Species("q", mass=1.0, antiparticle_of="qbar", eta=0.5),
        Species("qbar", mass=-2.0),
    ], n_max=2)
    with pytest.raises(ValueError):
        antiparticle_creation_field(lat, "q", 0, GridPoint((0, 0, 0), 0.0))


def test_eta_zero_reduces_to_annihilation():
    lat = pair_lattice()
    f = general_field(lat, "q", 0, GridPoint((1, 1, 0), 0.0), xi=2.0, eta=0.0)
    psi = annihilation_field(lat, "q", 0, GridPoint((1, 1, 0), 0.0))
    assert frobenius(f.matrix - 2.0 * psi.matrix) == 0.0


def sample_transforms(lat, rng, n_words=6):
    rots = G.octahedral_rotations()
    gens = [G.element(r=r) for r in rots[::5]]
    step = lat.box_length / lat.n_per_axis
    v0 = 2 * np.pi * lat.hbar / lat.box_length
    for axis in range(3):
        a = [0.0] * 3
        a[axis] = step
        gens.append(G.element(a=tuple(a)))
        v = [0.0] * 3
        v[axis] = v0
        gens.append(G.element(v=tuple(v)))
    words = []
    for _ in range(n_words):
        w = G.identity()
        for _ in range(3):
            w = G.compose(gens[rng.integers(0, len(gens))], w)
        words.append(w)
    return gens + words


def test_transformation_laws_scalar(rng):
    lat = scalar_lattice()
    points = [GridPoint((0, 0, 0), 0.0), GridPoint((1, 0, -1), 0.0)]
    for g in sample_transforms(lat, rng):
        transform = GridTransform(g, lat)
        u = galilei_unitary(transform)
        for point in points:
            for build in (annihilation_field, creation_field):
                f = build(lat, "phi", 0, point)
                rep = verify_field_transformation(transform, f, tol=1e-10, unitary=u)
                assert rep.passed, (g, build.__name__, rep.residual)


def test_transformation_laws_spin_half(rng):
    lat = ModeLattice(L, 3, [Species("chi", mass=1.0, two_s=1)], n_max=2)
    g90 = G.element(r=rot((0, 0, 1), np.pi / 2))
    boost = G.element(v=(1.0, 0.0, 0.0))
    for g in (g90, boost, G.compose(g90, boost)):
        transform = GridTransform(g, lat)
        for lam in (-1, 1):
            f = annihilation_field(lat, "chi", lam, GridPoint((1, 0, 0), 0.0))
            assert verify_field_transformation(transform, f, tol=1e-10).passed
            fp = creation_field(lat, "chi", lam, GridPoint((1, 0, 0), 0.0))
            assert verify_field_transformation(transform, fp, tol=1e-10).passed


def test_transformation_law_antiparticle_and_general(rng):
    for two_s in (0, 1):
        lat = pair_lattice(two_s=two_s)
        lam = -1 if two_s else 0
        g = G.compose(G.element(r=rot((1, 0, 0), np.pi / 2)),
                      G.element(v=(0.0, 1.0, 0.0), a=(L / 3, 0, 0)))
        transform = GridTransform(g, lat)
        f = antiparticle_creation_field(lat, "q", lam, GridPoint((0, 1, 0), 0.0))
        assert verify_field_transformation(transform, f, tol=1e-10).passed
        h = general_field(lat, "q", lam, GridPoint((0, 1, 0), 0.0))
        assert verify_field_transformation(transform, h, tol=1e-10).passed


def test_time_shift_law_any_time():
    lat = scalar_lattice()
    transform = GridTransform(G.element(b=0.83), lat)
    f = annihilation_field(lat, "phi", 0, GridPoint((1, 0, 0), 0.4))
    assert verify_field_transformation(transform, f, tol=1e-10).passed


def test_off_grid_image_rejected():
    lat = scalar_lattice()
    transform = GridTransform(G.element(v=(1.0, 0, 0)), lat)
    f = annihilation_field(lat, "phi", 0, GridPoint((1, 0, 0), 0.5))
    # x' = x + v t leaves the grid for t = 0.5
    with pytest.raises(OffGridImage):
        verify_field_transformation(transform, f)


def test_not_grid_compatible():
    lat = scalar_lattice()
    with pytest.raises(NotGridCompatible):
        GridTransform(G.element(r=rot((0, 0, 1), 0.3)), lat)
    with pytest.raises(NotGridCompatible):
        GridTransform(G.element(v=(0.5, 0, 0)), lat)  # m v off the lattice


def test_unitary_properties(rng):
    lat = pair_lattice()
    eye = sp.identity(lat.dimension, dtype=complex, format="csr")
    vac_idx = lat.basis_index[()]
    for g in sample_transforms(lat, rng, n_words=3)[:10]:
        u = galilei_unitary(GridTransform(g, lat))
        assert frobenius(u.conj().T @ u - eye) < 1e-11
        col = u[:, vac_idx].toarray().ravel()
        assert abs(col[vac_idx] - 1.0) < 1e-14
        assert np.sum(np.abs(col)) - 1.0 < 1e-14


def test_projective_phase_one_particle_oracle(rng):
    """exp(i zeta / hbar) equals the scalar mismatch of composed
    one-particle unitaries, for any one-particle state."""
    lat = scalar_lattice()
    samples = sample_transforms(lat, rng, n_words=4)
    for _ in range(8):
        g1 = samples[rng.integers(0, len(samples))]
        g2 = samples[rng.integers(0, len(samples))]
        if rng.uniform() < 0.5:
            g2 = G.compose(G.element(b=float(rng.uniform(-1, 1))), g2)
        u1 = galilei_unitary(GridTransform(g1, lat))
        u2 = galilei_unitary(GridTransform(g2, lat))
        u12 = galilei_unitary(GridTransform(G.compose(g2, g1), lat))
        mode = lat.modes[int(rng.integers(0, len(lat.modes)))]
        phi = create(mode, vacuum(lat)).to_dense()
        num = np.vdot(phi, (u2 @ (u1 @ phi)))
        den = np.vdot(phi, u12 @ phi)
        if abs(den) < 1e-12:
            continue
        zeta = G.projective_phase(g2, g1, 1.0)
        assert abs(num / den - np.exp(1j * zeta / lat.hbar)) < 1e-10


def test_projective_composition_residual(rng):
    lat = scalar_lattice()
    samples = sample_transforms(lat, rng, n_words=4)
    for _ in range(6):
        g1 = samples[rng.integers(0, len(samples))]
        g2 = samples[rng.integers(0, len(samples))]
        assert projective_composition_residual(lat, g2, g1) < 1e-10


def test_d_inverse_conjugate_substitution(rng):
    # the law closes identically with D_{ll'}(R^-1) = (D_{l'l}(R))*
    two_s = 1
    for _ in range(20):
        r = G.random_element(rng).r
        d = wigner_d(two_s, r)
        d_inv = wigner_d(two_s, r.inverse())
        assert np.max(np.abs(d_inv - d.conj().T)) < 1e-12


def test_hermiticity_obstruction():
    lat = scalar_lattice()
    rep = hermiticity_obstruction(lat, "phi", (1.0, 0.0, 0.0))
    assert rep.passed
    assert rep.max_residual >= (1 - 1e-9) * rep.predicted_bound
    assert rep.predicted_bound > 0.1
    assert rep.zero_phase_residual < 1e-12


def test_equation_of_motion_richardson():
    lat = ModeLattice(L, 1, [Species(f"m{i}", mass=1.0 + i, internal_energy=0.4 + i)
                             for i in range(2)], n_max=2)
    h0 = free_hamiltonian(lat)
    psi = annihilation_field(lat, "m0", 0, GridPoint((0, 0, 0), 0.0))
    rep = equation_of_motion_check(psi.matrix, h0, dt=0.1)
    assert 3.2 <= rep.ratio <= 4.8
    assert rep.residual_dt < rep.fitted_constant * 0.1 ** 2 * 1.0001
    zero = equation_of_motion_check(psi.matrix, 0.0 * h0, dt=0.1)
    assert zero.passed and zero.residual_dt == 0.0


def test_free_field_heisenberg_consistency():
    # psi(x, t) = exp(-i H0 t) psi(x, 0) exp(+i H0 t) for the free evolution
    lat = scalar_lattice()
    h0 = free_hamiltonian(lat).toarray()
    t = 0.63
    psi_0 = annihilation_field(lat, "phi", 0, GridPoint((1, 0, 0), 0.0))
    psi_t = annihilation_field(lat, "phi", 0, GridPoint((1, 0, 0), t))
    evolved = heisenberg(psi_0.matrix, h0, -t)
    assert np.max(np.abs(evolved - psi_t.matrix.toarray())) < 1e-12


def test_time_shift_unitary_is_free_evolution():
    lat = scalar_lattice()
    b = 0.29
    u = galilei_unitary(GridTransform(G.element(b=b), lat)).toarray()
    h0 = free_hamiltonian(lat).toarray()
    w, v = np.linalg.eigh(h0)
    expm = (v * np.exp(-1j * w * b)) @ v.conj().T
    assert np.max(np.abs(u - expm)) < 1e-12


def test_mass_superselection_of_unitaries(rng):
    from gqft.scattering import offblock_max, sector_partition

    lat = pair_lattice()
    masses = sector_partition(lat, by_momentum=False)
    for g in sample_transforms(lat, rng, n_words=2)[:6]:
        u = galilei_unitary(GridTransform(g, lat))
        assert offblock_max(u, masses) == 0.0
