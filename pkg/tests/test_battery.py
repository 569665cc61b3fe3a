import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmcm_battery.battery import BatteryHamiltonian, energy, ergotropy, ergotropy_values, extracted_work, passive_state
from cmcm_battery.errors import NonUnitaryInput
from cmcm_battery.quantum import SIGMA_X, DensityMatrix, excited_state, ground_state

from conftest import random_density, random_unitary
from oracles import qubit_ergotropy

seeds = st.integers(0, 2**32 - 1)


def _rho(seed, rank=None):
    return DensityMatrix(random_density(np.random.default_rng(seed), rank=rank))


def brute_force_ergotropy(rho, n_theta=181, n_phi=73):
    """Max extracted work over a grid of single-qubit rotations Rz(a) Ry(t) Rz(b)."""
    best = -np.inf
    thetas = np.linspace(0, np.pi, n_theta)
    phis = np.linspace(0, 2 * np.pi, n_phi)
    for t in thetas:
        ry = np.array([[np.cos(t / 2), -np.sin(t / 2)], [np.sin(t / 2), np.cos(t / 2)]])
        for b in phis:
            u = ry @ np.diag([np.exp(-0.5j * b), np.exp(0.5j * b)])
            after = u @ rho @ u.conj().T
            best = max(best, rho[1, 1].real - after[1, 1].real)
    return best


def test_energy_of_basis_and_mixed_states():
    h = BatteryHamiltonian(2.5)
    assert energy(ground_state(), h) == 0
    assert energy(excited_state(), h) == 2.5
    assert energy(DensityMatrix(np.eye(2) / 2), h) == pytest.approx(1.25)


def test_omega0_must_be_positive():
    with pytest.raises(ValueError):
        BatteryHamiltonian(0.0)


def test_excited_state_ergotropy_is_full_swap():
    res = ergotropy(excited_state())
    assert res.ergotropy == pytest.approx(1.0, abs=1e-15)
    u = res.optimal_unitary
    phase = u[0, 1] / SIGMA_X[0, 1]
    np.testing.assert_allclose(u, phase * SIGMA_X, atol=1e-15)


def test_pure_superposition_ergotropy_equals_energy():
    res = ergotropy(DensityMatrix.from_ket([1, 1]))
    assert res.energy == pytest.approx(0.5, abs=1e-15)
    assert res.ergotropy == pytest.approx(0.5, abs=1e-12)


def test_mixed_diagonal_ergotropy_against_grid_search():
    rho = np.diag([0.3, 0.7]).astype(complex)
    res = ergotropy(DensityMatrix(rho))
    assert res.ergotropy == pytest.approx(0.4, abs=1e-12)
    assert brute_force_ergotropy(rho) == pytest.approx(res.ergotropy, abs=1e-3)


def test_generic_state_ergotropy_against_grid_search(rng):
    rho = random_density(rng)
    assert brute_force_ergotropy(rho) == pytest.approx(ergotropy(DensityMatrix(rho)).ergotropy, abs=1e-3)


def test_maximally_mixed_gets_identity():
    res = ergotropy(DensityMatrix(np.eye(2) / 2))
    assert res.ergotropy == pytest.approx(0, abs=1e-15)
    np.testing.assert_array_equal(res.optimal_unitary, np.eye(2))


def test_extracted_work_examples():
    assert extracted_work(excited_state(), np.eye(2)) == 0
    assert extracted_work(excited_state(), SIGMA_X) == 1
    assert extracted_work(ground_state(), SIGMA_X) == -1


def test_extracted_work_rejects_non_unitary():
    with pytest.raises(NonUnitaryInput):
        extracted_work(ground_state(), np.diag([1, 0.5]))


@given(seeds, st.floats(0.1, 5))
def test_ergotropy_result_invariants(seed, omega0):
    h = BatteryHamiltonian(omega0)
    rho = _rho(seed)
    res = ergotropy(rho, h)
    assert res.ergotropy == pytest.approx(res.energy - res.passive_energy, abs=1e-12)
    assert -1e-12 <= res.ergotropy <= res.energy + 1e-12
    assert abs(extracted_work(rho, res.optimal_unitary, h) - res.ergotropy) <= 1e-12
    assert ergotropy(passive_state(rho), h).ergotropy <= 1e-12
    assert res.ergotropy == pytest.approx(qubit_ergotropy(rho.mat, omega0), abs=1e-12)


@given(seeds)
def test_pure_state_ergotropy_is_energy(seed):
    rho = _rho(seed, rank=1)
    res = ergotropy(rho)
    assert abs(res.ergotropy - res.energy) <= 1e-10


@given(seeds)
def test_no_unitary_beats_ergotropy(seed):
    rng = np.random.default_rng(seed)
    rho = DensityMatrix(random_density(rng))
    bound = ergotropy(rho).ergotropy
    for _ in range(5):
        assert extracted_work(rho, random_unitary(rng)) <= bound + 1e-10


@given(seeds, st.floats(0, 1))
def test_ergotropy_is_convex(seed, lam):
    rng = np.random.default_rng(seed)
    r1, r2 = random_density(rng), random_density(rng)
    mix = DensityMatrix(lam * r1 + (1 - lam) * r2)
    lhs = ergotropy(mix).ergotropy
    rhs = lam * ergotropy(r1).ergotropy + (1 - lam) * ergotropy(r2).ergotropy
    assert lhs <= rhs + 1e-10


@given(st.lists(seeds, min_size=1, max_size=8), st.floats(0.1, 5))
def test_batched_ergotropy_matches_eigensolver(seed_list, omega0):
    h = BatteryHamiltonian(omega0)
    states = [_rho(s) for s in seed_list] + [DensityMatrix(np.eye(2) / 2), excited_state()]
    batch = ergotropy_values(np.stack([r.mat for r in states]), h)
    for rho, value in zip(states, batch):
        assert abs(value - ergotropy(rho, h).ergotropy) <= 1e-12
