"""Grids, discretized operators, Fourier basis, and two-particle helpers."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcpusim import (
    DegenerateGrid,
    DimensionMismatch,
    GridMismatch,
    GridSpec,
    IndexOutOfRange,
    InvalidSpec,
    NonFiniteValue,
    NonPositiveMass,
    TwoParticleWavefunction,
    Wavefunction,
    ZeroResultWarning,
    com_reduction,
    densify,
    dft_operator,
    hermiticity_defect,
    kinetic_eigenvalue,
    kinetic_exchange_payload,
    kinetic_operator,
    lift_one,
    momentum_eigenvalue,
    momentum_operator,
    plane_wave_mode,
    potential_operator,
    sample,
    signed_mode,
    signed_momentum,
    symmetrize,
    tensor,
    two_body_potential,
    wavefunction_header,
    wavefunction_records,
)
from qcpusim.grid import Transposition


# ---------------------------------------------------------------------------
# GridSpec and Wavefunction
# ---------------------------------------------------------------------------

def test_grid_size_and_spacing():
    g = GridSpec(length=10.0, qubits=4)
    assert g.size == 16
    assert g.spacing == 0.625


def test_default_grid_starts_at_origin():
    g = GridSpec(length=8.0, qubits=2)
    assert np.array_equal(g.points, np.array([0.0, 2.0, 4.0, 6.0]))


def test_centered_grid_straddles_origin():
    g = GridSpec(length=8.0, qubits=2, centered=True)
    assert np.array_equal(g.points, np.array([-4.0, -2.0, 0.0, 2.0]))


@pytest.mark.parametrize("bad", [0, -1, 2.0, True])
def test_grid_rejects_bad_qubit_count(bad):
    with pytest.raises(InvalidSpec):
        GridSpec(length=1.0, qubits=bad)


@pytest.mark.parametrize("bad", [0.0, -3.0, float("inf"), float("nan")])
def test_grid_rejects_bad_length(bad):
    with pytest.raises(InvalidSpec):
        GridSpec(length=bad, qubits=2)


def test_wavefunction_periodic_component():
    g = GridSpec(length=4.0, qubits=2)
    wf = Wavefunction(grid=g, amplitudes=np.array([1, 2, 3, 4], dtype=complex))
    assert wf.component(5) == 2.0 + 0.0j
    assert wf.component(-1) == 4.0 + 0.0j


def test_wavefunction_length_check():
    g = GridSpec(length=4.0, qubits=2)
    with pytest.raises(DimensionMismatch):
        Wavefunction(grid=g, amplitudes=np.ones(3))


def test_wavefunction_norm():
    g = GridSpec(length=4.0, qubits=2)
    wf = Wavefunction(grid=g, amplitudes=np.array([3.0, 4.0, 0.0, 0.0]))
    assert wf.norm() == 5.0


def test_sample_position_only_callable():
    g = GridSpec(length=4.0, qubits=2)
    wf = sample(lambda x: 2.0 * x, g)
    assert np.array_equal(wf.amplitudes, 2.0 * g.points)


def test_sample_forwards_time_when_accepted():
    g = GridSpec(length=4.0, qubits=2)
    wf = sample(lambda x, t: x + t, g, t=10.0)
    assert np.array_equal(wf.amplitudes, g.points + 10.0)
    assert wf.time == 10.0


def test_sample_rejects_non_finite_values():
    g = GridSpec(length=4.0, qubits=2)
    with pytest.raises(NonFiniteValue):
        sample(lambda x: float("inf") if x == 1.0 else 1.0, g)


# ---------------------------------------------------------------------------
# Momentum and kinetic operators
# ---------------------------------------------------------------------------

def test_momentum_operator_is_hermitian():
    g = GridSpec(length=10.0, qubits=4)
    assert hermiticity_defect(densify(momentum_operator(g))) == 0.0


def test_momentum_eigenvalue_on_plane_waves():
    g = GridSpec(length=10.0, qubits=4)
    p = densify(momentum_operator(g))
    for n in range(g.size):
        mode = plane_wave_mode(g, n)
        expected = momentum_eigenvalue(g, n) * mode
        assert np.max(np.abs(p @ mode - expected)) < 1e-12


def test_momentum_needs_three_points():
    with pytest.raises(DegenerateGrid):
        momentum_operator(GridSpec(length=1.0, qubits=1))


def test_kinetic_operator_is_hermitian_and_real():
    g = GridSpec(length=10.0, qubits=4)
    t = densify(kinetic_operator(g, 1.0))
    assert hermiticity_defect(t) == 0.0
    assert np.max(np.abs(t.imag)) == 0.0


def test_kinetic_is_momentum_squared_over_2mu():
    g = GridSpec(length=10.0, qubits=5)
    mu = 1.7
    p = densify(momentum_operator(g))
    t = densify(kinetic_operator(g, mu))
    assert np.max(np.abs(t - (p @ p) / (2.0 * mu))) < 1e-12


def test_kinetic_eigenvalue_on_plane_waves():
    g = GridSpec(length=10.0, qubits=4)
    t = densify(kinetic_operator(g, 2.0))
    for n in range(g.size):
        mode = plane_wave_mode(g, n)
        expected = kinetic_eigenvalue(g, 2.0, n) * mode
        assert np.max(np.abs(t @ mode - expected)) < 1e-12


def test_kinetic_needs_four_points():
    with pytest.raises(DegenerateGrid):
        kinetic_operator(GridSpec(length=1.0, qubits=1), 1.0)


@pytest.mark.parametrize("mu", [0.0, -1.0, float("nan")])
def test_kinetic_rejects_bad_mass(mu):
    with pytest.raises(NonPositiveMass):
        kinetic_operator(GridSpec(length=1.0, qubits=3), mu)


def test_kinetic_exchange_payload_matches_exactly():
    """The dyad-by-dyad exchange assembly reproduces the stencil matrix
    entry for entry, with no floating-point discrepancy at all."""
    for qubits, mu in ((2, 1.0), (3, 0.5), (5, 2.25)):
        g = GridSpec(length=7.0, qubits=qubits)
        assert np.array_equal(
            kinetic_exchange_payload(g, mu), densify(kinetic_operator(g, mu))
        )


def test_kinetic_eigenvalue_degeneracy_is_exact():
    g = GridSpec(length=10.0, qubits=5)
    for n in range(1, g.size // 2):
        assert kinetic_eigenvalue(g, 1.0, n) == kinetic_eigenvalue(g, 1.0, g.size - n)


def test_momentum_eigenvalue_formula():
    g = GridSpec(length=10.0, qubits=4)
    n = 3
    expected = (16 / 10.0) * math.sin(2.0 * math.pi * 3 / 16)
    assert momentum_eigenvalue(g, n) == pytest.approx(expected, abs=1e-15)


def test_potential_operator_values():
    g = GridSpec(length=4.0, qubits=2, centered=True)
    diag = potential_operator(g, lambda x: x * x)
    assert np.array_equal(diag.values.real, g.points ** 2)


def test_potential_operator_non_finite():
    g = GridSpec(length=4.0, qubits=2, centered=True)
    with pytest.raises(NonFiniteValue):
        potential_operator(g, lambda x: float("nan") if x == 0.0 else 1.0)


# ---------------------------------------------------------------------------
# Fourier basis
# ---------------------------------------------------------------------------

def test_dft_is_unitary():
    g = GridSpec(length=5.0, qubits=4)
    f = dft_operator(g)
    assert np.max(np.abs(f @ f.conj().T - np.eye(g.size))) < 1e-13


def test_dft_columns_are_plane_wave_modes():
    g = GridSpec(length=5.0, qubits=3)
    f = dft_operator(g)
    for n in range(g.size):
        assert np.array_equal(f[:, n], plane_wave_mode(g, n))


def test_plane_wave_modes_are_orthonormal():
    g = GridSpec(length=5.0, qubits=3)
    for a in range(g.size):
        for b in range(g.size):
            overlap = np.vdot(plane_wave_mode(g, a), plane_wave_mode(g, b))
            assert abs(overlap - (1.0 if a == b else 0.0)) < 1e-13


def test_signed_mode_wraps_upper_half():
    assert signed_mode(0, 8) == 0
    assert signed_mode(3, 8) == 3
    assert signed_mode(4, 8) == -4
    assert signed_mode(7, 8) == -1


def test_signed_momentum_values():
    g = GridSpec(length=8.0, qubits=3)
    assert signed_momentum(g, 1) == pytest.approx(2.0 * math.pi / 8.0)
    assert signed_momentum(g, 7) == pytest.approx(-2.0 * math.pi / 8.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=-20, max_value=20))
def test_momentum_eigenvalue_periodic_in_mode_index(n):
    g = GridSpec(length=6.0, qubits=3)
    assert momentum_eigenvalue(g, n) == pytest.approx(
        momentum_eigenvalue(g, n + g.size), abs=1e-12
    )


# ---------------------------------------------------------------------------
# Two-particle helpers
# ---------------------------------------------------------------------------

def test_two_body_potential_index_layout():
    g1 = GridSpec(length=4.0, qubits=1)
    g2 = GridSpec(length=6.0, qubits=1)
    diag = two_body_potential(g1, g2, lambda a, b: 10.0 * a + b)
    # particle 1 slow: entry m1 * N2 + m2
    expected = [10 * a + b for a in g1.points for b in g2.points]
    assert np.array_equal(diag.values.real, np.array(expected))


def test_lift_one_slot_placement():
    g = GridSpec(length=4.0, qubits=1)
    op = potential_operator(g, lambda x: x)
    dims = (2, 2)
    lifted1 = lift_one(op, 1, dims)
    lifted2 = lift_one(op, 2, dims)
    dense_op = densify(op)
    assert np.array_equal(lifted1, tensor(dense_op, np.eye(2)))
    assert np.array_equal(lifted2, tensor(np.eye(2), dense_op))


def test_lift_one_bad_slot():
    g = GridSpec(length=4.0, qubits=1)
    op = potential_operator(g, lambda x: x)
    with pytest.raises(IndexOutOfRange):
        lift_one(op, 3, (2, 2))


def test_lift_one_dimension_check():
    g = GridSpec(length=4.0, qubits=2)
    op = potential_operator(g, lambda x: x)
    with pytest.raises(DimensionMismatch):
        lift_one(op, 1, (2, 2))


def test_lifted_operators_on_different_slots_commute():
    g = GridSpec(length=4.0, qubits=2)
    a = lift_one(momentum_operator(g), 1, (4, 4))
    b = lift_one(potential_operator(g, lambda x: x), 2, (4, 4))
    assert np.max(np.abs(a @ b - b @ a)) == 0.0


def test_two_particle_component_layout():
    g = GridSpec(length=4.0, qubits=1)
    amps = np.arange(4, dtype=complex)
    psi = TwoParticleWavefunction(grid1=g, grid2=g, amplitudes=amps)
    assert psi.component(1, 0) == 2.0 + 0.0j
    assert psi.component(-1, 0) == 2.0 + 0.0j


def test_symmetrize_is_a_projector():
    g = GridSpec(length=4.0, qubits=2)
    rng = np.random.default_rng(21)
    amps = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    psi = TwoParticleWavefunction(grid1=g, grid2=g, amplitudes=amps)
    once = symmetrize(psi, 1)
    twice = symmetrize(once, 1)
    assert np.array_equal(once.amplitudes, twice.amplitudes)


def test_symmetrize_antisymmetric_part_changes_sign_under_swap():
    g = GridSpec(length=4.0, qubits=1)
    rng = np.random.default_rng(22)
    amps = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    psi = TwoParticleWavefunction(grid1=g, grid2=g, amplitudes=amps)
    anti = symmetrize(psi, -1).amplitudes.reshape(2, 2)
    assert np.array_equal(anti.T, -anti)


def test_antisymmetrizing_identical_product_warns():
    g = GridSpec(length=4.0, qubits=1)
    single = np.array([1.0, 2.0], dtype=complex)
    product = np.kron(single, single)
    psi = TwoParticleWavefunction(grid1=g, grid2=g, amplitudes=product)
    with pytest.warns(ZeroResultWarning):
        out = symmetrize(psi, -1)
    assert not np.any(out.amplitudes)


def test_symmetrize_grid_mismatch():
    psi = TwoParticleWavefunction(
        grid1=GridSpec(length=4.0, qubits=1),
        grid2=GridSpec(length=5.0, qubits=1),
        amplitudes=np.ones(4),
    )
    with pytest.raises(GridMismatch):
        symmetrize(psi, 1)


def test_symmetrize_sign_validation():
    g = GridSpec(length=4.0, qubits=1)
    psi = TwoParticleWavefunction(grid1=g, grid2=g, amplitudes=np.ones(4))
    with pytest.raises(ValueError):
        symmetrize(psi, 0)


def test_com_reduction_masses():
    red = com_reduction(2.0, 3.0)
    assert red.com.mass == 5.0
    assert red.rel.mass == pytest.approx(1.2)
    assert red.com.potential is None
    assert red.rel.potential is None


def test_com_reduction_passes_interaction_to_relative_problem():
    v = lambda r: r * r
    red = com_reduction(1.0, 1.0, interaction=v)
    assert red.rel.potential is v
    assert red.rel.mass == 0.5


def test_com_reduction_rejects_bad_mass():
    with pytest.raises(NonPositiveMass):
        com_reduction(0.0, 1.0)


# ---------------------------------------------------------------------------
# Wire format
# ---------------------------------------------------------------------------

def test_wavefunction_header_fields():
    g = GridSpec(length=10.0, qubits=4, centered=True)
    assert wavefunction_header(g) == {"L": 10.0, "k": 4, "N": 16, "centered": True}


def test_wavefunction_records_contents():
    g = GridSpec(length=4.0, qubits=1)
    wf = Wavefunction(grid=g, amplitudes=np.array([1.0 + 1.0j, 0.5]))
    rows = wavefunction_records(wf)
    assert rows[0]["m"] == 0
    assert rows[0]["x"] == 0.0
    assert rows[0]["re"] == 1.0
    assert rows[0]["im"] == 1.0
    assert rows[0]["prob"] == pytest.approx(2.0, abs=1e-15)
    assert rows[1]["x"] == 2.0
    assert rows[1]["prob"] == 0.25
