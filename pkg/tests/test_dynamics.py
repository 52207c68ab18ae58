import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridvro.dynamics import (
    TWO_PI_PER_NS,
    GeneratorMatrix,
    GridMismatch,
    IllConditioned,
    StepTooLarge,
    Trajectory,
    average_trajectories,
    build_generator,
    evolve,
    evolve_oracle,
    excitation_norm,
    initial_state,
)
from hybridvro.model import FluxQubitParams, NvSpin, RotatingFrameSpin, RotatingFrameSystem, build_system
from hybridvro.validation import oracle_deviation, random_small_system


def system(n=1, g=0.0, delta_c=0.0, gamma_c=0.0, **spin):
    spins = tuple(RotatingFrameSpin(**{"omega_b": 0.0, "omega_d": 0.0, "j": 0.0, "j_prime": 0.0, **spin}) for _ in range(n))
    return RotatingFrameSystem(delta_c=delta_c, g_eff=g, gamma_c=gamma_c, spins=spins)


def collective(n=1200, coupling=13.0, zeeman=0.0):
    spins = [NvSpin(2878.0, b_z_zeeman_k=zeeman)] * n
    return build_system(FluxQubitParams(2878.0), coupling / np.sqrt(n), spins, frame_frequency=2878.0 + zeeman)


def test_zero_generator():
    assert np.array_equal(build_generator(system()).to_dense(), np.zeros((3, 3)))


def test_coupling_entries():
    m = build_generator(system(g=1.0)).to_dense()
    assert m[0, 1] == pytest.approx(-1j * 2 * np.pi * 1e-3)
    assert m[1, 0] == m[0, 1]
    assert np.count_nonzero(m) == 2


def test_generator_transcribes_equations_of_motion():
    s = system(g=0.7, delta_c=1.5, gamma_c=0.3, omega_b=-2.0, omega_d=3.0, j=4.0, j_prime=5.0, gamma_b=0.1, gamma_d=0.2)
    m = build_generator(s).to_dense() / TWO_PI_PER_NS
    expected = np.array(
        [
            [-1.5j - 0.3, -0.7j, 0],
            [-0.7j, 2.0j - 0.1, -4.0j + 5.0],
            [0, -4.0j - 5.0, -3.0j - 0.2],
        ]
    )
    assert np.allclose(m, expected)


def test_rejects_empty_system():
    with pytest.raises(ValueError):
        build_generator(system(n=0))


def test_structural_nonzeros():
    gen = build_generator(random_small_system(3))
    n = gen.n_spins
    assert gen.nnz == 1 + 8 * n
    assert np.count_nonzero(gen.to_dense()) <= gen.nnz


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_dissipative_structure(seed):
    s = random_small_system(seed)
    m = build_generator(s).to_dense()
    a = s.arrays()
    decay = np.concatenate([[s.gamma_c], a["gamma_b"], a["gamma_d"]]) * TWO_PI_PER_NS
    assert np.allclose(m + m.conj().T, -2 * np.diag(decay), atol=1e-14)


def test_matvec_matches_dense():
    gen = build_generator(random_small_system(11))
    x = np.random.default_rng(0).normal(size=gen.dimension) + 1j
    assert np.allclose(gen.matvec(x), gen.to_dense() @ x)


def test_decoupled_qubit_is_stationary():
    tr = evolve(build_generator(system(n=3)), 50.0, 0.05)
    assert np.all(tr.p == 1.0)


def test_qubit_amplitude_decay():
    tr = evolve(build_generator(system(gamma_c=0.3)), 600.0, 0.05)
    assert np.allclose(tr.p, np.exp(-2 * TWO_PI_PER_NS * 0.3 * tr.t), rtol=1e-10)
    # population reaches 1/e at 1 / (2 * 2pi * 0.3 MHz)
    t_e = 1e3 / (4 * np.pi * 0.3)
    assert t_e == pytest.approx(265.26, abs=0.01)
    assert np.interp(t_e, tr.t, tr.p) == pytest.approx(np.exp(-1), rel=1e-6)


def test_collective_vacuum_rabi_timing():
    tr = evolve(build_generator(collective()), 60.0, 0.05)
    expected = np.cos(2 * np.pi * 13e-3 * tr.t) ** 2
    assert np.max(np.abs(tr.p - expected)) < 1e-9
    assert tr.t[np.argmin(tr.p[: int(30 / 0.05)])] == pytest.approx(19.23, abs=0.05)
    late = tr.t > 30
    assert tr.t[late][np.argmax(tr.p[late])] == pytest.approx(38.46, abs=0.05)


def test_oracle_single_spin_rabi():
    t = np.linspace(0, 200, 2001)
    tr = evolve_oracle(build_generator(system(g=13.0)), t)
    assert np.allclose(tr.p, np.cos(2 * np.pi * 13e-3 * t) ** 2, atol=1e-12)


def test_oracle_zero_generator():
    tr = evolve_oracle(build_generator(system(n=2)), np.linspace(0, 10, 11))
    assert np.allclose(tr.p, 1.0)


def test_oracle_rejects_defective_generator():
    z = np.zeros(1, dtype=complex)
    jordan = GeneratorMatrix(qc=0j, coupling=z, bb=z, bd=np.ones(1, dtype=complex), db=z, dd=z)
    with pytest.raises(IllConditioned):
        evolve_oracle(jordan, [0.0, 1.0])


@pytest.mark.parametrize("seed", range(5))
def test_rk4_matches_oracle_at_small_step(seed):
    assert oracle_deviation(random_small_system(seed), 200.0, 0.01) <= 1e-8


def test_step_halving_is_fourth_order():
    s = random_small_system(4)
    e1 = oracle_deviation(s, 200.0, 0.2)
    e2 = oracle_deviation(s, 200.0, 0.1)
    assert e1 > 1e-9
    assert e1 / e2 >= 8.0


def test_step_too_large():
    with pytest.raises(StepTooLarge) as info:
        evolve(build_generator(collective()), 200.0, 10.0)
    assert info.value.required_dt < 10.0


def test_excitation_norm():
    assert excitation_norm(initial_state(4)) == 1.0
    assert excitation_norm(np.array([0.6, 0.8j, 0])) == pytest.approx(1.0)


def test_decay_free_norm_conservation():
    s = random_small_system(21)
    s = RotatingFrameSystem(
        delta_c=s.delta_c,
        g_eff=s.g_eff,
        gamma_c=0.0,
        spins=tuple(RotatingFrameSpin(x.omega_b, x.omega_d, x.j, x.j_prime) for x in s.spins),
    )
    tr = evolve(build_generator(s), 200.0, 0.05)
    assert np.max(np.abs(tr.norm - 1)) <= 1e-9


def test_norm_strictly_decreasing_with_decay():
    s = system(n=4, g=5.0, gamma_c=0.3, gamma_b=0.44, gamma_d=0.44, omega_b=1.0, j=2.0)
    tr = evolve(build_generator(s), 100.0, 0.05)
    assert np.all(np.diff(tr.norm) < 0)
    assert np.all((tr.p >= 0) & (tr.p <= 1))


def _traj(p, t=None):
    p = np.asarray(p, dtype=float)
    return Trajectory(t=np.arange(len(p)) * 0.1 if t is None else t, p=p, norm=np.ones_like(p))


def test_average_single_and_duplicates():
    a = _traj([1.0, 0.5, 0.2])
    avg = average_trajectories([a])
    assert np.array_equal(avg.p, a.p)
    avg = average_trajectories([a, _traj([1.0, 0.5, 0.2])])
    assert np.array_equal(avg.p, a.p)
    assert np.all(avg.p_std == 0)


def test_average_grid_mismatch():
    with pytest.raises(GridMismatch):
        average_trajectories([_traj([1, 0]), _traj([1, 0], t=np.array([0.0, 0.2]))])


def test_self_averaging_at_first_revival():
    from hybridvro.config import RunConfig
    from hybridvro.experiments import simulate_realization

    cfg = RunConfig(seed=5)
    avg = average_trajectories(simulate_realization(cfg, i) for i in range(16))
    k = np.argmax(np.where(avg.t > 25, avg.p, 0))
    assert avg.p_std[k] < 0.05
