import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridvro.analysis import (
    NoOscillation,
    fft_cross_check,
    first_revival,
    fit_envelope_lifetime,
    oscillation_frequency,
    self_energy,
    spectral_peaks,
    spectrum_resolvent,
    switching_probability,
    trace_spread,
)
from hybridvro.dynamics import GridMismatch, Trajectory, build_generator, evolve
from hybridvro.model import FluxQubitParams, NvSpin, RotatingFrameSpin, RotatingFrameSystem, build_system

T = np.arange(0, 4001) * 0.05


def traj(p, t=T, c=None):
    p = np.asarray(p, dtype=float)
    return Trajectory(t=t, p=p, norm=np.ones_like(p), c=c)


def damped(tau=50.0):
    return 0.5 + 0.5 * np.exp(-T / tau) * np.cos(2 * np.pi * 0.026 * T)


def uniform_system(n, coupling=13.0, zeeman=0.0, gamma=0.0):
    spins = [NvSpin(2878.0, b_z_zeeman_k=zeeman, gamma_b=gamma, gamma_d=gamma)] * n
    return build_system(FluxQubitParams(2878.0), coupling / np.sqrt(n), spins, frame_frequency=2878.0 + zeeman)


def test_lifetime_of_synthetic_damped_cosine():
    fit = fit_envelope_lifetime(traj(damped(50.0)))
    assert fit.tau == pytest.approx(50.0, abs=2.0)
    assert fit.n_extrema >= 4


def test_lifetime_decaying_rabi_population():
    # P = e^{-2 gamma t} cos^2: envelope time constant 1 / (2 gamma)
    p = np.exp(-T / 40.0) * np.cos(2 * np.pi * 0.013 * T) ** 2
    assert fit_envelope_lifetime(traj(p)).tau == pytest.approx(40.0, rel=1e-3)


def test_constant_trace_has_no_oscillation():
    with pytest.raises(NoOscillation):
        fit_envelope_lifetime(traj(np.ones_like(T)))
    with pytest.raises(NoOscillation):
        oscillation_frequency(traj(np.ones_like(T)))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 100), st.floats(-10, 10), st.floats(20, 120))
def test_lifetime_affine_invariance(a, b, tau):
    p = damped(tau)
    ref = fit_envelope_lifetime(traj(p)).tau
    assert fit_envelope_lifetime(traj(a * p + b)).tau == pytest.approx(ref, rel=1e-6)


def test_switching_probability_map():
    assert switching_probability(np.array([0.0, 1.0]), 0.1, 0.5) == pytest.approx([0.1, 0.6])


def test_frequency_of_constructed_trace():
    p = np.cos(2 * np.pi * 13e-3 * T) ** 2
    assert oscillation_frequency(traj(p)) == pytest.approx(26.0, rel=1e-5)
    assert first_revival(traj(p)) == pytest.approx(1e3 / 26, abs=1e-3)


def test_frequency_collective_simulation():
    tr = evolve(build_generator(uniform_system(50)), 200.0, 0.05)
    assert oscillation_frequency(tr) == pytest.approx(26.0, rel=1e-4)


def test_frequency_large_field_sqrt2_reduction():
    # Zeeman >> sqrt(N) g: the lower branch decouples, halving the bright weight
    gen = build_generator(uniform_system(50, zeeman=2000.0))
    tr = evolve(gen, 200.0, 0.01)
    assert oscillation_frequency(tr) == pytest.approx(26.0 / np.sqrt(2), rel=1e-3)


def test_bare_qubit_lorentzian():
    s = RotatingFrameSystem(delta_c=2.0, g_eff=0.0, gamma_c=0.3, spins=(RotatingFrameSpin(0, 0, 0, 0),))
    nu = np.linspace(-5, 5, 10001)
    power = spectrum_resolvent(s, nu).power
    assert nu[np.argmax(power)] == pytest.approx(2.0, abs=1e-3)
    half = power.max() / 2
    assert np.interp(2.3, nu, power) == pytest.approx(half, rel=1e-6)
    assert np.interp(1.7, nu, power) == pytest.approx(half, rel=1e-6)


def test_collective_self_energy_and_poles():
    s = uniform_system(100)
    nu = np.array([1.0, 5.0, 20.0])
    assert self_energy(s, nu) == pytest.approx(13.0**2 / nu, rel=1e-12)
    grid = np.linspace(-30, 30, 60001)
    peaks = spectral_peaks(spectrum_resolvent(uniform_system(100, gamma=0.01), grid))
    assert peaks == pytest.approx([-13.0, 13.0], abs=2e-3)


def test_resolvent_matches_dense_elimination():
    from hybridvro.validation import random_small_system

    s = random_small_system(17)
    m = build_generator(s).to_dense()
    for nu in (-7.3, 0.4, 11.0):
        s_ = -2j * np.pi * 1e-3 * nu  # Laplace variable for exp(+2 pi i nu t)
        c_hat = np.linalg.solve(s_ * np.eye(len(m)) - m, np.eye(len(m))[:, 0])[0]
        r = spectrum_resolvent(s, np.array([nu])).response[0]
        assert c_hat == pytest.approx(1j * r, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10), st.floats(-5, 5), st.floats(-5, 5)), min_size=1, max_size=5))
def test_resolvent_mirror_symmetry(params):
    spins = []
    for wb, wd, j, jp in params:
        spins.append(RotatingFrameSpin(wb, wd, j, jp, 0.44, 0.44))
        spins.append(RotatingFrameSpin(-wb, -wd, j, jp, 0.44, 0.44))
    s = RotatingFrameSystem(delta_c=0.0, g_eff=1.0, gamma_c=0.3, spins=tuple(spins))
    nu = np.linspace(0.1, 20, 50)
    pos = np.abs(spectrum_resolvent(s, nu).response)
    neg = np.abs(spectrum_resolvent(s, -nu[::-1]).response)[::-1]
    assert pos == pytest.approx(neg, rel=1e-9)


def test_resolvent_rejects_unsorted_grid():
    with pytest.raises(ValueError):
        spectrum_resolvent(uniform_system(2), np.array([1.0, 0.0]))


def test_fft_single_tone():
    c = np.exp(-2j * np.pi * 13e-3 * T)
    tr = fft_cross_check(traj(np.abs(c) ** 2, c=c))
    peaks = spectral_peaks(tr, 0.5)
    bin_ = tr.nu[1] - tr.nu[0]
    assert len(peaks) == 1 and abs(peaks[0] - 13.0) <= bin_


def test_fft_cosine_has_both_sidebands():
    c = np.cos(2 * np.pi * 13e-3 * T).astype(complex)
    tr = fft_cross_check(traj(np.abs(c) ** 2, c=c))
    bin_ = tr.nu[1] - tr.nu[0]
    assert spectral_peaks(tr, 0.5) == pytest.approx([-13.0, 13.0], abs=bin_)


def test_fft_zero_signal_is_flat():
    tr = fft_cross_check(traj(np.zeros_like(T), c=np.zeros_like(T, dtype=complex)))
    assert np.all(tr.power == 0)


def test_fft_collective_matches_resolvent_poles():
    tr = evolve(build_generator(uniform_system(20)), 200.0, 0.05)
    spec = fft_cross_check(tr)
    bin_ = spec.nu[1] - spec.nu[0]
    poles = spectral_peaks(spectrum_resolvent(uniform_system(20, gamma=0.01), np.linspace(-30, 30, 60001)))
    assert spectral_peaks(spec, 0.5) == pytest.approx(poles, abs=bin_)


def test_trace_spread():
    a = traj(damped())
    assert trace_spread([a, traj(damped())]) == 0.0
    assert trace_spread([traj(np.zeros_like(T)), traj(np.ones_like(T))]) == 1.0
    with pytest.raises(GridMismatch):
        trace_spread([a, traj(np.zeros(10), t=np.arange(10.0))])


@settings(max_examples=20, deadline=None)
@given(st.permutations([20.0, 40.0, 60.0, 80.0]))
def test_trace_spread_permutation_invariant(taus):
    ref = trace_spread([traj(damped(t)) for t in (20.0, 40.0, 60.0, 80.0)])
    assert trace_spread([traj(damped(t)) for t in taus]) == ref
    assert ref > 0
