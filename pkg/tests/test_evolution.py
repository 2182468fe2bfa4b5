import math

import numpy as np
import pytest
from hypothesis import example, given, settings, strategies as st

from su2bath.bath import ModelParams
from su2bath.density import BlockLabel, DensityState
from su2bath.equilibrium import equilibrium_mixture, equilibrium_state
from su2bath.evolution import (
    BlockPropagator,
    TimeSeries,
    asymptotic_weights,
    closed_form_low_subspaces,
    evolve,
    evolve_block_interaction_picture,
    evolve_many,
    low_subspace_coeffs,
    low_subspace_state,
    observables,
    propagate_block,
    to_tilde,
)
from su2bath.generator import ResourceLimitError, build_block_generator, kernel_matrix, propagator
from su2bath.states import coherent_density, product_state

INIT = dict(d0=0.2, a0=0.5, b0=0.3, c0=0.1 + 0.2j, g0=0.15 - 0.05j, h0=-0.1 + 0.12j)


def random_state(seed, nmax=3):
    """Random mixed state on N <= nmax, built from a Fock-space Wishart matrix."""
    rng = np.random.default_rng(seed)
    kets = [(n1, N - n1) for N in range(nmax + 1) for n1 in range(N + 1)]
    x = rng.normal(size=(len(kets), len(kets))) + 1j * rng.normal(size=(len(kets), len(kets)))
    rho = x @ x.conj().T
    rho /= np.trace(rho).real
    elems = []
    for i, (n1, n2) in enumerate(kets):
        for j, (m1, m2) in enumerate(kets):
            elems.append((n1 + n2, m1 + m2, n1 - n2, m1 - m2, rho[i, j]))
    return DensityState.from_elements(elems)


def test_vacuum_stationary():
    s = DensityState.from_elements([(0, 0, 0, 0, 1.0)])
    for t in (0.0, 3.0, 100.0):
        assert evolve(s, ModelParams.from_nbar0(2.0), t).coefficient(0, 0, 0, 0) == 1


def test_single_excitation_decay():
    s = DensityState.from_elements([(1, 1, 1, 1, 1.0)])
    for t in (0.5, 2.0, 7.0):
        assert evolve(s, ModelParams(), t).coefficient(1, 1, 1, 1).real == pytest.approx(math.exp(-t), abs=1e-14)


@pytest.mark.parametrize("n", [0.0, 0.5, 2.0])
def test_coherence_modulus(n):
    p = ModelParams.from_nbar0(n, delta_omega1=0.05)
    lab = BlockLabel(1, 1, 2)
    for t in (0.3, 4.0):
        c = propagate_block(build_block_generator(p, lab), np.array([1.0]), t)
        assert abs(c[0]) == pytest.approx(math.exp(-(2 * p.nbar0 + 1) * t / 2), abs=1e-14)
        np.testing.assert_allclose(c, propagator(build_block_generator(p, lab), t) @ [1.0], atol=1e-14)


@pytest.mark.parametrize("n", [0.0, 0.5, 2.0])
def test_closed_forms(n):
    p = ModelParams.from_nbar0(n, delta_omega1=0.05, delta_omega2=0.02)
    times = np.linspace(0, 10, 51)
    states = evolve_many(low_subspace_state(**INIT), p, times)
    for t, s in zip(times, states):
        got = low_subspace_coeffs(to_tilde(s, p, t)).as_array()
        want = closed_form_low_subspaces(*INIT.values(), p, t).as_array()
        assert np.max(np.abs(got - want)) < 1e-8


def test_closed_form_examples():
    p = ModelParams.from_nbar0(1.0)
    assert closed_form_low_subspaces(0, 1, 0, 0, 0, 0, p, 200.0).a == pytest.approx(1 / 3, abs=1e-14)
    z = ModelParams()
    assert closed_form_low_subspaces(0.5, 0.5, 0, 0, 0, 0.3j, z, 17.0).h == 0.3j
    r = closed_form_low_subspaces(0.5, 0.5, 0, 0, 0.2, 0, z, 2.0).g / 0.2
    assert r == pytest.approx(math.exp(-1))
    with pytest.raises(ValueError):
        closed_form_low_subspaces(0.5, 0.6, 0, 0, 0, 0, z, 1.0)


def test_to_tilde():
    p = ModelParams()
    s = DensityState.from_elements([(1, 0, 1, 0, 0.3), (0, 1, 0, 1, 0.3), (0, 0, 0, 0, 0.5), (1, 1, 1, 1, 0.5)])
    t = 0.7
    tl = to_tilde(s, p, t)
    assert tl.coefficient(1, 0, 1, 0) == pytest.approx(0.3 * np.exp(2j * t))
    assert tl.coefficient(1, 1, 1, 1) == 0.5
    q = random_state(1)
    back = to_tilde(to_tilde(q, p, 2.3), p, -2.3)
    assert back.distance(q) < 1e-12
    diag = equilibrium_state(ModelParams.from_nbar0(1.0), 3)
    assert to_tilde(diag, p, 5.0).distance(diag) == 0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.floats(0, 3), st.floats(0, 3), st.floats(0, 3))
def test_semigroup(seed, n, t1, t2):
    p = ModelParams.from_nbar0(n, delta_omega1=0.1, delta_omega2=0.04)
    s = random_state(seed)
    two = evolve(evolve(s, p, t1), p, t2)
    one = evolve(s, p, t1 + t2)
    assert two.distance(one) < 1e-9


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.floats(0, 3))
@example(0, 1.1125369292536007e-308)
def test_conservation_and_positivity(seed, n):
    p = ModelParams.from_nbar0(n, delta_omega1=0.2)
    for s in evolve_many(random_state(seed, 4), p, [0.0, 0.1, 1.0, 5.0, 30.0]):
        assert abs(s.trace() - 1) < 1e-10
        assert s.hermiticity_error() < 1e-10
        assert s.min_eigenvalue() > -1e-10


def test_rejects_non_hermitian():
    s = DensityState.from_elements([(0, 0, 0, 0, 1.0), (1, 0, 1, 0, 0.1)])
    with pytest.raises(ValueError, match="Hermitian"):
        evolve(s, ModelParams(), 1.0)


def test_rejects_negative_time():
    with pytest.raises(ValueError):
        evolve_many(equilibrium_state(ModelParams(), 1), ModelParams(), [-1.0])


def test_cap():
    s = equilibrium_state(ModelParams(), 10)
    with pytest.raises(ResourceLimitError, match="smaller initial state"):
        evolve(s, ModelParams(), 1.0, n_max=8)


def test_propagator_fallback_agrees():
    # zero temperature: the populations matrix is triangular with equal diagonal entries at N=3 r=+-1
    p = ModelParams()
    for N in (3, 8, 20):
        gen = build_block_generator(p, BlockLabel(N, N, 0))
        prop = BlockPropagator(gen)
        c0 = np.zeros(N + 1)
        c0[0] = 1.0
        np.testing.assert_allclose(prop(c0, 0.7), propagator(gen, 0.7) @ c0, atol=1e-9)


def test_propagator_underflowing_occupancy():
    # a rate of 1e-300 next to O(1) rates defeats eigensolver balancing
    p = ModelParams.from_nbar0(1e-300)
    gen = build_block_generator(p, BlockLabel(1, 1, 0))
    c0 = np.array([0.3, 0.7])
    np.testing.assert_allclose(BlockPropagator(gen)(c0, 2.0), propagator(gen, 2.0) @ c0, atol=1e-14)
    assert abs(BlockPropagator(gen)(c0, 2.0).sum() - 1) < 1e-14


def test_equilibration_at_unit_occupancy():
    p = ModelParams.from_nbar0(1.0)
    s = DensityState.from_elements([(3, 3, 3, 3, 0.4), (2, 2, -2, -2, 0.35), (1, 1, 1, 1, 0.25)])
    target = equilibrium_mixture(p, asymptotic_weights(s))
    times = np.linspace(5, 50, 46)
    dist = [x.distance(target) for x in evolve_many(s, p, times)]
    assert np.all(np.diff(dist) <= 1e-15)
    assert dist[-1] < 1e-6


def test_off_diagonal_decay():
    # the slowest coherence rate shrinks with nbar0 (about 0.12 gamma here), hence the long time
    p = ModelParams.from_nbar0(0.5, delta_omega1=0.1)
    s = evolve(random_state(7), p, 300.0)
    for lab, vec in s.blocks.items():
        if not lab.is_diagonal:
            assert np.max(np.abs(vec)) < 1e-6


def test_zero_temperature_protected_elements():
    # the lowest element of each block is annihilated by the dissipator; for states
    # confined to it, moduli stay constant
    p = ModelParams(delta_omega1=0.1, delta_omega2=0.05)
    s = DensityState.from_elements([(0, 0, 0, 0, 0.6), (1, 1, -1, -1, 0.4),
                                    (0, 1, 0, -1, 0.3 - 0.2j), (1, 0, -1, 0, 0.3 + 0.2j)])
    for x in evolve_many(s, p, [1.0, 10.0, 100.0]):
        assert abs(x.coefficient(0, 1, 0, -1)) == pytest.approx(abs(0.3 - 0.2j), abs=1e-12)


def test_cascade_ordering():
    N = 5
    s = DensityState.from_elements([(N, N, N, N, 1.0)])
    times = np.linspace(0, 12, 2401)
    states = evolve_many(s, ModelParams(), times)
    peaks = [times[np.argmax([x.coefficient(N, N, r, r).real for x in states])] for r in range(N, -N - 1, -2)]
    assert all(a < b for a, b in zip(peaks, peaks[1:]))


@pytest.mark.parametrize("n", [0.0, 0.5, 2.0])
def test_speed_scaling(n):
    p = ModelParams.from_nbar0(n)
    for N in range(1, 11):
        ev = np.linalg.eigvals(kernel_matrix(p, N)).real
        assert ev.max() >= N * (2 * p.nbar0 + 1) * (1 - 1e-9)
        slow = np.sort(ev)[1]
        assert slow >= p.gamma * (2 * p.nbar0 + 1) * (1 - 1e-9)


def test_interaction_picture_rk4():
    p = ModelParams.from_nbar0(0.6, gamma=0.05, delta_omega1=0.07, delta_omega2=0.03)
    lab = BlockLabel(3, 3, 2)
    c0 = np.array([0.3, -0.1 + 0.2j, 0.05j])
    t = math.pi / 0.2
    ref = propagate_block(build_block_generator(p, lab), c0, t)
    got = evolve_block_interaction_picture(p, lab, c0, t, dt=1e-3 / p.gamma)
    assert np.max(np.abs(got - ref)) < 1e-8
    assert np.max(np.abs(ref)) > 1e-3


def test_observables_examples():
    p = ModelParams.from_nbar0(1.0)
    o = observables(equilibrium_state(p, 2), p)
    assert o["populations"] == {2: pytest.approx(1.0)}
    assert [o["occupations"][(2, r)] for r in (2, 0, -2)] == pytest.approx([1 / 7, 2 / 7, 4 / 7])
    assert o["purity"] == pytest.approx(3 / 7)
    assert o["energy"] == pytest.approx((4 + 2 * 3 + 4 * 2) / 7)
    assert observables(product_state([0, 1]), p)["purity"] == pytest.approx(1.0)


def test_coherent_state_trace_preserved():
    p = ModelParams.from_nbar0(0.3, delta_omega1=0.1)
    for s in evolve_many(coherent_density(4, 1.0, 0.5), p, [0.0, 1.0, 10.0]):
        assert s.trace() == pytest.approx(1.0, abs=1e-12)


def test_timeseries_roundtrip(tmp_path):
    p = ModelParams.from_nbar0(0.5)
    times = np.linspace(0, 2, 5)
    ts = TimeSeries.from_states(times, evolve_many(low_subspace_state(**INIT), p, times), p, [(1, 1, 1, -1)])
    path = tmp_path / "ts.csv"
    ts.to_csv(path)
    head = path.read_text().splitlines()[0].split(",")
    assert head[:4] == ["t", "trace", "purity", "energy"]
    assert "re_N1_Nt1_r1_rt-1" in head
    back = TimeSeries.read_csv(path)
    for k, v in ts.columns.items():
        np.testing.assert_array_equal(back.columns[k], v)
    with pytest.raises(ValueError):
        TimeSeries(np.array([0.0, 0.0]))
