import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from su2bath.bath import ModelParams
from su2bath.density import DensityState
from su2bath.equilibrium import (
    canonical_check,
    equilibrium_probabilities,
    equilibrium_spec,
    equilibrium_state,
    gibbs_distribution,
    kernel_residual,
    reduced_state,
    zero_T_invariant_family,
)
from su2bath.evolution import evolve_many
from su2bath.generator import block_indices, dense_oracle, kernel_matrix
from su2bath.density import BlockLabel


def null_vector(params, N):
    """Kernel of the populations matrix by SVD, normalised to unit sum."""
    v = scipy.linalg.null_space(kernel_matrix(params, N))
    assert v.shape[1] == 1
    v = v[:, 0]
    return v / v.sum()


def test_zero_temperature_ground_state():
    for N in (0, 1, 5, 30):
        spec = equilibrium_spec(N, 0.0)
        assert spec.Z == 1.0
        p = equilibrium_probabilities(N, 0.0)
        assert p[-1] == 1.0 and p[:-1].sum() == 0.0


def test_N2_weights():
    p = ModelParams.from_nbar0(1.0)
    np.testing.assert_allclose(equilibrium_probabilities(2, 1.0), np.array([1, 2, 4]) / 7, atol=1e-15)
    np.testing.assert_allclose(null_vector(p, 2), np.array([1, 2, 4]) / 7, atol=1e-13)


def test_N1_matches_closed_form_asymptote():
    np.testing.assert_allclose(equilibrium_probabilities(1, 1.0), [1 / 3, 2 / 3], atol=1e-15)


def test_N3_example():
    spec = equilibrium_spec(3, 0.5)
    assert spec.Z == pytest.approx(5.0, rel=1e-14)
    np.testing.assert_allclose(spec.weights, [0.125, 0.375, 1.125, 3.375], rtol=1e-14)
    np.testing.assert_allclose(spec.probabilities, null_vector(ModelParams.from_nbar0(0.5), 3), atol=1e-13)
    assert spec.weights.sum() == pytest.approx(spec.Z, rel=1e-14)


@given(st.integers(0, 200), st.floats(1e-3, 50))
def test_probabilities_normalised_positive(N, n):
    p = equilibrium_probabilities(N, n)
    # the smallest weights may underflow to zero for large N and small n
    assert np.all(p >= 0) and p[-1] > 0
    assert p.sum() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n", [0.1, 1.0, 10.0])
def test_kernel_residual(n):
    p = ModelParams.from_nbar0(n)
    assert max(kernel_residual(p, N) for N in range(1, 61)) < 1e-10 * p.gamma


@pytest.mark.parametrize("n", [0.05, 1.0, 7.0])
def test_kernel_unique(n):
    p = ModelParams.from_nbar0(n)
    for N in range(1, 21):
        assert np.linalg.matrix_rank(kernel_matrix(p, N)) == N


@pytest.mark.parametrize("n", [0.2, 1.0, 10.0])
def test_canonical_check(n):
    p = ModelParams.from_nbar0(n)
    for N in (1, 4, 17, 60):
        assert canonical_check(equilibrium_spec(N, p.nbar0), p) < 1e-12


def test_canonical_ratio_two():
    spec = equilibrium_spec(5, 1.0)
    np.testing.assert_allclose(spec.weights[1:] / spec.weights[:-1], 2.0, rtol=1e-14)


def test_canonical_check_rejects():
    with pytest.raises(ValueError):
        canonical_check(equilibrium_spec(3, 0.0), ModelParams())
    with pytest.raises(ValueError):
        canonical_check(equilibrium_spec(3, 0.5), ModelParams.from_nbar0(1.0))


def test_high_temperature_flattening():
    p = equilibrium_probabilities(2, 10.0)
    assert (p.max() - p.min()) / p.mean() < 0.3


def test_equilibrium_state_structure():
    s = equilibrium_state(ModelParams.from_nbar0(0.8), 6)
    assert list(s.blocks) == [BlockLabel(6, 6, 0)]
    assert s.trace() == pytest.approx(1.0)


def test_json_record():
    rec = equilibrium_spec(2, 1.0).to_json()
    assert rec["N"] == 2 and rec["Z"] == pytest.approx(7.0)
    assert rec["weights"] == pytest.approx([1.0, 2.0, 4.0])


# zero-temperature family -------------------------------------------------

def test_zero_T_vacuum():
    s = zero_T_invariant_family({0: 1.0})
    assert s.coefficient(0, 0, 0, 0) == 1


def test_zero_T_superposition_annihilated_by_dissipator():
    s = zero_T_invariant_family({0: 0.5, 1: 0.5}, {(0, 1): 0.5})
    assert s.purity() == pytest.approx(1.0)
    nmax = 2
    kd = dense_oracle(ModelParams(), nmax, part="dissipator")
    vec = np.zeros(kd.shape[0], dtype=complex)
    for N, Nt, r, rt, v in s.elements():
        vec[block_indices(BlockLabel.of(N, Nt, r, rt), nmax)[BlockLabel.of(N, Nt, r, rt).index(r)]] = v
    assert np.max(np.abs(kd @ vec)) < 1e-14


def test_zero_T_factorises():
    s = zero_T_invariant_family({0: 0.2, 2: 0.5, 3: 0.3}, {(0, 2): 0.1 + 0.2j, (2, 3): -0.1j})
    for N, Nt, r, rt, v in s.elements():
        if v != 0:
            assert (N + r) // 2 == 0 and (Nt + rt) // 2 == 0
    r1 = reduced_state(s, 1)
    assert r1[0, 0] == pytest.approx(1.0) and np.abs(r1).sum() == pytest.approx(1.0)


def test_zero_T_moduli_constant_under_full_dynamics():
    s = zero_T_invariant_family({0: 0.2, 2: 0.5, 3: 0.3}, {(0, 2): 0.1 + 0.2j, (2, 3): -0.1j})
    p = ModelParams(delta_omega1=0.1, delta_omega2=0.02)
    for t, st_ in zip([1.0, 7.0, 40.0], evolve_many(s, p, [1.0, 7.0, 40.0])):
        for N, Nt, r, rt, v in s.elements():
            assert abs(st_.coefficient(N, Nt, r, rt)) == pytest.approx(abs(v), abs=1e-12)


def test_zero_T_rejects():
    with pytest.raises(ValueError, match="eigenvalue"):
        zero_T_invariant_family({0: 0.5, 1: 0.5}, {(0, 1): 0.9})
    with pytest.raises(ValueError, match="sum"):
        zero_T_invariant_family({0: 0.5, 1: 0.4})


# reduced states -----------------------------------------------------------

def test_reduced_mismatched_trace():
    s = DensityState.from_elements([(1, 1, 1, -1, 1.0)])  # |1,0><0,1|
    assert np.all(reduced_state(s, "oscillator-1") == 0)


@pytest.mark.parametrize("n", [0.3, 1.0, 5.0])
def test_reduced_equilibrium_distributions(n):
    p = ModelParams.from_nbar0(n)
    N = 10
    s = equilibrium_state(p, N)
    r1 = np.diag(reduced_state(s, 1)).real
    r2 = np.diag(reduced_state(s, 2)).real
    bw = p.beta * p.omega0
    want = np.exp(-np.arange(N + 1) * bw)
    np.testing.assert_allclose(r1, want / want.sum(), rtol=1e-12)
    np.testing.assert_allclose(r2, r1[::-1], rtol=1e-12)
    np.testing.assert_allclose(r1[:-1] / r1[1:], math.exp(bw), rtol=1e-12)


def test_reduced_keep_validation():
    with pytest.raises(ValueError):
        reduced_state(equilibrium_state(ModelParams(), 1), 3)


def test_gibbs_limit():
    p = ModelParams.from_nbar0(1 / math.expm1(1.0))
    r1 = np.diag(reduced_state(equilibrium_state(p, 40), 1)).real[:21]
    g = gibbs_distribution(1.0, 20)
    assert np.max(np.abs(r1 / g - 1)) < 1e-6
