"""Stationary states: per-subspace Bose-Einstein family and zero-temperature family."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .bath import ModelParams
from .density import BlockLabel, DensityState
from .hilbert import KetLabel, energy


@dataclass(frozen=True)
class EquilibriumSpec:
    """Weights ``p`` over ``n2 = 0..N`` (i.e. ``r = N, N-2, ..., -N``) and ``Z = sum p``.

    ``p_{N - 2 n2} = nbar0^(N - n2) (1 + nbar0)^n2``.
    """

    N: int
    nbar0: float
    weights: np.ndarray
    Z: float

    @property
    def probabilities(self) -> np.ndarray:
        return equilibrium_probabilities(self.N, self.nbar0)

    def to_json(self) -> dict:
        return {"N": self.N, "nbar0": self.nbar0, "weights": [float(w) for w in self.weights], "Z": self.Z}


def equilibrium_probabilities(N: int, nbar0: float) -> np.ndarray:
    """Normalised ``p/Z`` in descending-``r`` order.

    Written through ``q = nbar0/(1+nbar0)`` so that no power of ``nbar0``
    is ever formed; stable for any ``N``.
    """
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    if nbar0 < 0:
        raise ValueError(f"nbar0 must be non-negative, got {nbar0}")
    n2 = np.arange(N + 1)
    if nbar0 == 0:
        out = np.zeros(N + 1)
        out[-1] = 1.0
        return out
    logq = math.log(nbar0) - math.log1p(nbar0)
    one_minus_q = 1.0 / (1.0 + nbar0)
    return np.exp((N - n2) * logq) * one_minus_q / -math.expm1((N + 1) * logq)


def equilibrium_spec(N: int, nbar0: float) -> EquilibriumSpec:
    n2 = np.arange(N + 1)
    if nbar0 == 0:
        weights = (n2 == N).astype(float)
        Z = 1.0
    else:
        logp = (N - n2) * math.log(nbar0) + n2 * math.log1p(nbar0)
        weights = np.exp(logp)
        Z = (1 + nbar0) ** (N + 1) - nbar0 ** (N + 1)
    return EquilibriumSpec(N, float(nbar0), weights, float(Z))


def equilibrium_state(params: ModelParams, N: int) -> DensityState:
    """Unit-trace stationary state of subspace ``N``."""
    return DensityState({BlockLabel(N, N, 0): equilibrium_probabilities(N, params.nbar0)})


def equilibrium_mixture(params: ModelParams, weights: Mapping[int, float]) -> DensityState:
    """``sum_N w_N f^(N)_eq``."""
    blocks = {}
    for N, w in weights.items():
        if w != 0:
            blocks[BlockLabel(N, N, 0)] = w * equilibrium_probabilities(N, params.nbar0)
    return DensityState(blocks)


def canonical_check(spec: EquilibriumSpec, params: ModelParams) -> float:
    """Largest relative deviation of ``spec`` from Bose-Einstein / canonical form.

    Checks ``p_{r-2}/p_r = (1 + nbar0)/nbar0 = exp(beta omega0)`` and
    ``p = [exp(beta omega2)(1 + nbar0)]^N exp(-beta E)``.
    """
    n = spec.nbar0
    if n <= 0:
        raise ValueError("canonical check needs nbar0 > 0")
    if not math.isclose(n, params.nbar0, rel_tol=1e-12):
        raise ValueError(f"spec nbar0={n} inconsistent with params nbar0={params.nbar0}")
    p = np.asarray(spec.weights, dtype=float)
    target = (1 + n) / n
    devs = [0.0]
    if spec.N > 0:
        ratios = p[1:] / p[:-1]
        devs.append(float(np.max(np.abs(ratios / target - 1))))
        devs.append(abs(math.exp(params.beta * params.omega0) / target - 1))
    b = params.beta
    logpref = spec.N * (b * params.omega2 + math.log1p(n))
    for i, r in enumerate(range(spec.N, -spec.N - 1, -2)):
        E = energy(params, KetLabel(spec.N, r))
        devs.append(abs(math.exp(logpref - b * E - math.log(p[i])) - 1))
    return max(devs)


def kernel_residual(params: ModelParams, N: int) -> float:
    """``max |K f_eq|`` for the populations matrix of subspace ``N``."""
    from .generator import kernel_matrix

    return float(np.max(np.abs(kernel_matrix(params, N) @ equilibrium_probabilities(N, params.nbar0))))


def zero_T_invariant_family(c: Mapping[int, float], c_off: Mapping[tuple[int, int], complex] | None = None,
                            atol: float = 1e-12) -> DensityState:
    """Decoherence-free state ``sum c_N |0,N><0,N| + sum (c'_{N Nt} |0,N><0,Nt| + h.c.)``.

    Raises ``ValueError`` if the coefficients do not sum to one or the
    assembled operator has a negative eigenvalue.
    """
    c_off = dict(c_off or {})
    for (N, Nt) in c_off:
        if N == Nt:
            raise ValueError(f"off-diagonal coefficient needs N != Ntilde, got ({N}, {Nt})")
        if (Nt, N) in c_off:
            raise ValueError(f"give only one of ({N}, {Nt}) and ({Nt}, {N}); the conjugate is implied")
    total = sum(float(np.real(v)) for v in c.values())
    if abs(total - 1) > 1e-10:
        raise ValueError(f"diagonal coefficients must sum to 1, got {total}")
    Ns = sorted(set(c) | {n for pair in c_off for n in pair})
    pos = {N: i for i, N in enumerate(Ns)}
    mat = np.zeros((len(Ns), len(Ns)), dtype=complex)
    for N, v in c.items():
        mat[pos[N], pos[N]] = v
    for (N, Nt), v in c_off.items():
        mat[pos[N], pos[Nt]] = v
        mat[pos[Nt], pos[N]] = np.conj(v)
    lo = float(np.linalg.eigvalsh(mat)[0])
    if lo < -atol:
        raise ValueError(f"coefficients are not positive semidefinite: eigenvalue {lo:.3e}")
    elems = []
    for N in Ns:
        for Nt in Ns:
            v = mat[pos[N], pos[Nt]]
            if v != 0:
                elems.append((N, Nt, -N, -Nt, v))
    return DensityState.from_elements(elems)


def reduced_state(state: DensityState, keep: int | str = 1) -> np.ndarray:
    """Single-mode density matrix over occupations ``0..max N``.

    ``keep`` is 1 (trace out oscillator 2) or 2 (trace out oscillator 1).
    """
    keep = {"1": 1, "2": 2, "oscillator-1": 1, "oscillator-2": 2}.get(str(keep), keep)
    if keep not in (1, 2):
        raise ValueError(f"keep must be 1 or 2, got {keep!r}")
    dim = state.max_N + 1
    rho = np.zeros((dim, dim), dtype=complex)
    for N, Nt, r, rt, v in state.elements():
        n1, n2 = (N + r) // 2, (N - r) // 2
        m1, m2 = (Nt + rt) // 2, (Nt - rt) // 2
        if keep == 1 and n2 == m2:
            rho[n1, m1] += v
        elif keep == 2 and n1 == m1:
            rho[n2, m2] += v
    return rho


def gibbs_distribution(beta_omega0: float, nmax: int) -> np.ndarray:
    """Geometric law ``exp(-n beta omega0) (1 - exp(-beta omega0))``, ``n <= nmax``."""
    n = np.arange(nmax + 1)
    return np.exp(-n * beta_omega0) * -math.expm1(-beta_omega0)
