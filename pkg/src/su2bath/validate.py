"""Self-check suite: block generators against independent oracles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import equilibrium, evolution, generator
from .bath import ModelParams
from .density import BlockLabel
from .hilbert import two_mode_operators


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual < self.tolerance)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: residual {self.residual:.3e} (tol {self.tolerance:.0e})"


def check_dense_oracle(nmax: int = 4) -> Check:
    p = ModelParams.from_nbar0(0.7, omega1=2.3, omega2=0.9, gamma=1.0, delta_omega1=0.13, delta_omega2=-0.04)
    res = generator.oracle_block_residual(p, nmax)
    return Check(f"dense oracle vs block generators (nmax={nmax})", res, 1e-12)


def check_kernel(Nmax: int = 60, nbars=(0.1, 1.0, 10.0)) -> Check:
    worst = 0.0
    for n in nbars:
        p = ModelParams.from_nbar0(n)
        for N in range(1, Nmax + 1):
            worst = max(worst, equilibrium.kernel_residual(p, N) / p.gamma)
    return Check(f"equilibrium kernel residual (N<={Nmax})", worst, 1e-10)


def check_trace_preservation(Nmax: int = 20) -> Check:
    worst = 0.0
    for n in (0.0, 0.3, 4.0):
        p = ModelParams.from_nbar0(n)
        for N in range(Nmax + 1):
            m = generator.kernel_matrix(p, N)
            worst = max(worst, float(np.max(np.abs(m.sum(axis=0)))))
    return Check("trace preservation of population blocks", worst, 1e-12)


def check_closed_forms(nbars=(0.0, 0.5, 2.0), tmax: float = 10.0) -> Check:
    worst = 0.0
    init = dict(d0=0.2, a0=0.5, b0=0.3, c0=0.1 + 0.2j, g0=0.15 - 0.05j, h0=-0.1 + 0.12j)
    times = np.linspace(0.0, tmax, 41)
    for n in nbars:
        p = ModelParams.from_nbar0(n, delta_omega1=0.05, delta_omega2=0.02)
        state = evolution.low_subspace_state(**init)
        for t, s in zip(times, evolution.evolve_many(state, p, times)):
            got = evolution.low_subspace_coeffs(evolution.to_tilde(s, p, t)).as_array()
            want = evolution.closed_form_low_subspaces(*init.values(), p, t).as_array()
            worst = max(worst, float(np.max(np.abs(got - want))))
    return Check("closed-form dynamics of N, Ntilde <= 1", worst, 1e-8)


def rotation_residual(params: ModelParams, nmax: int, angle: float) -> float:
    """Change of the dense dissipator under conjugation by ``exp(i angle L0)``."""
    kd = generator.dense_oracle(params, nmax, part="dissipator")
    a1, a2 = two_mode_operators(nmax)
    l0 = 0.5 * (np.diag(a1.T @ a1) - np.diag(a2.T @ a2))
    u = np.exp(1j * angle * l0)
    # superoperator X -> U X U^dag is diagonal with entries u_i conj(u_j)
    s = (u[:, None] * u.conj()[None, :]).ravel()
    rotated = s[:, None] * kd * s.conj()[None, :]
    return float(np.max(np.abs(rotated - kd)))


def check_rotation_invariance(nmax: int = 4, angles=(0.3, 1.0, 2.7)) -> Check:
    p = ModelParams.from_nbar0(0.8)
    worst = max(rotation_residual(p, nmax, a) for a in angles)
    return Check("L0 rotation invariance of the dissipator", worst, 1e-12)


def check_interaction_picture(t: float = np.pi / 0.2) -> Check:
    # slow decay keeps the coefficients O(0.1) while the nu-phase winds by ~pi
    p = ModelParams.from_nbar0(0.6, gamma=0.05, delta_omega1=0.07, delta_omega2=0.03)
    worst = 0.0
    for lab in (BlockLabel(3, 3, 2), BlockLabel(4, 2, 2)):
        rng = np.random.default_rng(lab.N)
        c0 = rng.normal(size=lab.dim) + 1j * rng.normal(size=lab.dim)
        ref = evolution.propagate_block(generator.build_block_generator(p, lab), c0, t)
        got = evolution.evolve_block_interaction_picture(p, lab, c0, t, dt=1e-3 / p.gamma)
        worst = max(worst, float(np.max(np.abs(got - ref))))
    return Check("interaction-picture RK4 vs Schroedinger evolution (nu=2)", worst, 1e-8)


def run_all() -> list[Check]:
    return [
        check_dense_oracle(),
        check_kernel(),
        check_trace_preservation(),
        check_closed_forms(),
        check_rotation_invariance(),
        check_interaction_picture(),
    ]
