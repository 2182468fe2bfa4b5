"""Block-wise time evolution, closed forms for ``N, Nt <= 1`` and observables."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .bath import ModelParams
from .density import BlockLabel, DensityState
from .generator import (
    BlockGenerator,
    ResourceLimitError,
    build_block_generator,
    interaction_picture_generator,
    k0_phase,
)
from .hilbert import KetLabel, energy

DEFAULT_N_MAX = 64
EIG_COND_LIMIT = 1e8
EIG_RECON_TOL = 1e-12
HERMITICITY_TOL = 1e-10


class BlockPropagator:
    """``exp(-M t)`` for one block, reusable across times.

    Uses the eigendecomposition of ``M`` unless its eigenvector matrix is
    ill-conditioned or fails to reproduce ``M``, in which case it falls back
    to ``scipy.linalg.expm``. The second test matters when rates span many
    decades (``nbar0`` near underflow), where balancing in the eigensolver can
    return a wrong eigenvector with perfect conditioning.
    """

    def __init__(self, gen: BlockGenerator):
        self.gen = gen
        m = gen.dense()
        self._m = m
        self._eig = None
        if gen.dim == 1:
            self._eig = (np.ones((1, 1)), m.diagonal().copy(), np.ones((1, 1)))
            return
        lam, vec = np.linalg.eig(m)
        if np.linalg.cond(vec) < EIG_COND_LIMIT:
            inv = np.linalg.inv(vec)
            recon = np.max(np.abs((vec * lam) @ inv - m))
            if recon <= EIG_RECON_TOL * max(1.0, np.max(np.abs(m))):
                self._eig = (vec, lam, inv)

    @property
    def uses_eigenbasis(self) -> bool:
        return self._eig is not None

    def __call__(self, c0: np.ndarray, t: float) -> np.ndarray:
        if self._eig is None:
            return expm(-self._m * t) @ c0
        vec, lam, inv = self._eig
        return vec @ (np.exp(-lam * t) * (inv @ c0))


def propagate_block(gen: BlockGenerator, c0: np.ndarray, t: float) -> np.ndarray:
    return BlockPropagator(gen)(np.asarray(c0, dtype=complex), t)


def _check_state(state: DensityState, n_max: int) -> None:
    err = state.hermiticity_error()
    if err > HERMITICITY_TOL:
        raise ValueError(f"state is not Hermitian (pairing error {err:.3e})")
    if state.max_N > n_max:
        raise ResourceLimitError(
            f"state reaches N={state.max_N} > N_max={n_max}; use a smaller initial state or raise N_max"
        )


def evolve(state: DensityState, params: ModelParams, t: float, n_max: int = DEFAULT_N_MAX) -> DensityState:
    """State at time ``t``: each block evolves as ``c(t) = exp(-M t) c(0)``."""
    return evolve_many(state, params, [t], n_max=n_max)[0]


def evolve_many(state: DensityState, params: ModelParams, times: Sequence[float],
                n_max: int = DEFAULT_N_MAX) -> list[DensityState]:
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    _check_state(state, n_max)
    out = [dict() for _ in times]
    for lab, c0 in state.blocks.items():
        prop = BlockPropagator(build_block_generator(params, lab))
        for k, t in enumerate(times):
            out[k][lab] = prop(c0, t)
    return [DensityState(b) for b in out]


def to_tilde(state: DensityState, params: ModelParams, t: float) -> DensityState:
    """Rotate to the interaction frame: ``c_tilde = c exp(i theta t)``."""
    blocks = {}
    for lab, vec in state.blocks.items():
        rs = lab.r_values()
        th = np.array([k0_phase(params, lab.N, lab.Ntilde, int(r), int(r - lab.nu)) for r in rs])
        blocks[lab] = vec * np.exp(1j * th * t)
    return DensityState(blocks)


def evolve_block_interaction_picture(params: ModelParams, label: BlockLabel, c0: np.ndarray,
                                     t: float, dt: float = 1e-3) -> np.ndarray:
    """Schroedinger coefficients at ``t`` obtained through the rotating frame.

    Integrates ``dc~/dt = -M~(t) c~`` with classical RK4 at fixed step and then
    undoes the frame rotation. Intended as an independent check of
    :func:`evolve`.
    """
    steps = max(1, int(round(t / dt)))
    h = t / steps
    c = np.asarray(c0, dtype=complex).copy()
    base = interaction_picture_generator(params, label, 0.0)
    rate = params.delta_omega0_prime * label.nu

    def f(s, y):
        ph = np.exp(1j * rate * s)
        out = base.diag * y
        if label.dim > 1:
            out[1:] += base.sub / ph * y[:-1]
            out[:-1] += base.sup * ph * y[1:]
        return -out

    for k in range(steps):
        s = k * h
        k1 = f(s, c)
        k2 = f(s + h / 2, c + h / 2 * k1)
        k3 = f(s + h / 2, c + h / 2 * k2)
        k4 = f(s + h, c + h * k3)
        c = c + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    rs = label.r_values()
    th = np.array([k0_phase(params, label.N, label.Ntilde, int(r), int(r - label.nu)) for r in rs])
    return c * np.exp(-1j * th * t)


# low subspaces --------------------------------------------------------

# (N, Nt, r, rt) of each named coefficient; the h.c. partners are implied.
LOW_SUBSPACE_ELEMENTS = {
    "d": (0, 0, 0, 0),
    "a": (1, 1, 1, 1),
    "b": (1, 1, -1, -1),
    "c": (1, 1, 1, -1),
    "g": (0, 1, 0, 1),
    "h": (0, 1, 0, -1),
}


@dataclass(frozen=True)
class LowSubspaceCoeffs:
    d: float
    a: float
    b: float
    c: complex
    g: complex
    h: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.d, self.a, self.b, self.c, self.g, self.h], dtype=complex)


def low_subspace_state(d0, a0, b0, c0=0j, g0=0j, h0=0j) -> DensityState:
    """Density state on ``N, Nt <= 1`` from the six named coefficients."""
    if abs(d0 + a0 + b0 - 1) > 1e-12:
        raise ValueError(f"d0 + a0 + b0 must equal 1, got {d0 + a0 + b0}")
    vals = dict(d=d0, a=a0, b=b0, c=c0, g=g0, h=h0)
    elems = []
    for name, (N, Nt, r, rt) in LOW_SUBSPACE_ELEMENTS.items():
        v = vals[name]
        elems.append((N, Nt, r, rt, v))
        if (N, r) != (Nt, rt):
            elems.append((Nt, N, rt, r, np.conj(v)))
    return DensityState.from_elements(elems)


def low_subspace_coeffs(state: DensityState) -> LowSubspaceCoeffs:
    vals = {k: state.coefficient(*idx) for k, idx in LOW_SUBSPACE_ELEMENTS.items()}
    return LowSubspaceCoeffs(vals["d"].real, vals["a"].real, vals["b"].real, vals["c"], vals["g"], vals["h"])


def closed_form_low_subspaces(d0, a0, b0, c0, g0, h0, params: ModelParams, t: float) -> LowSubspaceCoeffs:
    """Exact rotating-frame coefficients for a state confined to ``N, Nt <= 1``.

    ``c`` is the coherence ``|1,0><0,1|``, ``g`` is ``|0,0><1,0|`` and ``h``
    is ``|0,0><0,1|``.
    """
    if abs(d0 + a0 + b0 - 1) > 1e-12:
        raise ValueError(f"d0 + a0 + b0 must equal 1, got {d0 + a0 + b0}")
    g, n = params.gamma, params.nbar0
    relax = math.exp(-g * (1 + 2 * n) * t)
    a = a0 * relax + n * (1 - d0) / (1 + 2 * n) * (1 - relax)
    return LowSubspaceCoeffs(
        d=d0,
        a=a,
        b=1 - d0 - a,
        c=c0 * math.exp(-(2 * n + 1) * g * t / 2),
        g=g0 * math.exp(-g * (n + 1) * t / 2),
        h=h0 * math.exp(-g * n * t / 2),
    )


# observables ----------------------------------------------------------

def observables(state: DensityState, params: ModelParams) -> dict:
    """Trace, purity, mean energy, per-``N`` populations and level occupations."""
    populations: dict[int, float] = {}
    occupations: dict[tuple[int, int], float] = {}
    e = 0.0
    for lab, vec in state.blocks.items():
        if not lab.is_diagonal:
            continue
        populations[lab.N] = float(vec.real.sum())
        for r, c in zip(lab.r_values(), vec.real):
            occupations[(lab.N, int(r))] = float(c)
            e += c * energy(params, KetLabel(lab.N, int(r)))
    return {
        "trace": float(state.trace().real),
        "purity": state.purity(),
        "energy": float(e),
        "populations": populations,
        "occupations": occupations,
    }


def asymptotic_weights(state: DensityState) -> dict[int, float]:
    """Conserved weight of each diagonal subspace."""
    return {lab.N: float(vec.real.sum()) for lab, vec in state.blocks.items() if lab.is_diagonal}


@dataclass
class TimeSeries:
    """Observables sampled at strictly increasing times."""

    times: np.ndarray
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    @classmethod
    def from_states(cls, times, states: Sequence[DensityState], params: ModelParams,
                    coefficients: Sequence[tuple[int, int, int, int]] = ()) -> "TimeSeries":
        obs = [observables(s, params) for s in states]
        cols = {
            "trace": np.array([o["trace"] for o in obs]),
            "purity": np.array([o["purity"] for o in obs]),
            "energy": np.array([o["energy"] for o in obs]),
        }
        Ns = sorted({N for o in obs for N in o["populations"]})
        for N in Ns:
            cols[f"pop_N{N}"] = np.array([o["populations"].get(N, 0.0) for o in obs])
        for key in coefficients:
            vals = np.array([s.coefficient(*key) for s in states])
            tag = "_".join(f"{n}{v}" for n, v in zip(("N", "Nt", "r", "rt"), key))
            cols[f"re_{tag}"] = vals.real
            cols[f"im_{tag}"] = vals.imag
        return cls(times, cols)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", *self.columns])
            for k, t in enumerate(self.times):
                w.writerow([fmt(t), *(fmt(col[k]) for col in self.columns.values())])

    @classmethod
    def read_csv(cls, path) -> "TimeSeries":
        with open(path, encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        head, body = rows[0], np.array(rows[1:], dtype=float)
        return cls(body[:, 0], {name: body[:, i + 1] for i, name in enumerate(head[1:])})


def fmt(x: float) -> str:
    """17 significant digits; ``-0`` is written as ``0``."""
    x = float(x)
    if x == 0:
        x = 0.0
    return f"{x:.17g}"

