"""Block generators of the master equation ``df/dt = -K f`` with ``K = K0 + Kd``.

``K0 f = i[H0', f]`` with
``H0' = (omega1 - dw1) n1 + (omega2 - dw2) n2 - dw0' n1 n2``, and ``Kd`` is the
collective Lindblad dissipator built from ``L+ = a1^dag a2``, ``L- = a1 a2^dag``
with rates ``gamma*nbar0`` (absorption) and ``gamma*(nbar0 + 1)`` (emission).

On a block the coefficient vector obeys ``dc/dt = -M c``; ``M`` is tridiagonal
in the descending-``r`` ordering, with ``M[i-1, i]`` feeding ``r+2`` from ``r``
and ``M[i+1, i]`` feeding ``r-2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .bath import ModelParams
from .density import BlockLabel, blocks_up_to
from .hilbert import check_ket, fock_index, ladder_minus_coeff, ladder_plus_coeff, two_mode_operators

DENSE_NMAX_LIMIT = 10


class ResourceLimitError(RuntimeError):
    """Requested size exceeds a configured resource guard."""


def uvw_coeffs(params: ModelParams, N: int, r: int) -> tuple[float, float, float]:
    """Rates of ``K f^(N)_r = u f^(N)_{r+2} + v f^(N)_r + w f^(N)_{r-2}``."""
    check_ket(N, r)
    g, n = params.gamma, params.nbar0
    u = -0.25 * g * n * ((N + 1) ** 2 - (r + 1) ** 2)
    v = 0.25 * g * (2 * n + 1) * ((N + 1) ** 2 - r * r - 1) + 0.5 * g * r
    w = -0.25 * g * (n + 1) * ((N + 1) ** 2 - (r - 1) ** 2)
    return u, v, w


def kernel_matrix(params: ModelParams, N: int) -> np.ndarray:
    """Real tridiagonal ``K`` restricted to the populations of subspace ``N``."""
    rs = range(N, -N - 1, -2)
    m = np.zeros((N + 1, N + 1))
    for i, r in enumerate(rs):
        u, v, w = uvw_coeffs(params, N, r)
        m[i, i] = v
        if i > 0:
            m[i - 1, i] = u
        if i < N:
            m[i + 1, i] = w
    return m


def dissipator_block_action(params: ModelParams, label: BlockLabel, r: int):
    """``Kd f_{r; r-nu}`` as ``[(r+2, a), (r, d), (r-2, b)]``.

    Coefficients of targets that fall outside the block vanish identically,
    because the corresponding ladder amplitude is zero at the edge.
    """
    label.index(r)
    rt = r - label.nu
    N, Nt = label.N, label.Ntilde
    g, n = params.gamma, params.nbar0
    lp, lpt = ladder_plus_coeff(N, r), ladder_plus_coeff(Nt, rt)
    lm, lmt = ladder_minus_coeff(N, r), ladder_minus_coeff(Nt, rt)
    up = -g * n * lp * lpt
    down = -g * (n + 1) * lm * lmt
    diag = 0.5 * g * n * (lp * lp + lpt * lpt) + 0.5 * g * (n + 1) * (lm * lm + lmt * lmt)
    return [(r + 2, complex(up)), (r, complex(diag)), (r - 2, complex(down))]


def k0_phase(params: ModelParams, N: int, Ntilde: int, r: int, rtilde: int) -> float:
    """Rotation rate ``theta`` with ``K0 f = i theta f``."""
    p = params
    dwp = p.delta_omega0_prime
    return (0.5 * (p.omega0_prime - dwp) * (N - Ntilde)
            + 0.5 * (p.omega0 - p.delta_omega0) * (r - rtilde)
            - 0.25 * dwp * (N * N - Ntilde * Ntilde)
            + 0.25 * dwp * (r * r - rtilde * rtilde))


@dataclass(frozen=True)
class BlockGenerator:
    """Tridiagonal ``M`` of one block; ``sub[i] = M[i+1, i]``, ``sup[i] = M[i, i+1]``."""

    label: BlockLabel
    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    def __post_init__(self):
        for a in (self.sub, self.diag, self.sup):
            a.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.label.dim

    def dense(self) -> np.ndarray:
        m = np.diag(self.diag).astype(complex)
        if self.dim > 1:
            m += np.diag(self.sub, -1) + np.diag(self.sup, 1)
        return m

    def apply(self, c: np.ndarray) -> np.ndarray:
        """``M @ c`` without forming the dense matrix."""
        out = self.diag * c
        if self.dim > 1:
            out[1:] += self.sub * c[:-1]
            out[:-1] += self.sup * c[1:]
        return out


def _block_pieces(params: ModelParams, label: BlockLabel):
    if label.empty:
        raise ValueError(f"block {label} is empty")
    rs = label.r_values()
    d = len(rs)
    diag = np.zeros(d, dtype=complex)
    sub = np.zeros(d - 1, dtype=complex)
    sup = np.zeros(d - 1, dtype=complex)
    for i, r in enumerate(rs):
        (_, up), (_, dd), (_, down) = dissipator_block_action(params, label, int(r))
        diag[i] = dd
        if i > 0:
            sup[i - 1] = up
        if i < d - 1:
            sub[i] = down
    return rs, sub, diag, sup


def build_block_generator(params: ModelParams, label: BlockLabel) -> BlockGenerator:
    """Schroedinger-picture block matrix: dissipator plus ``i theta`` on the diagonal."""
    rs, sub, diag, sup = _block_pieces(params, label)
    theta = np.array([k0_phase(params, label.N, label.Ntilde, int(r), int(r - label.nu)) for r in rs])
    return BlockGenerator(label, sub, diag + 1j * theta, sup)


def dissipator_block_generator(params: ModelParams, label: BlockLabel) -> BlockGenerator:
    _, sub, diag, sup = _block_pieces(params, label)
    return BlockGenerator(label, sub, diag, sup)


def interaction_picture_generator(params: ModelParams, label: BlockLabel, t: float) -> BlockGenerator:
    """Dissipator in the frame rotating with ``K0``.

    The raising term picks up ``exp(+i dw0' nu t)`` and the lowering term
    ``exp(-i dw0' nu t)``; populations (``nu = 0``) are unaffected.
    """
    _, sub, diag, sup = _block_pieces(params, label)
    ph = np.exp(1j * params.delta_omega0_prime * label.nu * t)
    return BlockGenerator(label, sub / ph, diag, sup * ph)


def dense_oracle(params: ModelParams, nmax: int, part: str = "full") -> np.ndarray:
    """Brute-force superoperator ``K`` on the truncated space ``n1, n2 <= nmax``.

    Density matrices are vectorised row-major, so ``vec(A X B) = (A kron B^T) vec(X)``
    and element ``|i><j|`` sits at ``i * D + j`` with ``D = (nmax + 1)**2``.
    ``part`` selects ``"full"``, ``"dissipator"`` or ``"unitary"``. Blocks with
    ``N, Nt <= nmax`` are represented exactly.
    """
    if nmax > DENSE_NMAX_LIMIT:
        raise ResourceLimitError(f"dense oracle limited to nmax <= {DENSE_NMAX_LIMIT}, got {nmax}")
    a1, a2 = two_mode_operators(nmax)
    D = a1.shape[0]
    eye = np.eye(D)
    lp = a1.T @ a2
    lm = a1 @ a2.T
    g, n = params.gamma, params.nbar0
    out = np.zeros((D * D, D * D), dtype=complex)
    if part in ("full", "dissipator"):
        mp = lm @ lp
        mm = lp @ lm
        out += -0.5 * g * n * (2 * np.kron(lp, lm.T) - np.kron(mp, eye) - np.kron(eye, mp.T))
        out += -0.5 * g * (n + 1) * (2 * np.kron(lm, lp.T) - np.kron(mm, eye) - np.kron(eye, mm.T))
    if part in ("full", "unitary"):
        n1 = np.diag(a1.T @ a1)
        n2 = np.diag(a2.T @ a2)
        h = ((params.omega1 - params.delta_omega1) * n1 + (params.omega2 - params.delta_omega2) * n2
             - params.delta_omega0_prime * n1 * n2)
        out += np.diag(1j * (h[:, None] - h[None, :]).ravel())
    if part not in ("full", "dissipator", "unitary"):
        raise ValueError(f"unknown part {part!r}")
    return out


def block_indices(label: BlockLabel, nmax: int) -> np.ndarray:
    """Positions of the block basis elements inside :func:`dense_oracle` vectors."""
    D = (nmax + 1) ** 2
    idx = []
    for r in label.r_values():
        rt = r - label.nu
        i = fock_index((label.N + r) // 2, (label.N - r) // 2, nmax)
        j = fock_index((label.Ntilde + rt) // 2, (label.Ntilde - rt) // 2, nmax)
        idx.append(i * D + j)
    return np.array(idx, dtype=int)


def oracle_block_residual(params: ModelParams, nmax: int, dense: np.ndarray | None = None) -> float:
    """Largest entrywise mismatch between the dense oracle and all block generators.

    Also counts any leakage of a block column outside its own block.
    """
    if dense is None:
        dense = dense_oracle(params, nmax)
    worst = 0.0
    for lab in blocks_up_to(nmax):
        idx = block_indices(lab, nmax)
        m = build_block_generator(params, lab).dense()
        worst = max(worst, float(np.max(np.abs(dense[np.ix_(idx, idx)] - m))))
        cols = dense[:, idx].copy()
        cols[idx, :] = 0.0
        worst = max(worst, float(np.max(np.abs(cols))))
    return worst


def slowest_rates(params: ModelParams, label: BlockLabel) -> np.ndarray:
    """Eigenvalues of ``M`` sorted by real part."""
    ev = np.linalg.eigvals(build_block_generator(params, label).dense())
    return ev[np.argsort(ev.real)]


def propagator(gen: BlockGenerator, t: float) -> np.ndarray:
    """``exp(-M t)`` by dense scaling-and-squaring."""
    return expm(-gen.dense() * t)
