"""SU(2) ladder algebra on the two-oscillator Fock space.

Kets are labelled by the total occupation ``N = n1 + n2`` and the occupation
difference ``r = n1 - n2``. The ladder operators ``L+ = a1^dag a2`` and
``L- = a1 a2^dag`` move ``r`` by +-2 inside a fixed-``N`` subspace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
from scipy.special import gammaln

if TYPE_CHECKING:
    from .bath import ModelParams


@dataclass(frozen=True, order=True)
class KetLabel:
    """Basis ket ``|r>_N = |n1, n2>``."""

    N: int
    r: int

    def __post_init__(self):
        check_ket(self.N, self.r)

    @classmethod
    def from_occupations(cls, n1: int, n2: int) -> "KetLabel":
        if n1 < 0 or n2 < 0:
            raise ValueError(f"occupations must be non-negative, got ({n1}, {n2})")
        return cls(n1 + n2, n1 - n2)

    @property
    def n1(self) -> int:
        return (self.N + self.r) // 2

    @property
    def n2(self) -> int:
        return (self.N - self.r) // 2


def check_ket(N: int, r: int) -> None:
    """Raise ``ValueError`` unless ``(N, r)`` labels a ket."""
    if int(N) != N or int(r) != r:
        raise ValueError(f"ket labels must be integers, got (N={N}, r={r})")
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    if abs(r) > N:
        raise ValueError(f"|r| must not exceed N, got (N={N}, r={r})")
    if (N - r) % 2:
        raise ValueError(f"r must have the parity of N, got (N={N}, r={r})")


def r_values(N: int) -> np.ndarray:
    """Admissible ``r`` for subspace ``N`` in descending order."""
    return np.arange(N, -N - 1, -2)


def ladder_plus_coeff(N: int, r: int) -> float:
    """Amplitude of ``L+ |r>_N`` on ``|r+2>_N``."""
    check_ket(N, r)
    return 0.5 * np.sqrt((N + r + 2) * (N - r))


def ladder_minus_coeff(N: int, r: int) -> float:
    """Amplitude of ``L- |r>_N`` on ``|r-2>_N``."""
    check_ket(N, r)
    return 0.5 * np.sqrt((N + r) * (N - r + 2))


def l0_eigenvalue(r: int) -> float:
    return 0.5 * r


def casimir_eigenvalue(N: int) -> float:
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    return 0.25 * N * (N + 2)


def energy(params: "ModelParams", label: KetLabel) -> float:
    """Bare energy ``omega1*n1 + omega2*n2`` of a ket."""
    return params.omega1 * label.n1 + params.omega2 * label.n2


def su2_coherent_coeffs(N: int, theta: float, phi: float) -> np.ndarray:
    """Amplitudes of the SU(2) coherent state ``|tau>_N`` over ``n1 = 0..N``.

    ``tau = tan(theta/2) exp(-i phi)``; the amplitude on ``|n1, N-n1>`` is
    ``(1+|tau|^2)^(-N/2) sqrt(C(N, n1)) tau^n1``. The squared moduli form a
    binomial distribution with success probability ``sin^2(theta/2)``, which
    keeps large ``N`` free of overflow. At the pole ``theta = pi`` the limit
    vector ``(0, ..., 0, 1)`` is returned.
    """
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    n1 = np.arange(N + 1)
    half = 0.5 * theta
    c, s = np.cos(half), np.sin(half)
    if abs(c) < 1e-15:
        out = np.zeros(N + 1, dtype=complex)
        out[-1] = 1.0
        return out
    # log-space binomial; scipy's binom.pmf overflows for probabilities near 1e-306
    logc = gammaln(N + 1) - gammaln(n1 + 1) - gammaln(N - n1 + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ls, lc = np.log(abs(s)), np.log(abs(c))
        logmod = 0.5 * logc + np.where(n1 > 0, n1 * ls, 0.0) + np.where(N - n1 > 0, (N - n1) * lc, 0.0)
    mod = np.exp(logmod)
    sign = np.sign(s / c) if s != 0 else 1.0
    return mod * sign**n1 * np.exp(-1j * phi * n1)


@dataclass(frozen=True)
class ModeTransform:
    """Unitary 2x2 mixing ``(a1, a2)^T = U (b1, b2)^T``."""

    theta: float
    phi: float
    matrix: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        m = self.matrix
        if not np.allclose(m @ m.conj().T, np.eye(2), atol=1e-12):
            raise ValueError("mode transform matrix is not unitary")


def mode_transform(theta: float, phi: float) -> ModeTransform:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    ep, em = np.exp(0.5j * phi), np.exp(-0.5j * phi)
    m = np.array([[ep * c, em * s], [-ep * s, em * c]])
    return ModeTransform(theta, phi, m)


def annihilation(dim: int) -> np.ndarray:
    """Truncated single-mode annihilation operator."""
    return np.diag(np.sqrt(np.arange(1, dim)), k=1)


def two_mode_operators(nmax: int):
    """Return ``(a1, a2)`` on the truncated space ``n1, n2 <= nmax``.

    The product index is ``n1 * (nmax + 1) + n2``.
    """
    a = annihilation(nmax + 1)
    eye = np.eye(nmax + 1)
    return np.kron(a, eye), np.kron(eye, a)


def fock_index(n1: int, n2: int, nmax: int) -> int:
    return n1 * (nmax + 1) + n2
