"""Initial states: wavepacket expansions, product and correlated states, SU(2) coherent states."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from .density import DensityState
from .hilbert import su2_coherent_coeffs

NORM_TOL = 1e-6


class TruncationWarning(UserWarning):
    """The Fock expansion misses a noticeable part of the norm."""


def hermite_functions(nmax: int, x) -> np.ndarray:
    """Oscillator eigenfunctions ``<x|n>`` for ``n = 0..nmax``, shape ``(nmax+1, *x.shape)``.

    Uses the three-term recurrence on the normalised functions, which stays
    finite where the bare Hermite polynomials overflow.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1, *x.shape))
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, nmax):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


@dataclass(frozen=True)
class WavepacketSpec:
    """``phi(x) ~ ratio * exp(-(x-a)^2) + exp(-(x+a)^2)`` expanded up to ``nmax``."""

    a: float = 2.0
    ratio: float = 2.0
    nmax: int = 32

    def __post_init__(self):
        if self.nmax < 0:
            raise ValueError(f"nmax must be non-negative, got {self.nmax}")
        if self.ratio <= 0:
            raise ValueError(f"ratio must be positive, got {self.ratio}")

    def amplitudes(self) -> tuple[float, float]:
        """Normalised heights ``(N1, N2)`` of the two Gaussians."""
        overlap = math.exp(-2 * self.a**2)
        n2 = 1.0 / math.sqrt(math.sqrt(math.pi / 2) * (self.ratio**2 + 1 + 2 * self.ratio * overlap))
        return self.ratio * n2, n2

    def __call__(self, x):
        n1, n2 = self.amplitudes()
        x = np.asarray(x, dtype=float)
        return n1 * np.exp(-((x - self.a) ** 2)) + n2 * np.exp(-((x + self.a) ** 2))


def gaussian_superposition_coeffs(spec: WavepacketSpec) -> np.ndarray:
    """Expansion coefficients ``c_n = <n|phi>`` for ``n = 0..nmax`` by adaptive quadrature.

    Emits :class:`TruncationWarning` if ``sum c_n^2 < 1 - 1e-3``.
    """
    half = abs(spec.a) + 12.0
    c, _ = quad_vec(lambda x: hermite_functions(spec.nmax, x) * spec(x), -half, half,
                    epsabs=1e-14, epsrel=1e-12, points=[-spec.a, spec.a])
    deficit = norm_deficit(c)
    if deficit > 1e-3:
        warnings.warn(f"nmax={spec.nmax} misses {deficit:.3g} of the wavepacket norm", TruncationWarning)
    return c


def norm_deficit(c) -> float:
    return float(1.0 - np.sum(np.abs(c) ** 2))


def _normalised(c, what: str) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    nrm = float(np.sum(np.abs(c) ** 2))
    if abs(nrm - 1) > NORM_TOL:
        raise ValueError(f"{what} coefficients must be normalised, sum |c|^2 = {nrm}")
    return c / math.sqrt(nrm)


def product_state(c) -> DensityState:
    """``sum c_n c_m^* |n,0><m,0|``: oscillator 1 in ``sum c_n |n>``, oscillator 2 in vacuum.

    Input within ``1e-6`` of unit norm is renormalised; anything else is rejected.
    """
    c = _normalised(c, "product state")
    nz = np.flatnonzero(c)
    return DensityState.from_elements(
        (int(n), int(m), int(n), int(m), c[n] * np.conj(c[m])) for n in nz for m in nz
    )


def correlated_state(c) -> DensityState:
    """Pure state ``sum c_n |n,n>``; only even ``N`` subspaces are populated."""
    c = _normalised(c, "correlated state")
    nz = np.flatnonzero(c)
    return DensityState.from_elements(
        (2 * int(n), 2 * int(m), 0, 0, c[n] * np.conj(c[m])) for n in nz for m in nz
    )


def coherent_density(N: int, theta: float, phi: float) -> DensityState:
    """``|tau>_N <tau|`` for the SU(2) coherent state; lives in the ``(N, N)`` blocks."""
    amp = su2_coherent_coeffs(N, theta, phi)
    elems = []
    for n1 in range(N + 1):
        for m1 in range(N + 1):
            v = amp[n1] * np.conj(amp[m1])
            if v != 0:
                elems.append((N, N, 2 * n1 - N, 2 * m1 - N, v))
    return DensityState.from_elements(elems)
