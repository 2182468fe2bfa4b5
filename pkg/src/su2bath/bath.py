"""Thermal bath: model constants, occupancies, decay rate and frequency shifts."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the reduced dynamics (hbar = k_B = 1).

    ``beta = inf`` is zero temperature. The three numbers that enter the
    generator, ``gamma``, ``delta_omega1`` and ``delta_omega2``, are set
    directly; :func:`params_from_form_factor` derives them from a bath model.
    """

    omega1: float = 2.0
    omega2: float = 1.0
    beta: float = math.inf
    gamma: float = 1.0
    delta_omega1: float = 0.0
    delta_omega2: float = 0.0

    def __post_init__(self):
        if not (self.omega1 > self.omega2 > 0):
            raise ValueError(
                f"need omega1 > omega2 > 0, got omega1={self.omega1}, omega2={self.omega2}"
            )
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive or inf, got {self.beta}")

    @classmethod
    def from_nbar0(cls, nbar0: float, **kwargs) -> "ModelParams":
        """Build params whose resonant occupancy equals ``nbar0``."""
        if nbar0 < 0:
            raise ValueError(f"nbar0 must be non-negative, got {nbar0}")
        p = cls(**kwargs)
        beta = math.inf if nbar0 == 0 else math.log1p(1.0 / nbar0) / p.omega0
        return replace(p, beta=beta)

    @property
    def omega0(self) -> float:
        return self.omega1 - self.omega2

    @property
    def omega0_prime(self) -> float:
        return self.omega1 + self.omega2

    @property
    def delta_omega0(self) -> float:
        return self.delta_omega1 - self.delta_omega2

    @property
    def delta_omega0_prime(self) -> float:
        return self.delta_omega1 + self.delta_omega2

    @property
    def nbar0(self) -> float:
        return occupancy(self.omega0, self.beta)


def occupancy(omega: float, beta: float) -> float:
    """Bose-Einstein occupancy ``1/(exp(omega*beta) - 1)``."""
    if not omega > 0:
        raise ValueError(f"occupancy needs omega > 0, got {omega}")
    if math.isinf(beta):
        return 0.0
    x = omega * beta
    return math.exp(-x) / -math.expm1(-x)


@dataclass(frozen=True)
class FormFactor:
    """Bath coupling profile ``lambda * v(omega)``.

    ``exponential-cutoff``: ``|v|^2 = exp(-omega/omega_c)``.
    ``ohmic-exponential``: ``|v|^2 = (omega/omega_c) exp(-omega/omega_c)``;
    this is the only kind usable at finite temperature, because the thermal
    shift integral diverges at ``omega -> 0`` for a flat profile.
    """

    kind: str = "ohmic-exponential"
    lam: float = 0.1
    omega_c: float = 5.0

    KINDS = ("exponential-cutoff", "ohmic-exponential")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown form factor kind {self.kind!r}; expected one of {self.KINDS}")
        if not self.omega_c > 0:
            raise ValueError(f"omega_c must be positive, got {self.omega_c}")

    def v2(self, omega):
        x = np.asarray(omega, dtype=float) / self.omega_c
        out = np.exp(-x)
        if self.kind == "ohmic-exponential":
            out = x * out
        return out


def decay_rate(ff: FormFactor, omega0: float) -> float:
    """``gamma = 2 pi lambda^2 |v(omega0)|^2``."""
    if not omega0 > 0:
        raise ValueError(f"omega0 must be positive, got {omega0}")
    return 2 * math.pi * ff.lam**2 * float(ff.v2(omega0))


def _thermal(beta):
    if math.isinf(beta):
        return lambda w: 0.0
    return lambda w: math.exp(-w * beta) / -math.expm1(-w * beta)


def pv_window(g, omega0: float, half_width: float) -> float:
    """``P int_0^inf g(w)/(w - omega0) dw`` by symmetric-window subtraction.

    Inside ``[omega0 - h, omega0 + h]`` the integrand is replaced by
    ``(g(w) - g(omega0))/(w - omega0)``; the subtracted constant has zero
    principal value over a symmetric window.
    """
    h = half_width
    if not 0 < h <= omega0:
        raise ValueError("window half-width must lie in (0, omega0]")
    g0 = g(omega0)

    def inner(w):
        d = w - omega0
        return (g(w) - g0) / d if d != 0 else 0.0

    opts = dict(epsabs=1e-13, epsrel=1e-12, limit=400)
    left = quad(lambda w: g(w) / (w - omega0), 0.0, omega0 - h, **opts)[0] if omega0 > h else 0.0
    mid = quad(inner, omega0 - h, omega0 + h, points=[omega0], **opts)[0]
    right = quad(lambda w: g(w) / (w - omega0), omega0 + h, np.inf, **opts)[0]
    return left + mid + right


def pv_folded(g, omega0: float) -> float:
    """Same principal value via ``w = omega0 (1 + u)`` and folding ``u -> -u``.

    ``P int_{-1}^{1} G(u)/u du = int_0^1 (G(u) - G(-u))/u du``, the rest is regular.
    """

    def G(u):
        return g(omega0 * (1.0 + u))

    opts = dict(epsabs=1e-13, epsrel=1e-12, limit=400)
    core = quad(lambda u: (G(u) - G(-u)) / u if u > 0 else 0.0, 0.0, 1.0, **opts)[0]
    tail = quad(lambda u: G(u) / u, 1.0, np.inf, **opts)[0]
    return core + tail


def _shift_integrands(ff: FormFactor, beta: float):
    nk = _thermal(beta)
    vac = lambda w: float(ff.v2(w))  # noqa: E731
    th = lambda w: float(ff.v2(w)) * nk(w) if w > 0 else 0.0  # noqa: E731
    return vac, th


def renorm_shifts(ff: FormFactor, params: ModelParams, method: str = "window",
                  half_width: float | None = None) -> tuple[float, float]:
    """Frequency shifts ``(delta_omega1, delta_omega2)`` in the continuum limit.

    ``delta_omega1 = lam^2 P int |v|^2 (n(w)+1)/(w - omega0)`` and
    ``delta_omega2 = -lam^2 P int |v|^2 n(w)/(w - omega0)``.
    """
    if not math.isinf(params.beta) and ff.kind != "ohmic-exponential":
        raise ValueError(
            "thermal frequency shift diverges in the infrared for a "
            f"{ff.kind!r} form factor; use kind='ohmic-exponential' at finite beta"
        )
    w0 = params.omega0
    if half_width is None:
        half_width = 0.5 * min(w0, ff.omega_c)
    if method == "window":
        pv = lambda g: pv_window(g, w0, half_width)  # noqa: E731
    elif method == "folded":
        pv = lambda g: pv_folded(g, w0)  # noqa: E731
    else:
        raise ValueError(f"unknown method {method!r}")
    vac, th = _shift_integrands(ff, params.beta)
    lam2 = ff.lam**2
    vacuum = pv(vac)
    thermal = 0.0 if math.isinf(params.beta) else pv(th)
    return lam2 * (vacuum + thermal), -lam2 * thermal


def thermal_shift_parts(ff: FormFactor, params: ModelParams) -> tuple[float, float]:
    """Thermal contributions to ``(delta_omega1, delta_omega2)`` only."""
    d1, d2 = renorm_shifts(ff, params)
    vac, _ = renorm_shifts(ff, replace(params, beta=math.inf))
    return d1 - vac, d2


def params_from_form_factor(ff: FormFactor, omega1: float, omega2: float,
                            beta: float = math.inf) -> ModelParams:
    base = ModelParams(omega1=omega1, omega2=omega2, beta=beta)
    gamma = decay_rate(ff, base.omega0)
    d1, d2 = renorm_shifts(ff, base)
    return replace(base, gamma=gamma, delta_omega1=d1, delta_omega2=d2)
