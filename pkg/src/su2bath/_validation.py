"""Input checks shared by the estimator and the CLI."""

from __future__ import annotations

import math
import numbers

import numpy as np

from .bath import ModelParams
from .density import DensityState


def check_scalar(value, name, *, min_val=None, include_min=True, allow_inf=False) -> float:
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if math.isnan(value) or (math.isinf(value) and not allow_inf):
        raise ValueError(f"{name} must be finite, got {value}")
    if min_val is not None:
        bad = value < min_val if include_min else value <= min_val
        if bad:
            op = ">=" if include_min else ">"
            raise ValueError(f"{name} must be {op} {min_val}, got {value}")
    return value


def check_params(omega1, omega2, gamma, beta=None, nbar0=None,
                 delta_omega1=0.0, delta_omega2=0.0) -> ModelParams:
    """Build :class:`ModelParams`; exactly one of ``beta`` / ``nbar0`` may be set."""
    if beta is not None and nbar0 is not None:
        raise ValueError("give either beta or nbar0, not both")
    kw = dict(
        omega1=check_scalar(omega1, "omega1", min_val=0, include_min=False),
        omega2=check_scalar(omega2, "omega2", min_val=0, include_min=False),
        gamma=check_scalar(gamma, "gamma", min_val=0, include_min=False),
        delta_omega1=check_scalar(delta_omega1, "delta_omega1"),
        delta_omega2=check_scalar(delta_omega2, "delta_omega2"),
    )
    if nbar0 is not None:
        return ModelParams.from_nbar0(check_scalar(nbar0, "nbar0", min_val=0), **kw)
    if beta is None:
        beta = math.inf
    return ModelParams(beta=check_scalar(beta, "beta", min_val=0, include_min=False, allow_inf=True), **kw)


def check_density_state(X, tol: float = 1e-10) -> DensityState:
    """Accept a :class:`DensityState` or a square Fock-space matrix.

    A matrix of size ``(nmax+1)^2`` is read with index ``n1*(nmax+1) + n2``.
    The result must be Hermitian with unit trace.
    """
    if isinstance(X, DensityState):
        state = X
    else:
        X = np.asarray(X)
        if X.ndim != 2 or X.shape[0] != X.shape[1]:
            raise ValueError(f"expected a square density matrix, got shape {X.shape}")
        side = math.isqrt(X.shape[0])
        if side * side != X.shape[0]:
            raise ValueError(f"matrix size {X.shape[0]} is not (nmax+1)^2")
        state = DensityState.from_fock_matrix(X, side - 1)
    if not state.blocks:
        raise ValueError("density state is empty")
    err = state.hermiticity_error()
    if err > tol:
        raise ValueError(f"density state is not Hermitian (pairing error {err:.3e})")
    tr = state.trace()
    if abs(tr - 1) > tol:
        raise ValueError(f"density state must have unit trace, got {tr}")
    return state


def check_times(t) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.ndim != 1:
        raise ValueError("times must be a scalar or 1-d array")
    if np.any(~np.isfinite(t)) or np.any(t < 0):
        raise ValueError("times must be finite and non-negative")
    return t
