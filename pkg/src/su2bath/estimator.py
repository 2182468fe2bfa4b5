"""Estimator-style front end: ``fit`` an initial state, ``predict`` it at later times."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._validation import check_density_state, check_params, check_times
from .density import DensityState
from .equilibrium import equilibrium_mixture, reduced_state
from .evolution import DEFAULT_N_MAX, BlockPropagator, _check_state, observables
from .generator import build_block_generator


class CollectiveDampingModel(BaseEstimator):
    """Two oscillators collectively damped by a thermal bath.

    Parameters
    ----------
    omega1, omega2 : float
        Oscillator frequencies, ``omega1 > omega2 > 0``.
    gamma : float
        Decay constant; sets the time unit.
    beta, nbar0 : float, optional
        Inverse temperature or resonant bath occupancy (give at most one;
        default is zero temperature).
    delta_omega1, delta_omega2 : float
        Bath-induced frequency shifts.
    n_max : int
        Largest total occupation accepted in an initial state.

    Attributes
    ----------
    params_ : ModelParams
    state_ : DensityState
        The fitted initial state.
    equilibrium_ : DensityState
        Long-time limit of the populations (``sum_N w_N f^(N)_eq``).
    """

    def __init__(self, omega1=2.0, omega2=1.0, gamma=1.0, beta=None, nbar0=None,
                 delta_omega1=0.0, delta_omega2=0.0, n_max=DEFAULT_N_MAX):
        self.omega1 = omega1
        self.omega2 = omega2
        self.gamma = gamma
        self.beta = beta
        self.nbar0 = nbar0
        self.delta_omega1 = delta_omega1
        self.delta_omega2 = delta_omega2
        self.n_max = n_max

    def fit(self, X, y=None):
        """Validate the initial state ``X`` and precompute block propagators.

        ``X`` is a :class:`DensityState` or a Fock-space density matrix.
        """
        self.params_ = check_params(self.omega1, self.omega2, self.gamma, self.beta, self.nbar0,
                                    self.delta_omega1, self.delta_omega2)
        state = check_density_state(X)
        _check_state(state, self.n_max)
        self.state_ = state
        self.propagators_ = {lab: BlockPropagator(build_block_generator(self.params_, lab))
                             for lab in state.blocks}
        weights = {lab.N: float(v.real.sum()) for lab, v in state.blocks.items() if lab.is_diagonal}
        self.equilibrium_ = equilibrium_mixture(self.params_, weights)
        return self

    def _check_fitted(self):
        if not hasattr(self, "state_"):
            raise NotFittedError("call fit before predict/transform")

    def predict(self, t):
        """Evolved state(s); a scalar ``t`` gives one state, an array gives a list."""
        self._check_fitted()
        times = check_times(t)
        out = []
        for s in times:
            out.append(DensityState({lab: self.propagators_[lab](c0, s)
                                     for lab, c0 in self.state_.blocks.items()}))
        return out[0] if np.ndim(t) == 0 else out

    def transform(self, t) -> np.ndarray:
        """``(n_times, 3)`` array of trace, purity and mean energy."""
        states = self.predict(np.atleast_1d(t))
        rows = []
        for s in states:
            o = observables(s, self.params_)
            rows.append((o["trace"], o["purity"], o["energy"]))
        return np.array(rows)

    def reduced(self, t, keep=1) -> np.ndarray:
        """Single-oscillator density matrix at time ``t``."""
        return reduced_state(self.predict(float(t)), keep)
