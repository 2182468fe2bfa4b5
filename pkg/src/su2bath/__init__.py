"""Reduced dynamics of two oscillators collectively damped by a thermal bath."""

from .bath import FormFactor, ModelParams, decay_rate, occupancy, params_from_form_factor, renorm_shifts
from .density import BlockLabel, DensityState
from .equilibrium import (
    EquilibriumSpec,
    canonical_check,
    equilibrium_spec,
    equilibrium_state,
    reduced_state,
    zero_T_invariant_family,
)
from .estimator import CollectiveDampingModel
from .evolution import (
    TimeSeries,
    closed_form_low_subspaces,
    evolve,
    evolve_many,
    observables,
    to_tilde,
)
from .generator import BlockGenerator, ResourceLimitError, build_block_generator, dense_oracle
from .hilbert import KetLabel, ModeTransform, mode_transform
from .render import Grid, density_grid
from .states import (
    WavepacketSpec,
    coherent_density,
    correlated_state,
    gaussian_superposition_coeffs,
    product_state,
)

__version__ = "0.1.0"
