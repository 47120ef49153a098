"""Finite-dimensional Berezin quantization on truncated Bargmann-Fock spaces."""

from .bosonization import (
    FermionVector,
    GrassmannPoly,
    bosonize,
    conjugate_operator,
    debosonize,
    grassmann_derivative,
    super_ccr_residual,
)
from .errors import (
    ConfigError,
    DimensionError,
    DomainError,
    FockQuantError,
    NonRealSymbolError,
    QuadratureMismatchError,
    SymbolSyntaxError,
)
from .fock import (
    CoherentState,
    FockVector,
    apply_ladder,
    apply_shift,
    coherent_state,
    fock_basis,
    inner_product,
    resolution_of_identity_residual,
)
from .propagator import (
    AmplitudeReport,
    SliceConfig,
    chernoff_amplitude,
    convergence_sweep,
    exact_amplitude,
    project_modes,
    slice_operator,
)
from .quantization import (
    HEAT_CONSTANT,
    OperatorMatrix,
    antinormal_quantize,
    antinormal_symbol_of,
    kernel_diag,
    normal_quantize,
    normal_symbol_of,
)
from .symbols import (
    PolySymbol,
    directional_derivative,
    evaluate,
    gaussian_moment,
    heat_transform,
    multi_indices,
    poly_arith,
)

__version__ = "0.1.0"
