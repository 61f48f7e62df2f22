"""Python interface to the aeplab C++ core.

Finite-size laboratory for the entropy equipartition of ergodic quantum spin
chains: block states, typical projectors, beta compression exponents,
sublattice ergodic decomposition and a typical-subspace codec.
"""

from ._aeplab import (
    CapacityError,
    ContractError,
    Model,
    NumericalError,
    ParameterError,
    StructuralError,
    UnsupportedError,
    analyze,
    beta,
    block_entropy,
    block_spectrum,
    compress,
    decompose,
    load_model,
    mean_entropy,
    parse_model,
    selftest,
    sweep,
)

__all__ = [
    "CapacityError",
    "ContractError",
    "Model",
    "NumericalError",
    "ParameterError",
    "StructuralError",
    "UnsupportedError",
    "analyze",
    "beta",
    "block_entropy",
    "block_spectrum",
    "compress",
    "decompose",
    "load_model",
    "mean_entropy",
    "parse_model",
    "selftest",
    "sweep",
]
