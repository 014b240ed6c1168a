"""Purity-like invariants of multi-photon states in linear optical networks."""

__version__ = "0.1.0"

from .fock import (  # noqa: E402
    FockBasis,
    FockState,
    MultiPhotonUnitary,
    ScatteringUnitary,
    enumerate_fock_basis,
    permanent,
    photonic_homomorphism,
    submatrix_for_transition,
)
from .operators import HermitianFrame, build_frame, ggm_basis, js_map  # noqa: E402
from .transfer import (  # noqa: E402
    DensityState,
    InvariantSet,
    TransferMatrix,
    density_vector,
    htm,
    htm_scattering,
    invariants,
    itprime_range,
    min_tomography_settings,
)

__all__ = [
    "FockBasis",
    "FockState",
    "MultiPhotonUnitary",
    "ScatteringUnitary",
    "enumerate_fock_basis",
    "permanent",
    "photonic_homomorphism",
    "submatrix_for_transition",
    "HermitianFrame",
    "build_frame",
    "ggm_basis",
    "js_map",
    "DensityState",
    "InvariantSet",
    "TransferMatrix",
    "density_vector",
    "htm",
    "htm_scattering",
    "invariants",
    "itprime_range",
    "min_tomography_settings",
]
