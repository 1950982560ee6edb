"""Single-photon polarization over discretized momentum modes.

Correlation matrices, Stokes parameters, effective density matrices and
four-mode density Mueller matrices of scattering ensembles.
"""

from qpolar.correlation import (
    CorrelationMatrix,
    StokesVector,
    correlation_matrix,
    effective_density_2x2,
    effective_density_3x3,
    photon_number,
    stokes_parameters,
    submatrix,
)
from qpolar.errors import (
    DegenerateBeamError,
    InconsistencyError,
    QpolarError,
    SceneParseError,
    ValidationError,
)
from qpolar.grid import (
    FrameMap,
    ModeGrid,
    build_grid,
    cap_grid,
    explicit_grid,
    frame_map,
    polarization_triad,
    rotated_basis,
    rotation_matrix,
    sphere_grid,
    transverse_delta,
)
from qpolar.scattering import (
    MuellerTensor,
    ScatteringEnsemble,
    apply_ensemble,
    compose,
    identity,
    mode_coupler,
    mueller_ensemble,
    mueller_single,
    pauli_depolarizer,
    polarizer,
    propagate_stokes,
    random_unitary_ensemble,
    reduce_single_mode,
    retarder,
    rotator,
)
from qpolar.state import (
    PhotonState,
    StokesField,
    mixed_state,
    plane_wave_state,
    state_from_stokes,
    two_mode_stokes,
    validate,
    wave_packet_state,
)

__version__ = "0.1.0"
