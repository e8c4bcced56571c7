"""Numerical spectral and scattering analysis of -d^2/dx^2 + alpha/x^12 - beta/x^6 on the half-line."""

__version__ = "0.1.0"

from .discretization import Grid, TridiagonalOperator, assemble_hamiltonian, build_grid, second_difference_energy
from .dynamics import (
    CrankNicolson,
    Trajectory,
    Wavepacket,
    evolve,
    gaussian_packet,
    step_crank_nicolson,
    verify_affine_bound,
    verify_radin_simon,
)
from .errors import DomainError, LJSpecError, NumericalError, ParameterError
from .potential import (
    LJParams,
    PotentialLandmarks,
    absence_criterion,
    barrier_truncation_point,
    eval_potential,
    landmarks,
    negative_part_moment,
)
from .scattering import (
    PacketSpec,
    PhaseShiftCurve,
    SMatrixSample,
    completeness_probe,
    levinson_defect,
    phase_shift,
    phase_shift_curve,
)
from .spectrum import (
    SpectrumReport,
    boundary_behavior_check,
    check_convergence,
    count_negative,
    essential_spectrum_probe,
    negative_eigenvalues,
    shooting_count,
)
