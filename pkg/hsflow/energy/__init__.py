from .dissipation import (
    DissipationAtom,
    atoms_frame,
    balance_frame,
    dissipated_mass,
    dissipation_atoms,
    energy_balance,
)
from .test_functions import BumpTestFunction, TestFunction
from .trajectories import (
    ConservativeWitness,
    DissipativeTrajectory,
    Trajectory,
    conservative_witness,
)
from .weak_form import (
    QUADRATURE_TOLERANCE,
    conservative_witness_check,
    defect_pairing,
    dissipation_inequality_check,
    dissipation_residual,
    energy_flux,
    weighted_energy,
)

__all__ = [
    "DissipationAtom",
    "atoms_frame",
    "balance_frame",
    "dissipated_mass",
    "dissipation_atoms",
    "energy_balance",
    "BumpTestFunction",
    "TestFunction",
    "ConservativeWitness",
    "DissipativeTrajectory",
    "Trajectory",
    "conservative_witness",
    "QUADRATURE_TOLERANCE",
    "conservative_witness_check",
    "defect_pairing",
    "dissipation_inequality_check",
    "dissipation_residual",
    "energy_flux",
    "weighted_energy",
]
