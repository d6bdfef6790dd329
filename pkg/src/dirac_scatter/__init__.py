"""Radial Dirac equation with Coulomb-type potential: closed-form Coulomb
solutions, perturbed regular and Jost solutions, stationary and dynamical
scattering matrices, spectral transforms and their comparison."""
from .coulomb import Case, EnergyPoint, SystemParams, make_energy
from .dynamics import DeviationFactorDynamical, LimitTrace, ergodic_check, s_dyn
from .errors import DiracScatterError
from .perturb import PerturbationSpec, solve_jost, solve_regular
from .scatter import DeviationFactorStationary, ScatteringData, scattering_data
from .spectral import Packet

__all__ = [
    "Case", "EnergyPoint", "SystemParams", "make_energy",
    "DeviationFactorDynamical", "LimitTrace", "ergodic_check", "s_dyn",
    "DiracScatterError",
    "PerturbationSpec", "solve_jost", "solve_regular",
    "DeviationFactorStationary", "ScatteringData", "scattering_data",
    "Packet",
]

__version__ = "0.1.0"
