"""Bifurcation detection and periodic-orbit verification for symmetric
Hamiltonian systems z' = J grad H(z) on R^(2N).

The toolkit locates candidate bifurcation levels lambda = 1/beta from the
purely imaginary spectrum of the linearization at a group orbit of
equilibria, checks the computable criteria for each level (nonresonance,
Morse-index jumps of the mode-1 block matrix, signature conditions on
invariant subspaces, Brouwer degree on the orthogonal section), and
verifies confirmed predictions by computing the emanating branch of
periodic orbits with a harmonic-balance Newton solver.
"""

from . import analysis, cli, degree, errors, linalg, model, orbits
from .analysis import (
    AnalyzeOptions,
    BifurcationCandidate,
    ResonanceSet,
    SpectralReport,
    analyze,
    check_nonresonance,
    morse_jump,
    resonance_set,
    spectral_report,
    t_matrix,
)
from .model import (
    EquilibriumOrbit,
    HamiltonianSystem,
    SymmetryGroup,
    invariance_check,
    newtonian_to_hamiltonian,
    preset,
    refine_equilibrium,
    satellite_equilibrium_distance,
)
from .orbits import Branch, FourierOrbit, continue_branch, minimal_period_check, solve_orbit

__version__ = "0.1.0"

__all__ = [
    "analysis",
    "cli",
    "degree",
    "errors",
    "linalg",
    "model",
    "orbits",
    "AnalyzeOptions",
    "BifurcationCandidate",
    "ResonanceSet",
    "SpectralReport",
    "analyze",
    "check_nonresonance",
    "morse_jump",
    "resonance_set",
    "spectral_report",
    "t_matrix",
    "EquilibriumOrbit",
    "HamiltonianSystem",
    "SymmetryGroup",
    "invariance_check",
    "newtonian_to_hamiltonian",
    "preset",
    "refine_equilibrium",
    "satellite_equilibrium_distance",
    "Branch",
    "FourierOrbit",
    "continue_branch",
    "minimal_period_check",
    "solve_orbit",
    "__version__",
]
