"""Exception hierarchy used across the toolkit."""


class HambifError(Exception):
    """Base class for all toolkit errors."""


class NonSymmetric(HambifError):
    """A matrix required to be symmetric violates the symmetry tolerance."""


class ConvergenceFailure(HambifError):
    """An eigensolver failed, or an eigenvalue cluster is defective."""


class NotAnEigenvalue(HambifError):
    """No eigenvalue of the matrix lies within tolerance of the requested one."""


class EvaluationFailure(HambifError):
    """A user-supplied energy/derivative evaluator raised an exception."""


class NoConvergence(HambifError):
    """An iterative solve (Newton) failed to reach its tolerance."""


class DegenerateSection(HambifError):
    """The section-restricted Hessian is singular beyond tolerance."""


class UnknownPreset(HambifError):
    """Requested preset name is not registered."""


class MissingParameter(HambifError):
    """A preset parameter without a default was not supplied."""


class NoImaginaryPairs(HambifError):
    """The linearization has no purely imaginary eigenvalue pairs."""


class EpsilonUnderflow(HambifError):
    """No isolation interval around the candidate level could be found."""


class Degenerate(HambifError):
    """The section Jacobian is singular; the nondegenerate degree path fails."""


class NotAMinimum(HambifError):
    """Certification of an isolated local minimum on the section failed."""


class BoundaryZero(HambifError):
    """The section field has a (near-)zero on the probe sphere."""


class Unreliable(HambifError):
    """Degree runs with independent seeds disagree."""


class EmptyKernel(HambifError):
    """The mode-1 linearization has no numerical kernel at the candidate level."""


class WrongBranch(HambifError):
    """The solver left the mode-1 branch (dominant Fourier mode is not k = 1)."""


class ConfigParse(HambifError):
    """A run configuration file or flag set could not be parsed."""
