"""Error types raised by the toolkit.

Everything derives from ResokitError so callers can catch the whole family;
input-validation errors are also ValueErrors, solver failures RuntimeErrors.
"""


class ResokitError(Exception):
    """Base class for all toolkit errors."""


class InvariantError(ResokitError, ValueError):
    """A domain object was constructed with invariant-violating values."""


class UnitError(ResokitError, ValueError):
    """A quantity string could not be parsed."""


class SchemaError(ResokitError, ValueError):
    """A config/data file does not match its documented schema."""


class UnknownPresetError(ResokitError, ValueError):
    """Requested built-in preset (material, profile) does not exist."""


class SingularDrivePointError(ResokitError, ValueError):
    """Drive point sits on a node of the requested mode shape."""


class RootSearchError(ResokitError, RuntimeError):
    """No root of the characteristic equation inside the search window."""


class MeshError(ResokitError, ValueError):
    """Mesh generation request is infeasible or the mesh is degenerate."""


class EigenSolveError(ResokitError, RuntimeError):
    """Generalized eigensolver failed or produced out-of-tolerance modes."""


class RigidBodyModeError(ResokitError, RuntimeError):
    """Expected rigid-body modes were not found (assembly error)."""


class AmbiguousAngularOrderError(ResokitError, RuntimeError):
    """Boundary harmonic spectrum has no dominant component.

    Carries the two competing harmonic indices in ``candidates``.
    """

    def __init__(self, message, candidates):
        super().__init__(message)
        self.candidates = tuple(candidates)


class UnboundedResistanceError(ResokitError, ValueError):
    """Zero bias voltage: the motional resistance is not defined."""


class InstabilityError(ResokitError, ValueError):
    """Electrostatic spring exceeds mechanical stiffness (or pull-in margin).

    ``critical_voltage`` is the largest safe bias for the same design.
    """

    def __init__(self, message, critical_voltage=None):
        super().__init__(message)
        self.critical_voltage = critical_voltage


class DetectionMismatchError(ResokitError, ValueError):
    """Operation requires a different transducer detection kind."""


class SpectrumError(ResokitError, ValueError):
    """Invalid spectrum request or spectrum content."""


class PeakAtBoundaryError(SpectrumError):
    """Spectrum maximum sits on the grid edge; peak is not resolved."""


class MissingBandwidthError(SpectrumError):
    """Half-power crossings fall outside the sampled grid."""


class FabConstraintError(ResokitError, ValueError):
    """Gap-correction input violates a process constraint."""


class InfeasibleDesignError(ResokitError, RuntimeError):
    """Optimizer found no feasible candidate.

    ``binding_constraints`` maps constraint name to the number of grid
    points it eliminated.
    """

    def __init__(self, message, binding_constraints=None):
        super().__init__(message)
        self.binding_constraints = dict(binding_constraints or {})
