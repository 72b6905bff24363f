"""Exception hierarchy shared by all sub-packages."""


class SmecticError(Exception):
    """Base class for every error raised by smectic_bps."""


class ConfigError(SmecticError, ValueError):
    """Invalid numeric parameter or configuration value."""


class GridError(SmecticError, ValueError):
    """Grid/field mismatch, non-finite samples or too few samples for a stencil."""


class DegenerateJumpError(ConfigError):
    """A genuine jump (a_plus != a_minus) was required."""


class FormulaMismatchError(SmecticError):
    """The two closed forms of the jump cost disagree."""


class ProfileStepError(SmecticError):
    """The transition ODE left [0, 1]; the step has to be refined."""


class InvalidHeatDataError(SmecticError, ValueError):
    """Non-positive heat solution, so the logarithm in the Hopf-Cole map is undefined."""


class BoundaryConstraintError(SmecticError, ValueError):
    """Pinned boundary rows of a cell-problem field do not hold their values."""


class InadmissibleDefectError(SmecticError, ValueError):
    """A defect segment whose normal is not parallel to its jump vector."""

    def __init__(self, message: str, segment_index: int):
        super().__init__(message)
        self.segment_index = segment_index
