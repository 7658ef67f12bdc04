class FormError(ValueError):
    """Rejected input to an exterior-algebra or form-field operation."""


class NotCSymplecticError(FormError):
    """A form that was required to be C-symplectic is not."""


class ModelError(ValueError):
    """Invalid semi-flat model specification."""


class DomainError(ValueError):
    """A point lies outside the chart domain of a model."""


class FlowError(RuntimeError):
    """Numerical failure while integrating a Moser flow."""


class LatticeError(ValueError):
    """Rejected input to a lattice operation."""


class NoSolutionError(LatticeError):
    """A twistor line has no point orthogonal to the requested sublattice."""
