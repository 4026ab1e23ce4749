"""Exception hierarchy shared by every module of the package."""


class ConicSensError(Exception):
    """Base class for all package errors."""


class DimensionError(ConicSensError, ValueError):
    """Array shapes do not agree with each other or with the cone."""


class SchemaError(ConicSensError, ValueError):
    """A problem document does not follow the JSON schema.

    Parameters
    ----------
    message : str
        Human readable diagnostic.
    field : str, optional
        Dotted path of the offending field, e.g. ``cone.blocks[1].dim``.
    line : int, optional
        Line number in the source document when known.
    """

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


class EmptyInterior(ConicSensError):
    """The cone has an empty interior, so no strictly interior point exists."""


class InteriorTestUnsupported(ConicSensError):
    """Interior tests are not available for raw generated (V-rep) blocks."""


class BarrierUnsupported(ConicSensError):
    """The barrier (and hence the solver) only handles orthant and SOC blocks."""


class NotInterior(ConicSensError, ValueError):
    """A barrier was evaluated at a point outside the interior of the cone."""


class NotPolyhedral(ConicSensError):
    """A polyhedral-only operation received a second-order or generated block."""


class NumericalFailure(ConicSensError):
    """The solver could not reach a classified status, or Inf - Inf arose."""


class HypothesisViolation(ConicSensError):
    """A regularity hypothesis required by a sensitivity operation fails.

    ``hypothesis`` is one of ``"primal_strict_feasibility"``,
    ``"dual_strict_feasibility"``, ``"finite_value"``, ``"has_solution"``
    or ``"range"``.
    """

    def __init__(self, hypothesis, detail=""):
        self.hypothesis = hypothesis
        self.detail = detail
        msg = f"hypothesis '{hypothesis}' violated"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class RangeTestFailed(HypothesisViolation):
    """The objective direction is not in the range of A^T."""

    def __init__(self, residual):
        self.residual = residual
        super().__init__("range", f"least-squares residual {residual:.3e}")
