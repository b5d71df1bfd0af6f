"""Error taxonomy shared across the lab.

Every exception carries a short machine-readable ``code`` so the CLI can
emit one-line ``error: <code>: <detail>`` diagnostics and map the failure
onto an exit status.
"""


class CdwError(Exception):
    """Base class for all lab errors."""

    code = "error"

    def oneline(self):
        return "error: %s: %s" % (self.code, self)


class DomainError(CdwError):
    """Input outside the documented domain of an operation."""

    code = "domain"


class FieldOverflowError(CdwError):
    """Field values left the finite range during time stepping.

    Carries the step index at which the non-finite value first appeared.
    """

    code = "overflow"

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ConvergenceError(CdwError):
    """Minimizer hit its iteration cap without meeting tolerance.

    best_coeffs / best_energy hold the best point seen so far, so callers
    can record a partial result instead of losing the whole sweep point.
    """

    code = "convergence"

    def __init__(self, message, best_coeffs=None, best_energy=None):
        super().__init__(message)
        self.best_coeffs = best_coeffs
        self.best_energy = best_energy


class QuadratureError(CdwError):
    """Quadrature produced a non-positive or non-finite norm."""

    code = "quadrature"


class DiagnosticError(CdwError):
    """A measurement could not be made (e.g. no unique kink crossing)."""

    code = "diagnostic"


class ConfigError(CdwError):
    """Malformed or inconsistent run configuration.

    Carries the 1-based line number of the offending entry when known.
    """

    code = "config"

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line

    def oneline(self):
        if self.line is not None:
            return "error: %s: line %d: %s" % (self.code, self.line, self)
        return "error: %s: %s" % (self.code, self)
