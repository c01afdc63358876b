"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: input/construction/budget problems are
usage errors (1), numerical failures are 2, and a measured quantity
exceeding a proved bound -- the interesting case -- is 3.
"""


class PaleyError(Exception):
    """Base class for all toolkit errors."""


class InputError(PaleyError, ValueError):
    """An argument violates a documented precondition."""


class ConstructionError(PaleyError, ValueError):
    """An object cannot be built for this prime (wrong congruence class)."""


class BudgetExceededError(PaleyError, RuntimeError):
    """Exhaustive enumeration would exceed the configured budget.

    Callers should retry in sampled/budgeted mode.
    """


class NumericalError(PaleyError, ArithmeticError):
    """A numerical routine failed or an exact identity did not hold."""


class CertificateError(PaleyError, ValueError):
    """A witness failed its soundness check (not transitive, misordered...)."""


class BoundViolationError(PaleyError, RuntimeError):
    """A measured extremal value exceeded a closed-form bound.

    Carries the offending ledger payload in ``details``.
    """

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details
