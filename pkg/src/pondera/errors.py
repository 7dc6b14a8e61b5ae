class PonderaError(Exception):
    """Base class for all errors raised by pondera."""


class ParameterError(PonderaError, ValueError):
    pass


class DegenerateFrequencyError(PonderaError, ArithmeticError):
    """The linear-response matrix is (numerically) singular at ``omega``."""

    def __init__(self, omega, amplification):
        self.omega = omega
        self.amplification = amplification
        super().__init__(f"degenerate frequency omega={omega!r}: response amplification {amplification:.3g}")


class CommutatorError(PonderaError):
    """Output quadratures fail the canonical-commutator consistency checks."""


class AssemblyError(PonderaError):
    pass


class BlockStructureError(PonderaError, ValueError):
    pass


class UnphysicalChannelError(PonderaError, ValueError):
    pass


class ConfigError(PonderaError, ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("\n".join(self.problems))
