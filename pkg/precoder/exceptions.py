"""Exception hierarchy.

ConfigError subclasses describe bad inputs (CLI exit code 2); ComputationError
subclasses describe numerical or solver failures (exit code 3).
"""

from typing import Any


class PrecoderError(Exception):
    """Base class for every error raised by the library."""


class ConfigError(PrecoderError):
    """Invalid channel, solver or simulation input."""


class NonIncreasingAlphabet(ConfigError):
    pass


class BadPmf(ConfigError):
    pass


class NegativeNoise(ConfigError):
    pass


class ZeroNoise(ConfigError):
    """Operation needs Gaussian noise; noise-free channels go through `noise_free`."""


class IndexOutOfRange(ConfigError):
    pass


class ComputationError(PrecoderError):
    """A solver or integrator could not produce a result."""


class QuadratureNoConvergence(ComputationError):
    pass


class NoConvergence(ComputationError):
    def __init__(self, message: str, iterations: int):
        super().__init__(message)
        self.iterations = iterations

    def __reduce__(self):
        return type(self), (str(self), self.iterations)


class RootNotBracketed(ComputationError):
    pass


class Infeasible(ComputationError):
    pass


class Unbounded(ComputationError):
    pass


class NotArithmeticProgression(ComputationError):
    pass


class UnknownOutput(ComputationError):
    pass


class BudgetExceeded(ComputationError):
    """Search stopped at its node budget.

    `incumbent` is the best solution found so far (or None) and `gap` the
    difference between its objective and the best known lower bound.
    """

    def __init__(self, message: str, nodes: int, incumbent: Any = None, gap: float = float("inf")):
        super().__init__(message)
        self.nodes = nodes
        self.incumbent = incumbent
        self.gap = gap

    def __reduce__(self):
        return type(self), (str(self), self.nodes, self.incumbent, self.gap)
