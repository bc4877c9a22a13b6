"""Exception hierarchy shared by all modules."""


class ConsensusError(Exception):
    """Base class for every error raised by this package."""


class StochasticityError(ConsensusError, ValueError):
    pass


class NegativeEntry(StochasticityError):
    def __init__(self, row, col, value):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"negative entry {value!r} at ({row}, {col})")


class RowSumViolation(StochasticityError):
    def __init__(self, row, total):
        self.row, self.total = row, total
        self.deviation = abs(total - 1.0)
        super().__init__(f"row {row} sums to {total!r} (deviation {self.deviation:.3g})")


class ColumnSumViolation(StochasticityError):
    def __init__(self, col, total):
        self.col, self.total = col, total
        self.deviation = abs(total - 1.0)
        super().__init__(f"column {col} sums to {total!r} (deviation {self.deviation:.3g})")


class DimensionMismatch(ConsensusError, ValueError):
    pass


class KindMismatch(ConsensusError, ValueError):
    pass


class TimeOrder(ConsensusError, ValueError):
    pass


class EmptySequence(ConsensusError, ValueError):
    pass


class NoConvergence(ConsensusError, RuntimeError):
    pass


class PreconditionA1(ConsensusError, ValueError):
    pass


class NonpositiveMass(ConsensusError, ValueError):
    pass


class MassMismatch(ConsensusError, ValueError):
    pass


class NonpositiveDenominator(ConsensusError, ValueError):
    pass


class HorizonExceeded(ConsensusError, IndexError):
    pass


class OracleUnavailable(ConsensusError, NotImplementedError):
    pass


class NonFiniteState(ConsensusError, FloatingPointError):
    pass


class ZeroDiagonalDivisor(ConsensusError, ZeroDivisionError):
    pass


class EmbeddingUnavailable(ConsensusError, KeyError):
    pass


class ConfigInvalid(ConsensusError, ValueError):
    pass
