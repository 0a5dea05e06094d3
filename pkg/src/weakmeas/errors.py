"""Exception types raised by the library."""


class WeakMeasError(Exception):
    """Base class for all library errors."""


class NearOrthogonalPostSelection(WeakMeasError, ValueError):
    """Post-selected state is (numerically) orthogonal to the pre-selected state."""


class LengthMismatch(WeakMeasError, ValueError):
    pass


class ZeroNorm(WeakMeasError, ValueError):
    """A superposition interferes away completely."""


class UndefinedPosterior(WeakMeasError, ValueError):
    pass


class NodeSample(WeakMeasError, ValueError):
    """Both qubit-B amplitudes vanish at the measured pointer positions."""


class InvalidChainState(WeakMeasError, RuntimeError):
    """The Markov chain sits on a zero-density state."""


class InitOnNode(WeakMeasError, ValueError):
    pass


class ConfigError(WeakMeasError, ValueError):
    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
