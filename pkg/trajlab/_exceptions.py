# -*- coding: utf-8 -*-
"""
    trajlab.exceptions
    ~~~~~~~~~~~~~~~~~~

    All known exceptions raised by trajlab

    :license: BSD, see LICENSE for more details.
"""


class TrajlabError(Exception):
    """Our base class for all errors"""

    pass


class DataError(TrajlabError):
    """Input data is malformed or unusable"""

    pass


class ParseError(DataError):
    """Dataset text could not be parsed"""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class EmptyDatasetError(DataError):
    """Operation needs at least one trajectory"""

    pass


class LengthMismatchError(DataError):
    """Two sequences that must be aligned differ in length"""

    pass


class TrajectoryLengthError(DataError):
    """Trajectory does not have the number of points the operation expects"""

    pass


class MissingStateLogError(DataError):
    """Scene carries no recorded state sequence"""

    pass


class InsufficientPoolError(DataError):
    """Synthetic pool too small for the requested share"""

    pass


class DatasetIOError(DataError):
    """Dataset or report file could not be read or written"""

    pass


class ConfigError(TrajlabError):
    """Invalid parameter or configuration"""

    pass


class InvalidTransitionError(ConfigError):
    """Transition matrix is not a valid interaction chain"""

    pass


class OverlappingAgentsError(ConfigError):
    """Agents start within each other's collision radius"""

    pass


class InfeasibleTargetError(ConfigError):
    """No dataset can satisfy the requested proportions"""

    pass


class NeuralError(TrajlabError):
    """Base for network errors"""

    pass


class ShapeMismatchError(NeuralError):
    """Input, gradient or parameter shapes do not line up"""

    pass


class BackwardBeforeForwardError(NeuralError):
    """Backward pass requested without a cached forward pass"""

    pass


class NonFiniteOutputError(NeuralError):
    """Network produced NaN or Inf"""

    pass


class SynthesisError(TrajlabError):
    """Generator recipe could not realize the requested trajectory"""

    pass
