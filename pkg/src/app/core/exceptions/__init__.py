# ruff: noqa
from .input_exceptions import BinResolutionError, EdgeListParseError, InvalidParameterError, MalformedKeyError
from .numeric_exceptions import BreakdownError, NonConvergenceError, RingRangeError
from .protocol_exceptions import (
    ChannelClosedError,
    DimensionMismatchError,
    PreprocessingExhaustedError,
    ProtocolError,
    SecureGraphError,
    TripleReuseError,
)
