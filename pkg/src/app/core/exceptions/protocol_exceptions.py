class SecureGraphError(Exception):
    def __init__(self, message: str = "Secure graph computation failed.") -> None:
        self.message = message
        super().__init__(self.message)


class ProtocolError(SecureGraphError):
    def __init__(self, message: str = "Two-party protocol violated its contract.") -> None:
        super().__init__(message)


class DimensionMismatchError(ProtocolError):
    def __init__(self, message: str = "Operand shapes do not match the preprocessed material.") -> None:
        super().__init__(message)


class TripleReuseError(ProtocolError):
    def __init__(self, message: str = "Preprocessed material can only be consumed once.") -> None:
        super().__init__(message)


class PreprocessingExhaustedError(ProtocolError):
    def __init__(self, message: str = "Dealer inventory exhausted.") -> None:
        super().__init__(message)


class ChannelClosedError(ProtocolError):
    def __init__(self, message: str = "Peer aborted; channel closed.") -> None:
        super().__init__(message)
