from .protocol_exceptions import SecureGraphError


class InvalidParameterError(SecureGraphError):
    def __init__(self, message: str = "Parameter out of range.") -> None:
        super().__init__(message)


class EdgeListParseError(SecureGraphError):
    def __init__(self, message: str = "Malformed edge list.", line_number: int | None = None) -> None:
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class MalformedKeyError(SecureGraphError):
    def __init__(self, message: str = "Malformed function-secret-sharing key.") -> None:
        super().__init__(message)


class BinResolutionError(SecureGraphError):
    def __init__(self, message: str = "Degree outside the binning map domain.") -> None:
        super().__init__(message)
