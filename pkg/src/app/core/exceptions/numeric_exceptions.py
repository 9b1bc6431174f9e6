from .protocol_exceptions import SecureGraphError


class RingRangeError(SecureGraphError):
    def __init__(self, message: str = "Value outside the representable fixed-point range.") -> None:
        super().__init__(message)


class BreakdownError(SecureGraphError):
    def __init__(self, message: str = "Krylov iteration broke down (basis vector norm vanished).") -> None:
        super().__init__(message)


class NonConvergenceError(SecureGraphError):
    def __init__(self, message: str = "Eigenvalue iteration did not converge.") -> None:
        super().__init__(message)
