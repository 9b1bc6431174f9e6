"""Ports (interfaces) for outbound operations. Implemented by adapters."""

from .transport import TransportPort

__all__ = ["TransportPort"]
