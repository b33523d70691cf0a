"""Client SDK for authoring external agents against a camsearch server."""

from .client import (
    Client,
    ClientSession,
    ProtocolError,
    ServerClosed,
    decode,
    encode,
    validate_action,
)

__all__ = [
    "Client",
    "ClientSession",
    "ProtocolError",
    "ServerClosed",
    "decode",
    "encode",
    "validate_action",
]
