"""Per-server files of encrypted local-view records.

Layout (little-endian): a ``u64`` record count followed by ``(i: u32, j: u32, share: u64)`` records.
"""

from __future__ import annotations

import struct
from collections.abc import Iterable
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from ..core.exceptions.input_exceptions import InvalidParameterError
from ..models.ldp import LocalView

RECORD_DTYPE = np.dtype([("i", "<u4"), ("j", "<u4"), ("share", "<u8")])
RECORD_BYTES = RECORD_DTYPE.itemsize
_HEADER = struct.Struct("<Q")
HEADER_BYTES = _HEADER.size


def share_file_size(record_count: int) -> int:
    return HEADER_BYTES + record_count * RECORD_BYTES


def view_records(views: Iterable[LocalView], party: int) -> NDArray:
    """Concatenate the views' entries for ``party`` in arrival order."""
    views = list(views)
    total = sum(view.noisy_count for view in views)
    records = np.empty(total, dtype=RECORD_DTYPE)
    offset = 0
    for view in views:
        end = offset + view.noisy_count
        records["i"][offset:end] = view.row
        records["j"][offset:end] = view.columns
        records["share"][offset:end] = view.share_for(party)
        offset = end
    return records


def encode_share_records(records: NDArray) -> bytes:
    return _HEADER.pack(len(records)) + np.ascontiguousarray(records, dtype=RECORD_DTYPE).tobytes()


def decode_share_records(data: bytes) -> NDArray:
    if len(data) < HEADER_BYTES:
        raise InvalidParameterError("Share file is shorter than its header")
    (count,) = _HEADER.unpack_from(data, 0)
    if len(data) != share_file_size(count):
        raise InvalidParameterError(f"Share file declares {count} records but holds {len(data) - HEADER_BYTES} bytes")
    return np.frombuffer(data, dtype=RECORD_DTYPE, offset=HEADER_BYTES, count=count).copy()


def write_share_file(path: str | Path, records: NDArray) -> int:
    payload = encode_share_records(records)
    Path(path).write_bytes(payload)
    return len(payload)


def read_share_file(path: str | Path) -> NDArray:
    return decode_share_records(Path(path).read_bytes())
