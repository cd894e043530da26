"""Binary container of a compressed waveform.

Layout: magic ``CPW1`` | header length (u32 little-endian) | JSON header | band payloads
in header order. The header lists the byte length of every payload.
"""

import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Union

from cpow_innovation.errors import ParseError

logger = logging.getLogger(__name__)

MAGIC = b"CPW1"
_LENGTH = struct.Struct("<I")


def _encode_header(header: Dict[str, Any]) -> bytes:
    return json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")


@dataclass
class CompressedBlob:
    """Header plus one packed-index payload per coded band.

    Attributes:
        header: JSON-serializable description (plan, allocation, models, flags, bands)
        payloads: Packed quantizer indices, one entry per ``header["bands"]`` item
    """

    header: Dict[str, Any]
    payloads: List[bytes] = field(default_factory=list)

    @property
    def payload_bytes(self) -> int:
        return sum(len(p) for p in self.payloads)

    def to_bytes(self) -> bytes:
        header = dict(self.header)
        header["payload_lengths"] = [len(p) for p in self.payloads]
        encoded = _encode_header(header)
        return MAGIC + _LENGTH.pack(len(encoded)) + encoded + b"".join(self.payloads)

    @classmethod
    def from_bytes(cls, data: bytes) -> "CompressedBlob":
        """Parse a serialized blob.

        Raises:
            ParseError: On a wrong magic, a truncated buffer or a malformed header
        """
        if data[:4] != MAGIC:
            raise ParseError(f"Not a compressed waveform (magic {data[:4]!r})")
        if len(data) < 4 + _LENGTH.size:
            raise ParseError("Blob truncated inside the header length")
        (length,) = _LENGTH.unpack_from(data, 4)
        start = 4 + _LENGTH.size
        if len(data) < start + length:
            raise ParseError(f"Blob truncated: header needs {length} bytes")
        try:
            header = json.loads(data[start : start + length].decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ParseError(f"Malformed blob header: {exc}") from exc

        lengths = header.pop("payload_lengths", [])
        offset = start + length
        payloads = []
        for size in lengths:
            if offset + size > len(data):
                raise ParseError(f"Blob truncated: payload needs {size} bytes at offset {offset}")
            payloads.append(data[offset : offset + size])
            offset += size
        return cls(header, payloads)


def write_blob(blob: CompressedBlob, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = blob.to_bytes()
    path.write_bytes(data)
    logger.info("Wrote %d-byte blob to %s", len(data), path)
    return path


def read_blob(path: Union[str, Path]) -> CompressedBlob:
    return CompressedBlob.from_bytes(Path(path).read_bytes())
