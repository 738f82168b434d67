"""On-disk block files.

Layout (little-endian, fixed 44-byte header)::

    offset size  field
    0      4     magic b"MSCR"
    4      1     format version (1)
    5      1     field kind (0 = prime, 1 = binary)
    6      4     field order q
    10     4     reduction polynomial (0 for prime fields)
    14     4     omega
    18     2     n
    20     1     k
    21     2     d
    23     1     t
    24     2     device index
    26     1     role (0 = systematic-a, 1 = systematic-b, 2 = redundancy)
    27     8     original file length in bytes
    35     4     stripe count
    39     4     symbols per stripe (alpha)
    43     1     symbol width in bytes (1 if q <= 256 else 2)

The payload follows: ``stripes * alpha`` symbols, each ``width`` bytes
(little-endian when 2 bytes).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .code import ROLE_A, ROLE_B, ROLE_R, CodeParams
from .errors import BlockFileError
from .field import BINARY, PRIME, FieldSpec

MAGIC = b"MSCR"
VERSION = 1
HEADER = struct.Struct("<4sBBIIIHBHBHBQIIB")
_KINDS = {PRIME: 0, BINARY: 1}
_ROLES = {ROLE_A: 0, ROLE_B: 1, ROLE_R: 2}


@dataclass(frozen=True)
class BlockFile:
    field: FieldSpec
    params: CodeParams
    device: int
    role: str
    length: int
    stripes: tuple[tuple[int, ...], ...]

    @property
    def alpha(self) -> int:
        return self.params.alpha

    def compatible(self, other: "BlockFile") -> bool:
        return (self.field, self.params, self.length, len(self.stripes)) == (
            other.field,
            other.params,
            other.length,
            len(other.stripes),
        )

    def to_bytes(self) -> bytes:
        f, p = self.field, self.params
        width = f.symbol_width
        head = HEADER.pack(
            MAGIC,
            VERSION,
            _KINDS[f.kind],
            f.order,
            f.poly or 0,
            f.omega,
            p.n,
            p.k,
            p.d,
            p.t,
            self.device,
            _ROLES[self.role],
            self.length,
            len(self.stripes),
            p.alpha,
            width,
        )
        body = bytearray()
        for stripe in self.stripes:
            if len(stripe) != p.alpha:
                raise BlockFileError(f"stripe holds {len(stripe)} symbols, expected {p.alpha}")
            for s in stripe:
                body += int(s).to_bytes(width, "little")
        return head + bytes(body)

    @classmethod
    def from_bytes(cls, raw: bytes) -> "BlockFile":
        if len(raw) < HEADER.size:
            raise BlockFileError(f"truncated header: {len(raw)} bytes")
        (magic, version, kind, order, poly, omega, n, k, d, t, device, role, length, nstripes, alpha, width) = HEADER.unpack_from(raw)
        if magic != MAGIC:
            raise BlockFileError(f"bad magic {magic!r}")
        if version != VERSION:
            raise BlockFileError(f"unsupported format version {version}")
        try:
            kind_name = {v: k_ for k_, v in _KINDS.items()}[kind]
            role_name = {v: k_ for k_, v in _ROLES.items()}[role]
        except KeyError as exc:
            raise BlockFileError(f"bad header code {exc}") from None
        field = FieldSpec(kind_name, order, poly or None, omega)
        params = CodeParams(n=n, d=d, k=k, t=t)
        if alpha != params.alpha or width != field.symbol_width:
            raise BlockFileError("header alpha or symbol width inconsistent with parameters")
        expected = HEADER.size + nstripes * alpha * width
        if len(raw) != expected:
            raise BlockFileError(f"payload size {len(raw) - HEADER.size} does not match {nstripes} stripes of {alpha} symbols")
        stripes = []
        pos = HEADER.size
        for _ in range(nstripes):
            stripe = []
            for _ in range(alpha):
                v = int.from_bytes(raw[pos : pos + width], "little")
                if v >= order:
                    raise BlockFileError(f"symbol {v} outside GF({order})")
                stripe.append(v)
                pos += width
            stripes.append(tuple(stripe))
        return cls(field, params, device, role_name, length, tuple(stripes))

    def write(self, path) -> Path:
        path = Path(path)
        path.write_bytes(self.to_bytes())
        return path

    @classmethod
    def read(cls, path) -> "BlockFile":
        return cls.from_bytes(Path(path).read_bytes())


def block_name(device: int) -> str:
    return f"device_{device:02d}.blk"


def bytes_to_symbols(data: bytes, field: FieldSpec) -> list[int]:
    """One byte per symbol when ``q >= 256``; base-``q`` digits (least significant first) otherwise."""
    q = field.order
    if q >= 256:
        return list(data)
    per = _digits(q)
    out = []
    for byte in data:
        for _ in range(per):
            out.append(byte % q)
            byte //= q
    return out


def symbols_to_bytes(symbols: Sequence[int], field: FieldSpec, length: int) -> bytes:
    """Inverse of :func:`bytes_to_symbols`, truncated to ``length`` bytes."""
    q = field.order
    if q >= 256:
        if any(s > 255 for s in symbols[:length]):
            raise BlockFileError("decoded symbol does not fit in a byte")
        return bytes(symbols[:length])
    per = _digits(q)
    out = bytearray()
    for i in range(length):
        v = 0
        for s in reversed(symbols[i * per : (i + 1) * per]):
            v = v * q + s
        if v > 255:
            raise BlockFileError("decoded digits do not form a byte")
        out.append(v)
    return bytes(out)


def _digits(q: int) -> int:
    n, cap = 0, 1
    while cap < 256:
        cap *= q
        n += 1
    return n
