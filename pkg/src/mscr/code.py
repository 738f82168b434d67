"""The k=2 exact scalar MSCR code: parameters, generator table, encode/decode.

Device layout (0-based):

* device 0 stores ``a`` (systematic-a),
* device 1 stores ``b`` (systematic-b),
* device ``2 + i`` stores redundancy ``r_i`` with
  ``r_i[j] = a[j] + omega**e(i, j) * b[j]`` for 0-based coordinate ``j``.

with ``e(i, j) = (i + j) mod alpha``.  There are ``n - 2 <= alpha``
redundancy devices, which with ``alpha = d`` forces ``n = d + 2``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import FieldUnsuitable, MSCRError, ParameterError, SingularMatrix
from .field import FieldSpec
from .linalg import Matrix

ROLE_A = "systematic-a"
ROLE_B = "systematic-b"
ROLE_R = "redundancy"

# exhaustive helper-subset validation up to this many devices
EXHAUSTIVE_VALIDATION_MAX_N = 8


@dataclass(frozen=True)
class CodeParams:
    """``(n, k=2, d, t=2)`` with ``alpha = d - k + t`` and ``M = k * alpha``."""

    n: int
    d: int
    k: int = 2
    t: int = 2

    def __post_init__(self):
        if self.k != 2:
            raise ParameterError(f"only k=2 is constructible with this code (got k={self.k})")
        if self.t != 2:
            raise ParameterError(f"codes are built for t=2 (got t={self.t}); single repairs are always supported")
        if self.d <= self.k:
            raise ParameterError(f"need d > k, got d={self.d}, k={self.k}")
        if self.n != self.d + self.t:
            # the cyclic construction has at most alpha = d redundancy devices
            raise ParameterError(f"this construction has n = d + t = {self.d + self.t} devices, got n={self.n}")

    @classmethod
    def for_helpers(cls, d: int) -> "CodeParams":
        return cls(n=d + 2, d=d)

    @property
    def alpha(self) -> int:
        return self.d - self.k + self.t

    @property
    def M(self) -> int:
        return self.k * self.alpha

    @property
    def redundancy_count(self) -> int:
        return self.n - 2

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "d": self.d, "t": self.t, "alpha": self.alpha, "M": self.M}


@dataclass(frozen=True)
class DeviceSpec:
    index: int
    role: str
    coeffs: tuple[tuple[int, int], ...]
    redundancy_index: Optional[int] = None

    @property
    def u(self) -> tuple[int, ...]:
        return tuple(c[0] for c in self.coeffs)

    @property
    def w(self) -> tuple[int, ...]:
        return tuple(c[1] for c in self.coeffs)


@dataclass(frozen=True)
class DeviceBlock:
    device: int
    symbols: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))


def _det2(f: FieldSpec, m) -> int:
    (p, q), (r, s) = m
    return f.sub(f.mul(p, s), f.mul(q, r))


def _inv2(f: FieldSpec, m):
    (p, q), (r, s) = m
    det = _det2(f, m)
    if det == 0:
        raise SingularMatrix("2x2 coefficient matrix is singular")
    di = f.inv(det)
    return ((f.mul(s, di), f.mul(f.neg(q), di)), (f.mul(f.neg(r), di), f.mul(p, di)))


def _row_times_2x2(f: FieldSpec, row, m):
    u, w = row
    (p, q), (r, s) = m
    return (f.add(f.mul(u, p), f.mul(w, r)), f.add(f.mul(u, q), f.mul(w, s)))


@dataclass(frozen=True)
class Code:
    params: CodeParams
    field: FieldSpec
    devices: tuple[DeviceSpec, ...]
    validated: str = "none"

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def alpha(self) -> int:
        return self.params.alpha

    def device(self, i: int) -> DeviceSpec:
        if not 0 <= i < self.params.n:
            raise IndexError(f"device index {i} outside 0..{self.params.n - 1}")
        return self.devices[i]

    def encode(self, data: Sequence[int]) -> list[DeviceBlock]:
        return encode(self, data)

    def decode(self, blocks: Sequence[DeviceBlock]) -> list[int]:
        return decode(self, blocks)


def redundancy_exponent(i: int, j: int, alpha: int) -> int:
    return (i + j) % alpha


def generator_table(params: CodeParams, field: FieldSpec) -> tuple[DeviceSpec, ...]:
    alpha, s = params.alpha, params.redundancy_count
    devices = [
        DeviceSpec(0, ROLE_A, tuple((1, 0) for _ in range(alpha))),
        DeviceSpec(1, ROLE_B, tuple((0, 1) for _ in range(alpha))),
    ]
    for i in range(s):
        coeffs = tuple((1, field.omega_pow(redundancy_exponent(i, j, alpha))) for j in range(alpha))
        devices.append(DeviceSpec(2 + i, ROLE_R, coeffs, i))
    return tuple(devices)


def check_coordinate_mds(devices: Sequence[DeviceSpec], field: FieldSpec) -> None:
    """Every pair of devices must have invertible 2x2 coefficient blocks."""
    alpha = len(devices[0].coeffs)
    for j in range(alpha):
        seen = {}
        for dev in devices:
            u, w = dev.coeffs[j]
            if u == 0 and w == 0:
                raise FieldUnsuitable(f"device {dev.index} has a zero coefficient pair", (dev.index,))
            # canonical projective representative of (u, w)
            key = (1, field.div(w, u)) if u else (0, 1)
            if key in seen:
                raise FieldUnsuitable(
                    f"devices {seen[key]} and {dev.index} are collinear at coordinate {j}; "
                    f"GF({field.order}) is too small for n={len(devices)}",
                    (seen[key], dev.index),
                )
            seen[key] = dev.index


def build_code(params: CodeParams, field: Optional[FieldSpec] = None, validate: str = "auto") -> Code:
    """Build the generator table and check that every repair is solvable.

    ``validate`` is ``"auto"`` (exhaustive over helper subsets when
    ``n <= 8``, default helpers otherwise), ``"exhaustive"``, ``"default"``
    or ``"none"`` (only the MDS check).  Raises :class:`FieldUnsuitable` when
    some repair's recovery system is singular.
    """
    field = field or FieldSpec.default()
    if validate not in ("auto", "exhaustive", "default", "none"):
        raise ValueError(f"unknown validation mode {validate!r}")
    devices = generator_table(params, field)
    check_coordinate_mds(devices, field)
    if validate == "auto":
        validate = "exhaustive" if params.n <= EXHAUSTIVE_VALIDATION_MAX_N else "default"
    code = Code(params, field, devices, validate)
    if validate != "none":
        from .repair import validate_repairs

        validate_repairs(code, exhaustive=validate == "exhaustive")
    return code


def encode(code: Code, data: Sequence[int]) -> list[DeviceBlock]:
    """Encode ``M = 2 * alpha`` symbols: ``a`` = first half, ``b`` = second half."""
    alpha, f = code.alpha, code.field
    if len(data) != code.params.M:
        raise ValueError(f"expected {code.params.M} data symbols, got {len(data)}")
    data = [f.check(int(x)) for x in data]
    a, b = data[:alpha], data[alpha:]
    blocks = []
    for dev in code.devices:
        syms = tuple(f.add(f.mul(u, a[j]), f.mul(w, b[j])) for j, (u, w) in enumerate(dev.coeffs))
        blocks.append(DeviceBlock(dev.index, syms))
    return blocks


def decode(code: Code, blocks: Sequence[DeviceBlock]) -> list[int]:
    """Recover ``a + b`` from any two blocks via alpha independent 2x2 solves."""
    if len(blocks) < 2:
        raise ValueError("decode needs two device blocks")
    b0, b1 = blocks[0], blocks[1]
    if b0.device == b1.device:
        raise ValueError(f"duplicate device {b0.device}")
    alpha, f = code.alpha, code.field
    if len(b0.symbols) != alpha or len(b1.symbols) != alpha:
        raise ValueError(f"blocks must hold {alpha} symbols")
    d0, d1 = code.device(b0.device), code.device(b1.device)
    a, b = [], []
    for j in range(alpha):
        inv = _inv2(f, (d0.coeffs[j], d1.coeffs[j]))
        y0, y1 = b0.symbols[j], b1.symbols[j]
        a.append(f.add(f.mul(inv[0][0], y0), f.mul(inv[0][1], y1)))
        b.append(f.add(f.mul(inv[1][0], y0), f.mul(inv[1][1], y1)))
    return a + b


@dataclass(frozen=True)
class EquivalentCode:
    """The code re-expressed so that ``failed[0]`` stores ``a'`` and ``failed[1]`` stores ``b'``.

    ``transforms[j]`` maps ``(a_j, b_j)`` to ``(a'_j, b'_j)``; ``coeffs[m][j]``
    is device ``m``'s coefficient pair over ``(a'_j, b'_j)``.
    """

    code: Code
    failed: tuple[int, int]
    transforms: tuple
    inverses: tuple
    coeffs: Mapping[int, tuple[tuple[int, int], ...]] = dc_field(hash=False)

    @property
    def field(self) -> FieldSpec:
        return self.code.field

    def view(self, m: int) -> tuple[Matrix, Matrix]:
        """Diagonal ``(A_m, B_m)`` of device ``m`` in the transformed basis."""
        return _diag_pair(self.field, self.coeffs[m])

    def reencode(self, m: int, a_new: Sequence[int], b_new: Sequence[int]) -> tuple[int, ...]:
        f = self.field
        return tuple(f.add(f.mul(u, a_new[j]), f.mul(w, b_new[j])) for j, (u, w) in enumerate(self.coeffs[m]))

    def original_coeffs(self, m: int) -> tuple[tuple[int, int], ...]:
        """Undo the change of basis (used to check the transform is invertible)."""
        f = self.field
        return tuple(_row_times_2x2(f, c, t) for c, t in zip(self.coeffs[m], self.transforms))


def change_of_variables(code: Code, failed: Iterable[int]) -> EquivalentCode:
    f1, f2 = tuple(failed)
    if f1 == f2:
        raise ValueError("failed devices must be distinct")
    d1, d2 = code.device(f1), code.device(f2)
    f = code.field
    transforms = tuple((d1.coeffs[j], d2.coeffs[j]) for j in range(code.alpha))
    inverses = tuple(_inv2(f, t) for t in transforms)
    coeffs = {}
    for dev in code.devices:
        coeffs[dev.index] = tuple(_row_times_2x2(f, c, ti) for c, ti in zip(dev.coeffs, inverses))
    return EquivalentCode(code, (f1, f2), transforms, inverses, coeffs)


def _diag_pair(field: FieldSpec, coeffs) -> tuple[Matrix, Matrix]:
    return Matrix.diag(field, [c[0] for c in coeffs]), Matrix.diag(field, [c[1] for c in coeffs])


def systematic_view(code: Code) -> dict[int, tuple[Matrix, Matrix]]:
    """``{m: (A_m, B_m)}`` so that device ``m`` stores ``A_m a + B_m b``."""
    return {dev.index: _diag_pair(code.field, dev.coeffs) for dev in code.devices}


def helper_subsets(code: Code, excluded: Iterable[int], size: int, limit: Optional[int] = None):
    live = [i for i in range(code.n) if i not in set(excluded)]
    if size > len(live):
        raise MSCRError(f"need {size} helpers but only {len(live)} live devices")
    combos = itertools.combinations(live, size)
    return combos if limit is None else itertools.islice(combos, limit)
