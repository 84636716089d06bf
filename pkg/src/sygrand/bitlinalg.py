"""Packed GF(2) vectors and matrices.

Bit ``i`` of a :class:`BitVector` is bit ``i`` of an arbitrary-precision
Python integer (LSB first). Python integers are packed machine words under
the hood, so XOR, popcount and AND-parity run at C speed for any length.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


class BitVector:
    """Immutable binary vector of fixed length.

    Parameters
    ----------
    length : int
        Number of bits.
    bits : int
        Packed integer; bit ``i`` holds entry ``i``. Bits at or above
        ``length`` must be zero.
    """

    __slots__ = ("_length", "_bits")

    def __init__(self, length: int, bits: int = 0):
        if length < 0:
            raise ValueError(f"length must be nonnegative, got {length}")
        if bits < 0 or bits >> length:
            raise ValueError(f"bits do not fit in a vector of length {length}")
        self._length = int(length)
        self._bits = int(bits)

    @classmethod
    def from_list(cls, values: Iterable[int]) -> "BitVector":
        values = list(values)
        bits = 0
        for i, v in enumerate(values):
            if v not in (0, 1, True, False):
                raise ValueError(f"entry {i} is not binary: {v!r}")
            if v:
                bits |= 1 << i
        return cls(len(values), bits)

    @classmethod
    def from_array(cls, arr) -> "BitVector":
        arr = np.asarray(arr).astype(np.uint8).ravel()
        if np.any(arr > 1):
            raise ValueError("array is not binary")
        packed = np.packbits(arr, bitorder="little").tobytes()
        return cls(arr.size, int.from_bytes(packed, "little"))

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, 0)

    @classmethod
    def unit(cls, length: int, position: int) -> "BitVector":
        if not 0 <= position < length:
            raise IndexError(f"position {position} out of range for length {length}")
        return cls(length, 1 << position)

    @classmethod
    def from_positions(cls, length: int, positions: Iterable[int]) -> "BitVector":
        bits = 0
        for p in positions:
            if not 0 <= p < length:
                raise IndexError(f"position {p} out of range for length {length}")
            bits ^= 1 << p
        return cls(length, bits)

    @property
    def length(self) -> int:
        return self._length

    @property
    def bits(self) -> int:
        return self._bits

    def __len__(self) -> int:
        return self._length

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self._length
        if not 0 <= i < self._length:
            raise IndexError(i)
        return (self._bits >> i) & 1

    def __iter__(self):
        b = self._bits
        for _ in range(self._length):
            yield b & 1
            b >>= 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self._length == other._length and self._bits == other._bits

    def __hash__(self) -> int:
        return hash((self._length, self._bits))

    def __xor__(self, other: "BitVector") -> "BitVector":
        return xor(self, other)

    def __repr__(self) -> str:
        return f"BitVector({self.to_string()!r})"

    def to_list(self) -> list[int]:
        return list(self)

    def to_array(self) -> np.ndarray:
        raw = self._bits.to_bytes((self._length + 7) // 8, "little")
        arr = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        return arr[: self._length].copy()

    def to_words(self) -> np.ndarray:
        """Packed little-endian ``uint64`` words."""
        nwords = max(1, (self._length + 63) // 64)
        raw = self._bits.to_bytes(8 * nwords, "little")
        return np.frombuffer(raw, dtype="<u8").astype(np.uint64)

    def to_string(self) -> str:
        return "".join(str(b) for b in self)

    def to_hex(self) -> str:
        """Hex digits of the bit string read left to right (bit 0 is the MSB
        of the first digit), zero-padded to a multiple of four bits."""
        pad = (-self._length) % 4
        s = self.to_string() + "0" * pad
        return "".join(f"{int(s[i:i + 4], 2):x}" for i in range(0, len(s), 4))

    def support(self) -> list[int]:
        out = []
        b = self._bits
        while b:
            low = b & -b
            out.append(low.bit_length() - 1)
            b ^= low
        return out

    def parity(self) -> int:
        return self._bits.bit_count() & 1


def xor(a: BitVector, b: BitVector) -> BitVector:
    if a.length != b.length:
        raise ValueError(f"length mismatch: {a.length} vs {b.length}")
    return BitVector(a.length, a.bits ^ b.bits)


def weight(v: BitVector) -> int:
    return v.bits.bit_count()


class BitMatrix:
    """Immutable binary matrix stored as packed rows.

    A column-major copy (one packed integer per column, bit ``i`` = row ``i``)
    is built on construction so that :func:`column_match` and syndrome
    updates touch one word per column.
    """

    __slots__ = ("_nrows", "_ncols", "_rows", "_cols")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[int]):
        if len(rows) != nrows:
            raise ValueError(f"expected {nrows} rows, got {len(rows)}")
        for i, r in enumerate(rows):
            if r < 0 or r >> ncols:
                raise ValueError(f"row {i} does not fit in {ncols} columns")
        self._nrows = int(nrows)
        self._ncols = int(ncols)
        self._rows = tuple(int(r) for r in rows)
        cols = [0] * ncols
        for i, r in enumerate(self._rows):
            while r:
                low = r & -r
                cols[low.bit_length() - 1] |= 1 << i
                r ^= low
        self._cols = tuple(cols)

    @classmethod
    def from_array(cls, arr) -> "BitMatrix":
        arr = np.atleast_2d(np.asarray(arr).astype(np.uint8))
        if np.any(arr > 1):
            raise ValueError("array is not binary")
        nrows, ncols = arr.shape
        return cls(nrows, ncols, [BitVector.from_array(row).bits for row in arr])

    @classmethod
    def from_rows(cls, rows: Sequence[BitVector], ncols: int | None = None) -> "BitMatrix":
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for an empty row list")
            ncols = rows[0].length
        for r in rows:
            if r.length != ncols:
                raise ValueError("rows have inconsistent lengths")
        return cls(len(rows), ncols, [r.bits for r in rows])

    @classmethod
    def from_columns(cls, nrows: int, cols: Sequence[int]) -> "BitMatrix":
        rows = [0] * nrows
        for j, c in enumerate(cols):
            if c < 0 or c >> nrows:
                raise ValueError(f"column {j} does not fit in {nrows} rows")
            while c:
                low = c & -c
                rows[low.bit_length() - 1] |= 1 << j
                c ^= low
        return cls(nrows, len(cols), rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self._nrows, self._ncols

    @property
    def nrows(self) -> int:
        return self._nrows

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def row_bits(self) -> tuple[int, ...]:
        return self._rows

    @property
    def col_bits(self) -> tuple[int, ...]:
        return self._cols

    def row(self, i: int) -> BitVector:
        return BitVector(self._ncols, self._rows[i])

    def column(self, j: int) -> BitVector:
        return BitVector(self._nrows, self._cols[j])

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self._ncols, self._nrows, self._cols)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self._nrows, self._ncols), dtype=np.uint8)
        for i in range(self._nrows):
            out[i] = BitVector(self._ncols, self._rows[i]).to_array()
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._nrows, self._ncols, self._rows))

    def __repr__(self) -> str:
        return f"BitMatrix({self._nrows}x{self._ncols})"


def mat_vec_mul(M: BitMatrix, v: BitVector) -> BitVector:
    """GF(2) product ``M v``."""
    if M.ncols != v.length:
        raise ValueError(f"dimension mismatch: matrix has {M.ncols} columns, vector length {v.length}")
    x = v.bits
    out = 0
    for i, r in enumerate(M.row_bits):
        if (r & x).bit_count() & 1:
            out |= 1 << i
    return BitVector(M.nrows, out)


def column_match(M: BitMatrix, s: BitVector) -> BitVector:
    """Indicator over columns: entry ``r`` is 1 iff column ``r`` of ``M`` equals ``s``."""
    if M.nrows != s.length:
        raise ValueError(f"dimension mismatch: matrix has {M.nrows} rows, syndrome length {s.length}")
    target = s.bits
    out = 0
    for j, c in enumerate(M.col_bits):
        if c == target:
            out |= 1 << j
    return BitVector(M.ncols, out)


def mat_mul(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    """GF(2) matrix product ``A B``."""
    if A.ncols != B.nrows:
        raise ValueError(f"dimension mismatch: {A.shape} x {B.shape}")
    rows = []
    for r in A.row_bits:
        acc = 0
        while r:
            low = r & -r
            acc ^= B.row_bits[low.bit_length() - 1]
            r ^= low
        rows.append(acc)
    return BitMatrix(A.nrows, B.ncols, rows)


def _row_reduce(rows: list[int], ncols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form over GF(2). Returns (nonzero rows, pivot columns)."""
    rows = list(rows)
    pivots = []
    r = 0
    for col in range(ncols):
        bit = 1 << col
        piv = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(M: BitMatrix) -> int:
    return len(_row_reduce(list(M.row_bits), M.ncols)[1])


class RankDeficientError(ValueError):
    """Parity-check matrix does not have full row rank."""


def systematize(H: BitMatrix) -> tuple[BitMatrix, np.ndarray]:
    """Derive a generator matrix from a full-rank parity-check matrix.

    Returns ``(G, perm)`` where ``G`` is ``(n - m) x n`` with ``H G^T = 0`` in
    the original column order, and ``perm`` lists the column order under which
    ``G`` reads ``[P^T | I]`` (pivot columns first, then free columns).
    """
    m, n = H.shape
    red, pivots = _row_reduce(list(H.row_bits), n)
    if len(pivots) < m:
        raise RankDeficientError(f"parity-check matrix has rank {len(pivots)} < {m} rows")
    pivot_set = set(pivots)
    free = [c for c in range(n) if c not in pivot_set]
    rows = []
    for f in free:
        # Setting free variable f = 1 forces each pivot variable to the
        # entry of its reduced row in column f.
        g = 1 << f
        fbit = 1 << f
        for i, p in enumerate(pivots):
            if red[i] & fbit:
                g |= 1 << p
        rows.append(g)
    G = BitMatrix(n - m, n, rows)
    perm = np.array(pivots + free, dtype=np.int64)
    return G, perm
