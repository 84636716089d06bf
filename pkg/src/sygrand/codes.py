"""Binary linear codes: BCH construction over GF(2^m), parity extension,
alist import/export and a small registry of named codes."""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .bitlinalg import BitMatrix, BitVector, mat_mul, rank, systematize


class CodeConstructionError(ValueError):
    pass


class AlistParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# GF(2^m)


def _poly_degree(p: int) -> int:
    return p.bit_length() - 1


def _multiplicative_order_of_x(poly: int) -> int:
    """Order of x modulo ``poly``; 0 if x^k never returns to 1 within 2^m - 1 steps."""
    m = _poly_degree(poly)
    top = 1 << m
    x = 1
    for i in range(1, (1 << m)):
        x <<= 1
        if x & top:
            x ^= poly
        if x == 1:
            return i
    return 0


def is_primitive(poly: int) -> bool:
    m = _poly_degree(poly)
    if m < 1 or not poly & 1:
        return False
    return _multiplicative_order_of_x(poly) == (1 << m) - 1


@functools.lru_cache(maxsize=None)
def default_primitive_polynomial(m: int) -> int:
    """Smallest primitive polynomial of degree ``m`` (as a bitmask)."""
    for poly in range((1 << m) | 1, 1 << (m + 1), 2):
        if is_primitive(poly):
            return poly
    raise CodeConstructionError(f"no primitive polynomial of degree {m}")


class GaloisField2m:
    """GF(2^m) with log/antilog tables.

    Elements are integers below ``2**m``; bit ``i`` is the coefficient of
    ``alpha**i`` in the polynomial basis.
    """

    def __init__(self, m: int, primitive_poly: int | None = None):
        if m < 1:
            raise ValueError(f"m must be positive, got {m}")
        if primitive_poly is None:
            primitive_poly = default_primitive_polynomial(m)
        if _poly_degree(primitive_poly) != m:
            raise CodeConstructionError(
                f"polynomial {primitive_poly:#x} does not have degree {m}")
        self.m = m
        self.primitive_poly = primitive_poly
        self.order = (1 << m) - 1
        exp = np.zeros(2 * self.order, dtype=np.int64)
        log = np.full(1 << m, -1, dtype=np.int64)
        x = 1
        for i in range(self.order):
            if log[x] != -1:
                raise CodeConstructionError(
                    f"polynomial {primitive_poly:#x} is not primitive: "
                    f"alpha has order {i}")
            exp[i] = x
            log[x] = i
            x <<= 1
            if x >> m:
                x ^= primitive_poly
        if x != 1:
            raise CodeConstructionError(f"polynomial {primitive_poly:#x} is not primitive")
        exp[self.order:] = exp[: self.order]
        self.exp = exp
        self.log = log

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def pow_alpha(self, i: int) -> int:
        return int(self.exp[i % self.order])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(2^m)")
        return int(self.exp[(self.order - self.log[a]) % self.order])

    def cyclotomic_coset(self, i: int) -> list[int]:
        coset = []
        j = i % self.order
        while j not in coset:
            coset.append(j)
            j = (2 * j) % self.order
        return coset

    def minimal_polynomial(self, i: int) -> int:
        """Minimal polynomial of ``alpha**i`` over GF(2), as a bitmask."""
        # Coefficients over GF(2^m), lowest degree first.
        coeffs = [1]
        for c in self.cyclotomic_coset(i):
            root = self.pow_alpha(c)
            nxt = [0] * (len(coeffs) + 1)
            for d, a in enumerate(coeffs):
                nxt[d + 1] ^= a
                nxt[d] ^= self.mul(a, root)
            coeffs = nxt
        out = 0
        for d, a in enumerate(coeffs):
            if a not in (0, 1):
                raise CodeConstructionError("minimal polynomial has non-binary coefficient")
            out |= a << d
        return out


def gf_mul(F: GaloisField2m, a: int, b: int) -> int:
    return F.mul(a, b)


def gf2_poly_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


# ---------------------------------------------------------------------------
# Linear codes


@dataclass(frozen=True)
class LinearCode:
    """Binary linear ``(n, k)`` code with parity-check and generator matrices."""

    n: int
    k: int
    H: BitMatrix
    G: BitMatrix
    label: str = ""
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.H.ncols != self.n or self.G.ncols != self.n:
            raise CodeConstructionError("matrix widths disagree with n")
        if self.G.nrows != self.k:
            raise CodeConstructionError(f"G has {self.G.nrows} rows, expected k={self.k}")
        if self.H.nrows != self.n - self.k:
            raise CodeConstructionError(
                f"H has {self.H.nrows} rows, expected n-k={self.n - self.k}")

    @property
    def redundancy(self) -> int:
        return self.n - self.k

    @property
    def rate(self) -> float:
        return self.k / self.n

    @functools.cached_property
    def even_weight(self) -> bool:
        return all(r.bit_count() % 2 == 0 for r in self.G.row_bits)

    @functools.cached_property
    def column_index(self) -> dict[int, tuple[int, ...]]:
        """Map from packed column value of ``H`` to the positions holding it."""
        index: dict[int, list[int]] = {}
        for j, c in enumerate(self.H.col_bits):
            index.setdefault(c, []).append(j)
        return {c: tuple(v) for c, v in index.items()}

    def syndrome(self, v: BitVector) -> int:
        """Packed syndrome ``H v``."""
        s = 0
        x = v.bits
        while x:
            low = x & -x
            s ^= self.H.col_bits[low.bit_length() - 1]
            x ^= low
        return s

    def is_codeword(self, v: BitVector) -> bool:
        return v.length == self.n and self.syndrome(v) == 0

    def encode(self, u: BitVector) -> BitVector:
        return encode(self, u)

    def codewords(self):
        """Iterate all ``2**k`` codewords (small codes only)."""
        if self.k > 24:
            raise ValueError(f"refusing to enumerate 2^{self.k} codewords")
        rows = self.G.row_bits
        for u in range(1 << self.k):
            c = 0
            i = 0
            while u:
                if u & 1:
                    c ^= rows[i]
                u >>= 1
                i += 1
            yield BitVector(self.n, c)

    def check(self) -> None:
        """Raise unless ``H G^T = 0`` and both matrices have full rank."""
        prod = mat_mul(self.H, self.G.transpose())
        if any(prod.row_bits):
            raise CodeConstructionError("H G^T != 0")
        if rank(self.H) != self.n - self.k:
            raise CodeConstructionError("H is rank deficient")
        if rank(self.G) != self.k:
            raise CodeConstructionError("G is rank deficient")

    def __str__(self) -> str:
        return self.label or f"({self.n},{self.k}) code"


def code_from_parity_check(H: BitMatrix, label: str = "", **metadata) -> LinearCode:
    G, perm = systematize(H)
    return LinearCode(H.ncols, G.nrows, H, G, label, dict(metadata, permutation=perm))


def code_from_generator(G: BitMatrix, label: str = "", **metadata) -> LinearCode:
    H, _ = systematize(G)
    return LinearCode(G.ncols, G.nrows, H, G, label, dict(metadata))


def encode(code: LinearCode, u: BitVector) -> BitVector:
    if u.length != code.k:
        raise ValueError(f"message length {u.length} != k={code.k}")
    c = 0
    rows = code.G.row_bits
    x = u.bits
    while x:
        low = x & -x
        c ^= rows[low.bit_length() - 1]
        x ^= low
    return BitVector(code.n, c)


def bch_generator_polynomial(m: int, t: int, primitive_poly: int | None = None) -> int:
    """Generator polynomial (bitmask) of the narrow-sense binary BCH code."""
    F = GaloisField2m(m, primitive_poly)
    g = 1
    seen: set[int] = set()
    for i in range(1, 2 * t + 1):
        leader = min(F.cyclotomic_coset(i))
        if leader in seen:
            continue
        seen.add(leader)
        g = gf2_poly_mul(g, F.minimal_polynomial(i))
    return g


def build_bch(m: int, t: int, primitive_poly: int | None = None) -> LinearCode:
    """Narrow-sense binary BCH code of length ``2**m - 1`` and designed
    correction capability ``t``."""
    if m < 3:
        raise CodeConstructionError(f"m must be at least 3, got {m}")
    if t < 1:
        raise CodeConstructionError(f"t must be at least 1, got {t}")
    n = (1 << m) - 1
    g = bch_generator_polynomial(m, t, primitive_poly)
    deg = _poly_degree(g)
    k = n - deg
    if k < 1:
        raise CodeConstructionError(f"t={t} too large for m={m}: generator degree {deg} >= n={n}")
    G = BitMatrix(k, n, [g << i for i in range(k)])
    H, _ = systematize(G)
    return LinearCode(n, k, H, G, f"BCH({n},{k})",
                      {"m": m, "t": t, "generator_poly": g,
                       "primitive_poly": primitive_poly or default_primitive_polynomial(m)})


def extend_parity(code: LinearCode) -> LinearCode:
    """Append an overall parity bit at position ``n``."""
    n = code.n
    G_rows = [r | ((r.bit_count() & 1) << n) for r in code.G.row_bits]
    H_rows = list(code.H.row_bits) + [(1 << (n + 1)) - 1]
    H = BitMatrix(code.n - code.k + 1, n + 1, H_rows)
    G = BitMatrix(code.k, n + 1, G_rows)
    label = code.label
    if label.startswith("BCH"):
        label = "e" + label
    elif label:
        label = f"extended {label}"
    return LinearCode(n + 1, code.k, H, G, label, dict(code.metadata, extended=True))


def sphere_union_rate(n: int, k: int) -> float:
    """Rate of the union of radius-1 Hamming spheres around all codewords."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return (k + math.log2(n + 1)) / n


# ---------------------------------------------------------------------------
# alist


def save_alist(code_or_H) -> str:
    H = code_or_H.H if isinstance(code_or_H, LinearCode) else code_or_H
    m, n = H.shape
    col_sets = [BitVector(m, c).support() for c in H.col_bits]
    row_sets = [BitVector(n, r).support() for r in H.row_bits]
    max_col = max((len(s) for s in col_sets), default=0)
    max_row = max((len(s) for s in row_sets), default=0)
    lines = [f"{n} {m}", f"{max_col} {max_row}",
             " ".join(str(len(s)) for s in col_sets),
             " ".join(str(len(s)) for s in row_sets)]
    for sets, width in ((col_sets, max_col), (row_sets, max_row)):
        for s in sets:
            entries = [str(i + 1) for i in s] + ["0"] * (width - len(s))
            lines.append(" ".join(entries))
    return "\n".join(lines) + "\n"


def _parse_int_line(tokens: list[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise AlistParseError(f"line {lineno}: non-integer entry ({exc})") from None


def load_alist_matrix(text: str) -> BitMatrix:
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    pos = 0

    def take(section: str, expected: int | None = None) -> tuple[int, list[int]]:
        nonlocal pos
        if pos >= len(lines):
            raise AlistParseError(f"unexpected end of file: missing {section}")
        lineno, toks = lines[pos]
        pos += 1
        vals = _parse_int_line(toks, lineno)
        if expected is not None and len(vals) != expected:
            raise AlistParseError(
                f"line {lineno}: {section} has {len(vals)} entries, expected {expected}")
        return lineno, vals

    ln, (n, m) = take("header 'n m'", 2)
    if n < 1 or m < 1:
        raise AlistParseError(f"line {ln}: dimensions must be positive")
    ln, (max_col, max_row) = take("maximum degrees", 2)
    ln_cd, col_deg = take("column degrees", n)
    ln_rd, row_deg = take("row degrees", m)
    if max(col_deg) > max_col:
        raise AlistParseError(f"line {ln_cd}: column degree exceeds declared maximum {max_col}")
    if max(row_deg) > max_row:
        raise AlistParseError(f"line {ln_rd}: row degree exceeds declared maximum {max_row}")
    if sum(col_deg) != sum(row_deg):
        raise AlistParseError(
            f"line {ln_rd}: column degrees sum to {sum(col_deg)} but row degrees sum to {sum(row_deg)}")

    cols = [0] * n
    for j in range(n):
        ln, vals = take(f"column list {j + 1} of {n}")
        idx = [v for v in vals if v != 0]
        if len(idx) != col_deg[j]:
            raise AlistParseError(
                f"line {ln}: column {j + 1} lists {len(idx)} entries, degree is {col_deg[j]}")
        for v in idx:
            if not 1 <= v <= m:
                raise AlistParseError(f"line {ln}: row index {v} out of range 1..{m}")
            cols[j] |= 1 << (v - 1)
    rows = [0] * m
    for i in range(m):
        ln, vals = take(f"row list {i + 1} of {m}")
        idx = [v for v in vals if v != 0]
        if len(idx) != row_deg[i]:
            raise AlistParseError(
                f"line {ln}: row {i + 1} lists {len(idx)} entries, degree is {row_deg[i]}")
        for v in idx:
            if not 1 <= v <= n:
                raise AlistParseError(f"line {ln}: column index {v} out of range 1..{n}")
            rows[i] |= 1 << (v - 1)
    H = BitMatrix(m, n, rows)
    if H.col_bits != tuple(cols):
        raise AlistParseError("row lists and column lists describe different matrices")
    return H


def load_alist(text: str, label: str = "") -> LinearCode:
    H = load_alist_matrix(text)
    try:
        return code_from_parity_check(H, label or f"alist({H.ncols},{H.ncols - H.nrows})")
    except ValueError as exc:
        raise CodeConstructionError(f"alist parity-check matrix: {exc}") from None


# ---------------------------------------------------------------------------
# Named codes

_NAME_RE = re.compile(r"^(e?bch|hamming)-(\d+)-(\d+)$")


@functools.lru_cache(maxsize=None)
def get_code(name: str) -> LinearCode:
    """Look up a code by name, e.g. ``ebch-32-21``, ``bch-15-7``, ``hamming-8-4``."""
    match = _NAME_RE.match(name.lower())
    if not match:
        raise KeyError(f"unknown code name {name!r}")
    family, n, k = match.group(1), int(match.group(2)), int(match.group(3))
    extended = family == "ebch" or (family == "hamming" and (n & (n - 1)) == 0)
    base_n = n - 1 if extended else n
    m = (base_n + 1).bit_length() - 1
    if (1 << m) - 1 != base_n or m < 3:
        raise KeyError(f"{name!r}: length {n} does not match a BCH length")
    ts = [1] if family == "hamming" else range(1, base_n // 2 + 1)
    for t in ts:
        try:
            base = build_bch(m, t)
        except CodeConstructionError:
            break
        if base.k == k:
            code = extend_parity(base) if extended else base
            if family == "hamming":
                label = f"{'extended ' if extended else ''}Hamming({n},{k})"
            else:
                label = f"{'e' if extended else ''}BCH({n},{k})"
            return LinearCode(code.n, code.k, code.H, code.G, label, code.metadata)
        if base.k < k:
            break
    raise KeyError(f"{name!r}: no narrow-sense BCH code of length {base_n} has dimension {k}")


def load_code(source: str) -> LinearCode:
    """Resolve a CLI code argument: a registry name or a path to an alist file."""
    try:
        return get_code(source)
    except KeyError:
        pass
    with open(source) as fh:
        return load_alist(fh.read(), label=source)
