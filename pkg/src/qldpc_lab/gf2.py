"""Bit-packed GF(2) linear algebra and symplectic Pauli algebra.

Bit vectors are plain Python ints: bit ``i`` holds entry ``i``.  A
:class:`BinaryMatrix` stores one int per row, so row operations are whole-word
XORs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BinaryMatrix",
    "PauliOperator",
    "bits_to_int",
    "int_to_bits",
    "parity",
    "rank",
    "solve_affine",
    "symplectic_product",
]


def parity(v: int) -> int:
    return v.bit_count() & 1


def bits_to_int(bits: Iterable[int]) -> int:
    out = 0
    for i, b in enumerate(bits):
        if b:
            out |= 1 << i
    return out


def int_to_bits(v: int, length: int) -> list[int]:
    return [(v >> i) & 1 for i in range(length)]


def _as_int(v) -> int:
    if isinstance(v, (int, np.integer)):
        return int(v)
    return bits_to_int(v)


def _iter_bits(v: int):
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


class BinaryMatrix:
    """Dense GF(2) matrix with rows packed into ints.

    Instances are treated as immutable; every operation returns a new matrix.
    """

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Sequence[int], ncols: int):
        rows = tuple(int(r) for r in rows)
        mask = (1 << ncols) - 1
        for r in rows:
            if r < 0 or r & ~mask:
                raise ValueError("row has bits beyond column count")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = int(ncols)

    # construction -----------------------------------------------------
    @classmethod
    def from_dense(cls, data) -> "BinaryMatrix":
        arr = np.asarray(data, dtype=np.uint8) & 1
        if arr.ndim != 2:
            raise ValueError("expected a 2-D array")
        return cls([bits_to_int(row) for row in arr], arr.shape[1])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BinaryMatrix":
        return cls([0] * nrows, ncols)

    @classmethod
    def identity(cls, size: int) -> "BinaryMatrix":
        return cls([1 << i for i in range(size)], size)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def to_numpy(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in _iter_bits(r):
                out[i, j] = 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.ncols == other.ncols and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.ncols, self.rows))

    def __repr__(self) -> str:
        return f"BinaryMatrix({self.nrows}x{self.ncols})"

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        return (self.rows[i] >> j) & 1

    # structure --------------------------------------------------------
    def row_weights(self) -> list[int]:
        return [r.bit_count() for r in self.rows]

    def col_weights(self) -> list[int]:
        counts = [0] * self.ncols
        for r in self.rows:
            for j in _iter_bits(r):
                counts[j] += 1
        return counts

    def row_support(self, i: int) -> list[int]:
        return list(_iter_bits(self.rows[i]))

    def transpose(self) -> "BinaryMatrix":
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            for j in _iter_bits(r):
                cols[j] |= 1 << i
        return BinaryMatrix(cols, self.nrows)

    @property
    def T(self) -> "BinaryMatrix":
        return self.transpose()

    def is_zero(self) -> bool:
        return not any(self.rows)

    def mul_vec(self, v) -> int:
        """Return ``M v`` as an int with bit ``i`` = row ``i`` parity."""
        v = _as_int(v)
        out = 0
        for i, r in enumerate(self.rows):
            if (r & v).bit_count() & 1:
                out |= 1 << i
        return out

    def __matmul__(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if self.ncols != other.nrows:
            raise ValueError("dimension mismatch")
        orows = other.rows
        out = []
        for r in self.rows:
            acc = 0
            for j in _iter_bits(r):
                acc ^= orows[j]
            out.append(acc)
        return BinaryMatrix(out, other.ncols)

    def __add__(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if self.shape != other.shape:
            raise ValueError("dimension mismatch")
        return BinaryMatrix([a ^ b for a, b in zip(self.rows, other.rows)], self.ncols)

    def hstack(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        s = self.ncols
        return BinaryMatrix([a | (b << s) for a, b in zip(self.rows, other.rows)], s + other.ncols)

    def vstack(self, other: "BinaryMatrix") -> "BinaryMatrix":
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch")
        return BinaryMatrix(self.rows + other.rows, self.ncols)

    def kron(self, other: "BinaryMatrix") -> "BinaryMatrix":
        out = []
        oc = other.ncols
        for a in self.rows:
            a_bits = list(_iter_bits(a))
            for b in other.rows:
                acc = 0
                for j in a_bits:
                    acc |= b << (j * oc)
                out.append(acc)
        return BinaryMatrix(out, self.ncols * oc)

    def select_rows(self, idx: Iterable[int]) -> "BinaryMatrix":
        return BinaryMatrix([self.rows[i] for i in idx], self.ncols)

    # elimination ------------------------------------------------------
    def rref(self) -> tuple["BinaryMatrix", list[int]]:
        """Reduced row echelon form and pivot columns (lowest index first)."""
        rows = list(self.rows)
        pivots: list[int] = []
        r = 0
        for col in range(self.ncols):
            bit = 1 << col
            piv = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            pr = rows[r]
            for i in range(len(rows)):
                if i != r and rows[i] & bit:
                    rows[i] ^= pr
            pivots.append(col)
            r += 1
            if r == len(rows):
                break
        return BinaryMatrix(rows, self.ncols), pivots

    def rank(self) -> int:
        return rank(self)

    def independent_rows(self) -> list[int]:
        """Indices of a maximal independent row subset, greedy by index."""
        basis: dict[int, int] = {}  # leading bit -> reduced vector
        keep = []
        for i, r in enumerate(self.rows):
            v = r
            while v:
                lead = v.bit_length() - 1
                if lead in basis:
                    v ^= basis[lead]
                else:
                    basis[lead] = v
                    keep.append(i)
                    break
        return keep

    def nullspace(self) -> list[int]:
        return solve_affine(self, 0)[1]

    # sparse text ------------------------------------------------------
    def to_sparse_text(self) -> str:
        lines = [f"{self.nrows} {self.ncols}"]
        for r in self.rows:
            lines.append(" ".join(str(j + 1) for j in _iter_bits(r)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_sparse_text(cls, text: str) -> "BinaryMatrix":
        lines = text.splitlines()
        if not lines:
            raise ValueError("empty matrix text")
        header = lines[0].split()
        if len(header) != 2:
            raise ValueError("header must be 'rows cols'")
        nrows, ncols = int(header[0]), int(header[1])
        body = lines[1 : 1 + nrows]
        body += [""] * (nrows - len(body))
        rows = []
        for line in body:
            acc = 0
            for tok in line.split():
                j = int(tok) - 1
                if not 0 <= j < ncols:
                    raise ValueError(f"column index {tok} out of range")
                acc |= 1 << j
            rows.append(acc)
        return cls(rows, ncols)


def rank(m: BinaryMatrix) -> int:
    """GF(2) row rank."""
    basis: dict[int, int] = {}
    for r in m.rows:
        v = r
        while v:
            lead = v.bit_length() - 1
            if lead in basis:
                v ^= basis[lead]
            else:
                basis[lead] = v
                break
    return len(basis)


def solve_affine(m: BinaryMatrix, rhs) -> tuple[int | None, list[int]]:
    """Solve ``m x = rhs`` over GF(2).

    Returns ``(x, nullspace_basis)``; ``x`` is ``None`` when the system is
    inconsistent.  Free variables are set to zero in the particular solution.
    """
    rhs = _as_int(rhs)
    if rhs >> m.nrows:
        raise ValueError("rhs longer than row count")
    # augment each row with its rhs bit in column ncols
    n = m.ncols
    rows = [r | (((rhs >> i) & 1) << n) for i, r in enumerate(m.rows)]
    pivots: list[int] = []
    rr = 0
    for col in range(n):
        bit = 1 << col
        piv = next((i for i in range(rr, len(rows)) if rows[i] & bit), None)
        if piv is None:
            continue
        rows[rr], rows[piv] = rows[piv], rows[rr]
        pr = rows[rr]
        for i in range(len(rows)):
            if i != rr and rows[i] & bit:
                rows[i] ^= pr
        pivots.append(col)
        rr += 1
    solution: int | None = 0
    for i in range(rr, len(rows)):
        if rows[i] >> n & 1:
            solution = None
            break
    if solution is not None:
        for i, col in enumerate(pivots):
            if rows[i] >> n & 1:
                solution |= 1 << col
    pivot_set = set(pivots)
    mask = (1 << n) - 1
    basis = []
    for free in range(n):
        if free in pivot_set:
            continue
        v = 1 << free
        for i, col in enumerate(pivots):
            if (rows[i] & mask) >> free & 1:
                v |= 1 << col
        basis.append(v)
    return solution, basis


_PAULI_CHARS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


@dataclass(frozen=True)
class PauliOperator:
    """An n-qubit Pauli up to phase, as x and z bit masks."""

    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask or self.x < 0 or self.z < 0:
            raise ValueError("Pauli bits exceed qubit count")

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n, 0, 0)

    @classmethod
    def from_string(cls, s: str) -> "PauliOperator":
        """Parse ``"XIZY"``; character ``i`` acts on qubit ``i``."""
        x = z = 0
        for i, ch in enumerate(s.upper()):
            if ch in "XY":
                x |= 1 << i
            if ch in "ZY":
                z |= 1 << i
            if ch not in "IXYZ_":
                raise ValueError(f"bad Pauli character {ch!r}")
        return cls(len(s), x, z)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str) -> "PauliOperator":
        b = 1 << qubit
        return cls(n, b if kind in "XY" else 0, b if kind in "ZY" else 0)

    def __str__(self) -> str:
        return "".join(_PAULI_CHARS[((self.x >> i) & 1, (self.z >> i) & 1)] for i in range(self.n))

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        if self.n != other.n:
            raise ValueError("qubit count mismatch")
        return PauliOperator(self.n, self.x ^ other.x, self.z ^ other.z)

    @property
    def support_mask(self) -> int:
        return self.x | self.z

    @property
    def support(self) -> list[int]:
        return list(_iter_bits(self.x | self.z))

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def is_identity(self) -> bool:
        return not (self.x or self.z)

    def restrict(self, mask: int) -> "PauliOperator":
        return PauliOperator(self.n, self.x & mask, self.z & mask)

    def hadamard(self, mask: int) -> "PauliOperator":
        """Conjugate by Hadamards on the qubits in ``mask`` (swap X and Z)."""
        keep = ~mask
        return PauliOperator(
            self.n, (self.x & keep) | (self.z & mask), (self.z & keep) | (self.x & mask)
        )

    def permute(self, perm: Sequence[int]) -> "PauliOperator":
        """New operator whose qubit ``i`` is this operator's qubit ``perm[i]``."""
        x = z = 0
        for i, src in enumerate(perm):
            x |= ((self.x >> src) & 1) << i
            z |= ((self.z >> src) & 1) << i
        return PauliOperator(self.n, x, z)

    def symplectic_int(self) -> int:
        """Pack as ``x | z << n``."""
        return self.x | (self.z << self.n)

    @classmethod
    def from_symplectic_int(cls, n: int, v: int) -> "PauliOperator":
        mask = (1 << n) - 1
        return cls(n, v & mask, (v >> n) & mask)

    def commutes_with(self, other: "PauliOperator") -> bool:
        return symplectic_product(self, other) == 0


def symplectic_product(a: PauliOperator, b: PauliOperator) -> int:
    """0 if ``a`` and ``b`` commute, 1 if they anticommute."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) & 1
