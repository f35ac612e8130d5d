"""Stabilizer and CSS code models.

A code is a list of commuting, independent Pauli generators.  Syndromes are
ints whose bit ``i`` is the commutation value with generator ``i``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, islice, product
from math import comb
from typing import Sequence

import numpy as np

from .gf2 import BinaryMatrix, PauliOperator, rank, symplectic_product

__all__ = [
    "CanonicalForm",
    "CssCode",
    "SearchTooLarge",
    "StabilizerCode",
    "ValidityReport",
    "code_from_json",
]

STABILIZER = "stabilizer"
LOGICAL = "logical"
DETECTABLE = "detectable"

# exhaustive distance searches stop before touching more candidates than this
MAX_DISTANCE_CANDIDATES = 60_000_000


class SearchTooLarge(RuntimeError):
    """An exhaustive search would exceed its resource guard."""


@dataclass
class ValidityReport:
    valid: bool
    anticommuting_pairs: list[tuple[int, int]]
    dependent_generators: list[int]
    rank: int
    r: int
    c: int
    # per-sector certificates for CSS codes: {"x": (r, c), "z": (r, c)}
    sectors: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "anticommuting_pairs": [list(p) for p in self.anticommuting_pairs],
            "dependent_generators": self.dependent_generators,
            "rank": self.rank,
            "r": self.r,
            "c": self.c,
            "sectors": {k: list(v) for k, v in self.sectors.items()},
        }


@dataclass
class CanonicalForm:
    """Result of :meth:`StabilizerCode.canonical_form`.

    ``code`` acts on canonical qubits; canonical qubit ``i`` is original qubit
    ``permutation[i]`` after Hadamards on the original qubits in
    ``hadamard_mask``.
    """

    code: "StabilizerCode"
    permutation: list[int]
    hadamard_mask: int

    def to_original(self, op: PauliOperator) -> PauliOperator:
        x = z = 0
        for i, src in enumerate(self.permutation):
            x |= ((op.x >> i) & 1) << src
            z |= ((op.z >> i) & 1) << src
        return PauliOperator(op.n, x, z).hadamard(self.hadamard_mask)

    def from_original(self, op: PauliOperator) -> PauliOperator:
        return op.hadamard(self.hadamard_mask).permute(self.permutation)


def _reduce(basis: dict[int, int], v: int) -> int:
    while v:
        lead = v.bit_length() - 1
        b = basis.get(lead)
        if b is None:
            return v
        v ^= b
    return 0


def _echelon(vectors: Sequence[int]) -> dict[int, int]:
    basis: dict[int, int] = {}
    for v in vectors:
        v = _reduce(basis, v)
        if v:
            basis[v.bit_length() - 1] = v
    return basis


def _pack_columns(cols: Sequence[int], nbits: int) -> np.ndarray:
    """Split int bit vectors into an (len, words) uint64 array."""
    words = max(1, (nbits + 63) // 64)
    out = np.zeros((len(cols), words), dtype=np.uint64)
    mask = (1 << 64) - 1
    for i, v in enumerate(cols):
        for w in range(words):
            out[i, w] = (v >> (64 * w)) & mask
    return out


def _min_weight_sector(cols: Sequence[int], nbits: int, accept, cap: int) -> int | None:
    """Smallest w <= cap such that some w columns XOR to zero and pass ``accept``.

    ``accept(mask)`` receives the qubit mask of a zero-syndrome candidate.
    """
    n = len(cols)
    packed = _pack_columns(cols, nbits)
    budget = MAX_DISTANCE_CANDIDATES
    for w in range(1, min(cap, n) + 1):
        total = comb(n, w)
        budget -= total
        if budget < 0:
            raise SearchTooLarge(f"weight-{w} search over {n} qubits exceeds the candidate guard")
        it = combinations(range(n), w)
        while True:
            chunk = list(islice(it, 200_000))
            if not chunk:
                break
            idx = np.asarray(chunk, dtype=np.intp)
            acc = np.bitwise_xor.reduce(packed[idx], axis=1)
            hits = np.flatnonzero(~acc.any(axis=1))
            for h in hits:
                mask = 0
                for q in chunk[h]:
                    mask |= 1 << q
                if accept(mask):
                    return w
    return None


class StabilizerCode:
    """A stabilizer code given by its generator list.

    Parameters
    ----------
    n : int
        Number of physical qubits.
    generators : sequence of PauliOperator
        Independent, pairwise commuting generators.
    logical_x, logical_z : optional sequences of PauliOperator
    name : str, optional
    """

    def __init__(
        self,
        n: int,
        generators: Sequence[PauliOperator],
        logical_x: Sequence[PauliOperator] | None = None,
        logical_z: Sequence[PauliOperator] | None = None,
        name: str | None = None,
        distance_hint: int | None = None,
    ):
        for g in generators:
            if g.n != n:
                raise ValueError("generator qubit count mismatch")
        self.n = n
        self.generators = tuple(generators)
        self.num_checks = len(self.generators)
        self.k = n - self.num_checks
        self.name = name
        self.distance_hint = distance_hint
        self.logical_x = tuple(logical_x) if logical_x is not None else None
        self.logical_z = tuple(logical_z) if logical_z is not None else None
        self._stab_basis = None
        self._setup_columns()

    def _setup_columns(self) -> None:
        n = self.n
        sx = [0] * n  # syndrome of X on qubit j
        sz = [0] * n
        for i, g in enumerate(self.generators):
            bit = 1 << i
            for j in range(n):
                if (g.z >> j) & 1:
                    sx[j] |= bit
                if (g.x >> j) & 1:
                    sz[j] |= bit
        self.x_columns = tuple(sx)
        self.z_columns = tuple(sz)

    # basic properties --------------------------------------------------
    @property
    def ldpc_params(self) -> tuple[int, int]:
        r = max((g.weight for g in self.generators), default=0)
        counts = [0] * self.n
        for g in self.generators:
            for q in g.support:
                counts[q] += 1
        return r, max(counts, default=0)

    def check_matrix(self) -> BinaryMatrix:
        """Symplectic generator matrix (X | Z) with 2n columns."""
        return BinaryMatrix([g.symplectic_int() for g in self.generators], 2 * self.n)

    def generator_supports(self) -> list[list[int]]:
        return [g.support for g in self.generators]

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"<{type(self).__name__}{label} [[{self.n},{self.k}]]>"

    # validity ----------------------------------------------------------
    def validate(self) -> ValidityReport:
        gens = self.generators
        bad = [
            (i, j)
            for i in range(len(gens))
            for j in range(i + 1, len(gens))
            if symplectic_product(gens[i], gens[j])
        ]
        m = self.check_matrix()
        keep = set(m.independent_rows())
        dependent = [i for i in range(len(gens)) if i not in keep]
        r, c = self.ldpc_params
        return ValidityReport(
            valid=not bad and not dependent,
            anticommuting_pairs=bad,
            dependent_generators=dependent,
            rank=len(keep),
            r=r,
            c=c,
        )

    # syndromes and classification ------------------------------------
    def _check_dim(self, e: PauliOperator) -> None:
        if e.n != self.n:
            raise ValueError(f"dimension mismatch: code has {self.n} qubits, operator {e.n}")

    def syndrome(self, e: PauliOperator) -> int:
        self._check_dim(e)
        s = 0
        for j in range(self.n):
            if (e.x >> j) & 1:
                s ^= self.x_columns[j]
            if (e.z >> j) & 1:
                s ^= self.z_columns[j]
        return s

    def syndrome_bits(self, x: int, z: int) -> int:
        """Syndrome of the Pauli with masks ``x`` and ``z`` (no checks)."""
        s = 0
        v = x
        while v:
            low = v & -v
            s ^= self.x_columns[low.bit_length() - 1]
            v ^= low
        v = z
        while v:
            low = v & -v
            s ^= self.z_columns[low.bit_length() - 1]
            v ^= low
        return s

    def in_stabilizer(self, p: PauliOperator) -> bool:
        if self._stab_basis is None:
            self._stab_basis = _echelon([g.symplectic_int() for g in self.generators])
        return _reduce(self._stab_basis, p.symplectic_int()) == 0

    def classify(self, p: PauliOperator) -> str:
        self._check_dim(p)
        if self.syndrome(p):
            return DETECTABLE
        return STABILIZER if self.in_stabilizer(p) else LOGICAL

    # distance ----------------------------------------------------------
    def distance(self, weight_cap: int | None = None) -> int | None:
        """Minimum weight of a logical operator, searched exhaustively up to ``weight_cap``."""
        cap = self.n if weight_cap is None else weight_cap
        if cap <= 0 or self.k == 0:
            return None
        n = self.n
        budget = MAX_DISTANCE_CANDIDATES
        for w in range(1, min(cap, n) + 1):
            budget -= comb(n, w) * 3**w
            if budget < 0:
                raise SearchTooLarge(f"weight-{w} Pauli search over {n} qubits exceeds the guard")
            for support in combinations(range(n), w):
                cols = [(self.x_columns[q], self.z_columns[q]) for q in support]
                for kinds in product((1, 2, 3), repeat=w):
                    s = 0
                    for (cx, cz), kd in zip(cols, kinds):
                        if kd & 1:
                            s ^= cx
                        if kd & 2:
                            s ^= cz
                    if s:
                        continue
                    x = z = 0
                    for q, kd in zip(support, kinds):
                        if kd & 1:
                            x |= 1 << q
                        if kd & 2:
                            z |= 1 << q
                    if not self.in_stabilizer(PauliOperator(n, x, z)):
                        return w
        return None

    # canonical form and logicals ---------------------------------------
    def canonical_form(self) -> CanonicalForm:
        n, m = self.n, self.num_checks
        rows = [g.symplectic_int() for g in self.generators]
        if rank(BinaryMatrix(rows, 2 * n)) != m:
            raise ValueError("generators are dependent; validate the code first")

        def eliminate_x(rows, cols_order):
            rows = list(rows)
            pivots = []
            r = 0
            for col in cols_order:
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
            return rows, pivots

        # X pivots are taken from the highest index down so that a code already
        # in (A I | B C) shape keeps the identity permutation.
        rows, xpiv = eliminate_x(rows, range(n - 1, -1, -1))
        had_mask = 0
        if len(xpiv) < m:
            zrows = [v >> n for v in rows[len(xpiv):]]
            free = [q for q in range(n) if q not in set(xpiv)]
            zr = list(zrows)
            rr = 0
            for col in free:
                bit = 1 << col
                piv = next((i for i in range(rr, len(zr)) if zr[i] & bit), None)
                if piv is None:
                    continue
                zr[rr], zr[piv] = zr[piv], zr[rr]
                for i in range(len(zr)):
                    if i != rr and zr[i] & bit:
                        zr[i] ^= zr[rr]
                had_mask |= bit
                rr += 1
            if rr != len(zr):
                raise ValueError("could not complete the X block; generators inconsistent")
            rows = [
                PauliOperator.from_symplectic_int(n, v).hadamard(had_mask).symplectic_int()
                for v in rows
            ]
            rows, xpiv = eliminate_x(rows, range(n - 1, -1, -1))
            assert len(xpiv) == m
        pivset = set(xpiv)
        perm = [q for q in range(n) if q not in pivset] + sorted(xpiv)
        by_pivot = {p: rows[i] for i, p in enumerate(xpiv)}
        ordered = [by_pivot[p] for p in sorted(xpiv)]
        gens = [PauliOperator.from_symplectic_int(n, v).permute(perm) for v in ordered]
        for j, g in enumerate(gens):
            assert g.x >> (n - m) == 1 << j
        code = StabilizerCode(n, gens, name=self.name)
        return CanonicalForm(code, perm, had_mask)

    def derive_logicals(self) -> tuple[list[PauliOperator], list[PauliOperator]]:
        """Return ``(logical_x, logical_z)`` lists of length k."""
        n, m, k = self.n, self.num_checks, self.k
        if k == 0:
            return [], []
        cf = self.canonical_form()
        gens = cf.code.generators
        lx, lz = [], []
        for i in range(k):
            tail_b = tail_a = 0
            for j, g in enumerate(gens):
                if (g.z >> i) & 1:  # B[j, i]
                    tail_b |= 1 << (k + j)
                if (g.x >> i) & 1:  # A[j, i]
                    tail_a |= 1 << (k + j)
            lx.append(cf.to_original(PauliOperator(n, 1 << i, tail_b)))
            lz.append(cf.to_original(PauliOperator(n, 0, (1 << i) | tail_a)))
        return lx, lz

    def with_logicals(self) -> "StabilizerCode":
        lx, lz = self.derive_logicals()
        self.logical_x, self.logical_z = tuple(lx), tuple(lz)
        return self

    # serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        r, c = self.ldpc_params
        d = {
            "type": "stabilizer",
            "name": self.name,
            "n": self.n,
            "k": self.k,
            "generators": [{"x": format(g.x, "x"), "z": format(g.z, "x")} for g in self.generators],
            "ldpc": {"r": r, "c": c},
        }
        if self.distance_hint is not None:
            d["distance"] = self.distance_hint
        if self.logical_x is not None:
            d["logicals"] = {
                "x": [{"x": format(p.x, "x"), "z": format(p.z, "x")} for p in self.logical_x],
                "z": [{"x": format(p.x, "x"), "z": format(p.z, "x")} for p in self.logical_z],
            }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


class CssCode(StabilizerCode):
    """CSS code with X checks ``hx`` and Z checks ``hz``.

    Generators are ordered X rows first, then Z rows, so syndrome bits
    ``0..mx-1`` come from ``hx`` (they see Z errors) and the rest from ``hz``.
    """

    def __init__(self, hx: BinaryMatrix, hz: BinaryMatrix, name: str | None = None, distance_hint=None):
        if hx.ncols != hz.ncols:
            raise ValueError("hx and hz must have the same column count")
        if not (hx @ hz.T).is_zero():
            raise ValueError("hx * hz^T != 0; not a CSS code")
        n = hx.ncols
        gens = [PauliOperator(n, r, 0) for r in hx.rows] + [PauliOperator(n, 0, r) for r in hz.rows]
        self.hx = hx
        self.hz = hz
        self.mx = hx.nrows
        self.mz = hz.nrows
        super().__init__(n, gens, name=name, distance_hint=distance_hint)

    def validate(self) -> ValidityReport:
        rep = super().validate()
        rep.sectors = {
            "x": (max(self.hx.row_weights(), default=0), max(self.hx.col_weights(), default=0)),
            "z": (max(self.hz.row_weights(), default=0), max(self.hz.col_weights(), default=0)),
        }
        return rep

    def sector_distances(self, weight_cap: int | None = None) -> tuple[int | None, int | None]:
        """(d_X, d_Z): minimum weights of X-type and Z-type logicals."""
        cap = self.n if weight_cap is None else weight_cap
        if cap <= 0 or self.k == 0:
            return None, None
        hx_basis = _echelon(self.hx.rows)
        hz_basis = _echelon(self.hz.rows)
        hzt = self.hz.T.rows  # X error on qubit j flips these Z checks
        hxt = self.hx.T.rows
        dx = _min_weight_sector(hzt, self.mz, lambda v: _reduce(hx_basis, v) != 0, cap)
        dz = _min_weight_sector(hxt, self.mx, lambda v: _reduce(hz_basis, v) != 0, cap)
        return dx, dz

    def distance(self, weight_cap: int | None = None) -> int | None:
        dx, dz = self.sector_distances(weight_cap)
        found = [d for d in (dx, dz) if d is not None]
        return min(found) if found else None

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["type"] = "css"
        d["hx"] = self.hx.to_sparse_text()
        d["hz"] = self.hz.to_sparse_text()
        return d


def _pauli_from_hex(n: int, d: dict) -> PauliOperator:
    return PauliOperator(n, int(d["x"], 16), int(d["z"], 16))


def code_from_json(text_or_dict) -> StabilizerCode:
    d = json.loads(text_or_dict) if isinstance(text_or_dict, str) else text_or_dict
    n = d["n"]
    if d.get("type") == "css":
        code = CssCode(
            BinaryMatrix.from_sparse_text(d["hx"]),
            BinaryMatrix.from_sparse_text(d["hz"]),
            name=d.get("name"),
            distance_hint=d.get("distance"),
        )
    else:
        code = StabilizerCode(
            n,
            [_pauli_from_hex(n, g) for g in d["generators"]],
            name=d.get("name"),
            distance_hint=d.get("distance"),
        )
    if "logicals" in d:
        code.logical_x = tuple(_pauli_from_hex(n, p) for p in d["logicals"]["x"])
        code.logical_z = tuple(_pauli_from_hex(n, p) for p in d["logicals"]["z"])
    return code
