"""Classical seed codes and hypergraph-product quantum codes."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import log
from typing import Sequence

import numpy as np

from .gf2 import BinaryMatrix, rank
from .stabilizer import CssCode, SearchTooLarge

__all__ = [
    "ClassicalCode",
    "CodeFamily",
    "code_family",
    "hamming_code",
    "hypergraph_product",
    "random_gallager_ldpc",
    "repetition_code",
    "tanner_girth",
]


@dataclass
class ClassicalCode:
    h: BinaryMatrix
    name: str = ""
    girth: int | None = None
    n: int = field(init=False)
    k: int = field(init=False)

    def __post_init__(self):
        self.n = self.h.ncols
        self.k = self.n - rank(self.h)

    @property
    def ldpc_params(self) -> tuple[int, int]:
        return max(self.h.row_weights(), default=0), max(self.h.col_weights(), default=0)

    @property
    def full_rank(self) -> bool:
        return rank(self.h) == self.h.nrows

    def reduced(self) -> "ClassicalCode":
        """Same code with redundant checks dropped (earliest rows kept)."""
        keep = self.h.independent_rows()
        return ClassicalCode(self.h.select_rows(keep), name=self.name, girth=self.girth)

    def codewords_basis(self) -> list[int]:
        return self.h.nullspace()

    def distance(self, max_dim: int = 24) -> int | None:
        """Minimum nonzero codeword weight by enumerating the code space."""
        basis = self.codewords_basis()
        if not basis:
            return None
        if len(basis) > max_dim:
            raise SearchTooLarge(f"code dimension {len(basis)} too large to enumerate")
        # Gray-code walk over all 2^k codewords
        best = self.n + 1
        word = 0
        for i in range(1, 1 << len(basis)):
            flip = (i & -i).bit_length() - 1
            word ^= basis[flip]
            w = word.bit_count()
            if w < best:
                best = w
        return best


def repetition_code(L: int) -> ClassicalCode:
    """[L, 1, L] repetition code with checks on adjacent pairs."""
    if L < 2:
        raise ValueError("repetition code needs L >= 2")
    return ClassicalCode(BinaryMatrix([0b11 << i for i in range(L - 1)], L), name=f"rep{L}")


def hamming_code() -> ClassicalCode:
    """[7, 4, 3] Hamming code; column j is the binary expansion of j+1."""
    rows = [sum(1 << j for j in range(7) if ((j + 1) >> b) & 1) for b in range(3)]
    return ClassicalCode(BinaryMatrix(rows, 7), name="hamming7")


def tanner_girth(h: BinaryMatrix) -> int | None:
    """Length of the shortest cycle in the Tanner graph (None if acyclic)."""
    m, n = h.shape
    adj: list[list[int]] = [[] for _ in range(n + m)]
    for i, row in enumerate(h.rows):
        for j in range(n):
            if (row >> j) & 1:
                adj[j].append(n + i)
                adj[n + i].append(j)
    best = None
    for src in range(n):
        dist = {src: 0}
        parent = {src: -1}
        dq = deque([src])
        while dq:
            u = dq.popleft()
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    dq.append(v)
                elif parent[u] != v:
                    cyc = dist[u] + dist[v] + 1
                    if best is None or cyc < best:
                        best = cyc
    return best


def random_gallager_ldpc(n: int, r: int, c: int, seed=None, max_tries: int = 1000) -> ClassicalCode:
    """Random (r, c)-regular parity-check matrix.

    With ``r | n`` this is Gallager's ensemble: ``c`` stacked copies of a
    band block, each with a random column permutation.  Otherwise checks are
    filled from a shuffled socket list, rejecting draws with a repeated edge.
    """
    if min(n, r, c) < 2:
        raise ValueError("n, r, c must all be >= 2")
    if (n * c) % r:
        raise ValueError("n*c must be divisible by r")
    if r > n:
        raise ValueError("row weight exceeds length")
    rng = np.random.default_rng(seed)
    rows: list[int] = []
    if n % r == 0:
        per_block = n // r
        for _ in range(c):
            perm = rng.permutation(n)
            for b in range(per_block):
                rows.append(sum(1 << int(perm[b * r + t]) for t in range(r)))
    else:
        m = n * c // r
        sockets = np.repeat(np.arange(n), c)
        for _ in range(max_tries):
            rng.shuffle(sockets)
            groups = sockets.reshape(m, r)
            if all(len(set(g.tolist())) == r for g in groups):
                rows = [sum(1 << int(q) for q in g) for g in groups]
                break
        else:
            raise RuntimeError("could not draw a simple regular matrix")
    h = BinaryMatrix(rows, n)
    return ClassicalCode(h, name=f"gallager{n}_{r}_{c}", girth=tanner_girth(h))


def hypergraph_product(cl: ClassicalCode, reduce: bool = False, distance_hint: int | None = None) -> CssCode:
    """Hypergraph product of a classical code with itself.

    ``hx = (H (x) I_n | I_m (x) H^T)`` and ``hz = (I_n (x) H | H^T (x) I_m)``.
    Qubits ``0..n^2-1`` are the (bit, bit) sector, the rest the (check, check)
    sector.  ``H`` must have independent rows unless ``reduce`` is set.
    """
    if not cl.full_rank:
        if not reduce:
            raise ValueError("parity-check matrix is rank deficient; pass reduce=True")
        cl = cl.reduced()
    h = cl.h
    m, n = h.shape
    ht = h.T
    hx = h.kron(BinaryMatrix.identity(n)).hstack(BinaryMatrix.identity(m).kron(ht))
    hz = BinaryMatrix.identity(n).kron(h).hstack(ht.kron(BinaryMatrix.identity(m)))
    if distance_hint is None:
        try:
            distance_hint = cl.distance()
        except SearchTooLarge:
            distance_hint = None
    name = f"hgp({cl.name})" if cl.name else None
    return CssCode(hx, hz, name=name, distance_hint=distance_hint)


@dataclass
class CodeFamily:
    seed_kind: str
    sizes: list[int]
    codes: list[CssCode]

    @property
    def n(self) -> list[int]:
        return [c.n for c in self.codes]

    @property
    def k(self) -> list[int]:
        return [c.k for c in self.codes]

    @property
    def gaps(self) -> list[int]:
        ns = self.n
        return [b - a for a, b in zip(ns, ns[1:])]

    @property
    def beta(self) -> float | None:
        """Smallest exponent with every gap n_i - n_{i-1} <= n_{i-1}^beta."""
        ns = self.n
        if len(ns) < 2:
            return None
        return max(log(g) / log(a) for a, g in zip(ns, self.gaps))

    def __len__(self) -> int:
        return len(self.codes)

    def __iter__(self):
        return iter(self.codes)

    def __getitem__(self, i):
        return self.codes[i]


def code_family(seed_kind: str, sizes: Sequence[int], r: int = 4, c: int = 3, seed=0) -> CodeFamily:
    """Hypergraph products of a seed family at increasing sizes.

    ``seed_kind`` is ``"repetition"`` (size = L) or ``"gallager"`` (size = n,
    using row weight ``r`` and column weight ``c``).
    """
    sizes = list(sizes)
    if not sizes:
        raise ValueError("need at least one size")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    codes = []
    for i, size in enumerate(sizes):
        if seed_kind == "repetition":
            cl = repetition_code(size)
        elif seed_kind == "gallager":
            cl = random_gallager_ldpc(size, r, c, seed=np.random.SeedSequence(seed, spawn_key=(i,)))
        elif seed_kind == "hamming":
            if size != 7:
                raise ValueError("hamming seed only exists at size 7")
            cl = hamming_code()
        else:
            raise ValueError(f"unknown seed kind {seed_kind!r}")
        codes.append(hypergraph_product(cl, reduce=True))
    return CodeFamily(seed_kind, sizes, codes)

