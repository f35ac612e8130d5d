"""Minimum-weight decoders for static and repeated noisy syndrome measurement.

Weights are unit weights: each non-identity single-qubit data error and each
flipped syndrome bit costs one.  Syndromes are ints (bit ``i`` = check ``i``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb
from typing import Sequence

import numpy as np

from .gf2 import PauliOperator
from .graphs import Cluster, adjacency_graph, clusters_of, syndrome_adjacency_graph
from .noise import FaultPath
from .stabilizer import SearchTooLarge, StabilizerCode

__all__ = [
    "CAP_EXCEEDED",
    "LOGICAL_FAILURE",
    "SPANNING_FAILURE",
    "SUCCESS",
    "UNKNOWN",
    "ClusterDecoder",
    "DecodeResult",
    "DetectorModel",
    "FailureReport",
    "LogicalChecker",
    "SyndromeTable",
    "decode_spacetime",
    "decode_static",
    "failure_diagnostics",
    "greedy_cluster_decode",
    "min_weight_solutions",
    "spacetime_marks",
]

SUCCESS = "success"
LOGICAL_FAILURE = "logical_failure"
SPANNING_FAILURE = "spanning_cluster_failure"
CAP_EXCEEDED = "decoder_cap_exceeded"
UNKNOWN = "unknown"

MAX_TABLE_CHECKS = 20
MAX_DP_CHECKS = 13


# -- exhaustive enumeration by weight -------------------------------------------


def _kinds(w: int) -> np.ndarray:
    """All 3^w assignments of X=1, Z=2, Y=3 to w positions."""
    return np.array(list(product((1, 2, 3), repeat=w)), dtype=np.int64).reshape(-1, w)


def _weight_class(code: StabilizerCode, w: int, chunk: int = 1 << 20):
    """Yield (x, z, syndrome) uint64 arrays covering every weight-w Pauli."""
    n = code.n
    if n > 63 or code.num_checks > 64:
        raise SearchTooLarge("vectorised enumeration needs n <= 63 and at most 64 checks")
    if w == 0:
        zero = np.zeros(1, dtype=np.uint64)
        yield zero, zero.copy(), zero.copy()
        return
    sx = np.array(code.x_columns, dtype=np.uint64)
    sz = np.array(code.z_columns, dtype=np.uint64)
    kinds = _kinds(w)
    kx = (kinds & 1).astype(bool)
    kz = (kinds & 2).astype(bool)
    per = max(1, chunk // len(kinds))
    it = combinations(range(n), w)
    while True:
        block = []
        for c in it:
            block.append(c)
            if len(block) >= per:
                break
        if not block:
            return
        cmb = np.asarray(block, dtype=np.int64)  # (B, w)
        bits = np.left_shift(np.uint64(1), cmb.astype(np.uint64))  # (B, w)
        x = np.zeros((len(cmb), len(kinds)), dtype=np.uint64)
        z = np.zeros_like(x)
        s = np.zeros_like(x)
        for j in range(w):
            bj = bits[:, j : j + 1]
            x |= np.where(kx[None, :, j], bj, np.uint64(0))
            z |= np.where(kz[None, :, j], bj, np.uint64(0))
            s ^= np.where(kx[None, :, j], sx[cmb[:, j]][:, None], np.uint64(0))
            s ^= np.where(kz[None, :, j], sz[cmb[:, j]][:, None], np.uint64(0))
        yield x.ravel(), z.ravel(), s.ravel()
        if len(block) < per:
            return


class SyndromeTable:
    """Minimum-weight coset leader for every syndrome of a small code.

    Among equal-weight candidates the smallest ``(x, z)`` pair (compared as
    integers, x first) is kept.
    """

    def __init__(self, code: StabilizerCode, max_checks: int = MAX_TABLE_CHECKS):
        m = code.num_checks
        if m > max_checks:
            raise SearchTooLarge(f"{m} checks is too many for a full syndrome table")
        size = 1 << m
        self.code = code
        self.weights = np.full(size, -1, dtype=np.int16)
        self.x = np.zeros(size, dtype=np.uint64)
        self.z = np.zeros(size, dtype=np.uint64)
        filled = 0
        for w in range(code.n + 1):
            xs, zs, ss = [], [], []
            for x, z, s in _weight_class(code, w):
                keep = self.weights[s.astype(np.int64)] < 0
                xs.append(x[keep])
                zs.append(z[keep])
                ss.append(s[keep])
            if xs:
                x = np.concatenate(xs)
                z = np.concatenate(zs)
                s = np.concatenate(ss).astype(np.int64)
                order = np.lexsort((z, x, s))
                s, x, z = s[order], x[order], z[order]
                first = np.ones(len(s), dtype=bool)
                first[1:] = s[1:] != s[:-1]
                s, x, z = s[first], x[first], z[first]
                self.weights[s] = w
                self.x[s] = x
                self.z[s] = z
                filled += len(s)
            if filled == size:
                break
        self.max_weight = int(self.weights.max())
        if filled != size:
            raise ValueError("some syndromes are unreachable; generators may be dependent")

    def lookup(self, syndrome: int) -> PauliOperator:
        return PauliOperator(self.code.n, int(self.x[syndrome]), int(self.z[syndrome]))

    def weight(self, syndrome: int) -> int:
        return int(self.weights[syndrome])


_TABLES: dict[int, SyndromeTable] = {}


def syndrome_table(code: StabilizerCode) -> SyndromeTable:
    """Per-code cached table (codes are immutable)."""
    key = id(code)
    tab = _TABLES.get(key)
    if tab is None or tab.code is not code:
        tab = SyndromeTable(code)
        _TABLES[key] = tab
    return tab


def min_weight_solutions(code: StabilizerCode, syndrome: int, weight_cap: int) -> list[PauliOperator]:
    """Every minimum-weight Pauli with the given syndrome, if weight <= cap."""
    for w in range(weight_cap + 1):
        total = comb(code.n, w) * 3**w
        if total > 200_000_000:
            raise SearchTooLarge(f"weight-{w} enumeration over {code.n} qubits is too large")
        found = []
        for x, z, s in _weight_class(code, w):
            hit = np.flatnonzero(s == np.uint64(syndrome))
            found.extend((int(x[i]), int(z[i])) for i in hit)
        if found:
            found.sort()
            return [PauliOperator(code.n, x, z) for x, z in found]
    return []


def decode_static(
    code: StabilizerCode,
    syndrome: int,
    weight_cap: int | None = None,
    tie_break: str = "lex",
    seed=None,
) -> PauliOperator | None:
    """Minimum-weight Pauli with the given syndrome, or ``None`` above the cap.

    ``tie_break="lex"`` returns the smallest ``(x, z)``; ``"random"`` picks a
    minimum-weight solution uniformly with a generator seeded by ``seed``.
    """
    if syndrome >> code.num_checks:
        raise ValueError("syndrome longer than the check count")
    cap = code.n if weight_cap is None else weight_cap
    if tie_break == "lex" and code.num_checks <= MAX_TABLE_CHECKS:
        tab = syndrome_table(code)
        return tab.lookup(syndrome) if tab.weight(syndrome) <= cap else None
    sols = min_weight_solutions(code, syndrome, cap)
    if not sols:
        return None
    if tie_break == "random":
        rng = np.random.default_rng(seed)
        return sols[int(rng.integers(len(sols)))]
    return sols[0]


# -- classification -------------------------------------------------------------


class LogicalChecker:
    """Fast test of whether a trivial-syndrome Pauli is a non-trivial logical."""

    def __init__(self, code: StabilizerCode):
        if code.logical_x is None:
            lx, lz = code.derive_logicals()
        else:
            lx, lz = code.logical_x, code.logical_z
        self.code = code
        self.ops = [(p.x, p.z) for p in list(lx) + list(lz)]

    def is_logical(self, x: int, z: int) -> bool:
        for lx_, lz_ in self.ops:
            if ((x & lz_).bit_count() + (z & lx_).bit_count()) & 1:
                return True
        return False

    def is_logical_batch(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        """Vectorised version for uint64 arrays (n <= 64)."""
        out = np.zeros(x.shape, dtype=bool)
        for lx_, lz_ in self.ops:
            par = np.bitwise_count(x & np.uint64(lz_)) + np.bitwise_count(z & np.uint64(lx_))
            out |= (par & 1).astype(bool)
        return out


_CHECKERS: dict[int, LogicalChecker] = {}


def logical_checker(code: StabilizerCode) -> LogicalChecker:
    chk = _CHECKERS.get(id(code))
    if chk is None or chk.code is not code:
        chk = LogicalChecker(code)
        _CHECKERS[id(code)] = chk
    return chk


# -- results --------------------------------------------------------------------


@dataclass
class DecodeResult:
    correction: PauliOperator | None
    residual_estimate: PauliOperator | None
    status: str
    round_corrections: tuple = ()
    synd_corrections: tuple = ()
    weight: int | None = None
    diagnostics: list = field(default_factory=list)

    def deduced_path(self, num_checks: int) -> FaultPath:
        n = self.round_corrections[0].n
        return FaultPath(PauliOperator(n), tuple(self.round_corrections), tuple(self.synd_corrections), num_checks)

    def to_dict(self) -> dict:
        def pauli(p):
            return None if p is None else str(p)

        return {
            "status": self.status,
            "weight": self.weight,
            "correction": pauli(self.correction),
            "residual_estimate": pauli(self.residual_estimate),
            "round_corrections": [str(p) for p in self.round_corrections],
            "synd_corrections": [format(c, "x") for c in self.synd_corrections],
            "diagnostics": [
                {"size": c.size, "errors": c.errors, "nodes": sorted(map(list, c.nodes))} for c in self.diagnostics
            ],
        }


def spacetime_marks(
    truth: FaultPath, rounds: Sequence[PauliOperator], synd: Sequence[int], residual: PauliOperator
) -> tuple[list, list]:
    """Marked nodes and actual-error nodes on the layered graph.

    Qubit ``(x, t)`` is marked where ``E_t F_t`` acts (round 1 includes the
    initialization error), ``(b, t)`` where ``B_t xor C_t`` is set, and
    ``(x, T+1)`` on the support of the residual.
    """
    T = truth.T
    marked, actual = [], []
    for t in range(T):
        f = truth.data_errors[t] * truth.init_error if t == 0 else truth.data_errors[t]
        diff = (f * rounds[t]).support_mask
        marked += [("q", x, t + 1) for x in _bits(diff)]
        actual += [("q", x, t + 1) for x in _bits(f.support_mask)]
        marked += [("b", b, t + 1) for b in _bits(truth.synd_errors[t] ^ synd[t])]
        actual += [("b", b, t + 1) for b in _bits(truth.synd_errors[t])]
    marked += [("q", x, T + 1) for x in _bits(residual.support_mask)]
    return marked, actual


def _bits(v: int):
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def _finish(code, truth, rounds, synd, weight, residual_decoder, graph_cache) -> DecodeResult:
    """Attach the residual estimate and the ground-truth status."""
    n = code.n
    corr = PauliOperator(n)
    for e in rounds:
        corr = corr * e
    if truth is None:
        return DecodeResult(corr, PauliOperator(n), UNKNOWN, tuple(rounds), tuple(synd), weight)
    actual = truth.cumulative_error()
    res_syn = truth.synd_errors[-1] ^ synd[-1]
    g = residual_decoder(res_syn)
    if g is None:
        return DecodeResult(corr, None, CAP_EXCEEDED, tuple(rounds), tuple(synd), weight)
    composite = actual * corr * g
    assert code.syndrome(composite) == 0, "residual does not cancel the syndrome"
    logical = logical_checker(code).is_logical(composite.x, composite.z)
    status = LOGICAL_FAILURE if logical else SUCCESS
    spanning = _spanning(code, truth, rounds, synd, g, graph_cache)
    if not logical and spanning:
        status = SPANNING_FAILURE
    return DecodeResult(corr, g, status, tuple(rounds), tuple(synd), weight, spanning)


def _spanning(code, truth, rounds, synd, g, graph_cache) -> list:
    """Clusters reaching from layer 1 to layer T+1 (empty list if none)."""
    T = truth.T
    # a spanning cluster needs a mark in every qubit and check layer
    if g.is_identity() or not all(synd[t] ^ truth.synd_errors[t] for t in range(T)):
        return []
    for t in range(T):
        f = truth.data_errors[t] * truth.init_error if t == 0 else truth.data_errors[t]
        if (f * rounds[t]).is_identity():
            return []
    marked, actual = spacetime_marks(truth, rounds, synd, g)
    key = (id(code), T)
    graph = graph_cache.get(key)
    if graph is None:
        graph = syndrome_adjacency_graph(code, T)
        graph_cache[key] = graph
    return [c for c in clusters_of(marked, graph, actual) if c.spans(1, T + 1)]


_GRAPHS: dict = {}


# -- exact space-time decoding --------------------------------------------------


def _minplus_xor(h: np.ndarray, w: np.ndarray, shift: int, m: int) -> np.ndarray:
    """out[a] = min_b h[b] + w[a ^ b ^ shift]."""
    N = 1 << m
    idx = np.arange(N, dtype=np.int32) ^ shift
    out = np.empty(N, dtype=np.int32)
    step = 512
    for lo in range(0, N, step):
        blk = np.arange(lo, min(lo + step, N), dtype=np.int32)[:, None] ^ idx[None, :]
        out[lo : lo + step] = (h[None, :] + w[blk]).min(axis=1)
    return out


def decode_spacetime(
    code: StabilizerCode,
    deltas: Sequence[int],
    T: int | None = None,
    weight_cap: int | None = None,
    truth: FaultPath | None = None,
) -> DecodeResult:
    """Exact minimum-weight fault path for difference syndromes ``deltas``.

    Dynamic programming over the syndrome-error state ``C_t``: round ``t``
    costs ``|C_t| + w(Delta_t ^ C_{t-1} ^ C_t)`` where ``w`` is the
    minimum data-error weight for a syndrome.  Among optimal paths the
    sequence ``(C_1, ..., C_T)`` is lexicographically smallest and each
    ``E_t`` is the table's coset leader.  With ``truth`` the status compares
    the full cycle against the actual faults; otherwise it is ``unknown``.
    """
    T = len(deltas) if T is None else T
    if len(deltas) != T:
        raise ValueError("need one difference syndrome per round")
    m = code.num_checks
    if m > MAX_DP_CHECKS:
        raise SearchTooLarge(f"exact space-time decoding supports at most {MAX_DP_CHECKS} checks")
    tab = syndrome_table(code)
    N = 1 << m
    w = tab.weights.astype(np.int32)
    pop = np.bitwise_count(np.arange(N, dtype=np.uint32)).astype(np.int32)
    # cost-to-go after choosing C_t = b, for t = T .. 1
    togo = [None] * (T + 2)
    togo[T + 1] = np.zeros(N, dtype=np.int32)
    for t in range(T, 1, -1):
        h = pop + togo[t + 1]
        togo[t] = _minplus_xor(h, w, deltas[t - 1], m)
    chosen = []
    prev = 0
    total = 0
    for t in range(1, T + 1):
        vals = pop + w[np.arange(N) ^ (deltas[t - 1] ^ prev)] + togo[t + 1]
        b = int(np.argmin(vals))
        if t == 1:
            total = int(vals[b])
        chosen.append(b)
        prev = b
    if weight_cap is not None and total > weight_cap:
        return DecodeResult(None, None, CAP_EXCEEDED, weight=total)
    rounds = []
    prev = 0
    for t in range(T):
        rounds.append(tab.lookup(deltas[t] ^ prev ^ chosen[t]))
        prev = chosen[t]

    def residual(s):
        return tab.lookup(s)

    return _finish(code, truth, rounds, chosen, total, residual, _GRAPHS)


# -- detector models and the cluster decoder ------------------------------------


class DetectorModel:
    """Detectors plus weight-one fault mechanisms, each flipping a detector set.

    ``labels[i]`` is ``("data", t, q, kind)`` with kind 1=X, 2=Z, 3=Y or
    ``("meas", t, b)``.  Detector ``(t - 1) * m + b`` is bit ``b`` of
    ``Delta_t``.  The static model is the ``T = 1`` case without measurement
    mechanisms.
    """

    def __init__(self, code: StabilizerCode, T: int = 1, measurement_faults: bool = True):
        n, m = code.n, code.num_checks
        self.code, self.T, self.m = code, T, m
        self.num_detectors = m * T
        labels, dets = [], []
        for t in range(1, T + 1):
            off = (t - 1) * m
            for q in range(n):
                for kind in (1, 2, 3):
                    s = (code.x_columns[q] if kind & 1 else 0) ^ (code.z_columns[q] if kind & 2 else 0)
                    if s:
                        labels.append(("data", t, q, kind))
                        dets.append(tuple(off + b for b in _bits(s)))
            if measurement_faults:
                for b in range(m):
                    pair = (off + b, off + m + b) if t < T else (off + b,)
                    labels.append(("meas", t, b))
                    dets.append(pair)
        self.labels = labels
        self.dets = dets
        self.det_masks = [sum(1 << d for d in ds) for ds in dets]
        touching: list[list[int]] = [[] for _ in range(self.num_detectors)]
        for i, ds in enumerate(dets):
            for d in ds:
                touching[d].append(i)
        self.touching = touching
        by_mask: dict[int, int] = {}
        for i, mk in enumerate(self.det_masks):
            by_mask.setdefault(mk, i)  # earliest mechanism wins ties
        self.by_mask = by_mask

    def apply(self, mechanisms: Sequence[int]):
        """Per-round data corrections and syndrome flips for a mechanism set."""
        n = self.code.n
        xs = [0] * self.T
        zs = [0] * self.T
        cs = [0] * self.T
        for i in mechanisms:
            lab = self.labels[i]
            if lab[0] == "data":
                _, t, q, kind = lab
                if kind & 1:
                    xs[t - 1] ^= 1 << q
                if kind & 2:
                    zs[t - 1] ^= 1 << q
            else:
                _, t, b = lab
                cs[t - 1] ^= 1 << b
        return [PauliOperator(n, x, z) for x, z in zip(xs, zs)], cs


class ClusterDecoder:
    """Cluster growth over a detector model with exact local solves.

    Defects start as singleton clusters.  Each round every cluster whose
    defects cannot be explained by mechanisms lying inside its region grows by
    one mechanism layer; clusters with overlapping regions merge.  Each final
    cluster's defect set is then solved for minimum weight: iterative
    deepening on the mechanisms through the lowest remaining defect up to
    ``search_cap``, then a mixed-integer program over the region with a node
    limit.  Exceeding that limit flags the decode as capped.  The local solve
    depends only on the defect set, so results can be cached across trials
    without making outcomes depend on trial order.
    """

    def __init__(
        self,
        model: DetectorModel,
        search_cap: int = 4,
        milp_node_limit: int = 5000,
        milp_max_defects: int = 160,
    ):
        self.model = model
        self.search_cap = search_cap
        self.milp_node_limit = milp_node_limit
        self.milp_max_defects = milp_max_defects
        # most detectors a single mechanism can flip; gives weight >= |D| / kmax
        self.kmax = max((len(d) for d in model.dets), default=1)
        self.cache: dict[int, tuple | None] = {}
        self.cluster_cache: dict[int, tuple | None] = {}

    # cluster growth ----------------------------------------------------------
    def _inside(self, region: set) -> list:
        mdl = self.model
        seen = set()
        out = []
        for d in region:
            for i in mdl.touching[d]:
                if i not in seen:
                    seen.add(i)
                    if all(x in region for x in mdl.dets[i]):
                        out.append(i)
        out.sort()
        return out

    def _grow(self, region: set) -> set:
        mdl = self.model
        grown = set(region)
        for d in region:
            for i in mdl.touching[d]:
                grown.update(mdl.dets[i])
        return grown

    def clusters(self, defect_mask: int) -> list[tuple[int, set]]:
        """Partition the defects into settled clusters: list of (defects, region).

        A cluster is settled once its growth radius reaches the weight of the
        best local explanation of its defects, so any cheaper explanation that
        pairs it with another cluster would have forced the two regions to meet.
        """
        # [defects, region, radius]
        clusters = [[1 << d, {d}, 0] for d in _bits(defect_mask)]
        while True:
            changed = False
            for cl in clusters:
                lower = -(-cl[0].bit_count() // self.kmax)
                if lower <= cl[2]:
                    sol = self.solve(cl[0])
                    if sol is not None and len(sol) <= cl[2]:
                        continue
                grown = self._grow(cl[1])
                if len(grown) == len(cl[1]):
                    continue  # saturated: nothing left to absorb
                cl[1] = grown
                cl[2] += 1
                changed = True
            merged: list = []
            for cl in clusters:
                hit = [o for o in merged if not o[1].isdisjoint(cl[1])]
                if not hit:
                    merged.append(cl)
                    continue
                base = hit[0]
                for o in [cl] + hit[1:]:
                    base[0] |= o[0]
                    base[1] |= o[1]
                    base[2] = min(base[2], o[2])
                    if o is not cl:
                        merged.remove(o)
                changed = True
            clusters = merged
            if not changed:
                return [(c[0], c[1]) for c in clusters]

    # local solve -------------------------------------------------------------
    def _search(self, defects: int, depth: int, chosen: list, out: list) -> None:
        if defects == 0:
            out.append(tuple(sorted(chosen)))
            return
        if depth == 0 or defects.bit_count() > depth * self.kmax:
            return
        mdl = self.model
        d0 = (defects & -defects).bit_length() - 1
        if depth == 1:
            i = mdl.by_mask.get(defects)
            if i is not None:
                out.append(tuple(sorted(chosen + [i])))
            return
        for i in mdl.touching[d0]:
            chosen.append(i)
            self._search(defects ^ mdl.det_masks[i], depth - 1, chosen, out)
            chosen.pop()

    def solve(self, defects: int):
        """Minimum-weight mechanism tuple for ``defects`` or None when capped."""
        if defects in self.cluster_cache:
            return self.cluster_cache[defects]
        result = None
        for depth in range(0, self.search_cap + 1):
            out: list = []
            self._search(defects, depth, [], out)
            if out:
                result = min(out)
                break
        if result is None:
            result = self._milp(defects)
        self.cluster_cache[defects] = result
        return result

    def _milp(self, defects: int):
        from scipy.optimize import Bounds, LinearConstraint, milp
        from scipy.sparse import coo_matrix

        mdl = self.model
        if defects.bit_count() > self.milp_max_defects:
            return None
        inside = list(range(len(mdl.dets)))
        dets = list(range(mdl.num_detectors))
        row = {d: r for r, d in enumerate(dets)}
        nv = len(inside)
        rows, cols = [], []
        for j, i in enumerate(inside):
            for d in mdl.dets[i]:
                rows.append(row[d])
                cols.append(j)
        # M x - 2 y = defects, x binary, y integer slack
        nd = len(dets)
        rows += list(range(nd))
        cols += [nv + r for r in range(nd)]
        vals = [1.0] * (len(rows) - nd) + [-2.0] * nd
        A = coo_matrix((vals, (rows, cols)), shape=(nd, nv + nd))
        rhs = np.array([(defects >> d) & 1 for d in dets], dtype=float)
        cost = np.concatenate([np.ones(nv), np.zeros(nd)])
        ub = np.concatenate([np.ones(nv), np.full(nd, np.inf)])
        res = milp(
            cost,
            constraints=LinearConstraint(A, rhs, rhs),
            integrality=np.ones(nv + nd),
            bounds=Bounds(np.zeros(nv + nd), ub),
            options={"node_limit": self.milp_node_limit, "presolve": True},
        )
        if res.status != 0 or res.x is None:
            return None
        pick = [inside[j] for j in range(nv) if res.x[j] > 0.5]
        return tuple(sorted(pick))

    def decode(self, defect_mask: int):
        """Mechanism tuple explaining ``defect_mask`` or None when capped."""
        if defect_mask in self.cache:
            return self.cache[defect_mask]
        picks: list[int] = []
        result: tuple | None = None
        for defects, _region in self.clusters(defect_mask):
            sol = self.solve(defects)
            if sol is None:
                break
            picks.extend(sol)
        else:
            result = tuple(sorted(picks))
        if len(self.cache) > 2_000_000:
            self.cache.clear()
        self.cache[defect_mask] = result
        return result


_CLUSTER_DECODERS: dict = {}


def cluster_decoder(code: StabilizerCode, T: int, static: bool = False, **kw) -> ClusterDecoder:
    key = (id(code), T, static, tuple(sorted(kw.items())))
    dec = _CLUSTER_DECODERS.get(key)
    if dec is None or dec.model.code is not code:
        model = DetectorModel(code, T, measurement_faults=not static)
        dec = ClusterDecoder(model, **kw)
        _CLUSTER_DECODERS[key] = dec
    return dec


def decode_static_clusters(code: StabilizerCode, syndrome: int, **kw) -> PauliOperator | None:
    dec = cluster_decoder(code, 1, static=True, **kw)
    mech = dec.decode(syndrome)
    if mech is None:
        return None
    rounds, _ = dec.model.apply(mech)
    return rounds[0]


def pack_deltas(deltas: Sequence[int], m: int) -> int:
    out = 0
    for t, d in enumerate(deltas):
        out |= d << (t * m)
    return out


def greedy_cluster_decode(
    code: StabilizerCode,
    deltas: Sequence[int],
    T: int | None = None,
    truth: FaultPath | None = None,
    **kw,
) -> DecodeResult:
    """Cluster-growth decoder on the space-time detector model.

    The residual estimate for the final syndrome uses the same clustering on
    the static model.  A capped local search gives ``decoder_cap_exceeded``.
    """
    T = len(deltas) if T is None else T
    if len(deltas) != T:
        raise ValueError("need one difference syndrome per round")
    dec = cluster_decoder(code, T, **kw)
    mech = dec.decode(pack_deltas(deltas, code.num_checks))
    if mech is None:
        return DecodeResult(None, None, CAP_EXCEEDED)
    rounds, synd = dec.model.apply(mech)
    weight = sum(r.weight for r in rounds) + sum(c.bit_count() for c in synd)

    def residual(s):
        return decode_static_clusters(code, s, **kw)

    return _finish(code, truth, rounds, synd, weight, residual, _GRAPHS)


# -- failure diagnostics --------------------------------------------------------


@dataclass
class FailureReport:
    clusters: list[Cluster]
    distance: int | None
    # static: some cluster with s >= d and errors >= ceil(s/2)
    witness_half: bool
    # space-time: the weaker errors >= s/4 predicate
    witness_quarter: bool
    failed: bool

    def witnesses(self) -> list[Cluster]:
        d = self.distance or 1
        return [c for c in self.clusters if c.size >= d and 2 * c.errors >= c.size]


def failure_diagnostics(
    code: StabilizerCode,
    actual,
    result: DecodeResult,
    distance: int | None = None,
) -> FailureReport:
    """Clusters of the actual-versus-deduced difference.

    ``actual`` is a PauliOperator (static decoding, clusters on the qubit
    adjacency graph) or a FaultPath (space-time decoding, clusters on the
    layered graph).
    """
    d = distance if distance is not None else code.distance_hint
    failed = result.status not in (SUCCESS, UNKNOWN)
    if isinstance(actual, PauliOperator):
        graph = _GRAPHS.get((id(code), "adj"))
        if graph is None:
            graph = adjacency_graph(code)
            _GRAPHS[(id(code), "adj")] = graph
        diff = actual * result.correction
        clusters = clusters_of(list(_bits(diff.support_mask)), graph, list(_bits(actual.support_mask)))
    else:
        graph = _GRAPHS.get((id(code), actual.T))
        if graph is None:
            graph = syndrome_adjacency_graph(code, actual.T)
            _GRAPHS[(id(code), actual.T)] = graph
        marked, errs = spacetime_marks(actual, result.round_corrections, result.synd_corrections, result.residual_estimate)
        clusters = clusters_of(marked, graph, errs)
    dd = d or 1
    half = any(c.size >= dd and 2 * c.errors >= c.size for c in clusters)
    quarter = any(c.size >= dd and 4 * c.errors >= c.size for c in clusters)
    return FailureReport(clusters, d, half, quarter, failed)
