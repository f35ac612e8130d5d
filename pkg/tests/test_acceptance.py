"""Acceptance criteria 1-14.

Each test records ``(passed, detail)`` in ``LOG``; the conftest hook prints one
line per criterion at the end of the session.  Run directly with
``python tests/test_acceptance.py`` for the same summary without pytest's
per-test output.

Expected values here come from brute-force oracles written in this file
(small GF(2) helpers, exhaustive enumerations, mpmath re-evaluation), never
from the package functions under test.
"""

import functools
import itertools
import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from qldpc_lab import (
    ExperimentConfig,
    PauliOperator,
    StabilizerCode,
    hamming_code,
    hypergraph_product,
    repetition_code,
    run_memory_experiment,
    threshold_scan,
)
from qldpc_lab.decoders import decode_spacetime, decode_static
from qldpc_lab.graphs import (
    adjacency_graph,
    brute_force_cluster_extensions,
    count_cluster_extensions,
    cycle_graph,
    path_graph,
)
from qldpc_lab.noise import FaultPath, observed_syndromes
from qldpc_lab.overhead import (
    ProtocolParams,
    effective_rates,
    failure_bounds,
    location_budget,
    logical_gate_threshold_checks,
    plan_blocks,
    threshold_constants,
)
from qldpc_lab.shor import ShorRound, schedule_generators
from qldpc_lab.stats import loglog_slope

LOG: dict = {}


def record(k: int, ok: bool, detail: str) -> None:
    LOG[k] = (bool(ok), detail)


# -- independent GF(2) helpers ---------------------------------------------------


def sympl(a, b) -> int:
    # a, b are (x, z) int pairs
    return ((a[0] & b[1]).bit_count() + (a[1] & b[0]).bit_count()) & 1


def gens_of(code):
    return [(g.x, g.z) for g in code.generators]


def sigma(gens, x, z) -> int:
    return sum(sympl(g, (x, z)) << i for i, g in enumerate(gens))


def span_basis(vectors):
    # pivot -> row, over packed ints
    basis = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    return basis


def in_span(basis, v) -> bool:
    while v:
        top = v.bit_length() - 1
        if top not in basis:
            return False
        v ^= basis[top]
    return True


def packed(n, x, z) -> int:
    return x | (z << n)


def stab_basis(code):
    return span_basis([packed(code.n, g.x, g.z) for g in code.generators])


def paulis_of_weight(n, w):
    for supp in itertools.combinations(range(n), w):
        for kinds in itertools.product((1, 2, 3), repeat=w):
            x = z = 0
            for q, k in zip(supp, kinds):
                if k & 1:
                    x |= 1 << q
                if k & 2:
                    z |= 1 << q
            yield x, z


@functools.lru_cache(maxsize=None)
def code13():
    return hypergraph_product(repetition_code(3))


# -- 1 ---------------------------------------------------------------------------


def test_criterion_01_construction_identities():
    t0 = time.perf_counter()
    c13 = hypergraph_product(repetition_code(3))
    c58 = hypergraph_product(hamming_code())
    dt = time.perf_counter() - t0
    # closed form for one full-rank seed used twice: n = n1^2 + m1^2, k = k1^2
    seeds = [(3, 2, 1), (7, 3, 4)]
    expect = [(n1 * n1 + m1 * m1, k1 * k1) for n1, m1, k1 in seeds]
    got = [(c13.n, c13.k), (c58.n, c58.k)]
    ortho = []
    for c in (c13, c58):
        hx = c.hx.to_numpy().astype(int)
        hz = c.hz.to_numpy().astype(int)
        ortho.append(not ((hx @ hz.T) % 2).any())
    # k from an independent rank computation: n - rank(stabilizer group)
    ranks = [len(stab_basis(c)) for c in (c13, c58)]
    k_rank = [c.n - r for c, r in zip((c13, c58), ranks)]
    ok = got == expect == [(13, 1), (58, 16)] and all(ortho) and k_rank == [1, 16] and dt < 1.0
    record(1, ok, f"[[{c13.n},{c13.k}]] [[{c58.n},{c58.k}]], HxHz^T=0: {ortho}, {dt:.3f}s")
    assert ok


# -- 2 ---------------------------------------------------------------------------


def test_criterion_02_distance():
    code = code13()
    t0 = time.perf_counter()
    gb = stab_basis(code)
    gens = gens_of(code)
    lightest = None
    for w in range(1, 4):
        for x, z in paulis_of_weight(code.n, w):
            if sigma(gens, x, z) == 0 and not in_span(gb, packed(code.n, x, z)):
                lightest = w
                break
        if lightest:
            break
    pkg = code.distance()
    dt = time.perf_counter() - t0
    ok = lightest == 3 and pkg == 3 and dt < 10
    record(2, ok, f"exhaustive d={lightest}, package d={pkg}, {dt:.2f}s")
    assert ok


# -- 3 ---------------------------------------------------------------------------


def _logical_table(code):
    lx, lz = code.derive_logicals()
    gb = stab_basis(code)
    bad = []
    gens = gens_of(code)
    for i, a in enumerate(lx):
        for j, b in enumerate(lz):
            if sympl((a.x, a.z), (b.x, b.z)) != (i == j):
                bad.append(("XZ", i, j))
    for group, name in ((lx, "X"), (lz, "Z")):
        for i, j in itertools.combinations(range(len(group)), 2):
            if sympl((group[i].x, group[i].z), (group[j].x, group[j].z)):
                bad.append((name + name, i, j))
        for i, l in enumerate(group):
            if sigma(gens, l.x, l.z):
                bad.append(("gen", name, i))
            if in_span(gb, packed(code.n, l.x, l.z)):
                bad.append(("trivial", name, i))
    return len(lx), bad


def test_criterion_03_logical_algebra():
    P = PauliOperator.from_string
    bitflip = StabilizerCode(3, [P("ZZI"), P("IZZ")], name="bitflip3")
    k13, bad13 = _logical_table(code13())
    k3, bad3 = _logical_table(bitflip)
    ok = (k13, k3) == (1, 1) and not bad13 and not bad3
    record(3, ok, f"k=({k13},{k3}), table violations: {len(bad13) + len(bad3)}")
    assert ok


# -- 4 ---------------------------------------------------------------------------


def test_criterion_04_static_weight_one():
    code = code13()
    gb = stab_basis(code)
    gens = gens_of(code)
    fixed = 0
    errors = list(paulis_of_weight(code.n, 1))
    for x, z in errors:
        corr = decode_static(code, sigma(gens, x, z))
        cx, cz = x ^ corr.x, z ^ corr.z
        fixed += sigma(gens, cx, cz) == 0 and in_span(gb, packed(code.n, cx, cz))
    ok = len(errors) == 39 and fixed == 39
    record(4, ok, f"{fixed}/{len(errors)} weight-1 errors corrected to a stabilizer")
    assert ok


# -- 5 ---------------------------------------------------------------------------


def test_criterion_05_extension_bound():
    t0 = time.perf_counter()
    graphs = {"path10": path_graph(10), "cycle10": cycle_graph(10), "hgp13": adjacency_graph(code13())}
    worst = 0.0
    checked = 0
    mismatch = 0
    violations = []
    for name, g in graphs.items():
        z = g.max_degree
        labels = list(g.labels)
        sets = [[a] for a in labels] + [list(p) for p in itertools.combinations(labels, 2)]
        for S in sets:
            t = len(S)
            for s in range(t, 7):
                cnt = count_cluster_extensions(g, S, s)
                bound = math.exp(t - 1) * (z * math.e) ** (s - t)
                checked += 1
                if len(S) == 1 or s <= 4:
                    mismatch += cnt != brute_force_cluster_extensions(g, S, s)
                if cnt > bound:
                    violations.append((name, S, s, cnt, bound))
                worst = max(worst, cnt / bound)
    dt = time.perf_counter() - t0
    ok = not violations and not mismatch and dt < 60
    record(5, ok, f"{checked} (S,s) cases, max count/bound={worst:.3f}, brute-force mismatches={mismatch}, {dt:.1f}s")
    assert ok


# -- 6 ---------------------------------------------------------------------------


class SpacetimeOracle:
    """All fault paths of weight <= 2 on [[13,1]] for T rounds, keyed by their
    difference syndromes."""

    def __init__(self, code, T):
        self.code, self.T = code, T
        n, m = code.n, code.num_checks
        self.n, self.m = n, m
        self.gens = gens_of(code)
        self.gb = stab_basis(code)
        elems = []
        for t in range(T):
            for q in range(n):
                for k in (1, 2, 3):
                    elems.append(("d", t, q, k))
            for b in range(m):
                elems.append(("s", t, b))
        self.elems = elems
        self.by_key: dict = {}
        self._add(())
        for e in elems:
            self._add((e,))
        for a, b in itertools.combinations(elems, 2):
            if a[0] == b[0] == "d" and a[1:3] == b[1:3]:
                continue  # same qubit and round is a single fault
            self._add((a, b))
        self._leaders = self._coset_leaders()

    def path(self, faults):
        xs, zs, cs = [0] * self.T, [0] * self.T, [0] * self.T
        for f in faults:
            if f[0] == "d":
                _, t, q, k = f
                if k & 1:
                    xs[t] ^= 1 << q
                if k & 2:
                    zs[t] ^= 1 << q
            else:
                _, t, b = f
                cs[t] ^= 1 << b
        return tuple(zip(xs, zs)), tuple(cs)

    def deltas(self, E, C):
        out, prev = [], 0
        for (x, z), c in zip(E, C):
            out.append(sigma(self.gens, x, z) ^ prev ^ c)
            prev = c
        return tuple(out)

    def _add(self, faults):
        E, C = self.path(faults)
        key = self.deltas(E, C)
        w = len(faults)
        cur = self.by_key.get(key)
        if cur is None or w < cur[0]:
            self.by_key[key] = (w, [(E, C)])
        elif w == cur[0]:
            cur[1].append((E, C))

    def decode(self, key):
        w, paths = self.by_key[key]
        cbest = min(C for _, C in paths)
        rounds = []
        for t in range(self.T):
            rounds.append(min(E[t] for E, C in paths if C == cbest))
        return w, tuple(rounds), cbest

    def _coset_leaders(self):
        need = 1 << self.m
        best: dict = {}
        for w in range(self.n + 1):
            found: dict = {}
            for x, z in paulis_of_weight(self.n, w) if w else [(0, 0)]:
                s = sigma(self.gens, x, z)
                if s not in best and (s not in found or (x, z) < found[s]):
                    found[s] = (x, z)
            best.update(found)
            if len(best) == need:
                return best
        raise AssertionError("unreachable syndromes")

    def status(self, truth_E, truth_C, E, C):
        n, T = self.n, self.T
        ax = az = cx = cz = 0
        for (x, z), (x2, z2) in zip(truth_E, E):
            ax ^= x
            az ^= z
            cx ^= x2
            cz ^= z2
        gx, gz = self._leaders[truth_C[-1] ^ C[-1]]
        px, pz = ax ^ cx ^ gx, az ^ cz ^ gz
        assert sigma(self.gens, px, pz) == 0
        if not in_span(self.gb, packed(n, px, pz)):
            return "logical_failure"
        # marks on the layered graph; a spanning cluster means failure
        marks = set()
        for t in range(T):
            dm = (truth_E[t][0] ^ E[t][0]) | (truth_E[t][1] ^ E[t][1])
            marks |= {("q", q, t + 1) for q in range(n) if (dm >> q) & 1}
            db = truth_C[t] ^ C[t]
            marks |= {("b", b, t + 1) for b in range(self.m) if (db >> b) & 1}
        marks |= {("q", q, T + 1) for q in range(n) if ((gx | gz) >> q) & 1}
        supports = [set(q for q in range(n) if ((x | z) >> q) & 1) for x, z in self.gens]

        def adjacent(u, v):
            if u[0] == v[0] == "q":
                return u[2] == v[2] and any(u[1] in s and v[1] in s for s in supports)
            if u[0] == "q":
                u, v = v, u
            if u[0] == "b" and v[0] == "q":
                return v[1] in supports[u[1]] and v[2] in (u[2], u[2] + 1)
            return False

        left = set(marks)
        while left:
            comp = {left.pop()}
            frontier = list(comp)
            while frontier:
                u = frontier.pop()
                for v in list(left):
                    if adjacent(u, v):
                        left.discard(v)
                        comp.add(v)
                        frontier.append(v)
            times = [lab[2] for lab in comp]
            if min(times) <= 1 and max(times) >= T + 1:
                return "spanning_cluster_failure"
        return "success"


def test_criterion_06_spacetime_oracle():
    code = code13()
    T = 3
    t0 = time.perf_counter()
    orc = SpacetimeOracle(code, T)
    rng = np.random.default_rng(606)
    same_status = same_path = same_weight = 0
    N = 200
    statuses = {}
    for _ in range(N):
        w = int(rng.integers(1, 3))
        while True:
            pick = [orc.elems[i] for i in rng.choice(len(orc.elems), size=w, replace=False)]
            if w == 1 or not (pick[0][0] == pick[1][0] == "d" and pick[0][1:3] == pick[1][1:3]):
                break
        E, C = orc.path(pick)
        key = orc.deltas(E, C)
        fp = FaultPath(
            PauliOperator(code.n),
            tuple(PauliOperator(code.n, x, z) for x, z in E),
            C,
            code.num_checks,
        )
        assert tuple(observed_syndromes(code, fp)) == key
        res = decode_spacetime(code, list(key), T, truth=fp)
        ow, oE, oC = orc.decode(key)
        ost = orc.status(E, C, oE, oC)
        statuses[ost] = statuses.get(ost, 0) + 1
        pE = tuple((p.x, p.z) for p in res.round_corrections)
        same_weight += res.weight == ow
        same_path += pE == oE and tuple(res.synd_corrections) == oC
        same_status += res.status == ost
    dt = time.perf_counter() - t0
    ok = same_status == same_path == same_weight == N
    record(6, ok, f"{N} instances: weight {same_weight}, path {same_path}, status {same_status} agree; oracle statuses {statuses}; {dt:.0f}s")
    assert ok


# -- 7 ---------------------------------------------------------------------------


def test_criterion_07_telescoping():
    code = code13()
    gens = gens_of(code)
    n, m = code.n, code.num_checks
    rng = np.random.default_rng(7)
    bad = 0
    N = 10_000
    for _ in range(N):
        T = int(rng.integers(1, 6))
        dens = rng.uniform(0, 0.5)

        def rand_pauli():
            x = sum(1 << q for q in range(n) if rng.random() < dens)
            z = sum(1 << q for q in range(n) if rng.random() < dens)
            return PauliOperator(n, x, z)

        init = rand_pauli()
        data = tuple(rand_pauli() for _ in range(T))
        synd = tuple(int(v) for v in rng.integers(0, 1 << m, size=T))
        fp = FaultPath(init, data, synd, m)
        lhs = 0
        for d in observed_syndromes(code, fp):
            lhs ^= d
        cx, cz = init.x, init.z
        for f in data:
            cx ^= f.x
            cz ^= f.z
        bad += lhs != synd[-1] ^ sigma(gens, cx, cz)
    ok = bad == 0
    record(7, ok, f"{N - bad}/{N} random fault paths telescope")
    assert ok


# -- 8 ---------------------------------------------------------------------------


def test_criterion_08_fault_association():
    code = code13()
    rnd = ShorRound(code, schedule_generators(code))
    c = max(rnd.qubit_checks)
    table = rnd.fault_table()
    kept = [fr for fr in table.values() if not fr.rejected]
    max_data = max(fr.data_qubits() for fr in kept)
    max_synd = max(fr.synd.bit_count() for fr in kept)
    limit = math.ceil(c / 2)
    ok = max_data <= 1 and max_synd <= limit
    record(
        8,
        ok,
        f"{len(table)} single faults over {rnd.circuit.num_locations} locations ({len(table) - len(kept)} rejected): "
        f"max data qubits {max_data}, max syndrome bits {max_synd} <= ceil({c}/2)={limit}",
    )
    assert ok


# -- 9 and 13 --------------------------------------------------------------------

SLOPE_P = (1e-3, 3e-3, 1e-2)
SLOPE_TRIALS = 2_000_000


@functools.lru_cache(maxsize=None)
def slope_cells():
    out = []
    for j, p in enumerate(SLOPE_P):
        cfg = ExperimentConfig(
            code="rep3", p=p, q=0.0, p_init=0.0, T=1, decoder="static",
            trials=SLOPE_TRIALS, seed=900 + j, chunk=200_000, check_witness=True,
        )
        out.append(run_memory_experiment(cfg))
    return tuple(out)


def test_criterion_09_scaling_slope():
    t0 = time.perf_counter()
    cells = slope_cells()
    rates = [c.rate for c in cells]
    slope = loglog_slope(SLOPE_P, rates)
    # cross-check the fit with a plain two-point slope
    ends = math.log(rates[-1] / rates[0]) / math.log(SLOPE_P[-1] / SLOPE_P[0])
    dt = time.perf_counter() - t0
    ok = abs(slope - 2) <= 0.3 and all(c.trials >= 100_000 for c in cells) and all(c.failures for c in cells)
    fails = ", ".join(f"p={p:g}: {c.failures}/{c.trials}" for p, c in zip(SLOPE_P, cells))
    record(9, ok, f"slope={slope:.3f} (end points {ends:.3f}); {fails}; {dt:.0f}s")
    assert ok


def test_criterion_13_failure_witness():
    cells = slope_cells()
    checked = sum(c.witness_checked for c in cells)
    good = sum(c.witness_ok for c in cells)
    failures = sum(c.failures for c in cells)
    ok = checked == failures and good == checked and checked > 0
    record(13, ok, f"{good}/{checked} static failures have a cluster of size >= d with >= ceil(s/2) errors")
    assert ok


# -- 10 --------------------------------------------------------------------------


def test_criterion_10_threshold_crossing():
    t0 = time.perf_counter()
    cfg = ExperimentConfig(trials=1, seed=1010, chunk=50_000)
    rep = threshold_scan(["rep3", "rep5", "rep7"], [1e-3, 0.15], cfg, trials_per_p={1e-3: 1_000_000, 0.15: 150})
    dt = time.perf_counter() - t0
    cells = []
    for cid, row in zip(rep.codes, rep.cells):
        for c in row:
            lo, hi = c.ci()
            capped = c.counts.get("decoder_cap_exceeded", 0)
            cells.append(f"{cid}@{c.p:g}: {c.failures}/{c.trials} [{lo:.2e},{hi:.2e}] capped={capped}")
    ok = rep.low_verdict == "decreasing" and rep.high_verdict == "non_decreasing"
    record(10, ok, f"low={rep.low_verdict} high={rep.high_verdict}; " + "; ".join(cells) + f"; {dt:.0f}s")
    assert ok


# -- 11 --------------------------------------------------------------------------

mpmath.mp.dps = 50
E = mpmath.e


def _rel(a, b) -> float:
    if math.isinf(a) or math.isinf(b):
        return 0.0 if a == b else math.inf
    b = mpmath.mpf(b)
    if b == 0:
        return abs(a)
    return float(abs((mpmath.mpf(a) - b) / b))


def _mp_rates(r, c, A, l, s, p):
    p = mpmath.mpf(p)
    ok = 1 - p * A
    pP = (c * A / ok + c + s * l) * p
    pB = (A / ok + 3 * r) * p
    pD = mpmath.sqrt(pP) / (1 - pB)
    q = max(2 * pP ** (mpmath.mpf(1) / (c + 1)), 2 * pB / (1 - pB))
    return pP, pB, pD, q


def _mp_consts(r, c):
    z = (r - 1) * c
    zp = z + 2 * c
    return dict(
        z=z,
        zp=zp,
        p0s=(2 * z * E) ** -2,
        pf=(2 * zp * E) ** -4,
        pi=(2 * zp * E) ** -2,
        p1=(2 * zp * E) ** -8 / (144 * zp**2 * E**4),
    )


def _mp_bound(pref, root, ratio, power):
    if root >= 1:
        return math.inf
    return pref / (1 - root) * ratio**power


def _mp_bounds(n, d, p, q, pinit, T, k, K):
    z, zp = K["z"], K["zp"]
    p, q, pinit = map(mpmath.mpf, (p, q, pinit))
    pp = max(p, q)
    ppp = max(pinit, p, q)
    n_inner = n * (T - 1) + (n - k) * T
    return {
        "static": _mp_bound(n / (z * E), 2 * z * E * mpmath.sqrt(p), p / K["p0s"], mpmath.mpf(d) / 2),
        "st_interior": _mp_bound(n_inner / (zp * E), 2 * zp * E * mpmath.sqrt(pp), pp / K["pi"], mpmath.mpf(d) / 2),
        "st_final": _mp_bound(n / (zp * E), 2 * zp * E * pp ** mpmath.mpf(0.25), pp / K["pf"], mpmath.mpf(d) / 4),
        "st_init": _mp_bound(n / (zp * E), 2 * zp * E * mpmath.sqrt(ppp), ppp / K["pi"], mpmath.mpf(d) / 2),
        "st_spanning": _mp_bound(
            n * (ppp / K["pf"]) ** mpmath.mpf(0.25) / (zp * E), 2 * zp * E * ppp ** mpmath.mpf(0.25),
            ppp / K["pf"], mpmath.mpf(T) / 2,
        ),
        "output_rate": 4 * zp * E**2 * mpmath.sqrt(pp),
    }


def overhead_panel():
    pts = [dict(r=7, c=4, A=12, l=20, s=4, p=1e-5, n=85, d=7, T=7, k=1, B=2)]
    for i in range(1, 50):
        r = 2 + i % 7
        c = 1 + (i * 3) % 5
        pts.append(dict(
            r=r, c=c, A=10 + (i * 7) % 50, l=5 + (i * 11) % 30, s=1 + i % 4,
            p=10.0 ** (-3 - i % 6) * (1 + (i % 3) / 2),
            n=13 + 4 * i, d=3 + i % 5, T=1 + i % 7, k=i % 3, B=i % 5,
        ))
    return pts


def test_criterion_11_overhead_golden():
    worst = 0.0
    where = None
    compared = 0
    has_74 = False
    for pt in overhead_panel():
        r, c, A, l, s, p = (pt[k] for k in ("r", "c", "A", "l", "s", "p"))
        pr = ProtocolParams(r=r, c=c, A=A, l=l, s=s, p=p, B=pt["B"])
        got = effective_rates(pr)
        want = _mp_rates(r, c, A, l, s, p)
        diffs = {f"rate.{k}": _rel(g, w) for k, g, w in zip(("p_P", "p_B", "p_D", "q"), (got.p_P, got.p_B, got.p_D, got.q), want)}
        if r >= 2:
            K = _mp_consts(r, c)
            tc = threshold_constants(r, c)
            has_74 |= (r, c, tc.z, tc.z_prime) == (7, 4, 24, 32)
            assert (tc.z, tc.z_prime) == (K["z"], K["zp"])
            for name, g, w in (("p0s", tc.p0_static, K["p0s"]), ("pf", tc.p_f, K["pf"]), ("pi", tc.p_i, K["pi"]),
                               ("p1", tc.p1, K["p1"]), ("p2", tc.p2, K["p1"])):
                diffs[f"const.{name}"] = _rel(g, w)
            # a p grid that covers both valid and vacuous bounds
            for scale in (1e-3, 0.3, 3.0):
                pb = float(K["p0s"]) * scale
                qb, pinit = pb * 0.7, pb * 1.3
                fb = failure_bounds(pt["n"], pt["d"], pb, tc, q=qb, p_init=pinit, T=pt["T"], k=pt["k"])
                mb = _mp_bounds(pt["n"], pt["d"], pb, qb, pinit, pt["T"], pt["k"], K)
                for key, bound in fb.items():
                    diffs[f"bound.{key}@{scale}"] = _rel(bound.value, mb[key])
            chk = logical_gate_threshold_checks(p, tc.p0, pt["B"], got, tc)
            p0 = K["pf"]
            mp_p = mpmath.mpf(p)
            diffs["gate.cnot"] = _rel(chk["cnot"].lhs, 2 * p0 / 3 + (pt["B"] + 4) * mp_p)
            diffs["gate.pi8"] = _rel(chk["pi8"].lhs, p0 / 3 + 2 * (pt["B"] + 4) * mp_p)
            assert chk["cnot"].holds == (2 * p0 / 3 + (pt["B"] + 4) * mp_p < p0)
            assert chk["pi8"].holds == (p0 / 3 + 2 * (pt["B"] + 4) * mp_p < p0)
            diffs["gate.p1"] = _rel(chk["data_rate"].rhs, K["p1"])
        ni, ki = pt["n"], pt["k"] + 1
        lb = location_budget(pr, ni, ki, pt["T"])
        mp_lb = pt["T"] * (s * l * ni + (ni - ki) * (A / (1 - mpmath.mpf(p) * A) + 2 * r))
        diffs["budget"] = _rel(lb.per_cycle, mp_lb)
        compared += len(diffs)
        key, val = max(diffs.items(), key=lambda kv: kv[1])
        if val > worst:
            worst, where = val, key
    ok = worst < 1e-12 and has_74
    record(11, ok, f"50 points, {compared} values, max rel err {worst:.2e} ({where}); (7,4)->z=24,z'=32: {has_74}")
    assert ok


# -- 12 --------------------------------------------------------------------------


def test_criterion_12_block_planning():
    code = code13()
    rep = code.validate()
    rnd = ShorRound(code, schedule_generators(code))
    A = max(rnd.A.values())
    k, alpha, eps, f = 30, 0.5, 1e-3, 1e6
    R = Fraction(1, 13)  # rate of the smallest member; the family's asymptotic rate is 0
    pr = ProtocolParams(r=rep.r, c=rep.c, A=A, l=rnd.depth, p=1e-6, R=float(R), alpha=alpha, eps=eps)
    family = [(13, 1), (41, 1), (85, 1)]
    plan = plan_blocks(k, family, f, eps, alpha, pr)
    # exact recomputation of the plan's own arithmetic
    mpmath.mp.dps = 50
    first = next(i for i, (n, _) in enumerate(family) if n * n > k)  # n > sqrt(k)
    n_i, k_i = family[first]
    M = -(-k // k_i)
    p = Fraction(pr.p)
    ok_frac = 1 - p * A
    data = Fraction(M * n_i)
    ec = Fraction(M * (n_i - k_i) * pr.cat_qubits) / (pr.s * ok_frac)
    eps0 = mpmath.mpf(eps) / (3 * f)
    gate = pr.C * n_i * mpmath.log(n_i / eps0) ** pr.a
    total = mpmath.mpf(data.numerator) / data.denominator + mpmath.mpf(ec.numerator) / ec.denominator + gate
    budget = Fraction(pr.eta) * k / R
    over = total > mpmath.mpf(budget.numerator) / budget.denominator
    upper = (k / float(R)) * math.log(3 * k * f / (float(R) * eps)) ** (-(pr.a + 1))
    named_total = any(v.startswith("total_qubits") for v in plan.violated)
    named_upper = any(v.startswith("upper_window") for v in plan.violated)
    checks = [
        (plan.i, plan.n_i, plan.M) == (first, 13, 30),
        _rel(plan.qubit_total, total) < 1e-12,
        named_total == bool(over),
        named_upper == (not n_i < upper),
        plan.feasible == (not plan.violated),
        (not plan.feasible) or plan.qubit_total <= float(budget),
    ]
    ok = all(checks)
    verdict = "feasible" if plan.feasible else "violated: " + "; ".join(plan.violated)
    record(12, ok, f"n_i={plan.n_i} M={plan.M} total={plan.qubit_total:.4g} vs eta*k/R={float(budget):.4g}; {verdict}")
    assert ok


# -- 14 --------------------------------------------------------------------------


def test_criterion_14_determinism(tmp_path):
    setups = [
        dict(code="rep3", p=0.01, q=0.0, p_init=0.0, T=1, trials=200_000, chunk=20_000, seed=141),
        dict(code="rep3", p=0.02, T=3, trials=6_000, chunk=1_000, seed=142),
        dict(code="rep5", p=0.01, T=5, trials=1_200, chunk=300, seed=143, decoder="cluster"),
        dict(code="rep3", p=3e-4, noise="circuit", trials=120, chunk=40, seed=144),
    ]
    same = 0
    for j, base in enumerate(setups):
        blobs = []
        for run, workers in enumerate((1, 4, 1)):
            arch = tmp_path / f"a{j}_{run}.jsonl"
            csvp = tmp_path / f"c{j}_{run}.csv"
            run_memory_experiment(ExperimentConfig(**base, workers=workers, archive=str(arch)), csv_path=csvp)
            blobs.append((csvp.read_bytes(), arch.read_bytes()))
        same += blobs[0] == blobs[1] == blobs[2]
    ok = same == len(setups)
    record(14, ok, f"{same}/{len(setups)} experiments byte-identical (CSV and failure archive) at workers 1, 4 and a rerun")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
