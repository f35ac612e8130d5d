"""Circuit-level syndrome extraction with verified cat states.

Circuits are lists of time steps, each a list of locations on disjoint
qubits.  Faults are Pauli operators inserted after a location (or a flipped
outcome for measurements) and are pushed to the end of the round with the
usual Clifford conjugation rules.  Each fault is then mapped onto the
phenomenological model: its data error belongs to the current round unless
it lands after half of that qubit's checks have been coupled, in which case
it belongs to the next round.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import ceil
from typing import Iterable, Sequence

import numpy as np

from .gf2 import PauliOperator
from .stabilizer import StabilizerCode

__all__ = [
    "Circuit",
    "ExtractionSchedule",
    "FaultFragment",
    "Location",
    "ShorRound",
    "cat_state_circuit",
    "circuit_round",
    "propagate_faults",
    "schedule_generators",
]

KINDS = ("prep0", "H", "CNOT", "cpauli", "measX", "measZ", "wait")
ONE_QUBIT = ("X", "Y", "Z")
TWO_QUBIT = tuple(a + b for a, b in product("IXYZ", repeat=2) if a + b != "II")
MEAS_FLIP = "M"


@dataclass(frozen=True)
class Location:
    kind: str
    qubits: tuple
    pauli: str = ""  # Pauli applied to the target of a controlled-Pauli
    role: str = ""  # prep / couple / readout / data
    gen: int = -1

    def fault_options(self) -> tuple:
        if self.kind in ("measX", "measZ"):
            return (MEAS_FLIP,)
        return TWO_QUBIT if len(self.qubits) == 2 else ONE_QUBIT


class Circuit:
    """Time-ordered locations over ``num_qubits`` qubits."""

    def __init__(self, num_qubits: int, steps: Sequence[Sequence[Location]]):
        self.num_qubits = num_qubits
        self.steps = [list(s) for s in steps]
        for i, step in enumerate(self.steps):
            used: set = set()
            for loc in step:
                if loc.kind not in KINDS:
                    raise ValueError(f"unknown location kind {loc.kind!r}")
                for q in loc.qubits:
                    if q in used:
                        raise ValueError(f"qubit {q} used twice in step {i}")
                    used.add(q)

    @property
    def depth(self) -> int:
        return len(self.steps)

    def locations(self) -> list[tuple[int, int, Location]]:
        return [(s, i, loc) for s, step in enumerate(self.steps) for i, loc in enumerate(step)]

    @property
    def num_locations(self) -> int:
        return sum(len(s) for s in self.steps)

    def count(self, kind: str) -> int:
        return sum(1 for _, _, loc in self.locations() if loc.kind == kind)

    def to_text(self) -> str:
        """One location per line: ``step kind qubits [pauli]``."""
        lines = []
        for s, _, loc in self.locations():
            extra = f" {loc.pauli}" if loc.pauli else ""
            lines.append(f"{s} {loc.kind} {' '.join(map(str, loc.qubits))}{extra}")
        return "\n".join(lines) + "\n"


def _pauli_bits(p: str) -> tuple[int, int]:
    return (p in "XY"), (p in "ZY")


def _apply_step(step: Sequence[Location], x: list, z: list, flips: dict, s: int, touched=None) -> None:
    for i, loc in enumerate(step):
        k = loc.kind
        if k == "wait":
            continue
        q = loc.qubits
        if k == "H":
            a = q[0]
            x[a], z[a] = z[a], x[a]
        elif k == "CNOT":
            c, t = q
            if x[c] and touched is not None and not x[t] and not z[t]:
                touched.setdefault(t, s)
            x[t] ^= x[c]
            z[c] ^= z[t]
        elif k == "cpauli":
            c, t = q
            px, pz = _pauli_bits(loc.pauli)
            if (x[t] & pz) ^ (z[t] & px):
                z[c] ^= 1
            if x[c]:
                if touched is not None and not x[t] and not z[t]:
                    touched.setdefault(t, s)
                x[t] ^= px
                z[t] ^= pz
        elif k == "measX":
            if z[q[0]]:
                flips[(s, i)] = 1
            x[q[0]] = z[q[0]] = 0
        elif k == "measZ":
            if x[q[0]]:
                flips[(s, i)] = 1
            x[q[0]] = z[q[0]] = 0
        elif k == "prep0":
            x[q[0]] = z[q[0]] = 0


def _inject(loc: Location, pauli: str, x: list, z: list) -> None:
    if pauli == MEAS_FLIP:
        return
    for q, p in zip(loc.qubits, pauli):
        px, pz = _pauli_bits(p)
        x[q] ^= px
        z[q] ^= pz


def propagate_faults(
    circuit: Circuit,
    faults: Iterable[tuple[tuple[int, int], str]],
    data_qubits: int | None = None,
    incoming: PauliOperator | None = None,
    _touched: dict | None = None,
) -> tuple[PauliOperator, set]:
    """Push faults to the end of the circuit.

    ``faults`` holds ``((step, index), pauli)`` pairs; the Pauli acts right
    after that location (``"M"`` flips a measurement outcome).  ``incoming``
    is an error on the data qubits before the first step.  Returns the final
    error on the first ``data_qubits`` qubits and the set of flipped
    measurement locations.
    """
    nq = circuit.num_qubits
    nd = nq if data_qubits is None else data_qubits
    x = [0] * nq
    z = [0] * nq
    if incoming is not None:
        for q in range(incoming.n):
            x[q] = (incoming.x >> q) & 1
            z[q] = (incoming.z >> q) & 1
    by_step: dict[int, list] = {}
    for (s, i), p in faults:
        if not 0 <= s < circuit.depth or not 0 <= i < len(circuit.steps[s]):
            raise IndexError(f"no location at step {s} index {i}")
        loc = circuit.steps[s][i]
        if p != MEAS_FLIP and len(p) != len(loc.qubits):
            raise ValueError(f"Pauli {p!r} does not fit location {loc.kind}")
        if p == MEAS_FLIP and loc.kind not in ("measX", "measZ"):
            raise ValueError("outcome flips only apply to measurements")
        by_step.setdefault(s, []).append((i, loc, p))
    flips: dict = {}
    for s, step in enumerate(circuit.steps):
        _apply_step(step, x, z, flips, s, _touched)
        for i, loc, p in by_step.get(s, ()):
            if p == MEAS_FLIP:
                flips[(s, i)] = flips.get((s, i), 0) ^ 1
            else:
                _inject(loc, p, x, z)
                if _touched is not None:
                    for q in loc.qubits:
                        if q < nd:
                            _touched.setdefault(q, s)
    fx = sum(x[q] << q for q in range(nd))
    fz = sum(z[q] << q for q in range(nd))
    return PauliOperator(nd, fx, fz), {k for k, v in flips.items() if v}


# -- cat states -------------------------------------------------------------------


def _tree_pairs(w: int) -> list[list[tuple[int, int]]]:
    levels = []
    have = 1
    while have < w:
        levels.append([(j, j + have) for j in range(have) if j + have < w])
        have *= 2
    return levels


def _num_tests(w: int) -> int:
    return 1 if w <= 4 else ceil(w / 2) - 1


def _bad_patterns(w: int) -> list[int]:
    """X patterns on the cat left by single faults in the bare tree that
    act like two or more errors (modulo the all-X stabilizer of the cat)."""
    steps = [[Location("H", (0,))]] + [[Location("CNOT", p) for p in lvl] for lvl in _tree_pairs(w)]
    circ = Circuit(w, steps)
    full = (1 << w) - 1
    bad = set()
    for s, i, loc in circ.locations():
        for p in loc.fault_options():
            err, _ = propagate_faults(circ, [((s, i), p)])
            pat = err.x
            if min(pat.bit_count(), (pat ^ full).bit_count()) >= 2:
                bad.add(min(pat, pat ^ full))
    return sorted(bad)


def _choose_tests(w: int) -> list[tuple[int, int]]:
    """Greedy adjacent-pair parity tests covering every bad pattern."""
    need = _num_tests(w)
    bad = _bad_patterns(w)
    cands = [(j, j + 1) for j in range(w - 1)]
    chosen: list[tuple[int, int]] = []
    left = set(bad)
    while len(chosen) < need:
        best = max(
            (c for c in cands if c not in chosen),
            key=lambda c: (sum(1 for b in left if ((b >> c[0]) ^ (b >> c[1])) & 1), -c[0]),
        )
        chosen.append(best)
        left = {b for b in left if not (((b >> best[0]) ^ (b >> best[1])) & 1)}
    if left:
        raise AssertionError(f"parity tests miss bad cat patterns for w={w}")
    return sorted(chosen)


def _cat_ops(w: int, tests: Sequence[tuple[int, int]]) -> list[list[Location]]:
    """Operation steps (no preps or waits) on local qubits: cat 0..w-1, tests w.."""
    ops = [[Location("H", (0,), role="prep")]]
    for lvl in _tree_pairs(w):
        ops.append([Location("CNOT", p, role="prep") for p in lvl])
    if tests:
        ops.append([Location("CNOT", (a, w + j), role="prep") for j, (a, _) in enumerate(tests)])
        ops.append([Location("CNOT", (b, w + j), role="prep") for j, (_, b) in enumerate(tests)])
        ops.append([Location("measZ", (w + j,), role="prep") for j in range(len(tests))])
    return ops


def _with_preps_and_waits(ops: list[list[Location]]) -> list[list[Location]]:
    """Add a prep0 one step before each qubit's first use, and waits for
    live idle qubits.  Unmeasured qubits stay live to the end."""
    first: dict[int, int] = {}
    last: dict[int, int] = {}
    for s, step in enumerate(ops):
        for loc in step:
            for q in loc.qubits:
                first.setdefault(q, s)
                if loc.kind in ("measX", "measZ"):
                    last[q] = s
    steps: list[list[Location]] = [[] for _ in range(len(ops) + 1)]
    for s, step in enumerate(ops):
        steps[s + 1].extend(step)
    for q, f in first.items():
        steps[f].append(Location("prep0", (q,), role="prep"))
    end = len(steps) - 1
    for q, f in first.items():
        stop = last.get(q, end)
        for s in range(f + 1, stop + 1):
            if not any(q in loc.qubits for loc in steps[s]):
                steps[s].append(Location("wait", (q,), role="prep"))
    return steps


def cat_state_circuit(w: int) -> tuple[Circuit, int]:
    """Prepare and test a w-qubit cat state.

    Qubits ``0..w-1`` hold the cat, the rest are parity-test ancillas.
    Returns the circuit and its location count A.
    """
    if w < 2:
        raise ValueError("cat state needs w >= 2")
    tests = _choose_tests(w)
    steps = _with_preps_and_waits(_cat_ops(w, tests))
    circ = Circuit(w + len(tests), steps)
    circ.tests = tests
    return circ, circ.num_locations


# -- scheduling -------------------------------------------------------------------


@dataclass
class ExtractionSchedule:
    layers: list[list[int]]
    conflict_degree: int
    depth: int = 0  # steps per full syndrome measurement (l)

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    def layer_of(self) -> dict[int, int]:
        return {g: j for j, lay in enumerate(self.layers) for g in lay}


def schedule_generators(code: StabilizerCode) -> ExtractionSchedule:
    """Greedy colouring of the generator conflict graph (shared support).

    Generators are coloured in index order with the smallest free colour.
    """
    supports = [set(s) for s in code.generator_supports()]
    m = len(supports)
    nbrs = [[h for h in range(m) if h != g and supports[g] & supports[h]] for g in range(m)]
    colour: dict[int, int] = {}
    for g in range(m):
        used = {colour[h] for h in nbrs[g] if h in colour}
        c = 0
        while c in used:
            c += 1
        colour[g] = c
    layers: list[list[int]] = [[] for _ in range(max(colour.values(), default=-1) + 1)]
    for g in range(m):
        layers[colour[g]].append(g)
    sched = ExtractionSchedule(layers, max((len(n) for n in nbrs), default=0))
    sched.depth = ShorRound(code, sched).circuit.depth
    return sched


# -- full round --------------------------------------------------------------------


@dataclass(frozen=True)
class FaultFragment:
    """Phenomenological image of one fault.

    ``now`` joins this round's data error, ``later`` the next round's, and
    ``synd`` flips this round's reported syndrome bits.
    """

    now_x: int = 0
    now_z: int = 0
    later_x: int = 0
    later_z: int = 0
    synd: int = 0
    rejected: int = 0  # mask of generators whose cat test flagged

    def data_qubits(self) -> int:
        return (self.now_x | self.now_z | self.later_x | self.later_z).bit_count()


class ShorRound:
    """One full syndrome measurement of ``code`` as a circuit.

    ``mode="shor"`` uses a verified cat state per generator, coupled
    transversally in one step.  ``mode="bare"`` uses a single ancilla per
    generator coupled to its support one qubit per step.
    """

    def __init__(self, code: StabilizerCode, schedule: ExtractionSchedule, mode: str = "shor"):
        if mode not in ("shor", "bare"):
            raise ValueError("mode must be 'shor' or 'bare'")
        self.code, self.schedule, self.mode = code, schedule, mode
        n = code.n
        gens = code.generators
        supports = code.generator_supports()
        self.qubit_checks = [0] * n
        for supp in supports:
            for q in supp:
                self.qubit_checks[q] += 1
        # per-generator local prep circuits
        blocks = {}
        for g, supp in enumerate(supports):
            w = len(supp)
            if mode == "shor":
                tests = _choose_tests(w) if w >= 2 else []
                ops = _cat_ops(w, tests) if w >= 2 else []
                nq = w + len(tests)
            else:
                ops = [[Location("H", (0,), role="prep")]]
                nq = 1
            blocks[g] = (nq, ops)
        prep_depth = max(len(ops) + 1 for _, ops in blocks.values())
        width = 1 if mode == "shor" else max((len(s) for s in supports), default=1)
        nlayers = len(schedule.layers)
        depth = prep_depth + nlayers * width + 1
        steps: list[list[Location]] = [[] for _ in range(depth)]
        offset = n
        self.cat_qubits: dict[int, list[int]] = {}
        self.test_meas: dict[int, list] = {}
        self.couple_step: dict[tuple[int, int], int] = {}
        self.prep_range: dict[int, tuple[int, int]] = {}
        for j, layer in enumerate(schedule.layers):
            start = prep_depth + j * width  # first coupling step of this layer
            for g in layer:
                nq, ops = blocks[g]
                supp = supports[g]
                local = _with_preps_and_waits(ops)
                base = start - len(local)
                qmap = list(range(offset, offset + nq))
                offset += nq
                for s, step in enumerate(local):
                    for loc in step:
                        steps[base + s].append(
                            Location(loc.kind, tuple(qmap[q] for q in loc.qubits), loc.pauli, "prep", g)
                        )
                self.prep_range[g] = (base, start - 1)
                g_op = gens[g]
                if mode == "shor":
                    cats = qmap[: len(supp)]
                    for i, q in enumerate(supp):
                        p = "IXZY"[((g_op.x >> q) & 1) | (((g_op.z >> q) & 1) << 1)]
                        steps[start].append(Location("cpauli", (cats[i], q), p, "couple", g))
                        self.couple_step[(g, q)] = start
                        steps[start + 1].append(Location("measX", (cats[i],), role="readout", gen=g))
                    self.cat_qubits[g] = cats
                else:
                    anc = qmap[0]
                    for i, q in enumerate(supp):
                        p = "IXZY"[((g_op.x >> q) & 1) | (((g_op.z >> q) & 1) << 1)]
                        steps[start + i].append(Location("cpauli", (anc, q), p, "couple", g))
                        self.couple_step[(g, q)] = start + i
                    for s in range(start + len(supp), start + width):
                        steps[s].append(Location("wait", (anc,), role="readout", gen=g))
                    steps[start + width].append(Location("measX", (anc,), role="readout", gen=g))
                    self.cat_qubits[g] = [anc]
        # data waits
        for s in range(depth):
            busy = {q for loc in steps[s] for q in loc.qubits}
            for q in range(n):
                if q not in busy:
                    steps[s].append(Location("wait", (q,), role="data"))
        self.circuit = Circuit(offset, steps)
        self.depth = depth
        # measurement location -> generator
        self.readout_of: dict[tuple[int, int], int] = {}
        self.test_of: dict[tuple[int, int], int] = {}
        for s, i, loc in self.circuit.locations():
            if loc.kind == "measX" and loc.role == "readout":
                self.readout_of[(s, i)] = loc.gen
            elif loc.kind == "measZ" and loc.role == "prep":
                self.test_of[(s, i)] = loc.gen
        self.locations = self.circuit.locations()
        self._fragments: dict | None = None

    @property
    def A(self) -> dict[int, int]:
        """Fallible locations in each generator's ancilla preparation."""
        out: dict[int, int] = {}
        for _, _, loc in self.locations:
            if loc.role == "prep":
                out[loc.gen] = out.get(loc.gen, 0) + 1
        return out

    # fault mapping -------------------------------------------------------
    def outcome(self, faults, incoming: PauliOperator | None = None):
        """Data error, syndrome-bit flips and rejected-cat mask for ``faults``."""
        touched: dict = {}
        err, flips = propagate_faults(self.circuit, faults, self.code.n, incoming, touched)
        synd = 0
        rejected = 0
        for key in flips:
            if key in self.readout_of:
                synd ^= 1 << self.readout_of[key]
            elif key in self.test_of:
                rejected |= 1 << self.test_of[key]
        return err, synd, rejected, touched

    def map_fault(self, step: int, index: int, pauli: str) -> FaultFragment:
        """Phenomenological image of a single fault."""
        code = self.code
        loc = self.circuit.steps[step][index]
        err, flips, rejected, touched = self.outcome([((step, index), pauli)])
        if rejected:
            return FaultFragment(rejected=rejected)
        if loc.role == "prep" and self.mode == "shor" and not err.is_identity():
            # errors leaving a cat are only defined up to its generator
            g = code.generators[loc.gen]
            alt = err * g
            if alt.weight < err.weight:
                err = alt
            land = {q: self.couple_step[(loc.gen, q)] for q in err.support}
        else:
            land = {q: touched.get(q, step) for q in err.support}
        now_x = now_z = later_x = later_z = 0
        for q in err.support:
            tau = land[q]
            # a generator coupled at the landing step counts as being measured, not measured
            seen = sum(1 for (g, qq), st in self.couple_step.items() if qq == q and st < tau)
            bit = 1 << q
            if 2 * seen >= self.qubit_checks[q]:
                later_x |= err.x & bit
                later_z |= err.z & bit
            else:
                now_x |= err.x & bit
                now_z |= err.z & bit
        synd = flips ^ code.syndrome_bits(now_x, now_z)
        return FaultFragment(now_x, now_z, later_x, later_z, synd)

    def fault_table(self) -> dict:
        """Fragments for every (location, Pauli) single fault, cached."""
        if self._fragments is None:
            table = {}
            for s, i, loc in self.locations:
                for p in loc.fault_options():
                    table[(s, i, p)] = self.map_fault(s, i, p)
            self._fragments = table
        return self._fragments


@dataclass
class RoundSample:
    now: PauliOperator
    later: PauliOperator
    synd: int
    retries: int
    faults: list = field(default_factory=list)


def circuit_round(code, schedule, p_phys: float, seed=None, mode: str = "shor", round_model: ShorRound | None = None):
    """Sample one noisy syndrome measurement and map it to the phenomenological model.

    Every location fails independently with probability ``p_phys`` (uniform
    over its fault options).  A cat whose parity test flags is thrown away
    and prepared again; ``retries`` counts those.  Returns a
    :class:`RoundSample` whose ``now``/``synd`` parts join the current round
    and whose ``later`` part joins the next round (or the next cycle's
    initialization error after the last round).
    """
    rnd = round_model or ShorRound(code, schedule, mode)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    table = rnd.fault_table()
    locs = rnd.locations
    prep_idx: dict[int, list[int]] = {}
    other = []
    for j, (_, _, loc) in enumerate(locs):
        if loc.role == "prep":
            prep_idx.setdefault(loc.gen, []).append(j)
        else:
            other.append(j)
    chosen = []

    def draw(indices):
        hits = np.flatnonzero(rng.random(len(indices)) < p_phys)
        out = []
        for h in hits:
            s, i, loc = locs[indices[h]]
            opts = loc.fault_options()
            out.append((s, i, opts[int(rng.integers(len(opts)))]))
        return out

    retries = 0
    for g in sorted(prep_idx):
        while True:
            fs = draw(prep_idx[g])
            # tests see only faults inside this cat's own preparation
            _, _, rejected, _ = rnd.outcome([((s, i), p) for s, i, p in fs])
            if not rejected:
                break
            retries += 1
        chosen += fs
    chosen += draw(other)
    nx = nz = lx = lz = synd = 0
    for key in chosen:
        fr = table[key]
        nx ^= fr.now_x
        nz ^= fr.now_z
        lx ^= fr.later_x
        lz ^= fr.later_z
        synd ^= fr.synd
    n = code.n
    return RoundSample(PauliOperator(n, nx, nz), PauliOperator(n, lx, lz), synd, retries, chosen)
