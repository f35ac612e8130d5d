"""Phenomenological fault paths: sampling, observed syndromes, noise audits.

A fault path holds an initialization error, one fresh data error per round
and one syndrome-flip vector per round.  Flips do not persist between rounds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gf2 import PauliOperator
from .stabilizer import StabilizerCode
from .stats import wilson_interval

__all__ = [
    "FaultPath",
    "PhenomenologicalParams",
    "SyndromeMatrices",
    "local_stochastic_check",
    "observed_syndromes",
    "sample_batch",
    "sample_iid",
]

CHANNELS = ("depolarizing", "x", "z")


@dataclass(frozen=True)
class PhenomenologicalParams:
    p_init: float
    p_data: float
    q_synd: float
    T: int = 1
    channel: str = "depolarizing"

    def __post_init__(self):
        for name in ("p_init", "p_data", "q_synd"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if self.channel not in CHANNELS:
            raise ValueError(f"channel must be one of {CHANNELS}")


@dataclass(frozen=True)
class FaultPath:
    init_error: PauliOperator
    data_errors: tuple[PauliOperator, ...]
    synd_errors: tuple[int, ...]
    num_checks: int

    def __post_init__(self):
        if len(self.data_errors) != len(self.synd_errors):
            raise ValueError("data and syndrome error lists need one entry per round")
        n = self.init_error.n
        if any(f.n != n for f in self.data_errors):
            raise ValueError("data errors act on a different qubit count")
        if any(b >> self.num_checks for b in self.synd_errors):
            raise ValueError("syndrome error longer than the check count")

    @classmethod
    def empty(cls, n: int, num_checks: int, T: int) -> "FaultPath":
        ident = PauliOperator(n)
        return cls(ident, (ident,) * T, (0,) * T, num_checks)

    @property
    def n(self) -> int:
        return self.init_error.n

    @property
    def T(self) -> int:
        return len(self.data_errors)

    def cumulative_error(self, upto: int | None = None) -> PauliOperator:
        """init * F_1 * ... * F_upto (all rounds by default)."""
        acc = self.init_error
        for f in self.data_errors[: self.T if upto is None else upto]:
            acc = acc * f
        return acc

    @property
    def weight(self) -> int:
        """Data-error weight plus flipped syndrome bits (init counted with round 1)."""
        return (
            sum(f.weight for f in self.data_errors[1:])
            + (self.init_error * self.data_errors[0]).weight
            + sum(b.bit_count() for b in self.synd_errors)
        )

    def is_empty(self) -> bool:
        return self.init_error.is_identity() and all(f.is_identity() for f in self.data_errors) and not any(
            self.synd_errors
        )

    def __mul__(self, other: "FaultPath") -> "FaultPath":
        if other.T != self.T or other.num_checks != self.num_checks:
            raise ValueError("fault paths have different shapes")
        return FaultPath(
            self.init_error * other.init_error,
            tuple(a * b for a, b in zip(self.data_errors, other.data_errors)),
            tuple(a ^ b for a, b in zip(self.synd_errors, other.synd_errors)),
            self.num_checks,
        )

    def to_dict(self) -> dict:
        def pauli(p):
            return {"x": format(p.x, "x"), "z": format(p.z, "x")}

        return {
            "n": self.n,
            "num_checks": self.num_checks,
            "T": self.T,
            "init": pauli(self.init_error),
            "data": [pauli(f) for f in self.data_errors],
            "synd": [format(b, "x") for b in self.synd_errors],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "FaultPath":
        n = d["n"]

        def pauli(v):
            return PauliOperator(n, int(v["x"], 16), int(v["z"], 16))

        return cls(
            pauli(d["init"]),
            tuple(pauli(v) for v in d["data"]),
            tuple(int(b, 16) for b in d["synd"]),
            d["num_checks"],
        )

    @classmethod
    def from_json(cls, text: str) -> "FaultPath":
        return cls.from_dict(json.loads(text))


def observed_syndromes(code: StabilizerCode, fp: FaultPath) -> list[int]:
    """Difference syndromes Delta_1..Delta_T of a fault path."""
    if fp.n != code.n or fp.num_checks != code.num_checks:
        raise ValueError("fault path does not match the code dimensions")
    out = []
    prev_b = 0
    for t, (f, b) in enumerate(zip(fp.data_errors, fp.synd_errors)):
        err = fp.init_error * f if t == 0 else f
        out.append(code.syndrome(err) ^ prev_b ^ b)
        prev_b = b
    return out


# -- vectorised sampling -----------------------------------------------------


class SyndromeMatrices:
    """uint8 matrices giving syndromes of batches of (x, z) bit arrays."""

    def __init__(self, code: StabilizerCode):
        n, m = code.n, code.num_checks
        gx = np.zeros((m, n), dtype=np.uint8)
        gz = np.zeros((m, n), dtype=np.uint8)
        for i, g in enumerate(code.generators):
            for j in range(n):
                gx[i, j] = (g.x >> j) & 1
                gz[i, j] = (g.z >> j) & 1
        # syndrome = x @ gz^T + z @ gx^T  (mod 2)
        self.from_x = np.ascontiguousarray(gz.T)
        self.from_z = np.ascontiguousarray(gx.T)
        self.n = n
        self.m = m

    def syndromes(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        s = x.astype(np.int32) @ self.from_x + z.astype(np.int32) @ self.from_z
        return (s & 1).astype(np.uint8)


def _pauli_hits(rng: np.random.Generator, shape, p: float, channel: str):
    hit = rng.random(shape) < p
    if channel == "x":
        return hit, np.zeros(shape, dtype=bool)
    if channel == "z":
        return np.zeros(shape, dtype=bool), hit
    kind = rng.integers(1, 4, size=shape)  # 1=X, 2=Z, 3=Y
    return hit & (kind != 2), hit & (kind != 1)


@dataclass
class FaultBatch:
    """Fault paths for many trials as boolean arrays."""

    init_x: np.ndarray  # (trials, n)
    init_z: np.ndarray
    data_x: np.ndarray  # (trials, T, n)
    data_z: np.ndarray
    synd: np.ndarray  # (trials, T, m)

    @property
    def trials(self) -> int:
        return self.init_x.shape[0]

    def path(self, i: int) -> FaultPath:
        def to_int(row):
            return sum(1 << int(j) for j in np.flatnonzero(row))

        n = self.init_x.shape[1]
        m = self.synd.shape[2]
        T = self.synd.shape[1]
        init = PauliOperator(n, to_int(self.init_x[i]), to_int(self.init_z[i]))
        data = tuple(PauliOperator(n, to_int(self.data_x[i, t]), to_int(self.data_z[i, t])) for t in range(T))
        synd = tuple(to_int(self.synd[i, t]) for t in range(T))
        return FaultPath(init, data, synd, m)


def sample_batch(params: PhenomenologicalParams, n: int, m: int, trials: int, rng: np.random.Generator) -> FaultBatch:
    """Draw ``trials`` i.i.d. fault paths.  Draw order is fixed, so the same
    generator state always yields the same batch."""
    T = params.T
    ix, iz = _pauli_hits(rng, (trials, n), params.p_init, params.channel)
    dx, dz = _pauli_hits(rng, (trials, T, n), params.p_data, params.channel)
    synd = rng.random((trials, T, m)) < params.q_synd
    return FaultBatch(ix, iz, dx, dz, synd)


def sample_iid(params: PhenomenologicalParams, code: StabilizerCode, seed=None) -> FaultPath:
    rng = np.random.default_rng(seed)
    return sample_batch(params, code.n, code.num_checks, 1, rng).path(0)


# -- local stochastic audit --------------------------------------------------


def _location_faulty(fp: FaultPath, loc) -> bool:
    kind = loc[0]
    if kind == "init":
        return bool((fp.init_error.support_mask >> loc[1]) & 1)
    if kind == "data":
        _, t, q = loc
        return bool((fp.data_errors[t - 1].support_mask >> q) & 1)
    if kind == "synd":
        _, t, b = loc
        return bool((fp.synd_errors[t - 1] >> b) & 1)
    raise ValueError(f"unknown location kind {kind!r}")


def default_location_panel(n: int, m: int, T: int) -> list[tuple]:
    """Fixed location sets of size 1, 2 and 3 spread over the fault path."""
    data = [("data", 1 + (i % T), (i * 5) % n) for i in range(6)]
    synd = [("synd", 1 + (i % T), (i * 3) % max(m, 1)) for i in range(3)] if m else []
    panel: list[tuple] = [(data[0],), (data[1],)]
    if synd:
        panel.append((synd[0],))
    panel.append((data[0], data[1]) if data[0] != data[1] else (data[0], ("data", 1, (data[0][2] + 1) % n)))
    if synd:
        panel.append((data[2], synd[1]))
    triple = tuple(dict.fromkeys([data[3], data[4], data[5]]))
    if len(triple) == 3:
        panel.append(triple)
    return panel


@dataclass
class LocalStochasticEntry:
    locations: tuple
    a: int
    hits: int
    trials: int
    bound: float
    ci_low: float
    ci_high: float

    @property
    def frequency(self) -> float:
        return self.hits / self.trials if self.trials else 0.0

    @property
    def violated(self) -> bool:
        # flagged only when the whole confidence interval sits above rate^a
        return self.ci_low > self.bound


def local_stochastic_check(
    fp_set: Sequence[FaultPath],
    rate: float,
    panel: Sequence[tuple] | None = None,
    confidence: float = 0.99,
) -> list[LocalStochasticEntry]:
    """Compare joint fault frequencies on fixed location sets with rate**a."""
    if not fp_set:
        return []
    first = fp_set[0]
    if panel is None:
        panel = default_location_panel(first.n, first.num_checks, first.T)
    out = []
    for locs in panel:
        hits = sum(all(_location_faulty(fp, loc) for loc in locs) for fp in fp_set)
        lo, hi = wilson_interval(hits, len(fp_set), confidence)
        out.append(LocalStochasticEntry(tuple(locs), len(locs), hits, len(fp_set), rate ** len(locs), lo, hi))
    return out

