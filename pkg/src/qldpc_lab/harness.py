"""Monte Carlo memory experiments, threshold scans and staggered EC.

Trials are processed in fixed-size chunks.  Chunk ``j`` draws from
``SeedSequence(seed, spawn_key=(j,))`` so results do not depend on how many
worker processes run the chunks; counts are merged in chunk order.
"""

from __future__ import annotations

import csv
import io
import json
import multiprocessing as mp
import time
from collections import Counter
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .construct import hamming_code, hypergraph_product, random_gallager_ldpc, repetition_code
from .decoders import (
    CAP_EXCEEDED,
    LOGICAL_FAILURE,
    SPANNING_FAILURE,
    SUCCESS,
    DecodeResult,
    decode_spacetime,
    decode_static,
    failure_diagnostics,
    greedy_cluster_decode,
    logical_checker,
    syndrome_table,
)
from .gf2 import PauliOperator
from .noise import FaultBatch, FaultPath, PhenomenologicalParams, SyndromeMatrices, observed_syndromes, sample_batch
from .stabilizer import StabilizerCode, code_from_json
from .stats import wilson_interval

__all__ = [
    "CellResult",
    "ExperimentConfig",
    "ScanReport",
    "TrialOutcome",
    "build_code",
    "decode_trial",
    "replay_failures",
    "run_memory_experiment",
    "staggered_ec_experiment",
    "threshold_scan",
    "write_csv",
]

STATUSES = (SUCCESS, LOGICAL_FAILURE, SPANNING_FAILURE, CAP_EXCEEDED)
CSV_FIELDS = ("code", "n", "k", "d", "p", "q", "T", "trials", "failures", "rate", "ci_low", "ci_high", "seed")


# -- codes -------------------------------------------------------------------------

_CODES: dict = {}


def _spec_key(spec) -> str:
    return spec if isinstance(spec, str) else json.dumps(spec, sort_keys=True)


def build_code(spec) -> tuple[str, StabilizerCode]:
    """Resolve a code spec to ``(code_id, code)``.

    Accepted: ``"rep3"`` style strings, ``"hamming"``, or dicts
    ``{"family": "repetition", "L": 5}``, ``{"family": "hamming"}``,
    ``{"family": "gallager", "n": .., "r": .., "c": .., "seed": ..}``,
    ``{"path": "code.json"}``.  Results are cached per spec.
    """
    key = _spec_key(spec)
    if key in _CODES:
        return _CODES[key]
    if isinstance(spec, str):
        if spec.startswith("rep"):
            spec = {"family": "repetition", "L": int(spec[3:])}
        elif spec == "hamming":
            spec = {"family": "hamming"}
        elif spec.endswith(".json"):
            spec = {"path": spec}
        else:
            raise ValueError(f"unknown code spec {spec!r}")
    fam = spec.get("family")
    if "path" in spec:
        code = code_from_json(Path(spec["path"]).read_text())
        cid = code.name or Path(spec["path"]).stem
    elif fam == "repetition":
        L = int(spec["L"])
        code = hypergraph_product(repetition_code(L))
        cid = f"hgp-rep{L}"
    elif fam == "hamming":
        code = hypergraph_product(hamming_code())
        cid = "hgp-hamming7"
    elif fam == "gallager":
        cl = random_gallager_ldpc(int(spec["n"]), int(spec["r"]), int(spec["c"]), int(spec.get("seed", 0)))
        code = hypergraph_product(cl, reduce=True)
        cid = f"hgp-gal{spec['n']}-{spec['r']}-{spec['c']}-s{spec.get('seed', 0)}"
    else:
        raise ValueError(f"unknown code spec {spec!r}")
    _CODES[key] = (cid, code)
    return cid, code


def _distance(code: StabilizerCode) -> int | None:
    if code.distance_hint:
        return code.distance_hint
    if code.n <= 20:
        return code.distance()
    return None


# -- config and outcomes -----------------------------------------------------------


@dataclass
class ExperimentConfig:
    code: object = "rep3"
    p: float = 1e-3
    q: float | None = None  # syndrome flip rate; defaults to p
    p_init: float | None = None  # defaults to p
    T: int | None = None  # defaults to the code distance
    noise: str = "phenomenological"  # or "circuit"
    channel: str = "depolarizing"
    decoder: str = "auto"  # auto | static | exact | cluster
    decoder_opts: dict = field(default_factory=dict)
    trials: int = 1000
    seed: int = 0
    chunk: int = 20_000
    workers: int = 1
    stagger: int = 1  # rounds between measurements of one block
    archive: str | None = None
    max_archive: int = 2000
    check_witness: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.chunk < 1 or self.workers < 1 or self.stagger < 1:
            raise ValueError("chunk, workers and stagger must be positive")
        if self.noise not in ("phenomenological", "circuit"):
            raise ValueError("noise must be 'phenomenological' or 'circuit'")
        if self.decoder not in ("auto", "static", "exact", "cluster"):
            raise ValueError("unknown decoder")
        for k, v in self.decoder_opts.items():
            if not isinstance(v, (int, float)) or v <= 0:
                raise ValueError(f"decoder cap {k} must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)

    def resolved(self, code: StabilizerCode) -> "ExperimentConfig":
        """Fill in defaulted fields (q, p_init, T, decoder) for ``code``."""
        q = self.p if self.q is None else self.q
        p_init = self.p if self.p_init is None else self.p_init
        if self.noise == "circuit" and self.p_init is None:
            p_init = 0.0
        T = self.T or _distance(code) or 1
        dec = self.decoder
        if dec == "auto":
            if T == 1 and q == 0 and self.noise == "phenomenological":
                dec = "static"
            else:
                dec = "cluster"
        if dec == "static" and (T != 1 or q != 0 or self.noise != "phenomenological" or self.stagger != 1):
            raise ValueError("static decoding needs T=1, q=0 and phenomenological noise")
        return replace(self, q=q, p_init=p_init, T=T, decoder=dec)


@dataclass
class TrialOutcome:
    status: str
    residual_weight: int | None
    wall_time: float


@dataclass
class CellResult:
    code_id: str
    n: int
    k: int
    d: int | None
    p: float
    q: float
    T: int
    trials: int
    seed: int
    counts: dict
    witness_checked: int = 0
    witness_ok: int = 0
    decode_seconds: float = 0.0
    residual_hist: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def failures(self) -> int:
        return self.trials - self.counts.get(SUCCESS, 0)

    @property
    def rate(self) -> float:
        return self.failures / self.trials

    def ci(self, confidence: float = 0.95) -> tuple[float, float]:
        return wilson_interval(self.failures, self.trials, confidence)

    def row(self) -> dict:
        lo, hi = self.ci()
        return {
            "code": self.code_id,
            "n": self.n,
            "k": self.k,
            "d": "" if self.d is None else self.d,
            "p": repr(self.p),
            "q": repr(self.q),
            "T": self.T,
            "trials": self.trials,
            "failures": self.failures,
            "rate": repr(self.rate),
            "ci_low": repr(lo),
            "ci_high": repr(hi),
            "seed": self.seed,
        }


def write_csv(cells: Sequence[CellResult], path=None) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for c in cells:
        w.writerow(c.row())
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


# -- decoding one trial --------------------------------------------------------------


def decode_trial(code: StabilizerCode, fp: FaultPath, decoder: str, opts: dict | None = None) -> DecodeResult:
    """Decode a fault path with ground truth attached."""
    opts = opts or {}
    if decoder == "static":
        err = fp.cumulative_error()
        corr = decode_static(code, code.syndrome(err) ^ fp.synd_errors[0])
        if corr is None:
            return DecodeResult(None, None, CAP_EXCEEDED)
        comp = err * corr
        logical = code.syndrome(comp) != 0 or logical_checker(code).is_logical(comp.x, comp.z)
        return DecodeResult(corr, PauliOperator(code.n), LOGICAL_FAILURE if logical else SUCCESS, (corr,), (0,), corr.weight)
    deltas = observed_syndromes(code, fp)
    if decoder == "exact":
        return decode_spacetime(code, deltas, fp.T, truth=fp)
    if decoder == "cluster":
        return greedy_cluster_decode(code, deltas, fp.T, truth=fp, **opts)
    raise ValueError(f"unknown decoder {decoder!r}")


# -- sampling ----------------------------------------------------------------------------


def _fold_stagger(dx: np.ndarray, dz: np.ndarray, s: int):
    # XOR each group of s consecutive rounds: idle noise accumulates between measurements
    t = dx.shape[1] // s
    return (
        np.bitwise_xor.reduce(dx.reshape(dx.shape[0], t, s, -1), axis=2),
        np.bitwise_xor.reduce(dz.reshape(dz.shape[0], t, s, -1), axis=2),
    )


def _phenomenological_batch(cfg: ExperimentConfig, code, size: int, rng) -> FaultBatch:
    n, m = code.n, code.num_checks
    s = cfg.stagger
    params = PhenomenologicalParams(cfg.p_init, cfg.p, cfg.q, cfg.T * s, cfg.channel)
    if s == 1:
        return sample_batch(params, n, m, size, rng)
    b = sample_batch(params, n, m, size, rng)
    dx, dz = _fold_stagger(b.data_x, b.data_z, s)
    # only one syndrome measurement per s rounds
    return FaultBatch(b.init_x, b.init_z, dx, dz, b.synd[:, :: s][:, : cfg.T])


_ROUNDS: dict = {}


def _shor_round(code):
    from .shor import ShorRound, schedule_generators

    rnd = _ROUNDS.get(id(code))
    if rnd is None or rnd.code is not code:
        rnd = ShorRound(code, schedule_generators(code))
        _ROUNDS[id(code)] = rnd
    return rnd


def _circuit_paths(cfg: ExperimentConfig, code, size: int, rng) -> tuple[list[FaultPath], list[int]]:
    from .shor import circuit_round

    rnd = _shor_round(code)
    n, m = code.n, code.num_checks
    init = sample_batch(PhenomenologicalParams(cfg.p_init, 0.0, 0.0, 1, cfg.channel), n, m, size, rng)
    paths, retries = [], []
    for i in range(size):
        carry = PauliOperator(n)
        data, synd = [], []
        tries = 0
        for _ in range(cfg.T):
            rs = circuit_round(code, rnd.schedule, cfg.p, rng, round_model=rnd)
            data.append(rs.now * carry)
            synd.append(rs.synd)
            carry = rs.later
            tries += rs.retries
        # whatever spills past the last round belongs to the next cycle
        paths.append(FaultPath(init.path(i).init_error, tuple(data), tuple(synd), m))
        retries.append(tries)
    return paths, retries


def _pack(bits: np.ndarray) -> np.ndarray:
    """Rows of a (trials, n<=64) bool array as uint64."""
    w = np.uint64(1) << np.arange(bits.shape[-1], dtype=np.uint64)
    return (bits.astype(np.uint64) * w).sum(axis=-1, dtype=np.uint64)


# -- chunk worker ------------------------------------------------------------------------


def _run_chunk(args) -> dict:
    cfg, index, size = args
    _, code = build_code(cfg.code)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(index,)))
    counts: Counter = Counter()
    resid: Counter = Counter()
    archive: list = []
    witness = [0, 0]
    t0 = time.perf_counter()
    extra: dict = {}
    if cfg.noise == "circuit":
        paths, retries = _circuit_paths(cfg, code, size, rng)
        extra["cat_retries"] = int(sum(retries))
        items = enumerate(paths)
        active = None
    else:
        batch = _phenomenological_batch(cfg, code, size, rng)
        active = (
            batch.init_x.any(axis=1) | batch.init_z.any(axis=1)
            | batch.data_x.any(axis=(1, 2)) | batch.data_z.any(axis=(1, 2)) | batch.synd.any(axis=(1, 2))
        )
        counts[SUCCESS] += int((~active).sum())
        resid[0] += int((~active).sum())
        items = None
    if cfg.decoder == "static" and active is not None and code.n <= 64:
        _static_vectorised(cfg, code, batch, active, index, counts, resid, archive, witness)
    else:
        if items is None:
            items = ((i, batch.path(i)) for i in np.flatnonzero(active))
        for i, fp in items:
            res = decode_trial(code, fp, cfg.decoder, cfg.decoder_opts)
            counts[res.status] += 1
            if res.residual_estimate is not None:
                resid[res.residual_estimate.weight] += 1
            if res.status != SUCCESS:
                if cfg.check_witness and cfg.decoder == "static":
                    rep = failure_diagnostics(code, fp.cumulative_error(), res)
                    witness[0] += 1
                    witness[1] += rep.witness_half
                if len(archive) < cfg.max_archive:
                    archive.append(_archive_record(cfg, index, int(i), res.status, fp))
    return {
        "counts": dict(counts),
        "resid": dict(resid),
        "archive": archive,
        "witness": witness,
        "seconds": time.perf_counter() - t0,
        "extra": extra,
    }


def _archive_record(cfg, chunk: int, trial: int, status: str, fp: FaultPath) -> dict:
    return {
        "code": cfg.code,
        "chunk": chunk,
        "trial": trial,
        "status": status,
        "decoder": cfg.decoder,
        "decoder_opts": cfg.decoder_opts,
        "fault_path": fp.to_dict(),
    }


def _static_vectorised(cfg, code, batch, active, index, counts, resid, archive, witness) -> None:
    tab = syndrome_table(code)
    mats = SyndromeMatrices(code)
    ex = batch.init_x ^ batch.data_x[:, 0]
    ez = batch.init_z ^ batch.data_z[:, 0]
    idx = np.flatnonzero(active)
    ex, ez = ex[idx], ez[idx]
    synd = mats.syndromes(ex, ez)
    s_int = _pack(synd.astype(bool)).astype(np.int64)
    cx, cz = tab.x[s_int], tab.z[s_int]
    comp_x = _pack(ex) ^ cx
    comp_z = _pack(ez) ^ cz
    bad = logical_checker(code).is_logical_batch(comp_x, comp_z)
    counts[SUCCESS] += int((~bad).sum())
    counts[LOGICAL_FAILURE] += int(bad.sum())
    resid[0] += int((~bad).sum())
    for j in np.flatnonzero(bad):
        i = int(idx[j])
        fp = batch.path(i)
        err = fp.cumulative_error()
        corr = PauliOperator(code.n, int(cx[j]), int(cz[j]))
        res = DecodeResult(corr, PauliOperator(code.n), LOGICAL_FAILURE, (corr,), (0,), corr.weight)
        if cfg.check_witness:
            rep = failure_diagnostics(code, err, res)
            witness[0] += 1
            witness[1] += rep.witness_half
        if len(archive) < cfg.max_archive:
            archive.append(_archive_record(cfg, index, i, LOGICAL_FAILURE, fp))


# -- experiments ---------------------------------------------------------------------------


def _chunks(trials: int, chunk: int) -> list[tuple[int, int]]:
    out = []
    j = 0
    left = trials
    while left > 0:
        size = min(chunk, left)
        out.append((j, size))
        left -= size
        j += 1
    return out


def run_memory_experiment(config: ExperimentConfig, manifest_path=None, csv_path=None) -> CellResult:
    """Init noise, T noisy rounds, decode, classify; repeated ``trials`` times."""
    cid, code = build_code(config.code)
    cfg = config.resolved(code)
    jobs = [(cfg, j, size) for j, size in _chunks(cfg.trials, cfg.chunk)]
    if cfg.workers > 1 and len(jobs) > 1:
        with mp.get_context("fork").Pool(min(cfg.workers, len(jobs))) as pool:
            parts = pool.map(_run_chunk, jobs)
    else:
        parts = [_run_chunk(j) for j in jobs]
    counts: Counter = Counter()
    resid: Counter = Counter()
    archive: list = []
    wit = [0, 0]
    secs = 0.0
    extra: Counter = Counter()
    for part in parts:  # chunk order, whatever the worker count
        counts.update(part["counts"])
        resid.update(part["resid"])
        archive.extend(part["archive"])
        wit[0] += part["witness"][0]
        wit[1] += part["witness"][1]
        secs += part["seconds"]
        extra.update(part["extra"])
    archive = archive[: cfg.max_archive]
    cell = CellResult(
        code_id=cid,
        n=code.n,
        k=code.k,
        d=_distance(code),
        p=cfg.p,
        q=cfg.q,
        T=cfg.T,
        trials=cfg.trials,
        seed=cfg.seed,
        counts={s: counts.get(s, 0) for s in STATUSES},
        witness_checked=wit[0],
        witness_ok=wit[1],
        decode_seconds=secs,
        residual_hist=dict(sorted(resid.items())),
        extra=dict(extra),
    )
    if cfg.archive:
        with open(cfg.archive, "w") as fh:
            for rec in archive:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    if csv_path is not None:
        write_csv([cell], csv_path)
    if manifest_path is not None:
        write_manifest(manifest_path, [cfg], [cell])
    return cell


def write_manifest(path, configs: Sequence[ExperimentConfig], cells: Sequence[CellResult], extra: dict | None = None) -> None:
    from . import __version__

    doc = {
        "package_version": __version__,
        "configs": [c.to_dict() for c in configs],
        "cells": [
            {**c.row(), "status_counts": c.counts, "residual_weights": {str(k): v for k, v in c.residual_hist.items()}}
            for c in cells
        ],
    }
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n")


def replay_failures(archive_path, code_spec=None) -> list[tuple[dict, str]]:
    """Decode every archived fault path again; returns (record, new status) pairs."""
    out = []
    with open(archive_path) as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            fp = FaultPath.from_dict(rec["fault_path"])
            spec = code_spec if code_spec is not None else rec.get("code")
            _, code = build_code(spec)
            res = decode_trial(code, fp, rec["decoder"], rec.get("decoder_opts"))
            out.append((rec, res.status))
    return out


# -- threshold scan ------------------------------------------------------------------------


@dataclass
class ScanReport:
    cells: list  # list of lists, [code][p]
    p_grid: list
    codes: list
    low_verdict: str | None  # "decreasing", "not_decreasing", "inconclusive"
    high_verdict: str | None  # "non_decreasing", "decreasing", "inconclusive"
    wide: list  # (code, p) cells with fewer than 3 failures

    @property
    def crossing(self) -> bool | None:
        # no verdict without a grid, or when the statistics cannot separate cells
        if self.low_verdict is None or "inconclusive" in (self.low_verdict, self.high_verdict):
            return None
        return self.low_verdict == "decreasing" and self.high_verdict == "non_decreasing"

    def matrix(self) -> list[list[float]]:
        return [[c.rate for c in row] for row in self.cells]


def _separated_decreasing(cells: Sequence[CellResult]) -> bool:
    return all(b.ci()[1] < a.ci()[0] for a, b in zip(cells, cells[1:]))


def threshold_scan(family: Sequence, p_grid: Sequence[float], config: ExperimentConfig, trials_per_p: dict | None = None) -> ScanReport:
    """Failure rates for each code in ``family`` at each p (with q = p_init = p).

    The low-p verdict is ``decreasing`` only when consecutive Wilson
    intervals are disjoint; overlapping intervals give ``inconclusive``.
    The high-p verdict is ``non_decreasing`` when no larger code is
    significantly better than a smaller one.
    """
    if len(family) < 1 or len(p_grid) < 1:
        raise ValueError("need codes and grid points")
    grid = sorted(p_grid)
    rows = []
    for spec in family:
        row = []
        for p in grid:
            trials = (trials_per_p or {}).get(p, config.trials)
            cfg = replace(config, code=spec, p=p, q=p, p_init=p, trials=trials, T=None)
            row.append(run_memory_experiment(cfg))
        rows.append(row)
    wide = [(rows[i][j].code_id, p) for i in range(len(rows)) for j, p in enumerate(grid) if rows[i][j].failures < 3]
    low = high = None
    if len(family) >= 2 and len(grid) >= 2:
        lo_cells = [r[0] for r in rows]
        hi_cells = [r[-1] for r in rows]
        if _separated_decreasing(lo_cells):
            low = "decreasing"
        elif all(b.rate >= a.rate for a, b in zip(lo_cells, lo_cells[1:])) and not any(
            c.failures < 3 for c in lo_cells
        ):
            low = "not_decreasing"
        else:
            low = "inconclusive"
        if all(b.rate >= a.rate for a, b in zip(hi_cells, hi_cells[1:])):
            high = "non_decreasing"
        elif _separated_decreasing(hi_cells):
            high = "decreasing"
        else:
            high = "inconclusive"
    return ScanReport(rows, grid, [r[0].code_id for r in rows], low, high, wide)


# -- staggered EC ----------------------------------------------------------------------------


@dataclass
class StaggerSummary:
    M: int
    s: int
    rounds: int  # time steps simulated per cycle (s * T)
    measurements_per_block: int
    idle_rounds_per_block: int
    blocks_measured_per_step: int
    cell: CellResult
    any_block_failure: float  # probability at least one of M blocks fails, from the per-block rate


def staggered_ec_experiment(M: int, s: int, config: ExperimentConfig) -> StaggerSummary:
    """M blocks, each measured once every s rounds and idling in between.

    Idle rounds add data noise at rate p, so a block sees s rounds of data
    noise between consecutive syndrome measurements.  Blocks are
    independent; the cell counts block-cycles.  With s=1 this is exactly
    ``run_memory_experiment`` on one block.
    """
    if not M >= s >= 1:
        raise ValueError("need M >= s >= 1")
    cell = run_memory_experiment(replace(config, stagger=s))
    T = cell.T
    return StaggerSummary(
        M=M,
        s=s,
        rounds=s * T,
        measurements_per_block=T,
        idle_rounds_per_block=(s - 1) * T,
        blocks_measured_per_step=-(-M // s),
        cell=cell,
        any_block_failure=1 - (1 - cell.rate) ** M,
    )
