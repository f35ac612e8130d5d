"""Command line entry point: ``python -m qldpc_lab <subcommand>``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .decoders import decode_spacetime, decode_static, greedy_cluster_decode
from .harness import (
    ExperimentConfig,
    build_code,
    run_memory_experiment,
    threshold_scan,
    write_csv,
    write_manifest,
)
from .overhead import ProtocolParams, overhead_report, overhead_table
from .stabilizer import code_from_json


def _load_json(text_or_path: str):
    p = Path(text_or_path)
    if p.exists():
        return json.loads(p.read_text())
    return json.loads(text_or_path)


def _code_arg(value: str):
    # plain names ("rep3") or JSON specs
    value = value.strip()
    return json.loads(value) if value.startswith("{") else value


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_build_code(args) -> int:
    cid, code = build_code(_code_arg(args.code))
    rep = code.validate()
    doc = json.loads(code.to_json())
    doc["id"] = cid
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    print(f"{cid}: n={code.n} k={code.k} d_hint={code.distance_hint} r={rep.r} c={rep.c} valid={rep.valid}", file=sys.stderr)
    return 0 if rep.valid else 1


def _parse_syndrome(v) -> int:
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        v = v.strip()
        if set(v) <= {"0", "1"}:
            # bit string, generator 0 first
            return sum(1 << i for i, ch in enumerate(v) if ch == "1")
        return int(v, 0)
    if isinstance(v, list):
        return sum(1 << i for i, b in enumerate(v) if b)
    raise ValueError(f"cannot parse syndrome {v!r}")


def cmd_decode(args) -> int:
    code = code_from_json(Path(args.code).read_text()) if Path(args.code).exists() else build_code(_code_arg(args.code))[1]
    rec = _load_json(args.syndromes)
    if "syndrome" in rec:
        s = _parse_syndrome(rec["syndrome"])
        corr = decode_static(code, s, args.weight_cap)
        out = {"status": "not_found" if corr is None else "decoded", "correction": None if corr is None else str(corr)}
    else:
        deltas = [_parse_syndrome(v) for v in rec["deltas"]]
        if args.decoder == "exact":
            res = decode_spacetime(code, deltas, len(deltas), args.weight_cap)
        else:
            res = greedy_cluster_decode(code, deltas, len(deltas))
        out = res.to_dict()
    _emit(json.dumps(out, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def _config_from(args, **over) -> ExperimentConfig:
    base = _load_json(args.config) if args.config else {}
    for key in ("p", "q", "p_init", "T", "trials", "seed", "decoder", "noise", "workers", "chunk", "channel"):
        v = getattr(args, key, None)
        if v is not None:
            base[key] = v
    if getattr(args, "code", None):
        base["code"] = _code_arg(args.code)
    base.update(over)
    return ExperimentConfig.from_dict(base)


def cmd_simulate(args) -> int:
    cfg = _config_from(args, archive=args.dump_failures)
    cell = run_memory_experiment(cfg)
    text = write_csv([cell])
    _emit(text, args.csv)
    if args.manifest:
        _, code = build_code(cfg.code)
        write_manifest(args.manifest, [cfg.resolved(code)], [cell])
    return 0


def cmd_threshold_scan(args) -> int:
    cfg = _config_from(args)
    family = [_code_arg(c) for c in args.codes.split(",")]
    rep = threshold_scan(family, _floats(args.p_grid), cfg)
    cells = [c for row in rep.cells for c in row]
    _emit(write_csv(cells), args.csv)
    verdict = {"low_p": rep.low_verdict, "high_p": rep.high_verdict, "crossing": rep.crossing, "wide_ci": rep.wide}
    if args.manifest:
        write_manifest(args.manifest, [cfg], cells, {"verdict": verdict})
    print(json.dumps(verdict, default=str), file=sys.stderr)
    return 0


def cmd_overhead(args) -> int:
    params = ProtocolParams.from_dict(_load_json(args.params))
    if args.table:
        values = _floats(args.values) if args.values else ([1e-6, 1e-5, 1e-4, 1e-3] if args.table == "p" else [1, 2, 4, 8])
        _emit(overhead_table(params, args.table, values, args.n, args.k, args.T), args.out)
        return 0
    family = json.loads(args.family) if args.family else None
    rep = overhead_report(params, args.n, args.k, args.T, family, args.logical, args.f_locations)
    _emit(rep.to_json() + "\n", args.out)
    return 0


def _sim_flags(sp) -> None:
    sp.add_argument("--config", help="JSON file or inline JSON with ExperimentConfig fields")
    sp.add_argument("--p", type=float)
    sp.add_argument("--q", type=float)
    sp.add_argument("--p-init", dest="p_init", type=float)
    sp.add_argument("--T", type=int)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--decoder", choices=["auto", "static", "exact", "cluster"])
    sp.add_argument("--noise", choices=["phenomenological", "circuit"])
    sp.add_argument("--channel", choices=["depolarizing", "x", "z"])
    sp.add_argument("--workers", type=int)
    sp.add_argument("--chunk", type=int)
    sp.add_argument("--csv", help="write the CSV here instead of stdout")
    sp.add_argument("--manifest", help="JSON run manifest path")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qldpc_lab", description="LDPC fault-tolerance experiments")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("build-code", help="construct a code and print its JSON")
    sp.add_argument("--code", required=True, help="rep3, hamming, or a JSON spec")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_build_code)

    sp = sub.add_parser("decode", help="decode a syndrome or a difference-syndrome record")
    sp.add_argument("--code", required=True, help="code JSON file or spec")
    sp.add_argument("--syndromes", required=True, help='{"syndrome": ...} or {"deltas": [...]}')
    sp.add_argument("--decoder", choices=["exact", "cluster"], default="exact")
    sp.add_argument("--weight-cap", dest="weight_cap", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("simulate", help="memory experiment for one code and noise point")
    sp.add_argument("--code")
    _sim_flags(sp)
    sp.add_argument("--dump-failures", dest="dump_failures", help="JSON-lines archive of failing fault paths")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("threshold-scan", help="failure rates over a code family and p grid")
    sp.add_argument("--codes", required=True, help="comma-separated specs, e.g. rep3,rep5,rep7")
    sp.add_argument("--p-grid", dest="p_grid", required=True, help="comma-separated p values")
    _sim_flags(sp)
    sp.set_defaults(func=cmd_threshold_scan)

    sp = sub.add_parser("overhead", help="effective rates, thresholds and budgets")
    sp.add_argument("--params", required=True, help="ProtocolParams JSON file or inline JSON")
    sp.add_argument("--n", type=int, default=13)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--T", type=int, default=1)
    sp.add_argument("--family", help='JSON list of [n_i, k_i] pairs for block planning')
    sp.add_argument("--logical", type=int, help="logical qubit count k for block planning")
    sp.add_argument("--f-locations", dest="f_locations", type=float, default=1e6)
    sp.add_argument("--table", choices=["p", "s"], help="emit a CSV sweep over p or s")
    sp.add_argument("--values", help="comma-separated sweep values")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_overhead)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
