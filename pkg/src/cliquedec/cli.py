"""Command-line driver: seeded experiments writing plot-ready CSV plus a JSON
summary echoing the resolved configuration.

Subcommands: coverage, ler, bandwidth, compress, cost.  Options may come
from a key=value config file (--config); command-line flags override file
values.  All randomness traces to --seed, outputs carry no timestamps, and
grids are computed fully before anything is written, so reruns with one seed
are byte-identical at any worker count.
"""

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import bandwidth, compression, hwcost, montecarlo
from .backend import BACKEND


def _parse_list(text, conv):
    return [conv(x) for x in str(text).split(",") if x != ""]


def _as_int(x):
    return int(float(x))


def _load_config(path):
    values = {}
    try:
        with open(path) as fh:
            for line_no, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{line_no}: expected key = value")
                key, val = (part.strip() for part in line.split("=", 1))
                values[key.replace("-", "_")] = val
    except OSError as exc:
        raise ValueError(f"cannot read config file: {exc}") from exc
    return values


def _resolve(args, spec):
    """builtin defaults <- config file <- explicit flags; returns plain dict."""
    file_values = _load_config(args.config) if args.config else {}
    unknown = set(file_values) - {name for name, _, _ in spec}
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    resolved = {}
    for name, conv, default in spec:
        cli_val = getattr(args, name)
        if cli_val is not None:
            resolved[name] = conv(cli_val)
        elif name in file_values:
            resolved[name] = conv(file_values[name])
        else:
            resolved[name] = default
    return resolved


def _write_outputs(out_prefix, command, config, header, rows, extra=None):
    """CSV (config echoed in a leading comment) + JSON summary, written only
    after the whole grid is computed.

    The echo covers the experiment-defining keys; execution details (worker
    count, output path) shape neither the data nor the bytes, and embedding
    them would break identical-output-at-any-parallelism reproducibility.
    """
    config = {k: v for k, v in config.items() if k not in ("workers", "out")}
    directory = os.path.dirname(out_prefix)
    if directory:
        os.makedirs(directory, exist_ok=True)
    cfg_line = json.dumps({"subcommand": command, **config}, sort_keys=True)
    csv_path = out_prefix + ".csv"
    tmp = csv_path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write(f"# {cfg_line}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    os.replace(tmp, csv_path)

    summary = {
        "subcommand": command,
        "config": config,
        "backend": BACKEND,
        "columns": list(header),
        "rows": len(rows),
    }
    if extra:
        summary.update(extra)
    json_path = out_prefix + ".json"
    tmp = json_path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
        fh.write("\n")
    os.replace(tmp, json_path)
    return csv_path, json_path


def _fmt(x):
    if isinstance(x, float):  # numpy scalars included; coerce for clean repr
        x = float(x)
        if math.isinf(x):
            return "inf"
        return repr(x)
    return x


COMMON = [
    ("seed", _as_int, None),
    ("workers", _as_int, 1),
]

SPECS = {
    "coverage": COMMON
    + [
        ("distance", lambda s: _parse_list(s, _as_int), [3]),
        ("p", lambda s: _parse_list(s, float), [1e-3]),
        ("cycles", _as_int, 100_000),
        ("out", str, "cliquedec_out/coverage"),
    ],
    "ler": COMMON
    + [
        ("distance", lambda s: _parse_list(s, _as_int), [3]),
        ("p", lambda s: _parse_list(s, float), [1e-3]),
        ("trials", _as_int, 10_000),
        ("mode", str, "both"),
        ("out", str, "cliquedec_out/ler"),
    ],
    "bandwidth": COMMON
    + [
        ("num_qubits", _as_int, 1000),
        ("q_complex", float, 0.05),
        ("cycles", _as_int, 100_000),
        ("percentile", float, None),
        ("bandwidth", _as_int, None),
        ("tradeoff", lambda s: _parse_list(s, float), None),
        ("payload_distance", _as_int, None),
        ("out", str, "cliquedec_out/bandwidth"),
    ],
    "compress": COMMON
    + [
        ("distance", lambda s: _parse_list(s, _as_int), [3, 5, 7]),
        ("p", lambda s: _parse_list(s, float), [5e-4, 1e-3]),
        ("cycles", _as_int, 100_000),
        ("out", str, "cliquedec_out/compress"),
    ],
    "cost": COMMON
    + [
        ("distance", lambda s: _parse_list(s, _as_int), [3, 5, 7, 9, 11]),
        ("clock_ghz", float, 10.0),
        ("activity", float, 1.0),
        ("energy_j", float, 1e-19),
        ("cell_library", str, None),
        ("out", str, "cliquedec_out/cost"),
    ],
}


def _validate(command, cfg):
    for d in cfg.get("distance", []):
        if d < 3 or d % 2 == 0:
            raise ValueError(f"distance must be an odd integer >= 3, got {d}")
    for p in cfg.get("p", []):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {p}")
    if "percentile" in cfg and cfg["percentile"] is not None:
        if not 0 <= cfg["percentile"] <= 100:
            raise ValueError("percentile must be in [0, 100]")
    if command == "ler" and cfg["mode"] not in ("both", montecarlo.BASELINE, montecarlo.CLIQUE_BASELINE):
        raise ValueError(f"unknown mode: {cfg['mode']}")
    for key in ("cycles", "trials", "workers", "num_qubits"):
        if key in cfg and cfg[key] is not None and cfg[key] < 1:
            raise ValueError(f"{key} must be >= 1")


def _run_coverage(cfg):
    header = ["d", "p", "cycles", "frac_all0", "frac_local1", "frac_complex", "coverage"]
    rows = []
    for d in cfg["distance"]:
        for p in cfg["p"]:
            s = montecarlo.classify_cycles(d, p, cfg["cycles"], cfg["seed"], cfg["workers"])
            rows.append(
                [d, _fmt(p), cfg["cycles"], _fmt(s.frac_all0), _fmt(s.frac_local1),
                 _fmt(s.frac_complex), _fmt(s.coverage)]
            )
    return header, rows, None


def _run_ler(cfg):
    modes = (
        (montecarlo.BASELINE, montecarlo.CLIQUE_BASELINE)
        if cfg["mode"] == "both"
        else (cfg["mode"],)
    )
    header = ["d", "p", "trials", "mode", "failures", "ler", "ci_lo", "ci_hi"]
    rows = []
    for d in cfg["distance"]:
        for p in cfg["p"]:
            for mode in modes:
                r = montecarlo.estimate_ler(d, p, cfg["trials"], mode, cfg["seed"], cfg["workers"])
                lo, hi = r.wilson_ci
                rows.append(
                    [d, _fmt(p), cfg["trials"], mode, r.logical_failures,
                     _fmt(r.ler), _fmt(lo), _fmt(hi)]
                )
    return header, rows, None


def _run_bandwidth(cfg):
    model = bandwidth.DemandModel(cfg["num_qubits"], cfg["q_complex"])
    payload = (
        bandwidth.request_payload_bits(cfg["payload_distance"])
        if cfg["payload_distance"]
        else 1
    )
    if cfg["tradeoff"]:
        header = ["percentile", "B", "bandwidth_reduction_factor", "exec_time_increase", "stall_fraction"]
        rows = [
            [_fmt(float(r["percentile"])), r["B"], _fmt(r["bandwidth_reduction_factor"]),
             _fmt(r["exec_time_increase"]), _fmt(r["stall_fraction"])]
            for r in bandwidth.tradeoff_curve(
                model, cfg["tradeoff"], cfg["cycles"], cfg["seed"], payload
            )
        ]
        return header, rows, None

    if cfg["bandwidth"] is not None:
        B = cfg["bandwidth"]
    else:
        pct = cfg["percentile"] if cfg["percentile"] is not None else 99.0
        B = bandwidth.percentile_provision(model, pct)
    trace = bandwidth.simulate(model, B, cfg["cycles"], cfg["seed"])
    header = ["cycle", "new", "carryover", "served", "is_stall"]
    rows = [
        [t, int(trace.new[t]), int(trace.carryover[t]), int(trace.served[t]), int(trace.is_stall[t])]
        for t in range(len(trace.new))
    ]
    extra = {
        "summary": {
            "provisioned_B": trace.provisioned_B,
            "stall_fraction": trace.stall_fraction,
            "exec_time_overhead": trace.exec_time_overhead,
            "max_backlog": trace.max_backlog,
        }
    }
    return header, rows, extra


def _run_compress(cfg):
    header = ["d", "p", "raw_bits", "afs_avg_bits", "clique_avg_bits",
              "afs_reduction", "clique_reduction", "ratio"]
    rows = []
    for d in cfg["distance"]:
        for p in cfg["p"]:
            out = compression.compare(d, p, cfg["cycles"], cfg["seed"], cfg["workers"])
            rows.append(
                [d, _fmt(p), d * d - 1,
                 _fmt(out["afs"].avg_bits_per_cycle), _fmt(out["clique"].avg_bits_per_cycle),
                 _fmt(out["afs"].reduction_vs_raw), _fmt(out["clique"].reduction_vs_raw),
                 _fmt(out["ratio"])]
            )
    return header, rows, None


def _run_cost(cfg):
    lib = hwcost.load_library(cfg["cell_library"])
    header = ["d", "n_xor2", "n_and2", "n_or2", "n_not", "n_dff", "n_split",
              "jj_count", "area_um2", "critical_path_ps", "power_w"]
    rows = []
    for d in cfg["distance"]:
        nl = hwcost.build_netlist(montecarlo._lattice(d))
        counts = nl.counts()
        ev = hwcost.evaluate(nl, lib)
        power = hwcost.power_estimate(
            nl, lib, cfg["clock_ghz"] * 1e9, cfg["energy_j"], cfg["activity"]
        )
        rows.append(
            [d, counts["XOR2"], counts["AND2"], counts["OR2"], counts["NOT"],
             counts["DFF"], counts["SPLIT"], ev["jj_count"], _fmt(ev["area_um2"]),
             _fmt(ev["critical_path_ps"]), _fmt(power)]
        )
    return header, rows, None


RUNNERS = {
    "coverage": _run_coverage,
    "ler": _run_ler,
    "bandwidth": _run_bandwidth,
    "compress": _run_compress,
    "cost": _run_cost,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cliquedec",
        description="surface-code decode triage, bandwidth and cost experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "seed": "root seed (or env CLIQUEDEC_SEED)",
        "workers": "parallel workers; results are identical at any value",
        "distance": "comma-separated odd code distances",
        "p": "comma-separated physical error rates",
    }
    for command, spec in SPECS.items():
        sp = sub.add_parser(command)
        sp.add_argument("--config", default=None, help="key = value config file")
        for name, _, default in spec:
            flag = "--" + name.replace("_", "-")
            sp.add_argument(flag, default=None, help=helps.get(name, f"default: {default}"))
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    command = args.command
    try:
        cfg = _resolve(args, SPECS[command])
        if cfg["seed"] is None:
            cfg["seed"] = int(os.environ.get("CLIQUEDEC_SEED", 0))
        _validate(command, cfg)
        header, rows, extra = RUNNERS[command](cfg)
        csv_path, json_path = _write_outputs(cfg["out"], command, cfg, header, rows, extra)
    except (ValueError, OSError) as exc:
        print(f"cliquedec {command}: error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {csv_path} and {json_path} ({len(rows)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
