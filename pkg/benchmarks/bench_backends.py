"""Compare the numba and numpy kernels on every corpus cipher.

    python benchmarks/bench_backends.py --workload-bytes 262176 --repetitions 10

Reports median ECB encryption throughput per backend and the speedup of
numba over numpy. Both backends encrypt the same seeded workload.
"""

import argparse
import json
import sys

from unibench._accel import BACKENDS, HAVE_NUMBA
from unibench.bench import DEFAULT_WORKLOAD_BYTES, TimingConfig, make_workload, run_timing, timing_key
from unibench.ciphers import CORPUS, make_cipher


def bench(names, cfg):
    data = make_workload(cfg)
    rows = []
    for name in names:
        c = make_cipher(name, timing_key(name, cfg.seed))
        # both backends must agree before their speed means anything
        ref = None
        row = {"cipher": name}
        for backend in BACKENDS:
            out = c.encrypt_blocks(data, backend)
            if ref is not None and not (out == ref).all():
                raise SystemExit(f"{name}: backends disagree")
            ref = out
            et, th = run_timing(c, cfg, backend, data)
            row[backend] = {"et_s": et.value, "mbps": th.value / 1e6}
        row["speedup"] = row["numpy"]["et_s"] / row["numba"]["et_s"]
        rows.append(row)
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--ciphers", default=",".join(CORPUS), help="comma-separated cipher names")
    p.add_argument("--workload-bytes", type=int, default=DEFAULT_WORKLOAD_BYTES)
    p.add_argument("--repetitions", type=int, default=10)
    p.add_argument("--warmup", type=int, default=2)
    p.add_argument("--json", action="store_true", help="print JSON instead of a table")
    args = p.parse_args(argv)
    if not HAVE_NUMBA:
        sys.exit("numba is disabled (UNIBENCH_DISABLE_NUMBA) or missing; nothing to compare")

    cfg = TimingConfig(args.warmup, args.repetitions, args.workload_bytes)
    rows = bench([n for n in args.ciphers.split(",") if n], cfg)
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"workload {cfg.workload_bytes} bytes, {cfg.repetitions} repetitions, median")
    print(f"{'cipher':<10} {'numba Mbit/s':>13} {'numpy Mbit/s':>13} {'speedup':>8}")
    for r in rows:
        print(f"{r['cipher']:<10} {r['numba']['mbps']:>13.1f} {r['numpy']['mbps']:>13.1f} {r['speedup']:>7.1f}x")


if __name__ == "__main__":
    main()
