"""Software ET/TH timing harness for the cipher corpus."""

import math
import os
import platform
import statistics
import threading
import time
from dataclasses import dataclass

import numpy as np

from ._accel import resolve_backend
from .ciphers import SPECS, make_cipher
from .errors import ClockError, MeasurementError, UnknownCipher, WorkloadAlignmentError
from .indicators import Measurement, SubjectRecord

DEFAULT_SEED = 0x5EED
# Smallest size >= 1 MiB that every corpus block size (4, 8, 12, 16 bytes) divides.
DEFAULT_WORKLOAD_BYTES = 1048608
AGGREGATIONS = ("median", "min")

# Timing runs never overlap within a process.
_TIMING_LOCK = threading.Lock()


def seed_from_env(default=DEFAULT_SEED) -> int:
    raw = os.environ.get("UNIBENCH_SEED")
    if raw is None or not raw.strip():
        return default
    return int(raw.strip(), 0)


@dataclass(frozen=True)
class TimingConfig:
    warmup_iterations: int = 5
    repetitions: int = 30
    workload_bytes: int = DEFAULT_WORKLOAD_BYTES
    aggregation: str = "median"
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.warmup_iterations < 0:
            raise ValueError("warmup_iterations must be >= 0")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.workload_bytes < 1:
            raise ValueError("workload_bytes must be positive")
        if self.aggregation not in AGGREGATIONS:
            raise ValueError(f"aggregation must be one of {AGGREGATIONS}")

    def detail(self, backend) -> str:
        return (f"host={platform.node() or 'unknown'} backend={backend} warmup={self.warmup_iterations} "
                f"repetitions={self.repetitions} workload_bytes={self.workload_bytes} agg={self.aggregation} "
                f"seed={self.seed:#x} mode=ecb keysched=excluded")


def make_workload(cfg: TimingConfig) -> np.ndarray:
    return np.random.default_rng(cfg.seed).integers(0, 256, cfg.workload_bytes, dtype=np.uint8)


def timing_key(name: str, seed: int = DEFAULT_SEED) -> bytes:
    return np.random.default_rng([seed, 1]).bytes(SPECS[name].key_bytes)


def _nudge(x, steps):
    toward = math.inf if steps > 0 else 0.0
    for _ in range(abs(steps)):
        x = math.nextafter(x, toward)
    return x


def consistent_et_th(bits: int, et: float):
    """Return (et, th) with ``th * et == bits`` in floating point when reachable.

    ``et`` moves by at most 64 ulps and ``th`` stays within 2 ulps of
    ``bits / et``, both far below clock resolution. If no such pair is found
    the plain quotient is returned.
    """
    for k in range(64):
        for e in ((et,) if k == 0 else (_nudge(et, k), _nudge(et, -k))):
            th = bits / e
            for j in (0, 1, -1, 2, -2):
                t = _nudge(th, j)
                if t * e == bits:
                    return e, t
    return et, bits / et


def run_timing(c, cfg: TimingConfig, backend=None, data=None):
    """Time ECB encryption of the workload; returns (sw.et, sw.th) Measurements.

    Key expansion happens when ``c`` is built and is not timed. One block is
    encrypted before the warmup passes so JIT compilation never lands in a
    timed pass.
    """
    backend = resolve_backend(backend)
    block = c.spec.block_bytes
    if cfg.workload_bytes % block:
        raise WorkloadAlignmentError(c.spec.name, cfg.workload_bytes, block)
    if not time.get_clock_info("perf_counter").monotonic:
        raise ClockError("perf_counter is not monotonic on this platform")
    if data is None:
        data = make_workload(cfg)
    if data.size != cfg.workload_bytes:
        raise MeasurementError(f"workload has {data.size} bytes, config says {cfg.workload_bytes}")

    with _TIMING_LOCK:
        c.encrypt_blocks(data[:block], backend)
        for _ in range(cfg.warmup_iterations):
            c.encrypt_blocks(data, backend)
        samples = []
        for _ in range(cfg.repetitions):
            t0 = time.perf_counter_ns()
            c.encrypt_blocks(data, backend)
            t1 = time.perf_counter_ns()
            if t1 <= t0:
                raise ClockError("monotonic clock did not advance across a timed pass")
            samples.append((t1 - t0) / 1e9)

    et = statistics.median(samples) if cfg.aggregation == "median" else min(samples)
    et, th = consistent_et_th(8 * cfg.workload_bytes, et)
    detail = cfg.detail(backend)
    return Measurement("sw.et", et, "measured", detail), Measurement("sw.th", th, "measured", detail)


def corpus_measure(names, cfg: TimingConfig, backend=None) -> list:
    """Measure every named cipher with the same config and the same workload bytes."""
    names = list(names)
    for name in names:
        if name not in SPECS:
            raise UnknownCipher(name)
    if not names:
        return []
    data = make_workload(cfg)
    records = []
    for name in names:
        try:
            c = make_cipher(name, timing_key(name, cfg.seed))
            et, th = run_timing(c, cfg, backend, data)
        except MeasurementError as exc:
            if name in str(exc):
                raise
            raise MeasurementError(f"{name}: {exc}") from exc
        records.append(SubjectRecord.from_measurements(name, [et, th]))
    return records
