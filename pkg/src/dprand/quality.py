"""Output sanity checks and a throughput harness.

The statistical battery is deliberately tiny: monobit balance, the runs
test, and a byte-histogram chi-square. That is the smallest net that still
catches the degenerate failures seen in the field (a stuck generator after
suspend/resume, a zeroed buffer, a periodic pattern). It is a smoke test,
not a certification suite.
"""
from __future__ import annotations

import math
import multiprocessing as mp
import os
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .bitgen import GeneratorHandle
from .drbg import CtrDrbg
from .errors import SampleTooSmall, SourceUnavailable

MIN_SAMPLE_BYTES = 1_000_000
DEFAULT_ALPHA = 0.01


@dataclass(frozen=True)
class TestResult:
    name: str
    statistic: float
    p_value: float
    passed: bool


@dataclass(frozen=True)
class StatReport:
    sample_bytes: int
    alpha: float
    tests: list[TestResult]

    @property
    def all_passed(self) -> bool:
        return all(t.passed for t in self.tests)

    def to_dict(self) -> dict:
        return {
            "schema": "dprand.stats/1",
            "sample_bytes": self.sample_bytes,
            "alpha": self.alpha,
            "tests": [{"name": t.name, "statistic": t.statistic,
                       "p_value": t.p_value, "passed": t.passed} for t in self.tests],
        }

    def to_text(self) -> str:
        lines = [f"{t.name:<12} stat={t.statistic:>12.4f}  p={t.p_value:.6f}  "
                 f"{'pass' if t.passed else 'FAIL'}" for t in self.tests]
        lines.append(f"bytes tested: {self.sample_bytes:,} (alpha={self.alpha})")
        return "\n".join(lines)


def _monobit(bits: np.ndarray) -> tuple[float, float]:
    n = bits.size
    s_obs = abs(2 * int(np.count_nonzero(bits)) - n) / math.sqrt(n)
    return s_obs, math.erfc(s_obs / math.sqrt(2))


def _runs(bits: np.ndarray) -> tuple[float, float]:
    n = bits.size
    pi = np.count_nonzero(bits) / n
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n):
        return float("inf"), 0.0  # precondition fails, sequence already non-random
    v_obs = int(np.count_nonzero(np.diff(bits))) + 1
    num = abs(v_obs - 2.0 * n * pi * (1.0 - pi))
    den = 2.0 * math.sqrt(2.0 * n) * pi * (1.0 - pi)
    return v_obs, math.erfc(num / den)


def _byte_chi_square(data: np.ndarray) -> tuple[float, float]:
    counts = np.bincount(data, minlength=256)
    expected = data.size / 256.0
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    return chi2, float(stats.chi2.sf(chi2, 255))


def run_stat_tests_on_bytes(data: bytes, alpha: float = DEFAULT_ALPHA) -> StatReport:
    if len(data) < MIN_SAMPLE_BYTES:
        raise SampleTooSmall(f"need >= {MIN_SAMPLE_BYTES} bytes, got {len(data)}")
    arr = np.frombuffer(data, dtype=np.uint8)
    bits = np.unpackbits(arr)
    results = []
    for name, (stat, p) in (
        ("monobit", _monobit(bits)),
        ("runs", _runs(bits)),
        ("byte-chi2", _byte_chi_square(arr)),
    ):
        results.append(TestResult(name, float(stat), float(p), p >= alpha))
    return StatReport(len(data), alpha, results)


def run_stat_tests(g: GeneratorHandle, n_bytes: int, alpha: float = DEFAULT_ALPHA) -> StatReport:
    if n_bytes < MIN_SAMPLE_BYTES:
        raise SampleTooSmall(f"need >= {MIN_SAMPLE_BYTES} bytes, got {n_bytes}")
    return run_stat_tests_on_bytes(g.next_bytes(n_bytes - n_bytes % 4), alpha)


# --- throughput benchmark ---

@dataclass(frozen=True)
class BenchRow:
    kind: str
    workers: int
    total_bytes: int
    seconds: float
    per_worker_mb_s: list[float]
    error: str = ""

    @property
    def aggregate_mb_s(self) -> float:
        return sum(self.per_worker_mb_s)


@dataclass(frozen=True)
class BenchReport:
    duration: float
    rows: list[BenchRow] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema": "dprand.bench/1",
            "duration": self.duration,
            "rows": [{
                "kind": r.kind, "workers": r.workers, "total_bytes": r.total_bytes,
                "seconds": r.seconds, "per_worker_mb_s": r.per_worker_mb_s,
                "aggregate_mb_s": r.aggregate_mb_s, "error": r.error,
            } for r in self.rows],
        }

    def to_text(self) -> str:
        lines = [f"{'kind':<12} {'workers':>7} {'aggregate MB/s':>15} {'per-worker MB/s':>16}"]
        for r in self.rows:
            if r.error:
                lines.append(f"{r.kind:<12} {r.workers:>7} {r.error}")
                continue
            per = min(r.per_worker_mb_s), max(r.per_worker_mb_s)
            lines.append(f"{r.kind:<12} {r.workers:>7} {r.aggregate_mb_s:>15.1f} "
                         f"{per[0]:>7.1f}..{per[1]:.1f}")
        return "\n".join(lines)


def _drbg_worker(t_start, t_warm, t_end, chunk, queue):
    drbg = CtrDrbg(os.urandom(48))
    counted = 0
    while time.monotonic() < t_start:
        pass
    while True:
        now = time.monotonic()
        if now >= t_end:
            break
        drbg.generate(chunk)
        if now >= t_warm:
            counted += chunk
        if drbg.reseed_counter > drbg.config.reseed_interval - 2:
            drbg.reseed(os.urandom(48))
    queue.put(counted)


def _locked_os_worker(t_start, t_warm, t_end, chunk, queue, lock):
    counted = 0
    while time.monotonic() < t_start:
        pass
    while True:
        now = time.monotonic()
        if now >= t_end:
            break
        with lock:
            os.urandom(chunk)
        if now >= t_warm:
            counted += chunk
    queue.put(counted)


_BENCH_KINDS = ("drbg", "os-locked")


def bench_throughput(configs: list[tuple[str, int]], duration: float,
                     chunk_bytes: int = 65536) -> BenchReport:
    """Measure MB/s per configuration; the first 10% of the window is warm-up.

    Workers are separate processes sharing nothing but the result queue,
    except the os-locked kind, whose single lock is the whole point: it
    reproduces the one-pool-one-lock contention shape of the OS device.
    """
    if duration < 1.0:
        raise ValueError("benchmark duration must be >= 1 second")
    rows = []
    for kind, workers in configs:
        if workers < 1:
            raise ValueError("worker count must be >= 1")
        if kind not in _BENCH_KINDS:
            rows.append(BenchRow(kind, workers, 0, 0.0, [],
                                 error=str(SourceUnavailable(f"no benchmark backend {kind!r}"))))
            continue
        ctx = mp.get_context("fork")
        queue = ctx.Queue()
        lock = ctx.Lock()
        t_start = time.monotonic() + 0.15
        t_warm = t_start + duration * 0.1
        t_end = t_start + duration
        procs = []
        for _ in range(workers):
            if kind == "drbg":
                args = (t_start, t_warm, t_end, chunk_bytes, queue)
                target = _drbg_worker
            else:
                args = (t_start, t_warm, t_end, chunk_bytes, queue, lock)
                target = _locked_os_worker
            procs.append(ctx.Process(target=target, args=args))
        for p in procs:
            p.start()
        counts = [queue.get() for _ in procs]
        for p in procs:
            p.join()
        measured = duration * 0.9
        per_worker = [c / measured / 1e6 for c in counts]
        rows.append(BenchRow(kind, workers, sum(counts), measured, per_worker))
    return BenchReport(duration, rows)
