import pytest

from dprand.bitgen import GeneratorHandle
from dprand.drbg import SEED_LEN
from dprand.errors import SampleTooSmall
from dprand.quality import (BenchReport, bench_throughput, run_stat_tests,
                            run_stat_tests_on_bytes)

MB = 1_000_000


def by_name(report):
    return {t.name: t for t in report.tests}


class TestStatTests:
    def test_all_zero_stream_fails_monobit(self):
        report = run_stat_tests_on_bytes(b"\x00" * MB)
        tests = by_name(report)
        assert not tests["monobit"].passed
        assert tests["monobit"].p_value < 1e-10

    def test_alternating_bytes_fail_runs(self):
        report = run_stat_tests_on_bytes(b"\x55" * MB)
        tests = by_name(report)
        assert not tests["runs"].passed
        assert tests["monobit"].passed  # perfectly balanced bits

    def test_drbg_stream_passes_all_three(self):
        g = GeneratorHandle.from_drbg_seed(b"\x10" * SEED_LEN)
        report = run_stat_tests(g, 2 * MB)
        assert report.all_passed, report.to_text()
        assert report.sample_bytes == 2 * MB

    def test_sample_too_small(self):
        with pytest.raises(SampleTooSmall):
            run_stat_tests_on_bytes(b"\x00" * (MB - 1))
        with pytest.raises(SampleTooSmall):
            run_stat_tests(GeneratorHandle.from_drbg_seed(bytes(SEED_LEN)), 1000)

    def test_report_serialization(self):
        report = run_stat_tests_on_bytes(b"\x55" * MB)
        doc = report.to_dict()
        assert doc["schema"] == "dprand.stats/1"
        assert {t["name"] for t in doc["tests"]} == {"monobit", "runs", "byte-chi2"}
        assert "FAIL" in report.to_text()

    def test_biased_bytes_fail_chi_square(self):
        data = (b"\x00" * 3 + b"\xFF") * (MB // 4)
        tests = by_name(run_stat_tests_on_bytes(data))
        assert not tests["byte-chi2"].passed


class TestBench:
    def test_duration_bounds(self):
        with pytest.raises(ValueError):
            bench_throughput([("drbg", 1)], 0)
        with pytest.raises(ValueError):
            bench_throughput([("drbg", 0)], 1.0)

    def test_unknown_kind_reported_not_fatal(self):
        report = bench_throughput([("rdrand", 1), ("drbg", 1)], 1.0)
        assert report.rows[0].error
        assert not report.rows[1].error
        assert report.rows[1].total_bytes > 0

    def test_single_worker_rows(self):
        report = bench_throughput([("drbg", 1), ("os-locked", 1)], 1.0)
        assert isinstance(report, BenchReport)
        for row in report.rows:
            assert row.total_bytes > 0
            assert len(row.per_worker_mb_s) == 1
            assert row.aggregate_mb_s == pytest.approx(sum(row.per_worker_mb_s))
            # byte accounting: counted bytes are whole chunks actually drawn
            assert row.total_bytes % 65536 == 0
        doc = report.to_dict()
        assert doc["schema"] == "dprand.bench/1"
        assert "aggregate MB/s" in report.to_text()
