"""Tests for the command-line entry point."""

from unittest.mock import AsyncMock, patch

import pytest
from pydantic import ValidationError

from src.app.commands import build_parser
from src.app.commands.options import config_from_args
from src.app.core.exceptions.numeric_exceptions import NonConvergenceError
from src.app.core.exceptions.protocol_exceptions import ProtocolError
from src.app.main import EXIT_FAILURE, EXIT_NON_CONVERGENCE, main
from src.app.schemas.report import parse_report


def _report(path):
    return parse_report(path.read_text())


class TestParser:
    """Test argument parsing."""

    def test_sweeps_alias(self):
        """Test that --k and --sweeps set the same field."""
        parser = build_parser()
        assert parser.parse_args(["e2e", "--graph", "g.txt", "--k", "7"]).sweeps == 7
        assert parser.parse_args(["e2e", "--graph", "g.txt", "--sweeps", "9"]).sweeps == 9

    def test_ring_bits_flag(self):
        """Test that the eigen ring width is a run flag."""
        args = build_parser().parse_args(["e2e", "--graph", "g.txt", "--ring-bits", "64"])
        assert config_from_args(args).ring_bits == 64

    def test_unset_flags_are_none(self):
        """Test that omitted flags leave the field to file, environment or default."""
        args = build_parser().parse_args(["e2e", "--graph", "g.txt"])
        assert args.m is None
        assert args.compare_backend is None

    def test_invalid_choice(self):
        """Test that enum flags only accept known values."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["e2e", "--graph", "g.txt", "--qr-variant", "fast"])

    def test_command_required(self):
        """Test that a subcommand must be given."""
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestCommands:
    """Test each command through main."""

    def test_bench_qr(self, tmp_path):
        """Test the rotation traffic report."""
        out = tmp_path / "qr.jsonl"
        assert main(["bench-qr", "--m", "2,4", "--k", "1", "--omega", "3", "--out", str(out)]) == 0
        records = _report(out).of_kind("qr_bench")
        assert [(record.m, record.ring_bits) for record in records] == [(2, 64), (2, 128), (4, 64), (4, 128)]
        assert records[0].basic_elements == records[1].basic_elements
        assert 2 * records[0].basic_bytes == records[1].basic_bytes
        assert records[0].formula_saving == pytest.approx(1.0 / 3.0)
        assert all(record.saving == pytest.approx(record.formula_saving) for record in records)

    def test_bench_compare(self, tmp_path):
        """Test that the comparison benchmark reports both backends."""
        out = tmp_path / "cmp.jsonl"
        assert main(["bench-compare", "--count", "8", "--bits", "16", "--latency", "0,5", "--out", str(out)]) == 0
        records = _report(out).of_kind("compare_bench")
        assert {record.backend for record in records} == {"fss", "ass"}
        assert {record.latency_ms for record in records} == {0.0, 5.0}

    def test_storage(self, tmp_path):
        """Test one storage record per budget and bin count."""
        out = tmp_path / "storage.jsonl"
        argv = ["storage", "--graph", "synthetic:pa,200,2", "--bins", "1,4", "--epsilon", "0.5,1"]
        assert main([*argv, "--dense", "--d-max", "10", "--out", str(out)]) == 0
        records = _report(out).of_kind("storage")
        assert [(record.epsilon, record.bins) for record in records] == [(0.5, 1), (0.5, 4), (1.0, 1), (1.0, 4)]
        assert all(record.dense_bytes == 200 * 200 * 8 for record in records)

    def test_e2e(self, tmp_path):
        """Test a small end-to-end run and its report."""
        out = tmp_path / "e2e.jsonl"
        argv = ["e2e", "--graph", "synthetic:pa,30,2", "--m", "4", "--top-k", "1", "--omega", "15", "--k", "30"]
        code = main([*argv, "--bins", "2", "--sample-rate", "0.5", "--d-max", "6", "--seed", "1", "--out", str(out)])
        report = _report(out)
        assert code in (0, 2)
        assert report.passed
        assert [record.transcript.phase for record in report.of_kind("transcript")][0] == "histogram"
        eigen = report.of_kind("eigen")[0]
        assert eigen.converged is (code == 0)
        assert len(report.of_kind("accuracy")) == (1 if code == 0 else 0)

    def test_e2e_reports_are_reproducible(self, tmp_path):
        """Test that two runs with the same seed write identical reports."""
        argv = ["e2e", "--graph", "synthetic:pa,30,2", "--m", "4", "--top-k", "1", "--omega", "10", "--k", "10"]
        argv += ["--bins", "2", "--sample-rate", "0.5", "--d-max", "6", "--seed", "2"]
        first, second = tmp_path / "first.jsonl", tmp_path / "second.jsonl"
        assert main([*argv, "--out", str(first)]) == main([*argv, "--out", str(second)])
        assert first.read_text() == second.read_text()
        assert "compute_ms" not in first.read_text()

    def test_e2e_timings(self, tmp_path):
        """Test that measured wall time goes into separate timing records on request."""
        out = tmp_path / "timed.jsonl"
        argv = ["e2e", "--graph", "synthetic:pa,30,2", "--m", "4", "--top-k", "1", "--omega", "10", "--k", "10"]
        main([*argv, "--d-max", "6", "--seed", "2", "--timings", "--out", str(out)])
        report = _report(out)
        timings = report.of_kind("timing")
        phases = [record.transcript.phase for record in report.of_kind("transcript")]
        assert [record.phase for record in timings] == phases
        assert all(record.wall_ms >= record.compute_ms for record in timings)


class TestExitCodes:
    """Test failures mapped to exit codes."""

    def test_missing_graph_file(self, tmp_path):
        """Test that an unreadable edge list exits with the failure code."""
        assert main(["e2e", "--graph", str(tmp_path / "absent.txt")]) == EXIT_FAILURE

    def test_invalid_configuration(self):
        """Test that an inconsistent configuration exits with the failure code."""
        assert main(["e2e", "--graph", "synthetic:er,20,0.2", "--m", "3", "--top-k", "4"]) == EXIT_FAILURE

    def test_bad_report_line(self):
        """Test that unknown record kinds fail validation."""
        with pytest.raises(ValidationError):
            parse_report('{"record": "unknown"}\n')

    def test_protocol_failure(self):
        """Test that a protocol error raised mid-run exits with the failure code."""
        with patch("src.app.commands.e2e.run_protocol", new=AsyncMock(side_effect=ProtocolError("peer aborted"))):
            assert main(["e2e", "--graph", "synthetic:er,20,0.2"]) == EXIT_FAILURE

    def test_non_convergence_escaping_a_command(self):
        """Test that a non-convergence raised outside the report path maps to its own code."""
        with patch("src.app.commands.e2e.run_protocol", new=AsyncMock(side_effect=NonConvergenceError())) as run:
            assert main(["e2e", "--graph", "synthetic:er,20,0.2"]) == EXIT_NON_CONVERGENCE
            run.assert_awaited_once()
