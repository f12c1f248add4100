import json
import math

import numpy as np
import pytest

from compcap import Config
from compcap.capacity import CapacityEstimate
from compcap.operator import BetaEstimate, SingularSpectrum
from compcap.report import (
    CSV_COLUMNS,
    SCHEMA_VERSION,
    SUMMARY_COLUMNS,
    VerificationReport,
    emit_report,
    make_run_dir,
    spectrum_csv,
    summary_csv,
    write_new,
)


def make_report(beta: float = 0.5, cap: float = 1 / math.log(2), method: str = "closed_form") -> VerificationReport:
    report = VerificationReport("dilation", {"symbol": "dil(0.5)"})
    report.start()
    report.add_beta("hardy", BetaEstimate(beta=beta, window=(8, 34), slope_stderr=0.0, fit_r2=1.0, order=128))
    report.add_capacity(CapacityEstimate(cap, method))
    report.pair()
    report.complete()
    return report


def test_report_lifecycle():
    report = VerificationReport("dilation", {"symbol": "dil(0.5)"})
    assert report.status == "queued"
    report.start()
    assert report.status == "in_progress"
    report.complete()
    assert report.status == "completed"
    assert report.conclusion == "failure"
    assert report.meta["versions"]["compcap"]


def test_pairing_tolerances():
    assert make_report(beta=0.504).passed
    assert not make_report(beta=0.506).passed
    assert make_report(beta=0.509, method="equilibrium").passed
    assert make_report().pairings[0]["tolerance"] == 0.01


def test_polar_set_pairing():
    report = make_report(cap=0.0)
    assert report.pairings[0]["discrepancy"] is None
    assert not report.passed


def test_stage_records_failure():
    report = VerificationReport("broken", {"symbol": "dil(0.5)"})
    with report.stage("capacity:grid"):
        raise ArithmeticError("no nodes")
    assert report.errors[0]["stage"] == "capacity:grid"
    assert report.errors[0]["error"] == "ArithmeticError: no nodes"
    assert report.csv_rows() == [["dil(0.5)", "", "", "grid", "failed", "", "", False]]


def test_json_report():
    data = json.loads(emit_report(make_report(), "json"))
    assert data["schema_version"] == SCHEMA_VERSION
    assert data["pass"] is True
    assert data["conclusion"] == "success"
    assert data["betas"] == [
        {"weight": "hardy", "beta": 0.5, "window": [8, 34], "slope_stderr": 0.0, "fit_r2": 1.0, "N": 128}
    ]
    assert data["capacities"][0]["method"] == "closed_form"
    assert sorted(data["meta"]) == ["finished_at", "threads", "versions", "wall_time"]


def test_json_tags_non_finite_values():
    report = make_report()
    report.betas[0] = ("hardy", BetaEstimate(beta=math.inf, window=(8, 34), slope_stderr=math.nan, fit_r2=1.0))
    data = json.loads(emit_report(report, "json"))
    assert data["betas"][0]["beta"] == "failed"
    assert data["betas"][0]["slope_stderr"] == "failed"


def test_csv_report():
    lines = emit_report(make_report(), "csv").decode().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1].startswith("dil(0.5),hardy,0.5,closed_form,")
    assert lines[1].endswith(",True")


def test_text_report():
    text = emit_report(make_report(), "text").decode()
    assert text.startswith("dilation: dil(0.5) [PASS]")
    assert "beta[hardy] = 0.50000000" in text


def test_unknown_format():
    with pytest.raises(ValueError):
        emit_report(make_report(), "xml")


def test_summary_csv():
    assert summary_csv([]).decode() == ",".join(SUMMARY_COLUMNS) + "\n"
    lines = summary_csv([make_report(), make_report(beta=0.6)]).decode().splitlines()
    assert len(lines) == 3
    assert lines[1].startswith("dilation,dil(0.5),hardy,0.5,")
    assert lines[2].endswith(",False")


def test_run_dirs_are_never_reused(tmp_path):
    first = make_run_dir(tmp_path)
    second = make_run_dir(tmp_path)
    assert first != second
    assert first.is_dir() and second.is_dir()


def test_write_new_does_not_overwrite(tmp_path):
    path = tmp_path / "report.json"
    write_new(path, b"{}")
    with pytest.raises(FileExistsError):
        write_new(path, b"[]")
    assert path.read_bytes() == b"{}"


def test_spectrum_csv_is_gated():
    spectrum = SingularSpectrum(np.array([1.0, 0.5]))
    assert spectrum_csv(spectrum) is None
    Config.set_values({"artifacts": {"spectrum": True}})
    assert spectrum_csv(spectrum).splitlines()[0] == "n,a_n,log_a_n"
