import json
from unittest.mock import patch

import pytest

from compcap import Config
from compcap.config import ConfigError
from compcap.harness import (
    ExperimentConfig,
    SignatureError,
    add_method,
    capacity_methods,
    image_set,
    load_suite,
    run_suite,
    run_verification,
)
from compcap.operator import BetaWindowError
from compcap.report import SUMMARY_COLUMNS, emit_report
from compcap.symbols import Symbol

THREE_DILATIONS = """
experiments:
  - symbol: dil(0.3)
  - symbol: dil(0.5)
  - symbol: dil(0.7)
"""


@pytest.fixture
def restore_methods():
    """setup and teardown for the capacity method registry"""
    methods = dict(capacity_methods)
    yield
    capacity_methods.clear()
    capacity_methods.update(methods)


def test_dilation():
    report = run_verification(ExperimentConfig.from_mapping({"symbol": "dil(0.5)"}))
    assert report.passed
    assert report.conclusion == "success"
    [pairing] = report.pairings
    assert pairing["beta"] == pytest.approx(0.5, rel=1e-10)
    assert pairing["m_value"] == pytest.approx(0.5, rel=1e-12)
    assert pairing["discrepancy"] < 1e-3


def test_affine():
    report = run_verification(ExperimentConfig.from_mapping({"symbol": "affine(0.3,0.4)"}))
    assert report.passed
    assert report.pairings[0]["beta"] == pytest.approx(0.365728, abs=1e-5)


def test_automorphism_after_dilation_with_equilibrium():
    cfg = ExperimentConfig.from_mapping(
        {"symbol": "auto(0.5)*dil(0.5)", "weights": "alpha(1)", "cap_method": ["closed_form", "equilibrium"]}
    )
    report = run_verification(cfg)
    assert report.passed, report.errors
    assert [pairing["cap_method"] for pairing in report.pairings] == ["closed_form", "equilibrium"]
    assert all(pairing["m_value"] == pytest.approx(0.5, rel=0.02) for pairing in report.pairings)


def test_failing_stage_is_recorded():
    with patch("compcap.harness.compute_beta", side_effect=BetaWindowError("window too small")):
        report = run_verification(ExperimentConfig.from_mapping({"symbol": "dil(0.5)"}))
    assert not report.passed
    assert report.conclusion == "failure"
    assert report.errors[0]["stage"] == "beta:hardy"
    assert report.errors[0]["error"] == "BetaWindowError: window too small"
    assert "Traceback" in report.errors[0]["traceback"]
    assert report.capacities
    assert "dil(0.5),hardy,failed" in emit_report(report, "csv").decode()


def test_non_univalent_symbol_skips_capacity():
    report = run_verification(ExperimentConfig.from_mapping({"symbol": "poly(0,0.5,0.1)"}))
    assert [error["stage"] for error in report.errors] == ["image"]
    assert report.betas
    assert not report.capacities
    assert not report.passed


def test_image_set():
    assert repr(image_set(Symbol.parse("affine(0.3,0.4)"))) == "disk(0.4,0.3)"
    curve = image_set(Symbol.parse("poly(0,0.5,0.1)", declared_univalent=True))
    assert curve.max_modulus() == pytest.approx(0.6, abs=1e-6)


def test_tolerance_override(shift_beta):
    shift_beta(1.001)
    report = run_verification(ExperimentConfig.from_mapping({"symbol": "affine(0.3,0.4)"}))
    assert report.passed is True
    assert report.pairings[0]["discrepancy"] == pytest.approx(1e-3, rel=1e-3)
    report = run_verification(ExperimentConfig.from_mapping({"symbol": "affine(0.3,0.4)", "tol": 1e-4}))
    assert report.pairings[0]["tolerance"] == 1e-4
    assert report.passed is False
    assert report.conclusion == "failure"


def test_mismatched_beta_fails(shift_beta):
    compute = shift_beta(1.05)
    report = run_verification(ExperimentConfig.from_mapping({"symbol": "dil(0.5)"}))
    assert compute.call_count == 1
    assert report.passed is False
    assert report.pairings[0]["pass"] is False
    assert not report.errors


def test_unknown_key():
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_mapping({"symbol": "dil(0.5)", "Nmax": 64})
    assert str(err.value) == (
        "Unknown experiment key 'Nmax', expected one of "
        "('name', 'symbol', 'weights', 'N', 'cap_method', 'M', 'h', 'tol', 'univalent')"
    )


def test_missing_symbol():
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_mapping({"weights": "hardy"})
    assert str(err.value) == "Missing experiment key 'symbol'"


def test_invalid_values():
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_mapping({"symbol": "dil(0.5)", "cap_method": "guess"})
    assert str(err.value).startswith("Key 'cap_method': unknown method 'guess'")
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_mapping({"symbol": "dil(0.5)", "weights": "sobolev"})
    assert str(err.value) == "Key 'weights': Cannot parse weight spec 'sobolev'"
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_mapping({"symbol": "affine(0.8,0.5)"})
    assert str(err.value).startswith("Key 'symbol':")
    with pytest.raises(ConfigError) as err:
        ExperimentConfig.from_mapping({"symbol": "dil(0.5)", "tol": -1})
    assert str(err.value) == "Key 'tol' must be positive, got -1.0"
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping({"symbol": "dil(0.5)", "N": "many"})


def test_config_values():
    cfg = ExperimentConfig.from_mapping(
        {"symbol": "dil(0.5)", "weights": "hardy, alpha(1)", "h": "1/512", "M": 64}, defaults={"N": 64}
    )
    assert cfg.weights == ("hardy", "alpha(1)")
    assert cfg.h == 1 / 512
    assert cfg.N == 64
    assert cfg.M == 64
    assert cfg.name == "dil(0.5)"
    assert cfg.echo()["weights"] == ["hardy", "alpha(1)"]


def test_add_method(restore_methods):
    @add_method("constant")
    def constant(compact_set, cfg):
        return capacity_methods["closed_form"](compact_set, cfg)

    assert capacity_methods["constant"] is constant


def test_add_method_signature(restore_methods):
    def no_config(compact_set):
        pass

    with pytest.raises(SignatureError) as err:
        add_method("broken")(no_config)
    assert str(err.value) == (
        "Method test_add_method_signature.<locals>.no_config(compact_set) signature error. "
        "The method must accept a compact set and an experiment config"
    )
    assert "broken" not in capacity_methods


def test_empty_suite(suite_file):
    assert run_suite(suite_file("")) == []
    assert run_suite(suite_file("experiments: []")) == []


def test_three_dilations(suite_file, tmp_path):
    reports = run_suite(suite_file(THREE_DILATIONS), out_dir=tmp_path / "out")
    assert [report.pairings[0]["beta"] for report in reports] == [
        pytest.approx(0.3, rel=1e-10),
        pytest.approx(0.5, rel=1e-10),
        pytest.approx(0.7, rel=1e-10),
    ]
    [run_dir] = (tmp_path / "out").iterdir()
    assert sorted(path.name for path in run_dir.iterdir()) == [
        "001-dil_0.3_.json",
        "002-dil_0.5_.json",
        "003-dil_0.7_.json",
        "summary.csv",
    ]
    summary = (run_dir / "summary.csv").read_text().splitlines()
    assert summary[0] == ",".join(SUMMARY_COLUMNS)
    assert len(summary) == 4
    assert json.loads((run_dir / "001-dil_0.3_.json").read_text())["pass"] is True


def test_suite_with_spectrum_artifacts(suite_file, tmp_path):
    path = suite_file("settings:\n  artifacts:\n    spectrum: true\nexperiments:\n  - symbol: dil(0.5)\n")
    run_suite(path, out_dir=tmp_path)
    [run_dir] = tmp_path.glob("run-*")
    assert (run_dir / "001-dil_0.5_-spectrum-hardy.csv").exists()
    assert Config.artifacts.spectrum is False


def test_suite_settings_do_not_leak(suite_file, tmp_path):
    run_suite(suite_file("settings:\n  artifacts:\n    grid: true\n  label: first\nexperiments: []\n"))
    assert Config.artifacts.grid is False
    assert Config.get("label") is None
    run_suite(suite_file("experiments:\n  - symbol: dil(0.5)\n"), out_dir=tmp_path)
    [run_dir] = tmp_path.glob("run-*")
    assert sorted(path.name for path in run_dir.iterdir()) == ["001-dil_0.5_.json", "summary.csv"]


def test_settings_must_be_a_mapping(suite_file):
    with pytest.raises(ConfigError) as err:
        load_suite(suite_file("settings: verbose\nexperiments: []\n"))
    assert str(err.value) == "Key 'settings' must be a mapping, got 'verbose'"


def test_suite_defaults(suite_file):
    [cfg] = load_suite(suite_file("defaults:\n  weights: alpha(2)\nexperiments:\n  - symbol: dil(0.5)\n"))
    assert cfg.weights == ("alpha(2)",)


def test_suite_as_list(suite_file):
    configs = load_suite(suite_file("- symbol: dil(0.5)\n- symbol: dil(0.6)\n  name: second\n"))
    assert [cfg.name for cfg in configs] == ["dil(0.5)", "second"]


def test_malformed_suites(suite_file):
    with pytest.raises(ConfigError):
        load_suite(suite_file("experiments: [unclosed"))
    with pytest.raises(ConfigError) as err:
        load_suite(suite_file("experiment:\n  - symbol: dil(0.5)\n"))
    assert str(err.value) == "Unknown suite key 'experiment'"
    with pytest.raises(ConfigError) as err:
        load_suite(suite_file("experiments: dil(0.5)\n"))
    assert str(err.value) == "Key 'experiments' must be a list"
    with pytest.raises(ConfigError) as err:
        load_suite(suite_file("experiments:\n  - dil(0.5)\n"))
    assert str(err.value) == "An experiment must be a mapping, got 'dil(0.5)'"


def test_missing_suite(tmp_path):
    with pytest.raises(ConfigError):
        load_suite(tmp_path / "missing.yml")


def test_reports_are_deterministic(suite_file):
    path = suite_file(THREE_DILATIONS)
    first, second = (
        [json.loads(emit_report(report)) for report in run_suite(path)] for _ in range(2)
    )
    for report in first + second:
        report.pop("meta")
    assert first == second


def test_parallel_suite(suite_file):
    with patch.dict("os.environ", {"COMPCAP_THREADS": "3"}):
        reports = run_suite(suite_file(THREE_DILATIONS))
    assert [report.name for report in reports] == ["dil(0.3)", "dil(0.5)", "dil(0.7)"]
    assert all(report.meta["threads"] == 3 for report in reports)
