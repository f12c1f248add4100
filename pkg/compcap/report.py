import csv
import io
import json
import logging
import math
import time
import traceback
from contextlib import contextmanager
from datetime import datetime
from importlib.metadata import PackageNotFoundError
from importlib.metadata import version as get_version
from pathlib import Path
from typing import Any, Iterator, Optional

from compcap import __version__
from compcap.capacity import CapacityEstimate
from compcap.config import Config, thread_count
from compcap.operator import BetaEstimate, SingularSpectrum

SCHEMA_VERSION = 1
FORMATS = ("json", "csv", "text")
CSV_COLUMNS = ["symbol", "weight", "beta", "cap_method", "cap", "m_value", "discrepancy", "pass"]
SUMMARY_COLUMNS = ["name"] + CSV_COLUMNS
VERSIONS_TO_SHOW = ["numpy", "scipy", "mpmath", "joblib"]

logger = logging.getLogger(__name__)


def _finite(value: Optional[float]) -> Optional[float]:
    return value if value is not None and math.isfinite(value) else None


class VerificationReport:
    """
    VerificationReport

    This class collects the results of one experiment: a beta estimate per weight, a capacity
    estimate per method, and the pairing of each beta with each exp(-1/cap). It is
    started, updated while stages run, and completed with a conclusion.

    Attributes:
      - name: The experiment name
      - config: The experiment settings, echoed in the report
      - status: queued, in_progress or completed
      - conclusion: success or failure, once completed
      - betas: (weight, BetaEstimate) pairs
      - capacities: CapacityEstimate list
      - errors: failed stages with their tracebacks

    Methods:
      - start: Marks the experiment as running
      - stage: Context manager that records a failing stage instead of raising
      - update: Updates the status, or completes the report with a conclusion
    """

    def __init__(self, name: str, config: dict[str, Any]):
        self.name = name
        self.config = config
        self.status = "queued"
        self.conclusion: Optional[str] = None
        self.betas: list[tuple[str, BetaEstimate]] = []
        self.spectra: dict[str, SingularSpectrum] = {}
        self.capacities: list[CapacityEstimate] = []
        self.pairings: list[dict[str, Any]] = []
        self.errors: list[dict[str, str]] = []
        self.meta: dict[str, Any] = {}
        self._started: Optional[float] = None

    def start(self) -> None:
        """Start the experiment"""
        self._started = time.perf_counter()
        self.update(status="in_progress")

    @contextmanager
    def stage(self, stage: str) -> Iterator[None]:
        """Run a stage, recording its failure with the traceback"""
        try:
            yield
        except Exception as err:
            logger.warning("Stage %s of %s failed: %s", stage, self.name, err)
            self.errors.append(
                {"stage": stage, "error": f"{type(err).__name__}: {err}", "traceback": traceback.format_exc()}
            )

    def update(self, status: Optional[str] = None, conclusion: Optional[str] = None) -> None:
        """Updates the report"""
        if status is not None:
            self.status = status
        if conclusion is not None:
            self.conclusion = conclusion
            self.status = "completed"
            self.meta = _runtime_metadata(self._started)

    def add_beta(self, weight: str, estimate: BetaEstimate, spectrum: Optional[SingularSpectrum] = None) -> None:
        self.betas.append((weight, estimate))
        if spectrum is not None:
            self.spectra[weight] = spectrum

    def add_capacity(self, estimate: CapacityEstimate) -> None:
        self.capacities.append(estimate)

    def pair(self, tolerance: Optional[float] = None) -> None:
        """Compare every beta with every exp(-1/cap)

        The default tolerance is 1% against a closed form and 2% otherwise.
        """
        self.pairings = []
        for weight, beta in self.betas:
            for capacity in self.capacities:
                tol = tolerance if tolerance is not None else 0.01 if capacity.method == "closed_form" else 0.02
                m_value = capacity.m_value
                discrepancy = abs(beta.beta - m_value) / m_value if m_value > 0 else None
                self.pairings.append(
                    {
                        "weight": weight,
                        "beta": beta.beta,
                        "cap_method": capacity.method,
                        "cap": capacity.value,
                        "m_value": m_value,
                        "discrepancy": _finite(discrepancy),
                        "tolerance": tol,
                        "pass": discrepancy is not None and math.isfinite(discrepancy) and discrepancy <= tol,
                    }
                )

    @property
    def passed(self) -> bool:
        """Every stage ran and every pairing is within its tolerance"""
        return not self.errors and bool(self.pairings) and all(pairing["pass"] for pairing in self.pairings)

    def complete(self) -> None:
        self.update(conclusion="success" if self.passed else "failure")

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "config": self.config,
            "status": self.status,
            "conclusion": self.conclusion,
            "pass": self.passed,
            "betas": [{"weight": weight, **estimate.to_dict()} for weight, estimate in self.betas],
            "capacities": [estimate.to_dict() for estimate in self.capacities],
            "pairings": self.pairings,
            "errors": self.errors,
            "meta": self.meta,
        }

    def csv_rows(self) -> list[list[Any]]:
        """One row per pairing, then one row per failed stage with ``failed`` in place of its value"""
        symbol = self.config.get("symbol", "")
        rows: list[list[Any]] = [
            [
                symbol,
                pairing["weight"],
                pairing["beta"],
                pairing["cap_method"],
                pairing["cap"],
                pairing["m_value"],
                "" if pairing["discrepancy"] is None else pairing["discrepancy"],
                pairing["pass"],
            ]
            for pairing in self.pairings
        ]
        for error in self.errors:
            kind, _, target = error["stage"].partition(":")
            if kind == "beta":
                rows.append([symbol, target, "failed", "", "", "", "", False])
            elif kind == "capacity":
                rows.append([symbol, "", "", target, "failed", "", "", False])
            else:
                rows.append([symbol, "", "", "", "", "", "", False])
        return rows


def _runtime_metadata(started: Optional[float]) -> dict[str, Any]:
    versions = {"compcap": __version__}
    for lib in VERSIONS_TO_SHOW:
        try:
            versions[lib] = get_version(lib)
        except PackageNotFoundError:
            versions[lib] = None
    return {
        "versions": versions,
        "wall_time": None if started is None else time.perf_counter() - started,
        "threads": thread_count(),
        "finished_at": datetime.now().isoformat(timespec="seconds"),
    }


def emit_report(report: VerificationReport, fmt: str = "json") -> bytes:
    """
    Serialize a report.

    Args:
        report (VerificationReport): The report, complete or partial
        fmt (str): json, csv or text

    Returns:
        bytes: The UTF-8 encoded report
    """
    if fmt == "json":
        return (json.dumps(_tag_non_finite(report.to_dict()), indent=2, allow_nan=False) + "\n").encode()
    if fmt == "csv":
        return _csv([CSV_COLUMNS] + report.csv_rows()).encode()
    if fmt == "text":
        return _text(report).encode()
    raise ValueError(f"Unknown report format {fmt!r}, expected one of {FORMATS}")


def _tag_non_finite(value: Any) -> Any:
    """Replace non-finite floats by the tag \"failed\""""
    if isinstance(value, float) and not math.isfinite(value):
        return "failed"
    if isinstance(value, dict):
        return {key: _tag_non_finite(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_tag_non_finite(item) for item in value]
    return value


def summary_csv(reports: list[VerificationReport]) -> bytes:
    """One row per pairing of every report, under a fixed header"""
    rows = [SUMMARY_COLUMNS]
    for report in reports:
        rows.extend([report.name] + row for row in report.csv_rows())
    return _csv(rows).encode()


def _csv(rows: list[list[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(rows)
    return buffer.getvalue()


def _text(report: VerificationReport) -> str:
    lines = [f"{report.name}: {report.config.get('symbol', '')} [{'PASS' if report.passed else 'FAIL'}]"]
    for weight, estimate in report.betas:
        lines.append(
            f"  beta[{weight}] = {estimate.beta:.8f} (N={estimate.order}, window {estimate.window[0]}..{estimate.window[1]},"
            f" R^2={estimate.fit_r2:.6f})"
        )
    for estimate in report.capacities:
        lines.append(
            f"  cap[{estimate.method}] = {estimate.value:.8f}, exp(-1/cap) = {estimate.m_value:.8f}"
            f" (error indicator {estimate.error_indicator:.3g})"
        )
    for pairing in report.pairings:
        discrepancy = "n/a" if pairing["discrepancy"] is None else f"{pairing['discrepancy']:.3e}"
        lines.append(
            f"  {pairing['weight']} vs {pairing['cap_method']}: discrepancy {discrepancy}"
            f" (tol {pairing['tolerance']:g}) {'ok' if pairing['pass'] else 'FAILED'}"
        )
    for error in report.errors:
        lines.append(f"  {error['stage']} failed: {error['error']}")
    return "\n".join(lines) + "\n"


def make_run_dir(base: Path) -> Path:
    """Create a new timestamped directory under base; never reuses an existing one"""
    stamp = datetime.now().strftime("%Y%m%d-%H%M%S")
    for attempt in range(1000):
        run_dir = Path(base) / (f"run-{stamp}" if attempt == 0 else f"run-{stamp}-{attempt}")
        try:
            run_dir.mkdir(parents=True, exist_ok=False)
            return run_dir
        except FileExistsError:
            continue
    raise FileExistsError(f"Could not create a fresh run directory under {base}")


def write_new(path: Path, data: bytes) -> None:
    """Write a file that must not exist yet"""
    with open(path, "xb") as output:
        output.write(data)


@Config.call_if("artifacts.spectrum")
def spectrum_csv(spectrum: SingularSpectrum) -> str:
    return spectrum.to_csv()
