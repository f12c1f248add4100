"""
End-to-end verification of beta(C_phi) = exp(-1/cap[phi(D)]).

Capacity methods are registered by name with ``add_method``; each takes the image set and
the experiment config.
"""

import inspect
import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Optional, Union

import joblib
import yaml

from compcap.capacity import (
    METHODS,
    CapacityError,
    CapacityEstimate,
    CompactSet,
    Curve,
    EuclidDisk,
    cap_closed_form,
    cap_dirichlet_grid,
    cap_equilibrium,
    grid_csv,
)
from compcap.config import Config, ConfigError, thread_count
from compcap.operator import compute_beta
from compcap.report import VerificationReport, emit_report, make_run_dir, spectrum_csv, summary_csv, write_new
from compcap.symbols import Symbol, SymbolError
from compcap.weights import WeightError, WeightSpec, coef_weights

logger = logging.getLogger(__name__)

CONFIG_KEYS = ("name", "symbol", "weights", "N", "cap_method", "M", "h", "tol", "univalent")

CapacityMethod = Callable[[CompactSet, "ExperimentConfig"], CapacityEstimate]


class SignatureError(Exception):
    """Exception when the method has a wrong signature"""

    def __init__(self, method: Callable[..., Any], signature: str) -> None:
        """
        Args:
            method (Callable): The method to be validated.
            signature (str): The signature of the method.
        """
        self.message = (
            f"Method {method.__qualname__}({signature}) signature error. "
            f"The method must accept a compact set and an experiment config"
        )
        super().__init__(self.message)


capacity_methods: dict[str, CapacityMethod] = {}


def add_method(name: str) -> Callable[[CapacityMethod], CapacityMethod]:
    """Decorator to register a function as a capacity method.

    Args:
      name (str): The method name used in experiment configs.

    Returns:
      Callable: A decorator that validates the method signature.
    """

    def decorator(method: CapacityMethod) -> CapacityMethod:
        _validate_signature(method)
        capacity_methods[name] = method
        return method

    return decorator


def _validate_signature(method: Callable[..., Any]) -> None:
    """Validate the signature of a capacity method.

    Raises:
        SignatureError: If the method does not take exactly two arguments.
    """
    parameters = inspect.signature(method).parameters
    if len(parameters) != 2:
        signature = ", ".join(parameters.keys())
        raise SignatureError(method, signature)


@add_method("closed_form")
def _closed_form(compact_set: CompactSet, cfg: "ExperimentConfig") -> CapacityEstimate:
    return cap_closed_form(compact_set)


@add_method("equilibrium")
def _equilibrium(compact_set: CompactSet, cfg: "ExperimentConfig") -> CapacityEstimate:
    return cap_equilibrium(compact_set, cfg.M)


@add_method("grid")
def _grid(compact_set: CompactSet, cfg: "ExperimentConfig") -> CapacityEstimate:
    return cap_dirichlet_grid(compact_set, cfg.h)


def _as_tuple(value: Union[str, list, tuple]) -> tuple[str, ...]:
    if isinstance(value, str):
        return tuple(part.strip() for part in value.split(",") if part.strip())
    return tuple(str(part).strip() for part in value)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment of a suite

    Attributes:
      - symbol: the text form, e.g. ``auto(0.5)*dil(0.5)``
      - weights: the weight specs, e.g. ``hardy`` or ``alpha(1)``
      - N: the starting truncation order, doubled until the truncation is certified
      - cap_method: capacity methods among closed_form, equilibrium, grid
      - M: panel count of the equilibrium method
      - h: grid spacing of the grid method
      - tol: relative tolerance of every pairing, defaulting per method
      - univalent: overrides the univalence default of the symbol
    """

    symbol: str
    name: str = ""
    weights: tuple[str, ...] = ("hardy",)
    N: int = 128
    cap_method: tuple[str, ...] = ("closed_form",)
    M: int = 512
    h: float = 1 / 256
    tol: Optional[float] = None
    univalent: Optional[bool] = None
    auto_grow: bool = field(default=True, compare=False)

    @classmethod
    def from_mapping(cls, data: dict[str, Any], defaults: Optional[dict[str, Any]] = None) -> "ExperimentConfig":
        """
        Build a config from a flat mapping, validating every key.

        Raises:
            ConfigError: Naming the offending key
        """
        if not isinstance(data, dict):
            raise ConfigError(f"An experiment must be a mapping, got {data!r}")
        merged = {**(defaults or {}), **data}
        for key in merged:
            if key not in CONFIG_KEYS:
                raise ConfigError(f"Unknown experiment key {key!r}, expected one of {CONFIG_KEYS}")
        if "symbol" not in merged:
            raise ConfigError("Missing experiment key 'symbol'")
        try:
            cfg = cls(
                symbol=str(merged["symbol"]),
                name=str(merged.get("name") or merged["symbol"]),
                weights=_as_tuple(merged.get("weights", ("hardy",))),
                N=int(merged.get("N", 128)),
                cap_method=_as_tuple(merged.get("cap_method", ("closed_form",))),
                M=int(merged.get("M", 512)),
                h=float(Fraction(str(merged.get("h", "1/256")))),
                tol=None if merged.get("tol") is None else float(merged["tol"]),
                univalent=merged.get("univalent"),
            )
        except (TypeError, ValueError, ZeroDivisionError) as err:
            raise ConfigError(f"Invalid value in experiment {merged.get('name', merged['symbol'])!r}: {err}") from err
        cfg.validate()
        return cfg

    def validate(self) -> None:
        """
        Raises:
            ConfigError: If a key has an invalid value
        """
        if not self.weights:
            raise ConfigError("Key 'weights' needs at least one weight")
        if not self.cap_method:
            raise ConfigError("Key 'cap_method' needs at least one capacity method")
        for method in self.cap_method:
            if method not in capacity_methods:
                raise ConfigError(f"Key 'cap_method': unknown method {method!r}, expected one of {METHODS}")
        for weight in self.weights:
            try:
                WeightSpec.parse(weight)
            except WeightError as err:
                raise ConfigError(f"Key 'weights': {err}") from err
        try:
            phi = self.parse_symbol()
        except SymbolError as err:
            raise ConfigError(f"Key 'symbol': {err}") from err
        if phi.sup_norm >= 1:
            raise ConfigError(f"Key 'symbol': {phi} has sup norm {phi.sup_norm:.12g} >= 1")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError(f"Key 'tol' must be positive, got {self.tol}")

    def parse_symbol(self) -> Symbol:
        return Symbol.parse(self.symbol, declared_univalent=self.univalent)

    def echo(self) -> dict[str, Any]:
        data = asdict(self)
        data.pop("auto_grow")
        data["weights"] = list(self.weights)
        data["cap_method"] = list(self.cap_method)
        return data


def image_set(phi: Symbol) -> CompactSet:
    """The closure of phi(D): a disk for fractional-linear symbols, a sampled curve otherwise

    Raises:
        CapacityError: If phi is not declared univalent
    """
    if not phi.declared_univalent:
        raise CapacityError(f"{phi} is not declared univalent: the capacity of phi(D) is not computed")
    if phi.is_fractional_linear:
        return EuclidDisk.image_of(phi)
    return Curve.from_symbol(phi)


def run_verification(cfg: ExperimentConfig) -> VerificationReport:
    """
    Run one experiment: beta per weight, capacity of the image per method, then the pairings.

    Failing stages are recorded in the report, never raised.
    """
    report = VerificationReport(cfg.name, cfg.echo())
    report.start()
    phi = cfg.parse_symbol()
    for weight in cfg.weights:
        with report.stage(f"beta:{weight}"):
            weights = coef_weights(WeightSpec.parse(weight), cfg.N)
            estimate, spectrum = compute_beta(phi, weights, cfg.N, auto_grow=cfg.auto_grow)
            report.add_beta(weight, estimate, spectrum)
            logger.info("%s: beta[%s] = %.8f at N=%d", cfg.name, weight, estimate.beta, estimate.order)
    compact_set = None
    with report.stage("image"):
        compact_set = image_set(phi)
    if compact_set is not None:
        for method in cfg.cap_method:
            with report.stage(f"capacity:{method}"):
                estimate = capacity_methods[method](compact_set, cfg)
                report.add_capacity(estimate)
                logger.info("%s: cap[%s] = %.8f", cfg.name, method, estimate.value)
    report.pair(cfg.tol)
    report.complete()
    return report


def load_suite(path: Union[str, Path]) -> list[ExperimentConfig]:
    """
    Read a suite file: a list of experiments, or a mapping with ``experiments`` and optional
    ``defaults`` and ``settings``.

    Raises:
        ConfigError: If the file is malformed
    """
    try:
        raw = Config.load_config_from_file(path)
    except (OSError, ValueError, yaml.YAMLError) as err:
        raise ConfigError(f"Cannot read suite {path}: {err}") from err
    if raw is None or raw == {}:
        return []
    if isinstance(raw, list):
        entries, defaults = raw, {}
    elif isinstance(raw, dict):
        for key in raw:
            if key not in ("experiments", "defaults", "settings"):
                raise ConfigError(f"Unknown suite key {key!r}")
        entries, defaults = raw.get("experiments") or [], raw.get("defaults") or {}
    else:
        raise ConfigError(f"A suite must be a list or a mapping, got {type(raw).__name__}")
    if not isinstance(entries, list):
        raise ConfigError("Key 'experiments' must be a list")
    return [ExperimentConfig.from_mapping(entry, defaults) for entry in entries]


def run_suite(
    path: Union[str, Path], out_dir: Optional[Union[str, Path]] = None, fmt: str = "json"
) -> list[VerificationReport]:
    """
    Run every experiment of a suite, in parallel over COMPCAP_THREADS worker threads.

    With ``out_dir`` one report per experiment and a summary table are written to a new
    timestamped directory under it. The ``settings:`` of the suite only apply during the run.
    """
    with Config.scoped():
        configs = load_suite(path)
        reports = joblib.Parallel(n_jobs=thread_count(), prefer="threads")(
            joblib.delayed(run_verification)(cfg) for cfg in configs
        )
        if out_dir is not None:
            write_reports(reports, Path(out_dir), fmt)
    return list(reports)


def write_reports(reports: list[VerificationReport], out_dir: Path, fmt: str = "json") -> Path:
    """Write the reports, the summary and the enabled artifacts; returns the run directory"""
    run_dir = make_run_dir(out_dir)
    for index, report in enumerate(reports, start=1):
        stem = f"{index:03d}-{_slug(report.name)}"
        write_new(run_dir / f"{stem}.{fmt}", emit_report(report, fmt))
        for weight, spectrum in report.spectra.items():
            if (data := spectrum_csv(spectrum)) is not None:
                write_new(run_dir / f"{stem}-spectrum-{_slug(weight)}.csv", data.encode())
        for estimate in report.capacities:
            if estimate.method == "grid" and (data := grid_csv(estimate.solution)) is not None:
                write_new(run_dir / f"{stem}-grid.csv", data.encode())
    write_new(run_dir / "summary.csv", summary_csv(reports))
    logger.info("Wrote %d reports to %s", len(reports), run_dir)
    return run_dir


def _slug(text: str) -> str:
    return "".join(char if char.isalnum() or char in ".-" else "_" for char in text)
