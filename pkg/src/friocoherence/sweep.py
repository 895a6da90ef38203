"""Grid sweeps, random sampling, and deterministic CSV emission.

One flat row schema serves every figure-style dataset: family rows first
(ordered by family index, then grid position, then xi), then random rows
(ordered by draw index, then xi). All floats are written with 12 significant
digits, so identical configurations produce byte-identical files.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .analysis import CoherenceReport, build_report
from .ensemble import EnsembleSpec, coefficient_family, iter_random_specs

CSV_COLUMNS = (
    "source",
    "N",
    "n",
    "coeffs",
    "a_min",
    "mu",
    "xi",
    "D",
    "P",
    "Q",
    "S_rho",
    "S_rhoS",
    "S_rhoF",
    "C_sep",
    "C_ancilla",
    "discord",
    "C_me",
    "C_meS",
    "C_meF",
    "C_frio",
    "C_conc",
    "C_extra",
)

_CONFIG_KEYS = (
    "N",
    "n",
    "xi",
    "a0",
    "amin_points",
    "random_count",
    "seed",
    "columns",
    "out",
    "with_discord",
)

__all__ = [
    "CSV_COLUMNS",
    "SweepConfig",
    "format_rows",
    "load_config_file",
    "report_row",
    "run_sample",
    "run_sweep",
    "write_csv",
]


@dataclass(frozen=True)
class SweepConfig:
    """Everything a sweep needs; validated on construction.

    Families follow the three-coefficient parameterization: each a0 value
    gets an a_min grid of ``amin_points`` evenly spaced values on [0, a0]
    (a single point when a0 = 0).
    """

    num_states: int = 3
    support_dim: int = 3
    xi_values: tuple[float, ...] = (0.5,)
    family_a0: tuple[float, ...] = ()
    amin_points: int = 51
    random_count: int = 0
    seed: int = 0
    columns: tuple[str, ...] = CSV_COLUMNS
    with_discord: bool = False
    output_path: str | None = None

    def __post_init__(self):
        if self.num_states < 2:
            raise ValueError("need at least two states")
        if not 1 <= self.support_dim <= self.num_states:
            raise ValueError("support dimension must lie in [1, N]")
        if not self.xi_values:
            raise ValueError("need at least one xi value")
        for xi in self.xi_values:
            if not 0.0 <= xi <= 1.0:
                raise ValueError(f"xi value {xi!r} outside [0, 1]")
        for a0 in self.family_a0:
            if not 0.0 <= a0 <= 1.0:
                raise ValueError(f"family a0 value {a0!r} outside [0, 1]")
        if self.family_a0 and self.amin_points < 1:
            raise ValueError("amin_points must be at least 1")
        if self.random_count < 0:
            raise ValueError("random_count must be nonnegative")
        unknown = set(self.columns) - set(CSV_COLUMNS)
        if unknown:
            raise ValueError(f"unknown output columns: {sorted(unknown)}")
        # canonical column order regardless of how the subset was given
        object.__setattr__(
            self,
            "columns",
            tuple(c for c in CSV_COLUMNS if c in set(self.columns)),
        )


def report_row(source: str, report: CoherenceReport) -> dict:
    """Flatten a report into the CSV row mapping (raw values, not text)."""
    return {
        "source": source,
        "N": report.num_states,
        "n": report.support_dim,
        "coeffs": report.coefficients,
        "a_min": report.a_min,
        "mu": report.multiplicity,
        "xi": report.xi,
        "D": report.distinguishability,
        "P": report.p_success,
        "Q": report.p_failure,
        "S_rho": report.entropy_input,
        "S_rhoS": report.entropy_success,
        "S_rhoF": report.entropy_failure,
        "C_sep": report.coherence_separation,
        "C_ancilla": report.coherence_ancilla,
        "discord": report.discord,
        "C_me": report.coherence_me,
        "C_meS": report.coherence_me_success,
        "C_meF": report.coherence_me_failure,
        "C_frio": report.coherence_frio,
        "C_conc": report.coherence_concatenated,
        "C_extra": report.coherence_extra,
    }


def family_amin_grid(a0: float, points: int) -> np.ndarray:
    if a0 == 0.0:
        return np.array([0.0])
    return np.linspace(0.0, a0, points)


def run_sweep(config: SweepConfig) -> list[dict]:
    """Evaluate every configured (ensemble, xi) point, in config order."""
    rows: list[dict] = []
    for family_index, a0 in enumerate(config.family_a0):
        for a_min in family_amin_grid(a0, config.amin_points):
            spec = coefficient_family(a0, float(a_min), config.num_states)
            for xi in config.xi_values:
                report = build_report(spec, xi, with_discord=config.with_discord)
                rows.append(report_row(f"family{family_index}", report))
    for spec in iter_random_specs(
        config.num_states, config.support_dim, config.random_count, config.seed
    ):
        for xi in config.xi_values:
            report = build_report(spec, xi, with_discord=config.with_discord)
            rows.append(report_row("random", report))
    return rows


def run_sample(
    num_states: int,
    support_dim: int,
    count: int,
    seed: int,
    xi_values: Iterable[float] = (0.5,),
    with_discord: bool = False,
) -> list[dict]:
    """Random ensembles only; rows ordered by draw index, then xi."""
    if count < 1:
        raise ValueError("sample count must be at least 1")
    xi_values = tuple(xi_values)
    rows: list[dict] = []
    for spec in iter_random_specs(num_states, support_dim, count, seed):
        for xi in xi_values:
            report = build_report(spec, xi, with_discord=with_discord)
            rows.append(report_row("random", report))
    return rows


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, tuple):
        return ";".join(f"{float(entry):.12g}" for entry in value)
    return f"{float(value):.12g}"


def format_rows(rows: list[dict], columns: tuple[str, ...] = CSV_COLUMNS) -> str:
    """Render rows as CSV text: header line plus one line per row."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_format_value(row[column]) for column in columns))
    return "\n".join(lines) + "\n"


def write_csv(path: str, rows: list[dict], columns: tuple[str, ...] = CSV_COLUMNS) -> None:
    text = format_rows(rows, columns)
    directory = os.path.dirname(path)
    if directory and not os.path.isdir(directory):
        raise OSError(f"output directory does not exist: {directory}")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def load_config_file(path: str) -> dict:
    """Parse a plain-text ``key = value`` configuration file.

    Lists are comma-separated; '#' starts a comment. Keys mirror the sweep
    CLI flags; flags override whatever the file sets.
    """
    parsed: dict = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, separator, value = line.partition("=")
            if not separator:
                raise ValueError(f"{path}:{line_number}: expected 'key = value', got {raw!r}")
            key = key.strip()
            value = value.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{line_number}: unknown key {key!r}")
            if key in ("N", "n", "amin_points", "random_count", "seed"):
                parsed[key] = int(value)
            elif key in ("xi", "a0"):
                parsed[key] = tuple(float(part) for part in value.split(",") if part.strip())
            elif key == "columns":
                parsed[key] = tuple(part.strip() for part in value.split(",") if part.strip())
            elif key == "with_discord":
                parsed[key] = _parse_bool(value)
            else:  # out
                parsed[key] = value
    return parsed


def config_from_mapping(mapping: dict) -> SweepConfig:
    """Build a SweepConfig from the config-file/CLI key vocabulary."""
    return SweepConfig(
        num_states=mapping.get("N", 3),
        support_dim=mapping.get("n", 3),
        xi_values=tuple(mapping.get("xi", (0.5,))),
        family_a0=tuple(mapping.get("a0", ())),
        amin_points=mapping.get("amin_points", 51),
        random_count=mapping.get("random_count", 0),
        seed=mapping.get("seed", 0),
        columns=tuple(mapping.get("columns", CSV_COLUMNS)),
        with_discord=mapping.get("with_discord", False),
        output_path=mapping.get("out"),
    )
