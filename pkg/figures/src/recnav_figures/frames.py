"""Load and validate the long-format report CSV produced by the pipeline.

The report schema is the only contract with the analysis toolkit: rows of
``dataset,algo,N,diversifier,metric,value`` where metric is one of a fixed
set of names. Unknown metric names are rejected so silently renamed columns
upstream cannot produce empty figures.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

REPORT_COLUMNS = ["dataset", "algo", "N", "diversifier", "metric", "value"]

BOWTIE_LABELS = ("SCC", "IN", "OUT", "TUBE", "TL_IN", "TL_OUT", "OTHER")
SCENARIOS = ("p2p", "berry", "forage")
KNOWLEDGE_KINDS = ("title", "neighbors", "wiki_neighbors", "optimal", "random")

SIMPLE_METRICS = {"num_scc", "largest_scc_fraction", "clustering", "diameter"}
_LABELS = "|".join(BOWTIE_LABELS)
BOWTIE_RE = re.compile(rf"^bowtie:({_LABELS})$")
ECC_RE = re.compile(r"^ecc_hist:(\d+)$")
MEMBERSHIP_RE = re.compile(rf"^membership:(\d+):(\d+):({_LABELS}):({_LABELS})$")
SUCCESS_RE = re.compile(
    rf"^success:({'|'.join(SCENARIOS)}):({'|'.join(KNOWLEDGE_KINDS)})$"
)


class ReportError(ValueError):
    """The report file is missing, malformed, or uses unknown metric names."""


@dataclass(frozen=True)
class Row:
    dataset: str
    algo: str
    n: int
    diversifier: str
    metric: str
    value: float


def _validate_metric(metric: str) -> None:
    if metric in SIMPLE_METRICS:
        return
    for pattern in (BOWTIE_RE, ECC_RE, MEMBERSHIP_RE, SUCCESS_RE):
        if pattern.match(metric):
            return
    raise ReportError(f"unknown metric name {metric!r}")


@dataclass
class ReportFrame:
    rows: list[Row]

    def series(self, metric: str) -> dict[tuple[str, str, str], list[tuple[int, float]]]:
        """Curve points per (dataset, algo, diversifier), sorted by N."""
        out: dict[tuple[str, str, str], list[tuple[int, float]]] = {}
        for row in self.rows:
            if row.metric == metric:
                out.setdefault((row.dataset, row.algo, row.diversifier), []).append(
                    (row.n, row.value)
                )
        for points in out.values():
            points.sort()
        return out

    def bowtie_fractions(
        self,
    ) -> dict[tuple[str, str, str], dict[int, dict[str, float]]]:
        out: dict[tuple[str, str, str], dict[int, dict[str, float]]] = {}
        for row in self.rows:
            match = BOWTIE_RE.match(row.metric)
            if match:
                key = (row.dataset, row.algo, row.diversifier)
                out.setdefault(key, {}).setdefault(row.n, {})[match.group(1)] = row.value
        return out

    def eccentricity_histograms(
        self,
    ) -> dict[tuple[str, str, str, int], dict[int, float]]:
        out: dict[tuple[str, str, str, int], dict[int, float]] = {}
        for row in self.rows:
            match = ECC_RE.match(row.metric)
            if match:
                key = (row.dataset, row.algo, row.diversifier, row.n)
                out.setdefault(key, {})[int(match.group(1))] = row.value
        return out

    def membership_matrices(
        self,
    ) -> dict[tuple[str, str, str, int, int], np.ndarray]:
        out: dict[tuple[str, str, str, int, int], np.ndarray] = {}
        index = {label: k for k, label in enumerate(BOWTIE_LABELS)}
        for row in self.rows:
            match = MEMBERSHIP_RE.match(row.metric)
            if match:
                n_from, n_to = int(match.group(1)), int(match.group(2))
                key = (row.dataset, row.algo, row.diversifier, n_from, n_to)
                matrix = out.setdefault(key, np.zeros((7, 7)))
                matrix[index[match.group(3)], index[match.group(4)]] = row.value
        return out

    def success_ratios(
        self,
    ) -> dict[tuple[str, str, str], dict[tuple[str, str, int], float]]:
        """Mean success per (dataset, scenario, knowledge) -> (algo, diversifier, N)."""
        out: dict[tuple[str, str, str], dict[tuple[str, str, int], float]] = {}
        for row in self.rows:
            match = SUCCESS_RE.match(row.metric)
            if match:
                scenario, knowledge = match.group(1), match.group(2)
                out.setdefault((row.dataset, scenario, knowledge), {})[
                    (row.algo, row.diversifier, row.n)
                ] = row.value
        return out


def load_report(path: str | Path) -> ReportFrame:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"report not found: {path}")
    rows: list[Row] = []
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != REPORT_COLUMNS:
            raise ReportError(f"report header must be {REPORT_COLUMNS}, got {header}")
        for line_no, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(REPORT_COLUMNS):
                raise ReportError(f"line {line_no}: expected {len(REPORT_COLUMNS)} columns")
            dataset, algo, n_text, diversifier, metric, value_text = record
            _validate_metric(metric)
            try:
                rows.append(
                    Row(
                        dataset=dataset,
                        algo=algo,
                        n=int(n_text),
                        diversifier=diversifier,
                        metric=metric,
                        value=float(value_text),
                    )
                )
            except ValueError:
                raise ReportError(f"line {line_no}: malformed N or value") from None
    if not rows:
        raise ReportError(f"report {path} has no data rows")
    return ReportFrame(rows=rows)
