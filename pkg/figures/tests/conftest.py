from __future__ import annotations

from pathlib import Path

import pytest

HEADER = "dataset,algo,N,diversifier,metric,value"


def make_report(path: Path, rows: list[tuple]) -> Path:
    lines = [HEADER]
    for dataset, algo, n, diversifier, metric, value in rows:
        lines.append(f"{dataset},{algo},{n},{diversifier},{metric},{value!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def bowtie_rows(dataset: str, algo: str, div: str, n: int, scc: float) -> list[tuple]:
    rest = 1.0 - scc
    return [
        (dataset, algo, n, div, "bowtie:SCC", scc),
        (dataset, algo, n, div, "bowtie:IN", rest),
        (dataset, algo, n, div, "bowtie:OUT", 0.0),
        (dataset, algo, n, div, "bowtie:TUBE", 0.0),
        (dataset, algo, n, div, "bowtie:TL_IN", 0.0),
        (dataset, algo, n, div, "bowtie:TL_OUT", 0.0),
        (dataset, algo, n, div, "bowtie:OTHER", 0.0),
    ]


@pytest.fixture
def full_report(tmp_path) -> Path:
    rows: list[tuple] = []
    for n, scc, comps, clust in ((5, 0.2, 120.0, 0.4), (20, 0.8, 30.0, 0.2)):
        for div in ("none", "random"):
            rows.append(("synthetic", "cf", n, div, "largest_scc_fraction", scc))
            rows.append(("synthetic", "cf", n, div, "num_scc", comps))
            rows.append(("synthetic", "cf", n, div, "clustering", clust))
            rows.append(("synthetic", "cf", n, div, "diameter", 12.0))
            rows.extend(bowtie_rows("synthetic", "cf", div, n, scc))
            rows.append(("synthetic", "cf", n, div, "ecc_hist:3", 10.0))
            rows.append(("synthetic", "cf", n, div, "ecc_hist:4", 25.0))
    rows.append(("synthetic", "cf", 20, "none", "membership:5:20:IN:SCC", 200.0))
    rows.append(("synthetic", "cf", 20, "none", "membership:5:20:SCC:SCC", 100.0))
    for knowledge, base in (("title", 0.25), ("random", 0.05)):
        for n, bump in ((5, 0.0), (20, 0.3)):
            for div, extra in (("none", 0.0), ("random", 0.1)):
                rows.append(
                    ("synthetic", "cf", n, div, f"success:p2p:{knowledge}", base + bump + extra)
                )
    return make_report(tmp_path / "report.csv", rows)
