"""Render the five figure families from a loaded report frame.

Figures are pure functions of the report rows: fixed style, no timestamps,
deterministic file names. Every plotted number can also be dumped to a table
CSV so chart values are auditable against the report.
"""

from __future__ import annotations

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .frames import BOWTIE_LABELS, ReportError, ReportFrame

log = logging.getLogger(__name__)

DPI = 120
FRACTION_TOLERANCE = 1e-9

plt.rcParams.update(
    {
        "figure.figsize": (6.0, 4.0),
        "font.family": "DejaVu Sans",
        "axes.grid": True,
        "grid.alpha": 0.3,
        "svg.hashsalt": "recnav-figures",
    }
)

STACK_COLORS = {
    "SCC": "#1f77b4",
    "IN": "#2ca02c",
    "OUT": "#d62728",
    "TUBE": "#9467bd",
    "TL_IN": "#8c564b",
    "TL_OUT": "#e377c2",
    "OTHER": "#7f7f7f",
}

CURVE_METRICS = [
    ("largest_scc_fraction", "Largest strongly connected component (fraction)"),
    ("num_scc", "Number of components"),
    ("clustering", "Clustering coefficient"),
]


def _slug(*parts: object) -> str:
    return "_".join(str(p) for p in parts)


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=DPI, metadata={"Software": None})
    plt.close(fig)
    return path


def _write_table(path: Path, header: list[str], rows: list[tuple]) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def plot_reachability(frame: ReportFrame, out_dir: Path, dump_table: bool = False) -> list[Path]:
    """Curves of component/clustering metrics over N plus eccentricity histograms."""
    written: list[Path] = []
    table_rows: list[tuple] = []
    for metric, title in CURVE_METRICS:
        series = frame.series(metric)
        if not series:
            raise ReportError(f"missing metric {metric!r} in report")
        multi_n = any(len(points) >= 2 for points in series.values())
        if not multi_n:
            log.warning("metric %s present for a single N only; curve skipped", metric)
            continue
        fig, ax = plt.subplots()
        for key in sorted(series):
            points = series[key]
            xs = [n for n, _ in points]
            ys = [v for _, v in points]
            ax.plot(xs, ys, marker="o", markersize=3, label=" / ".join(key))
            table_rows.extend((metric, *key, n, v) for n, v in points)
        ax.set_xlabel("N (recommendations per item)")
        ax.set_ylabel(title)
        ax.legend(fontsize=7)
        written.append(_save(fig, out_dir / f"reachability_{metric}.png"))

    histograms = frame.eccentricity_histograms()
    if not histograms:
        raise ReportError("missing metric 'ecc_hist:*' in report")
    by_n: dict[int, list[tuple[tuple[str, str, str], dict[int, float]]]] = {}
    for (dataset, algo, diversifier, n), hist in sorted(histograms.items()):
        by_n.setdefault(n, []).append(((dataset, algo, diversifier), hist))
    for n, entries in sorted(by_n.items()):
        fig, ax = plt.subplots()
        for key, hist in entries:
            xs = sorted(hist)
            ys = [hist[x] for x in xs]
            ax.plot(xs, ys, drawstyle="steps-mid", label=" / ".join(key))
            table_rows.extend((f"ecc_hist:{x}", *key, n, hist[x]) for x in xs)
        ax.set_xlabel("Eccentricity")
        ax.set_ylabel("Nodes")
        ax.set_title(f"N = {n}")
        ax.legend(fontsize=7)
        written.append(_save(fig, out_dir / f"eccentricity_hist_N{n}.png"))

    if dump_table:
        written.append(
            _write_table(
                out_dir / "reachability_table.csv",
                ["metric", "dataset", "algo", "diversifier", "N", "value"],
                table_rows,
            )
        )
    return written


def plot_bowtie_stacked(frame: ReportFrame, out_dir: Path, dump_table: bool = False) -> list[Path]:
    """Stacked bow-tie composition over N, normalized to 1.0 per N."""
    fractions = frame.bowtie_fractions()
    if not fractions:
        raise ReportError("missing metric 'bowtie:*' in report")
    written: list[Path] = []
    table_rows: list[tuple] = []
    for key in sorted(fractions):
        per_n = fractions[key]
        ns = sorted(per_n)
        for n in ns:
            total = sum(per_n[n].values())
            if abs(total - 1.0) > FRACTION_TOLERANCE:
                raise ReportError(
                    f"bow-tie fractions for {key} at N={n} sum to {total!r}, not 1"
                )
        stacks = [
            [per_n[n].get(label, 0.0) for n in ns] for label in BOWTIE_LABELS
        ]
        fig, ax = plt.subplots()
        ax.stackplot(
            ns,
            stacks,
            labels=BOWTIE_LABELS,
            colors=[STACK_COLORS[label] for label in BOWTIE_LABELS],
        )
        ax.set_xlabel("N (recommendations per item)")
        ax.set_ylabel("Fraction of nodes")
        ax.set_ylim(0, 1)
        ax.set_title(" / ".join(key))
        ax.legend(fontsize=7, loc="center left", bbox_to_anchor=(1.0, 0.5))
        fig.tight_layout()
        written.append(_save(fig, out_dir / f"bowtie_stacked_{_slug(*key)}.png"))
        for n in ns:
            table_rows.extend(
                (*key, n, label, per_n[n].get(label, 0.0)) for label in BOWTIE_LABELS
            )
    if dump_table:
        written.append(
            _write_table(
                out_dir / "bowtie_table.csv",
                ["dataset", "algo", "diversifier", "N", "label", "fraction"],
                table_rows,
            )
        )
    return written


def plot_membership_heatmaps(
    frame: ReportFrame, out_dir: Path, dump_table: bool = False
) -> list[Path]:
    """Transition-count heatmaps between consecutive bow-tie partitions."""
    matrices = frame.membership_matrices()
    if not matrices:
        raise ReportError("missing metric 'membership:*' in report")
    written: list[Path] = []
    table_rows: list[tuple] = []
    for key in sorted(matrices):
        dataset, algo, diversifier, n_from, n_to = key
        matrix = matrices[key]
        fig, ax = plt.subplots(figsize=(5.4, 4.6))
        image = ax.imshow(matrix, cmap="viridis")
        ax.set_xticks(range(7), BOWTIE_LABELS, rotation=45, ha="right", fontsize=7)
        ax.set_yticks(range(7), BOWTIE_LABELS, fontsize=7)
        ax.set_xlabel(f"membership at N={n_to}")
        ax.set_ylabel(f"membership at N={n_from}")
        ax.set_title(f"{dataset} / {algo} / {diversifier}")
        ax.grid(False)
        fig.colorbar(image, ax=ax, label="nodes")
        fig.tight_layout()
        written.append(
            _save(fig, out_dir / f"membership_{_slug(dataset, algo, diversifier)}_N{n_from}_N{n_to}.png")
        )
        for i, from_label in enumerate(BOWTIE_LABELS):
            for j, to_label in enumerate(BOWTIE_LABELS):
                if matrix[i, j]:
                    table_rows.append(
                        (dataset, algo, diversifier, n_from, n_to, from_label, to_label, matrix[i, j])
                    )
    if dump_table:
        written.append(
            _write_table(
                out_dir / "membership_table.csv",
                ["dataset", "algo", "diversifier", "n_from", "n_to", "from", "to", "count"],
                table_rows,
            )
        )
    return written


SUCCESS_BAR_NS = (5, 20)


def plot_success_bars(frame: ReportFrame, out_dir: Path, dump_table: bool = False) -> list[Path]:
    """Grouped success-ratio bars per (algo, diversifier) at N = 5 and N = 20."""
    ratios = frame.success_ratios()
    if not ratios:
        raise ReportError("missing metric 'success:*' in report")
    written: list[Path] = []
    table_rows: list[tuple] = []
    for (dataset, scenario, knowledge) in sorted(ratios):
        entries = ratios[(dataset, scenario, knowledge)]
        groups = sorted({(algo, div) for algo, div, _ in entries})
        ns = [n for n in SUCCESS_BAR_NS if any(key[2] == n for key in entries)]
        if not ns:
            log.warning(
                "success:%s:%s has no N in %s; bars skipped", scenario, knowledge, SUCCESS_BAR_NS
            )
            continue
        fig, ax = plt.subplots()
        width = 0.8 / len(ns)
        xs = np.arange(len(groups))
        for offset, n in enumerate(ns):
            heights = [entries.get((algo, div, n), 0.0) for algo, div in groups]
            ax.bar(xs + offset * width, heights, width, label=f"N={n}")
            table_rows.extend(
                (dataset, scenario, knowledge, algo, div, n, entries.get((algo, div, n), 0.0))
                for algo, div in groups
            )
        ax.set_xticks(xs + width * (len(ns) - 1) / 2, [f"{a}/{d}" for a, d in groups], fontsize=7)
        ax.set_ylabel("Success ratio")
        ax.set_ylim(0, 1)
        ax.set_title(f"{dataset}: {scenario} with {knowledge} knowledge")
        ax.legend()
        written.append(
            _save(fig, out_dir / f"success_{_slug(dataset, scenario, knowledge)}.png")
        )
    if dump_table:
        written.append(
            _write_table(
                out_dir / "success_table.csv",
                ["dataset", "scenario", "knowledge", "algo", "diversifier", "N", "value"],
                table_rows,
            )
        )
    return written


def render_all(frame: ReportFrame, out_dir: Path, dump_table: bool = False) -> list[Path]:
    written = []
    written += plot_reachability(frame, out_dir, dump_table)
    written += plot_bowtie_stacked(frame, out_dir, dump_table)
    written += plot_membership_heatmaps(frame, out_dir, dump_table)
    written += plot_success_bars(frame, out_dir, dump_table)
    return written
