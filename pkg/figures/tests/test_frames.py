from __future__ import annotations

import pytest

from recnav_figures.frames import ReportError, load_report

from conftest import make_report


def test_load_validates_header(tmp_path):
    bad = tmp_path / "r.csv"
    bad.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ReportError, match="header"):
        load_report(bad)


def test_load_rejects_unknown_metric(tmp_path):
    path = make_report(tmp_path / "r.csv", [("d", "cf", 5, "none", "made_up_metric", 1.0)])
    with pytest.raises(ReportError, match="unknown metric"):
        load_report(path)


def test_load_rejects_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_report(tmp_path / "absent.csv")


def test_load_rejects_empty_report(tmp_path):
    path = make_report(tmp_path / "r.csv", [])
    with pytest.raises(ReportError, match="no data rows"):
        load_report(path)


def test_series_and_accessors(full_report):
    frame = load_report(full_report)
    series = frame.series("largest_scc_fraction")
    assert series[("synthetic", "cf", "none")] == [(5, 0.2), (20, 0.8)]

    fractions = frame.bowtie_fractions()
    assert fractions[("synthetic", "cf", "none")][5]["SCC"] == 0.2

    hists = frame.eccentricity_histograms()
    assert hists[("synthetic", "cf", "none", 5)] == {3: 10.0, 4: 25.0}

    matrices = frame.membership_matrices()
    matrix = matrices[("synthetic", "cf", "none", 5, 20)]
    assert matrix[1, 0] == 200.0  # IN -> SCC
    assert matrix[0, 0] == 100.0

    success = frame.success_ratios()
    assert success[("synthetic", "p2p", "title")][("cf", "none", 5)] == 0.25
