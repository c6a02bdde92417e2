import io

import numpy as np
import pandas as pd
import pytest

from comparison import REPORT_COLUMNS, compare_report
from params_core import derive_params
from utils import config
from utils.exceptions import OracleSizeError


@pytest.fixture(scope="module")
def medium_report(medium):
    return compare_report(medium, order=2, J=3)


def test_report_shape(medium_report):
    table = medium_report.table
    assert list(table["ell"]) == list(range(1, 101))
    assert np.all(np.isfinite(table[REPORT_COLUMNS[1:]].to_numpy()))


def test_medium_order_two_bulk_accuracy(medium_report):
    assert medium_report.count_below("node_err_abs", 1e-8, ell_range=(10, 90)) == 81


def test_weights_accurate_in_bulk(medium_report):
    bulk = medium_report.table.iloc[19:80]
    assert bulk["omega_err_rel"].max() < 1e-6
    assert bulk["w_err_rel"].max() < 1e-6


def test_count_below_range(medium_report):
    full = medium_report.count_below("node_err_abs", 1.0)
    assert full == 100
    assert medium_report.count_below("node_err_abs", 1.0, ell_range=(1, 10)) == 10


def test_relative_error_column(medium_report):
    table = medium_report.table
    expected = table["node_err_abs"] / np.abs(medium_report.oracle_nodes)
    assert np.allclose(table["node_err_rel"], expected, rtol=1e-12)


def test_csv_output(medium_report):
    text = medium_report.to_csv()
    assert text.splitlines()[0] == "ell,node_err_abs,node_err_rel,w_err_rel,omega_err_rel"
    frame = pd.read_csv(io.StringIO(text), float_precision="round_trip")
    assert len(frame) == 100
    assert np.array_equal(frame["node_err_abs"].to_numpy(), medium_report.table["node_err_abs"].to_numpy())


def test_dict_and_summary(medium_report):
    data = medium_report.to_dict()
    assert (data["n"], data["alpha"], data["beta"], data["order"], data["J"]) == (100, 50, 41, 2, 3)
    assert set(data["rows"]) == set(REPORT_COLUMNS)
    summary = medium_report.summary()
    assert summary["max_node_err_abs"] == pytest.approx(medium_report.table["node_err_abs"].max())
    assert summary["median_node_err_abs"] <= summary["max_node_err_abs"]


def test_larger_kappa_is_more_accurate(medium_report):
    # κ 更大，中部误差更小
    other = compare_report(derive_params(100, 150, 141), order=2, J=3)
    bulk = slice(19, 80)
    assert other.table["node_err_abs"].iloc[bulk].median() <= medium_report.table["node_err_abs"].iloc[bulk].median()


def test_size_guard(monkeypatch, medium):
    monkeypatch.setattr(config, "oracle_max_n", 50)
    with pytest.raises(OracleSizeError):
        compare_report(medium)


@pytest.mark.slow
def test_large_order_two_report(large):
    report = compare_report(large, order=2, J=3)
    errors = report.table["node_err_abs"]
    assert report.count_below("node_err_abs", 1e-12) >= 840
    assert report.count_below("node_err_abs", 2e-12) >= 880
    assert errors.median() < 1e-13
    assert errors.iloc[99:900].max() < 1e-12


@pytest.mark.slow
def test_large_order_four_report(large):
    report = compare_report(large, order=4, J=3)
    assert report.count_below("node_err_abs", 1e-12) >= 980
