import json

import numpy as np
import pytest

from openchain.series import ObservableSeries, format_real, read_csv, write_csv


class TestCsv:
    def test_round_trip_is_lossless(self, tmp_path):
        rng = np.random.Generator(np.random.Philox(key=1))
        cols = {
            "t": np.arange(5, dtype=float),
            "value": rng.normal(size=5) * 10.0 ** rng.integers(-8, 8, 5),
        }
        path = tmp_path / "x.csv"
        write_csv(path, cols)
        back = read_csv(path)
        assert np.array_equal(back["value"], cols["value"])

    def test_seventeen_digits(self):
        assert format_real(np.pi) == "3.1415926535897931"

    def test_header_order(self, tmp_path):
        path = tmp_path / "x.csv"
        write_csv(path, {"b": np.zeros(1), "a": np.ones(1)})
        assert path.read_text().splitlines()[0] == "b,a"

    def test_length_mismatch(self, tmp_path):
        with pytest.raises(ValueError):
            write_csv(tmp_path / "x.csv", {"a": np.zeros(2), "b": np.zeros(3)})


class TestObservableSeries:
    def test_validation(self):
        with pytest.raises(ValueError):
            ObservableSeries([0.0, 0.0], [1.0, 1.0], [0.0, 0.0])
        with pytest.raises(ValueError):
            ObservableSeries([0.0, 1.0], [1.0], [0.0, 0.0])
        with pytest.raises(ValueError):
            ObservableSeries([0.0, 1.0], [1.0, 1.0], [0.0, -1.0])

    def test_tiny_negative_variance_clipped(self):
        series = ObservableSeries([0.0, 1.0], [1.0, 1.0], [0.0, -1e-12])
        assert series.var_q[1] == 0.0

    def test_json_payload(self):
        series = ObservableSeries([0.0, 1.0], [1.0, 2.0], [0.0, 0.5], [0.1, 0.2])
        payload = json.loads(series.to_json())
        assert payload["t"] == [0.0, 1.0]
        assert payload["p_region"] == [0.1, 0.2]

    def test_csv_label(self, tmp_path):
        series = ObservableSeries([0.0, 1.0], [1.0, 2.0], [0.0, 0.5], [0.1, 0.2])
        series.to_csv(tmp_path / "x.csv", p_label="p_beyond_gate")
        assert read_csv(tmp_path / "x.csv").keys() == {
            "t",
            "mean_Q",
            "var_Q",
            "p_beyond_gate",
        }
