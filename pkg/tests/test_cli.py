"""CLI tests: flags, outputs, error contracts, determinism."""

import csv
import math

import numpy as np
import pytest

from bayesbag import (
    BagConfig,
    Dataset,
    GaussianLocationModel,
    bayesbag_exact,
    credible_interval,
    make_report,
    normal_cdf,
    posterior,
)
from bayesbag.cli import main, read_observations, synthetic_dataset

MODEL = GaussianLocationModel(4.0, 1.0)

# ten values that average to exactly 0.72775 (offsets are powers of two, so
# the exact sum telescopes back to 10 * 0.72775)
A = 0.72775
TEN_VALUES = [A + 0.125, A - 0.125, A + 0.25, A - 0.25, A + 0.0625,
              A - 0.0625, A + 0.5, A - 0.5, A, A]


def read_rows(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class TestTable1:
    def test_exact_rows(self, tmp_path):
        assert main(["table1", "--out", str(tmp_path)]) == 0
        rows = read_rows(tmp_path / "table1.csv")
        assert [r["n"] for r in rows] == ["1", "10"]

        n1, n10 = rows
        assert (n1["posterior_lo_2dp"], n1["posterior_hi_2dp"]) == ("-0.69", "2.81")
        assert (n10["posterior_lo_2dp"], n10["posterior_hi_2dp"]) == ("0.10", "1.32")
        # published bagged rows, within the documented slack before rounding
        assert float(n1["bayesbag_lo"]) == pytest.approx(-1.30, abs=0.015)
        assert float(n1["bayesbag_hi"]) == pytest.approx(3.41, abs=0.015)
        assert float(n10["bayesbag_lo"]) == pytest.approx(-0.16, abs=0.02)
        assert float(n10["bayesbag_hi"]) == pytest.approx(1.56, abs=0.02)
        # rounded view is the rounding of the full-precision column
        for row in rows:
            for col in ("posterior_lo", "posterior_hi", "bayesbag_lo", "bayesbag_hi"):
                assert f"{float(row[col]):.2f}" == row[col + "_2dp"]

    def test_mc_agrees_with_exact(self, tmp_path):
        exact_dir = tmp_path / "exact"
        mc_dir = tmp_path / "mc"
        assert main(["table1", "--exact", "--out", str(exact_dir)]) == 0
        assert main(["table1", "--mc", "--B", "10000", "--out", str(mc_dir)]) == 0
        for exact, mc in zip(read_rows(exact_dir / "table1.csv"), read_rows(mc_dir / "table1.csv")):
            assert float(mc["bayesbag_lo"]) == pytest.approx(float(exact["bayesbag_lo"]), abs=0.03)
            assert float(mc["bayesbag_hi"]) == pytest.approx(float(exact["bayesbag_hi"]), abs=0.03)

    def test_simulate_uses_fresh_data(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        assert main(["table1", "--simulate", "--seed", "1", "--out", str(a)]) == 0
        assert main(["table1", "--simulate", "--seed", "2", "--out", str(b)]) == 0
        row_a = read_rows(a / "table1.csv")[0]
        row_b = read_rows(b / "table1.csv")[0]
        assert row_a["posterior_lo"] != row_b["posterior_lo"]


class TestBag:
    def test_single_value_file_matches_reference_row(self, tmp_path):
        data_file = tmp_path / "obs.csv"
        write_lines(data_file, ["1.325"])
        assert main(["bag", "--input", str(data_file), "--out", str(tmp_path)]) == 0
        (row,) = read_rows(tmp_path / "report.csv")
        post = credible_interval(posterior(MODEL, Dataset((1.325,))))
        bag = credible_interval(bayesbag_exact(MODEL, Dataset((1.325,))))
        assert float(row["posterior_lo"]) == post.lo
        assert float(row["posterior_hi"]) == post.hi
        assert float(row["bayesbag_lo"]) == bag.lo
        assert float(row["bayesbag_hi"]) == bag.hi
        assert row["degenerate_resampling"] == "0"

    def test_ten_value_file_matches_reference_row(self, tmp_path):
        data_file = tmp_path / "obs.csv"
        write_lines(data_file, [repr(v) for v in TEN_VALUES])
        assert main(["bag", "--input", str(data_file), "--out", str(tmp_path)]) == 0
        (row,) = read_rows(tmp_path / "report.csv")
        assert row["n"] == "10"
        reference = make_report(MODEL, Dataset(tuple(TEN_VALUES)), BagConfig(replicates=1000))
        assert float(row["bayesbag_lo"]) == reference.bagged_interval.lo
        assert float(row["bayesbag_hi"]) == reference.bagged_interval.hi
        assert float(row["widening_ratio"]) == reference.widening_ratio

    def test_cdf_curve_columns(self, tmp_path):
        data_file = tmp_path / "obs.csv"
        write_lines(data_file, ["1.325"])
        assert main(["bag", "--input", str(data_file), "--out", str(tmp_path)]) == 0
        rows = read_rows(tmp_path / "cdf.csv")
        assert len(rows) == 401
        bag = bayesbag_exact(MODEL, Dataset((1.325,)))
        mid = rows[200]
        assert float(mid["F_bayesbag"]) == pytest.approx(
            normal_cdf(float(mid["u"]), bag), abs=1e-12
        )

    def test_header_autodetected(self, tmp_path):
        data_file = tmp_path / "obs.csv"
        write_lines(data_file, ["value", "1.0", "2.0"])
        assert read_observations(data_file).n == 2

    def test_empty_file_exit_code(self, tmp_path, capsys):
        data_file = tmp_path / "empty.csv"
        data_file.write_text("", encoding="utf-8")
        assert main(["bag", "--input", str(data_file), "--out", str(tmp_path)]) == 2
        assert "empty dataset" in capsys.readouterr().err

    def test_malformed_row_reports_line_number(self, tmp_path, capsys):
        data_file = tmp_path / "bad.csv"
        write_lines(data_file, ["1.0", "oops", "2.0"])
        assert main(["bag", "--input", str(data_file), "--out", str(tmp_path)]) == 2
        assert "line 2" in capsys.readouterr().err

    def test_missing_file_exit_code(self, tmp_path):
        assert main(["bag", "--input", str(tmp_path / "nope.csv"), "--out", str(tmp_path)]) == 2

    def test_input_and_synthetic_are_exclusive(self, tmp_path, capsys):
        data_file = tmp_path / "obs.csv"
        write_lines(data_file, ["1.0"])
        assert (
            main(["bag", "--input", str(data_file), "--synthetic-n", "5", "--out", str(tmp_path)])
            == 2
        )
        assert main(["bag", "--out", str(tmp_path)]) == 2

    def test_nonparametric_degenerate_warning(self, tmp_path, capsys):
        data_file = tmp_path / "obs.csv"
        write_lines(data_file, ["1.325"])
        rc = main([
            "bag", "--input", str(data_file), "--scheme", "nonparametric",
            "--out", str(tmp_path),
        ])
        assert rc == 0
        assert "degenerate" in capsys.readouterr().out
        (row,) = read_rows(tmp_path / "report.csv")
        assert row["degenerate_resampling"] == "1"
        assert float(row["widening_ratio"]) == 1.0

    def test_synthetic_roundtrip_through_file(self, tmp_path):
        gen_dir = tmp_path / "gen"
        file_dir = tmp_path / "file"
        args = ["--B", "500", "--seed", "9", "--scheme", "nonparametric"]
        rc = main([
            "bag", "--synthetic-n", "15", "--synthetic-theta", "1.31",
            "--synthetic-seed", "77", "--out", str(gen_dir), *args,
        ])
        assert rc == 0
        rc = main(["bag", "--input", str(gen_dir / "data.csv"), "--out", str(file_dir), *args])
        assert rc == 0
        assert (gen_dir / "report.csv").read_bytes() == (file_dir / "report.csv").read_bytes()
        assert (gen_dir / "cdf.csv").read_bytes() == (file_dir / "cdf.csv").read_bytes()


class TestCurves:
    def test_row_count_and_sentinels(self, tmp_path):
        data_file = tmp_path / "obs.csv"
        write_lines(data_file, ["1.325"])
        rc = main([
            "curves", "--input", str(data_file), "--B", "2",
            "--grid-points", "11", "--out", str(tmp_path),
        ])
        assert rc == 0
        rows = read_rows(tmp_path / "curves.csv")
        assert len(rows) == 2 * 11 + 2 * 11
        ids = {row["replicate_id"] for row in rows}
        assert ids == {"0", "1", "-1", "-2"}

    def test_byte_identical_reruns(self, tmp_path):
        data_file = tmp_path / "obs.csv"
        write_lines(data_file, ["1.325"])
        args = ["curves", "--input", str(data_file), "--B", "50", "--grid-points", "31",
                "--seed", "4"]
        a = tmp_path / "a"
        b = tmp_path / "b"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert (a / "curves.csv").read_bytes() == (b / "curves.csv").read_bytes()

    def test_mean_rows_close_to_exact(self, tmp_path):
        data_file = tmp_path / "obs.csv"
        write_lines(data_file, ["1.325"])
        rc = main([
            "curves", "--input", str(data_file), "--B", "500",
            "--grid-points", "101", "--seed", "10", "--out", str(tmp_path),
        ])
        assert rc == 0
        bag = bayesbag_exact(MODEL, Dataset((1.325,)))
        errors = [
            abs(float(row["F"]) - normal_cdf(float(row["u"]), bag))
            for row in read_rows(tmp_path / "curves.csv")
            if row["replicate_id"] == "-1"
        ]
        assert len(errors) == 101
        assert max(errors) <= 1.36 / math.sqrt(500) + 0.005

    def test_posterior_sentinel_matches_model(self, tmp_path):
        data_file = tmp_path / "obs.csv"
        write_lines(data_file, ["1.325"])
        rc = main([
            "curves", "--input", str(data_file), "--B", "2",
            "--grid-points", "11", "--out", str(tmp_path),
        ])
        assert rc == 0
        post = posterior(MODEL, Dataset((1.325,)))
        for row in read_rows(tmp_path / "curves.csv"):
            if row["replicate_id"] == "-2":
                assert float(row["F"]) == normal_cdf(float(row["u"]), post)


class TestHelpers:
    def test_synthetic_dataset_deterministic(self):
        a = synthetic_dataset(10, 1.31, 1.0, 123)
        b = synthetic_dataset(10, 1.31, 1.0, 123)
        c = synthetic_dataset(10, 1.31, 1.0, 124)
        assert a == b
        assert a != c
        assert a.n == 10

    def test_synthetic_dataset_statistics(self):
        data = synthetic_dataset(200_000, 1.31, 1.0, 5)
        assert data.mean == pytest.approx(1.31, abs=3 / math.sqrt(200_000))
        assert np.var(data.observations) == pytest.approx(1.0, abs=0.02)
