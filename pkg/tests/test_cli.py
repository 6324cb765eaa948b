import numpy as np
import pytest

from solarband import cli
from solarband.bands import calibrated_band, calibration_events
from solarband.decomposition import extract_trend
from solarband.forecast import trend_forecast
from solarband.report import score, scorecard_csv
from solarband.risk import volatility_track
from solarband.series import DaylightMask, ingest_csv


def run(*args):
    return cli.main(list(args))


def test_synth_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert run("synth", "--output", str(out), "--days", "3", "--regime", "clear",
                   "--seed", "1") == 0
    assert a.read_bytes() == b.read_bytes()


def test_forecast_csv_round_trip(tmp_path):
    series_csv = tmp_path / "series.csv"
    track_csv = tmp_path / "track.csv"
    assert run("synth", "--output", str(series_csv), "--days", "2", "--regime", "broken",
               "--seed", "3") == 0
    assert run("forecast", "--input", str(series_csv), "--output", str(track_csv)) == 0

    text = track_csv.read_text()
    assert text.startswith(cli.FORECAST_CSV_HEADER + "\n")
    series = ingest_csv(series_csv.read_text())
    expected = trend_forecast(series, extract_trend(series, 120), 60)
    restored = cli.read_forecast_csv(text, horizon=60)
    assert restored.start_time == expected.start_time
    assert np.array_equal(restored.predicted, expected.predicted, equal_nan=True)
    assert np.array_equal(restored.realized, expected.realized, equal_nan=True)


def test_bands_subcommand_writes_alpha_history(tmp_path, capsys):
    series_csv = tmp_path / "series.csv"
    track_csv = tmp_path / "track.csv"
    band_csv = tmp_path / "band.csv"
    run("synth", "--output", str(series_csv), "--days", "4", "--regime", "broken", "--seed", "5")
    run("forecast", "--input", str(series_csv), "--output", str(track_csv))
    assert run("bands", "--input", str(track_csv), "--output", str(band_csv)) == 0

    lines = band_csv.read_text().strip().split("\n")
    assert lines[0] == cli.BAND_CSV_HEADER
    first = lines[1].split(",")
    assert float(first[1]) <= float(first[2])  # lower <= upper
    history = capsys.readouterr().out.strip().split("\n")
    assert len(history) == 4  # one recalibration attempt per day
    assert history[0].endswith("alpha=unchanged")  # empty first window
    assert "alpha=" in history[1] and "unchanged" not in history[1]


def test_normtest_report_lines(tmp_path, capsys):
    series_csv = tmp_path / "series.csv"
    track_csv = tmp_path / "track.csv"
    run("synth", "--output", str(series_csv), "--days", "2", "--regime", "clear", "--seed", "8")
    run("forecast", "--input", str(series_csv), "--output", str(track_csv))
    assert run("normtest", "--input", str(track_csv), "--level", "0.05") == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == cli.NORMTEST_HEADER
    assert len(lines) == 4
    names = []
    for line in lines[1:]:
        name, n, stat, thr, level, reject = line.split(",")
        names.append(name)
        assert int(n) >= 8
        assert float(stat) >= 0 and float(thr) > 0
        assert level == "0.05"
        assert reject in ("true", "false")
    assert names == ["jarque_bera", "kolmogorov_smirnov", "lilliefors"]


def test_report_emits_scorecard_and_three_svgs(tmp_path):
    series_csv = tmp_path / "series.csv"
    outdir = tmp_path / "out"
    run("synth", "--output", str(series_csv), "--days", "5", "--regime", "broken", "--seed", "9")
    assert run("report", "--input", str(series_csv), "--output", str(outdir)) == 0
    assert (outdir / "scorecard.csv").exists()
    svgs = sorted(p.name for p in outdir.glob("*.svg"))
    assert svgs == ["histogram.svg", "monthly.svg", "zoom.svg"]
    header = (outdir / "scorecard.csv").read_text().split("\n")[0]
    assert header == "rmse,mae,nrmse,coverage,mean_band_width,n_scored"


def test_report_equals_composed_subcommands(tmp_path):
    """`report` must match the composition of synth -> forecast -> bands."""
    series_csv = tmp_path / "series.csv"
    track_csv = tmp_path / "track.csv"
    band_csv = tmp_path / "band.csv"
    outdir = tmp_path / "out"
    run("synth", "--output", str(series_csv), "--days", "5", "--regime", "broken", "--seed", "10")
    run("forecast", "--input", str(series_csv), "--output", str(track_csv))
    run("bands", "--input", str(track_csv), "--output", str(band_csv))
    run("report", "--input", str(series_csv), "--output", str(outdir))

    track = cli.read_forecast_csv(track_csv.read_text(), horizon=60)
    vol = volatility_track(track)
    mask = DaylightMask(
        flags=~np.isnan(track.realized) & (track.realized > 5.0), eps_day=5.0
    )
    band = calibrated_band(track, vol, mask)
    composed = scorecard_csv(score(track, band, mask))
    assert (outdir / "scorecard.csv").read_text() == composed

    # the band CSV carries the same frontiers the report used
    lines = band_csv.read_text().strip().split("\n")[1:]
    defined = ~np.isnan(band.lower)
    assert len(lines) == int(defined.sum())
    first_defined = int(np.flatnonzero(defined)[0])
    assert lines[0].split(",")[1] == repr(float(band.lower[first_defined]))


def test_report_is_byte_deterministic(tmp_path):
    series_csv = tmp_path / "series.csv"
    run("synth", "--output", str(series_csv), "--days", "4", "--regime", "broken", "--seed", "11")
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    for outdir in (out1, out2):
        assert run("report", "--input", str(series_csv), "--output", str(outdir)) == 0
    for name in ("scorecard.csv", "monthly.svg", "zoom.svg", "histogram.svg"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_zoom_flags(tmp_path):
    series_csv = tmp_path / "series.csv"
    outdir = tmp_path / "out"
    run("synth", "--output", str(series_csv), "--days", "4", "--regime", "broken", "--seed", "12")
    assert run(
        "report", "--input", str(series_csv), "--output", str(outdir),
        "--from", "2021-05-30T12:00:00Z", "--to", "2021-05-31T00:00:00Z",
    ) == 0
    # an empty zoom window is a data error
    assert run(
        "report", "--input", str(series_csv), "--output", str(outdir),
        "--from", "2022-01-01T00:00:00Z", "--to", "2022-01-02T00:00:00Z",
    ) == cli.EXIT_DATA
    # half a zoom range is a data error too
    assert run(
        "report", "--input", str(series_csv), "--output", str(outdir),
        "--from", "2021-05-30T12:00:00Z",
    ) == cli.EXIT_DATA


def test_lilliefors_table_subcommand(tmp_path):
    out = tmp_path / "table.csv"
    assert run("lilliefors-table", "--output", str(out), "--seed", "7",
               "--replicates", "1000") == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "n,level,critical"
    assert len(lines) == 1 + 27 * 5  # sizes x levels
    again = tmp_path / "again.csv"
    run("lilliefors-table", "--output", str(again), "--seed", "7", "--replicates", "1000")
    assert out.read_bytes() == again.read_bytes()


def test_exit_codes(tmp_path):
    # usage error: argparse exits 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == cli.EXIT_USAGE
    # data error: missing input file
    assert run("forecast", "--input", str(tmp_path / "nope.csv"),
               "--output", str(tmp_path / "o.csv")) == cli.EXIT_DATA
    # data error: malformed CSV
    bad = tmp_path / "bad.csv"
    bad.write_text("wrong,header\n")
    assert run("forecast", "--input", str(bad), "--output",
               str(tmp_path / "o.csv")) == cli.EXIT_DATA
    # uncalibratable window: a single-day run never reaches a populated window
    series_csv = tmp_path / "short.csv"
    track_csv = tmp_path / "short_track.csv"
    run("synth", "--output", str(series_csv), "--days", "1", "--regime", "clear", "--seed", "1")
    run("forecast", "--input", str(series_csv), "--output", str(track_csv))
    assert run("bands", "--input", str(track_csv), "--output",
               str(tmp_path / "b.csv")) == cli.EXIT_UNCALIBRATABLE


def test_negative_value_is_data_error(tmp_path):
    bad = tmp_path / "neg.csv"
    bad.write_text("timestamp,ghi_wm2\n2021-01-01T00:00:00Z,-4\n")
    assert run("forecast", "--input", str(bad), "--output",
               str(tmp_path / "o.csv")) == cli.EXIT_DATA


def test_nonfinite_track_value_is_data_error(tmp_path):
    bad = tmp_path / "inf.csv"
    bad.write_text("timestamp,predicted_wm2,realized_wm2\n2021-01-01T00:00:00Z,inf,5\n")
    assert run("bands", "--input", str(bad), "--output",
               str(tmp_path / "o.csv")) == cli.EXIT_DATA
