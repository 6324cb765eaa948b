import numpy as np
import pytest
from conftest import START, make_series

from solarband.decomposition import extract_trend
from solarband.forecast import persistence_forecast, trend_forecast


def _trend_track(values, window=30, horizon=60):
    s = make_series(values)
    return trend_forecast(s, extract_trend(s, window), horizon)


def test_constant_series_predicts_constant():
    track = _trend_track(np.full(200, 420.0))
    defined = ~np.isnan(track.predicted)
    assert defined.any()
    assert np.allclose(track.predicted[defined], 420.0, atol=1e-9)


def test_affine_series_zero_error():
    k = np.arange(400, dtype=float)
    values = 50.0 + 0.25 * k
    track = _trend_track(values)
    defined = ~np.isnan(track.predicted)
    assert np.abs(track.predicted[defined] - values[defined]).max() <= 1e-9


def test_steep_rampdown_clamps_to_zero():
    values = np.clip(1000.0 - 10.0 * np.arange(300, dtype=float), 0, None)
    track = _trend_track(values, window=20)
    # Once the local line extrapolates below zero the prediction is exactly 0.
    assert (track.predicted[~np.isnan(track.predicted)] == 0.0).any()
    assert np.nanmin(track.predicted) == 0.0


def test_predictions_nonnegative():
    rng = np.random.default_rng(21)
    values = rng.uniform(0, 100, 500)
    track = _trend_track(values, window=15)
    assert np.nanmin(track.predicted) >= 0.0


def test_causality_of_trend_forecast():
    rng = np.random.default_rng(8)
    values = rng.uniform(0, 600, 300)
    before = _trend_track(values, window=25, horizon=60)
    tampered = values.copy()
    tampered[200:] = rng.uniform(0, 600, 100)
    after = _trend_track(tampered, window=25, horizon=60)
    # predicted[t] depends only on samples at times <= t - horizon
    assert np.array_equal(
        before.predicted[:260], after.predicted[:260], equal_nan=True
    )


def test_mismatched_decomposition_rejected():
    s1 = make_series(np.ones(100))
    s2 = make_series(np.ones(120))
    d2 = extract_trend(s2, 10)
    with pytest.raises(ValueError):
        trend_forecast(s1, d2, 60)
    s3 = make_series(np.ones(100), start=START.replace(hour=6))
    d3 = extract_trend(s3, 10)
    with pytest.raises(ValueError):
        trend_forecast(s1, d3, 60)


def test_persistence_constant_series():
    s = make_series(np.full(150, 99.0))
    track = persistence_forecast(s, 60)
    defined = ~np.isnan(track.predicted)
    assert np.array_equal(track.predicted[defined], track.realized[defined])


def test_persistence_ramp_constant_error():
    k = np.arange(200, dtype=float)
    s = make_series(10.0 + 2.0 * k)
    track = persistence_forecast(s, 60)
    err = track.realized[60:] - track.predicted[60:]
    assert np.allclose(err, 120.0, atol=1e-9)


def test_persistence_gap_propagates():
    values = np.full(150, 5.0)
    values[40] = np.nan
    track = persistence_forecast(make_series(values), 60)
    assert np.isnan(track.predicted[100])
    assert not np.isnan(track.predicted[101])


def test_persistence_identity():
    rng = np.random.default_rng(17)
    values = rng.uniform(0, 900, 300)
    values[rng.random(300) < 0.1] = np.nan
    values[0] = values[-1] = 1.0
    track = persistence_forecast(make_series(values), 60)
    for t in range(60, 300):
        expected = values[t] - values[t - 60]
        got = track.realized[t] - track.predicted[t]
        if np.isnan(expected):
            assert np.isnan(got)
        else:
            assert got == expected


def test_horizon_validation():
    s = make_series(np.ones(100))
    with pytest.raises(ValueError):
        persistence_forecast(s, 0)
    with pytest.raises(ValueError):
        trend_forecast(s, extract_trend(s, 10), 0)
