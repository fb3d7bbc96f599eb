import numpy as np
import pytest
from sklearn.linear_model import LogisticRegression

from kafnets.data import Dataset, MinMaxMedianScaler, load_csv, split, synth
from kafnets.exceptions import ConfigError, DataError


def _write(tmp_path, text, name="d.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_round_trip_values(tmp_path):
    ds = load_csv(_write(tmp_path, "0.1,2.5,1\n-3e-2,4,0\n7,0.125,1\n"))
    np.testing.assert_array_equal(ds.features, [[0.1, 2.5], [-3e-2, 4.0], [7.0, 0.125]])
    np.testing.assert_array_equal(ds.labels, [1, 0, 1])


def test_missing_token(tmp_path):
    ds = load_csv(_write(tmp_path, "1,2,0\n?,4,1\n5,?,0\n"))
    assert np.isnan(ds.features[1, 0]) and np.isnan(ds.features[2, 1])
    assert np.isnan(ds.features).sum() == 2
    ds = load_csv(_write(tmp_path, "1,NA,0\n", "na.csv"), missing_token="NA")
    assert np.isnan(ds.features[0, 1])


def test_header_and_named_label(tmp_path):
    ds = load_csv(_write(tmp_path, "y,a,b\n1,2,3\n0,5,6\n"), label_column="y", has_header=True)
    assert ds.feature_names == ["a", "b"]
    np.testing.assert_array_equal(ds.features, [[2, 3], [5, 6]])
    np.testing.assert_array_equal(ds.labels, [1, 0])


def test_regression_labels(tmp_path):
    ds = load_csv(_write(tmp_path, "1,0.5\n2,-1.25\n"), task="regression")
    np.testing.assert_array_equal(ds.labels, [0.5, -1.25])


@pytest.mark.parametrize("text,line", [("1,2,0\n1,2\n", 2), ("1,2,0\n3,x,1\n", 2), ("1,2,0\n1,2,a\n", 2)])
def test_load_errors_report_line(tmp_path, text, line):
    with pytest.raises(DataError, match=f"line {line}"):
        load_csv(_write(tmp_path, text))


def test_header_line_numbers(tmp_path):
    with pytest.raises(DataError, match="line 3"):
        load_csv(_write(tmp_path, "a,b,y\n1,2,0\n1,2\n"), has_header=True)


def test_bad_label_column(tmp_path):
    with pytest.raises(DataError):
        load_csv(_write(tmp_path, "1,2\n"), label_column=5)


def test_scaler_examples():
    s = MinMaxMedianScaler().fit(np.array([[0.0], [5.0], [10.0]]))
    np.testing.assert_array_equal(s.transform(np.array([[0.0], [5.0], [10.0]])).ravel(), [-1, 0, 1])
    s = MinMaxMedianScaler().fit(np.array([[1.0], [np.nan], [3.0]]))
    assert s.median_[0] == 2.0
    np.testing.assert_array_equal(s.transform(np.array([[np.nan]])), [[0.0]])
    assert s.transform(np.array([[5.0]]))[0, 0] == 3.0


def test_scaler_properties(rng):
    X = rng.normal(size=(50, 4)) * [1, 10, 100, 0]
    X[:, 3] = 7.0
    Z = MinMaxMedianScaler().fit_transform(X)
    np.testing.assert_array_equal(Z[:, :3].min(axis=0), -1.0)
    np.testing.assert_array_equal(Z[:, :3].max(axis=0), 1.0)
    np.testing.assert_array_equal(Z[:, 3], 0.0)
    # statistics depend on the training rows only
    s = MinMaxMedianScaler().fit(X[:30])
    doc = s.to_dict()
    back = MinMaxMedianScaler.from_dict(doc)
    np.testing.assert_array_equal(back.transform(X[30:]), s.transform(X[30:]))


def test_split_examples():
    ds = Dataset(np.arange(100.0)[:, None], np.arange(100))
    tr, va, te = split(ds, (0.15, 0.15), seed=1)
    assert (len(tr), len(va), len(te)) == (70, 15, 15)
    assert sorted(np.concatenate([tr.labels, va.labels, te.labels])) == list(range(100))
    again = split(ds, (0.15, 0.15), seed=1)
    np.testing.assert_array_equal(again[1].labels, va.labels)
    with pytest.raises(ConfigError):
        split(Dataset(np.zeros((5, 1)), np.zeros(5)), (0.05, 0.05))
    with pytest.raises(ConfigError):
        split(ds, (0.5, 0.5))


def test_synth():
    ds = synth("two_gaussians", n=200, noise=0.0, seed=0)
    assert LogisticRegression().fit(ds.features, ds.labels).score(ds.features, ds.labels) == 1.0
    ds = synth("sine_regression", n=50, noise=0.0, seed=2)
    np.testing.assert_array_equal(ds.labels, np.sin(2 * np.pi * ds.features[:, 0]))
    a, b = synth("two_moons_like", 100, 0.1, 5), synth("two_moons_like", 100, 0.1, 5)
    np.testing.assert_array_equal(a.features, b.features)
    assert np.bincount(a.labels).tolist() == [50, 50]
    with pytest.raises(ConfigError):
        synth("spirals", 100)
    with pytest.raises(ConfigError):
        synth("two_gaussians", 5)
