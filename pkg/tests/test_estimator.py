import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from datasmell import DataSmellDetector, Resources
from synth import write_csv


def frame():
    ages = [str(20 + i % 40) for i in range(99)] + ["999"]
    cities = ["us"] * 97 + ["US"] * 3
    return np.array([ages, cities], dtype=object).T


def test_params_round_trip():
    det = DataSmellDetector(preset="strict", density_threshold=0.2, detectors=["B-DUMMY"])
    params = det.get_params()
    assert params["preset"] == "strict" and params["detectors"] == ["B-DUMMY"]
    twin = clone(det)
    assert twin.get_params() == params
    assert not hasattr(twin, "report_")


def test_fit_and_transform_array():
    X = frame()
    det = DataSmellDetector().fit(X)
    assert det.n_features_in_ == 2 and det.n_rows_ == 100
    assert list(det.feature_names_in_) == ["col_0", "col_1"]
    assert det.smelly_columns_ == ["col_1"]
    flags = det.transform(None)
    assert flags.shape == (100, 2) and flags.dtype == bool
    assert flags[99, 0] and flags[:, 0].sum() == 1
    assert flags[:, 1].sum() == 3
    assert np.array_equal(det.fit_transform(X), flags)
    assert np.array_equal(det.transform(X), flags)


def test_mode_any_marks_dummy_column():
    det = DataSmellDetector(mode="any").fit(frame())
    assert det.smelly_columns_ == ["col_0", "col_1"]


def test_exclude_and_params():
    det = DataSmellDetector(exclude=["B-DUMMY", "US-CASING"], mode="any").fit(frame())
    assert det.smelly_columns_ == ["col_1"]
    det = DataSmellDetector(params={"B-DUMMY": {"repeat_min": 4}},
                            resources=Resources(dummy_lexicon=frozenset()), mode="any").fit(frame())
    assert "col_0" not in det.smelly_columns_


def test_dataframe_and_path(tmp_path):
    pd = pytest.importorskip("pandas")
    X = frame()
    df = pd.DataFrame({"age": X[:, 0], "city": X[:, 1]})
    df.loc[5, "age"] = None
    det = DataSmellDetector().fit(df)
    assert list(det.get_feature_names_out()) == ["age", "city"]
    assert det.column_reports_[0].non_missing_count == 99
    path = tmp_path / "f.csv"
    write_csv(path, ["age", "city"], [list(X[:, 0]), list(X[:, 1])])
    by_path = DataSmellDetector().fit(str(path))
    assert by_path.smelly_columns_ == ["city"]


def test_errors():
    det = DataSmellDetector()
    with pytest.raises(NotFittedError):
        det.transform(None)
    det.fit(frame())
    with pytest.raises(ValueError):
        det.transform(frame()[:, :1])
    with pytest.raises(ValueError):
        DataSmellDetector().fit(np.zeros((2, 2, 2)))
