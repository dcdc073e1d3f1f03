import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from mixavg.ari import adjusted_rand_index
from mixavg.data_io import (DataError, Dataset, Partition, load_csv, partition_from_labels,
                            standardize, write_csv)


def test_iris_fixture_shape(iris):
    assert (iris.n, iris.p) == (150, 4)
    assert len(set(iris.labels)) == 3
    assert iris.feature_names == ("Sepal.Length", "Sepal.Width", "Petal.Length", "Petal.Width")


def test_minimal_file(tmp_path):
    f = tmp_path / "one.csv"
    f.write_text("x\n2.5\n")
    d = load_csv(f)
    assert (d.n, d.p) == (1, 1)
    assert d.labels is None
    assert d.values[0, 0] == 2.5


def test_non_numeric_cell_names_row_and_column(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("a,b\n1,2\n3,abc\n")
    with pytest.raises(DataError, match=r"row 3.*'b'"):
        load_csv(f)


@pytest.mark.parametrize("body, pattern", [
    ("a,b\n", "no data rows"),
    ("a,b\n1,nan\n", "non-finite"),
    ("a,b\n1\n", "fields"),
])
def test_load_errors(tmp_path, body, pattern):
    f = tmp_path / "x.csv"
    f.write_text(body)
    with pytest.raises(DataError, match=pattern):
        load_csv(f)


def test_missing_file_and_label_column(tmp_path):
    with pytest.raises(DataError, match="no such file"):
        load_csv(tmp_path / "nope.csv")
    f = tmp_path / "x.csv"
    f.write_text("a\n1\n")
    with pytest.raises(DataError, match="label column"):
        load_csv(f, "Species")


def test_standardize_examples():
    d = standardize(Dataset(np.array([[1.0], [2.0], [3.0]]), ("x",)))
    assert d.values.mean() == pytest.approx(0, abs=1e-15)
    assert d.values.std(ddof=1) == pytest.approx(1, abs=1e-15)
    again = standardize(d)
    np.testing.assert_allclose(again.values, d.values, atol=1e-12)
    with pytest.raises(DataError, match="constant.*: c"):
        standardize(Dataset(np.array([[1.0, 5.0], [2.0, 5.0], [4.0, 5.0]]), ("x", "c")))


@pytest.mark.parametrize("labels, expected, k", [
    (["a", "b", "a"], [1, 2, 1], 2),
    (["q", "q", "q"], [1, 1, 1], 1),
    (["x", "y", "z"], [1, 2, 3], 3),
])
def test_partition_from_labels(labels, expected, k):
    p = partition_from_labels(Dataset(np.zeros((len(labels), 1)), ("v",), np.array(labels, dtype=object)))
    assert p.assignments.tolist() == expected and p.k == k


def test_partition_requires_labels():
    with pytest.raises(DataError):
        partition_from_labels(Dataset(np.zeros((2, 1)), ("v",)))


def test_partition_rejects_out_of_range():
    with pytest.raises(ValueError):
        Partition(np.array([1, 3]), 2)


finite = st.floats(-1e300, 1e300, allow_nan=False, allow_infinity=False)


@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 4)), elements=finite))
def test_csv_round_trip_is_bit_faithful(tmp_path_factory, X):
    d = Dataset(X, tuple(f"c{j}" for j in range(X.shape[1])), np.array(["a"] * X.shape[0], dtype=object))
    path = tmp_path_factory.mktemp("rt") / "d.csv"
    write_csv(d, path)
    back = load_csv(path, "label")
    assert back.values.tobytes() == X.tobytes()
    assert list(back.labels) == list(d.labels)


@given(st.lists(st.integers(0, 4), min_size=2, max_size=40), st.permutations(range(5)))
def test_partition_invariant_to_renaming(raw, perm):
    names = np.array([f"n{v}" for v in raw], dtype=object)
    renamed = np.array([f"m{perm[v]}" for v in raw], dtype=object)
    a = Partition.from_labels(list(names))
    b = Partition.from_labels(list(renamed))
    assert adjusted_rand_index(a, b) == 1.0
