import numpy as np
import pytest

from evotree.data import (CONTINUOUS, NOMINAL, AttributeSchema, DataError, Dataset,
                          generate_multiplexor, generate_parity, load_csv, split_folds)


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_sample_schema(sample):
    assert sample.n == 4
    assert [a.name for a in sample.attributes] == ["A_1", "A_2", "A_3"]
    assert all(a.kind == NOMINAL and set(a.values) == {"N", "Y"} for a in sample.attributes)
    assert sample.class_values == ("Y", "N")
    assert [i.id for i in sample.instances] == [0, 1, 2, 3]
    assert sample.instance(0).values == ("N", "N", "Y") and sample.instance(0).cls == "Y"


def test_header_only_is_empty_data_section(tmp_path):
    with pytest.raises(DataError, match="empty data section"):
        load_csv(write(tmp_path, "a,b\n"))


def test_integer_column_becomes_continuous(tmp_path):
    ds = load_csv(write(tmp_path, "x,c\n3,a\n7,b\n5,a\n"))
    a = ds.attributes[0]
    assert a.kind == CONTINUOUS and (a.min, a.max) == (3, 7)
    assert ds.X[:, 0].tolist() == [3, 7, 5]


@pytest.mark.parametrize("text, msg", [
    ("a,b\n1,x\n2\n", "ragged"),
    ("a,b\n1,x\n2,x\n", "2 distinct class"),
    ("a,b\n1,x\n,y\n", "blank cell"),
    ("a,b\n1.5,x\n2.5,y\n", "real-valued"),
    ("a\nx\ny\n", "2 columns"),
])
def test_load_errors(tmp_path, text, msg):
    with pytest.raises(DataError, match=msg):
        load_csv(write(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(DataError, match="missing file"):
        load_csv(tmp_path / "nope.csv")


def test_class_column_and_overrides(tmp_path):
    p = write(tmp_path, "c,x,y\na,1,p\nb,2,q\na,3,p\n")
    ds = load_csv(p, class_column="c", overrides={"x": "nominal"})
    assert ds.class_values == ("a", "b")
    assert ds.attributes[0].kind == NOMINAL and ds.attributes[0].values == ("1", "2", "3")
    assert load_csv(p, class_column=0).class_values == ("a", "b")
    with pytest.raises(DataError):
        load_csv(p, class_column="zz")
    with pytest.raises(DataError):
        load_csv(p, overrides={"zz": "nominal"})


def test_schema_invariants():
    with pytest.raises(DataError):
        AttributeSchema.nominal("a", [])
    with pytest.raises(DataError):
        AttributeSchema.nominal("a", ["x", "x"])
    with pytest.raises(DataError):
        AttributeSchema.continuous("a", 3, 2)
    attrs = (AttributeSchema.continuous("a", 0, 2),)
    with pytest.raises(DataError, match="outside its schema"):
        Dataset(attrs, ("p", "q"), np.array([[3]]), np.array([0]))
    with pytest.raises(DataError):
        Dataset(attrs, ("p",), np.array([[1]]), np.array([0]))


def test_multiplexor():
    ds = generate_multiplexor(1)
    assert len(ds.attributes) == 3 and ds.n == 8
    row = next(i for i in ds.instances if i.values == ("0", "1", "0"))
    assert row.cls == "1"
    assert generate_multiplexor(2).n == 64 and len(generate_multiplexor(2).attributes) == 6
    ds3 = generate_multiplexor(3)
    assert ds3.n == 2048 and len({tuple(r) for r in ds3.X.tolist()}) == 2048
    with pytest.raises(DataError):
        generate_multiplexor(0)
    with pytest.raises(DataError):
        generate_multiplexor(5)


def test_multiplexor_class_is_addressed_bit():
    ds = generate_multiplexor(2)
    for row, c in zip(ds.X.tolist(), ds.y.tolist()):
        assert c == row[2 + 2 * row[0] + row[1]]


def test_parity():
    assert generate_parity(1).y.tolist() == [0, 1]
    assert generate_parity(2).y.tolist() == [0, 1, 1, 0]
    ds = generate_parity(3)
    assert ds.n == 8 and ds.y[ds.X.tolist().index([1, 1, 1])] == 1
    with pytest.raises(DataError):
        generate_parity(0)
    with pytest.raises(DataError):
        generate_parity(17)


def test_folds_partition():
    ds = generate_parity(2)
    folds = split_folds(ds, 2, seed=1)
    tests = [set(t.tolist()) for _, t in folds]
    assert all(len(t) == 2 for t in tests)
    assert tests[0].isdisjoint(tests[1]) and tests[0] | tests[1] == {0, 1, 2, 3}
    for train, test in folds:
        assert set(train.tolist()) == {0, 1, 2, 3} - set(test.tolist())
    assert all(len(t) == 1 for _, t in split_folds(ds, 4, seed=1))


def test_folds_deterministic_and_balanced():
    ds = generate_multiplexor(2)
    a = split_folds(ds, 5, seed=9)
    b = split_folds(ds, 5, seed=9)
    assert all(np.array_equal(x[1], y[1]) and np.array_equal(x[0], y[0]) for x, y in zip(a, b))
    sizes = [len(t) for _, t in a]
    assert max(sizes) - min(sizes) <= 1 and sum(sizes) == ds.n
    with pytest.raises(DataError):
        split_folds(ds, 65, seed=0)
    with pytest.raises(DataError):
        split_folds(ds, 1, seed=0)


def test_csv_round_trip(tmp_path):
    ds = generate_multiplexor(2)
    p = tmp_path / "mux.csv"
    ds.to_csv(p)
    back = load_csv(p, overrides={a.name: "nominal" for a in ds.attributes})
    assert back.attributes == ds.attributes and back.class_values == ds.class_values
    assert np.array_equal(back.X, ds.X) and np.array_equal(back.y, ds.y)


def test_subset_renumbers():
    ds = generate_parity(3)
    sub = ds.subset([5, 1])
    assert sub.n == 2 and sub.X.tolist() == [ds.X[5].tolist(), ds.X[1].tolist()]
