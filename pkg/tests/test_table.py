import io
import math

import pytest
from hypothesis import given, strategies as st

from bucketrisk import (
    Bucketization,
    ValidationError,
    dump_table,
    load_table,
    make_bucket,
    min_bucket_entropy,
    partition,
    read_assignment,
    read_domain,
)
from conftest import DATA


def test_demo_table_shape(demo_table):
    assert demo_table.attributes == ("Zip", "Age", "Sex")
    assert demo_table.sensitive_attribute == "Disease"
    assert len(demo_table.records) == 10
    assert demo_table.person_ids[0] == "Bob"
    assert demo_table.domain == (
        "Breast Cancer",
        "Flu",
        "Heart Disease",
        "Lung Cancer",
        "Mumps",
        "Ovarian Cancer",
    )
    assert demo_table.by_id["Ed"].sensitive == "Lung Cancer"
    assert demo_table.by_id["Ed"].values == {"Zip": "14850", "Age": "27", "Sex": "M"}


def test_demo_partition_by_sex(demo_bucketization):
    male, female = demo_bucketization.buckets
    assert male.bucket_id == "M"
    assert male.members == ("Bob", "Charlie", "Dave", "Ed", "Frank")
    assert male.histogram == (("Flu", 2), ("Lung Cancer", 2), ("Mumps", 1))
    assert female.histogram == (
        ("Flu", 2),
        ("Breast Cancer", 1),
        ("Heart Disease", 1),
        ("Ovarian Cancer", 1),
    )
    assert demo_bucketization.bucket_of_person("Karen").bucket_id == "F"


def test_demo_min_entropy(demo_bucketization):
    # male bucket with distribution (2/5, 2/5, 1/5) is the minimum
    assert abs(min_bucket_entropy(demo_bucketization) - (math.log2(5) - 0.8)) < 1e-12


def test_pure_bucket_entropy_is_zero():
    b = Bucketization((make_bucket("b", ["p0", "p1"], ["a", "a"]),), ("a",))
    assert min_bucket_entropy(b) == 0.0
    assert not str(min_bucket_entropy(b)).startswith("-")


def test_default_person_id_is_row_index():
    t = load_table(io.StringIO("S,X\nv,1\nw,2\n"), "S")
    assert t.person_ids == ("0", "1")
    assert t.attributes == ("X",)


def test_extra_domain_merges_sorted():
    t = load_table(io.StringIO("S\nb\n"), "S", extra_domain=("c", "a"))
    assert t.domain == ("a", "b", "c")


def test_load_table_errors():
    with pytest.raises(ValidationError):
        load_table(io.StringIO("A,B\nx,y\n"), "S")
    with pytest.raises(ValidationError):
        load_table(io.StringIO("S\nx\n"), "S", id_column="Name")
    with pytest.raises(ValidationError):
        load_table(io.StringIO("S,Name\nx,p\ny,p\n"), "S", id_column="Name")
    with pytest.raises(ValidationError):
        load_table(io.StringIO("S\n"), "S")
    with pytest.raises(ValidationError):
        load_table(io.StringIO(""), "S")
    with pytest.raises(ValidationError):
        load_table(io.StringIO("S,X\nv\n"), "S")  # short row


def test_partition_modes(demo_table):
    with pytest.raises(ValidationError):
        partition(demo_table)
    with pytest.raises(ValidationError):
        partition(demo_table, assignment={"Bob": "x"}, by=("Sex",))
    with pytest.raises(ValidationError):
        partition(demo_table, by=("NoSuch",))
    single = partition(demo_table, by=())
    assert len(single.buckets) == 1
    assert single.buckets[0].size == 10


def test_partition_assignment_matches_group_by(demo_table, demo_bucketization):
    assignment = read_assignment(DATA / "clinic-partition.tsv")
    explicit = partition(demo_table, assignment=assignment)
    by_attr = {b.bucket_id: frozenset(b.members) for b in explicit.buckets}
    expected = {b.bucket_id: frozenset(b.members) for b in demo_bucketization.buckets}
    assert by_attr == expected


def test_partition_assignment_errors(demo_table):
    complete = {p: "x" for p in demo_table.person_ids}
    with pytest.raises(ValidationError):
        partition(demo_table, assignment={"Bob": "x"})  # others missing
    with pytest.raises(ValidationError):
        partition(demo_table, assignment={**complete, "Nobody": "x"})


def test_read_assignment_rejects_duplicates():
    with pytest.raises(ValidationError):
        read_assignment(io.StringIO("p\tb1\np\tb2\n"))


def test_read_domain():
    assert read_domain(io.StringIO("x\n\ny\n")) == ("x", "y")


def test_dump_table_roundtrip(demo_table):
    text = dump_table(demo_table)
    again = load_table(io.StringIO(text), "Disease", id_column="id")
    assert again.person_ids == demo_table.person_ids
    assert again.domain == demo_table.domain
    for r1, r2 in zip(demo_table.records, again.records):
        assert r1.values == r2.values and r1.sensitive == r2.sensitive
    assert dump_table(again) == text


def test_bucket_validation():
    with pytest.raises(ValidationError):
        make_bucket("b", [], [])
    with pytest.raises(ValidationError):
        make_bucket("b", ["p0"], ["a", "b"])
    b = make_bucket("b", ["p0", "p1", "p2"], ["b", "a", "b"])
    assert b.histogram == (("b", 2), ("a", 1))
    assert b.count("a") == 1 and b.count("zzz") == 0
    assert b.value_at(0) == "b" and b.value_at(5) is None


def test_bucketization_validation():
    b0 = make_bucket("b", ["p0"], ["a"])
    with pytest.raises(ValidationError):
        Bucketization((b0, make_bucket("b", ["p1"], ["a"])), ("a",))  # dup id
    with pytest.raises(ValidationError):
        Bucketization((b0, make_bucket("c", ["p0"], ["a"])), ("a",))  # dup person
    one = Bucketization((b0,), ("a",))
    with pytest.raises(ValidationError):
        one.bucket_of_person("ghost")
    with pytest.raises(KeyError):
        one.bucket("nope")


@given(
    st.lists(
        st.sampled_from(["a", "b", "c", "d"]), min_size=1, max_size=12
    )
)
def test_histogram_sorted_and_covering(values):
    b = make_bucket("b", [f"p{i}" for i in range(len(values))], values)
    counts = [c for _, c in b.histogram]
    assert sum(counts) == len(values)
    assert all(counts[i] >= counts[i + 1] for i in range(len(counts) - 1))
    for (v1, c1), (v2, c2) in zip(b.histogram, b.histogram[1:]):
        if c1 == c2:
            assert v1 < v2
    assert {v for v, _ in b.histogram} == set(values)
