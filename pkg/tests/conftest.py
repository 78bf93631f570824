from pathlib import Path

import pytest

from bucketrisk import load_table, partition

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def demo_table():
    return load_table(DATA / "clinic.csv", "Disease", id_column="Name")


@pytest.fixture(scope="session")
def demo_bucketization(demo_table):
    return partition(demo_table, by=("Sex",))
