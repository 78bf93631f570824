"""Generalization hierarchies, the bucketization order, and safety search.

A hierarchy gives each quasi-identifier attribute a chain of levels: level 0
is the raw value, higher levels map raws to coarser labels, and each level
must refine the next (values sharing a label keep sharing one level up).
A lattice node picks one level per attribute; applying it buckets the table
by the generalized tuples. Coarser nodes can only merge buckets, so
worst-case disclosure never increases going up, which is what makes binary
search on chains and bottom-up minimal-node search correct.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Sequence, TextIO, Union

from .engine import max_disclosure
from .errors import BudgetExceededError, ValidationError
from .table import Bucketization, Table, make_bucket

Source = Union[str, Path, TextIO]
Node = tuple[int, ...]

SUPPRESSED = "*"

# a declared level is "suppress", "identity", or a raw -> label map
Level = Union[str, dict]


@dataclass(frozen=True)
class Hierarchy:
    """Per-attribute generalization levels, level 0 (identity) implicit.

    ``levels[attribute]`` holds levels 1..L in order; each entry is a
    raw-to-label dict, the keyword "suppress" (everything becomes "*"), or
    "identity". Attribute order fixes the meaning of node vectors.
    """

    attributes: tuple[str, ...]
    levels: dict[str, tuple[Level, ...]]

    def __post_init__(self):
        if not self.attributes:
            raise ValidationError("hierarchy needs at least one attribute")
        if set(self.levels) != set(self.attributes):
            raise ValidationError("levels and attributes disagree")
        for attribute in self.attributes:
            declared = self.levels[attribute]
            key_sets = [frozenset(lv) for lv in declared if isinstance(lv, dict)]
            if key_sets and any(ks != key_sets[0] for ks in key_sets):
                raise ValidationError(
                    f"attribute {attribute!r}: levels disagree on the raw values"
                )
            for depth in range(len(declared) - 1):
                self._check_refines(attribute, depth + 1)

    def _check_refines(self, attribute: str, depth: int) -> None:
        # equal labels at `depth` must stay equal at depth+1
        lower = self.levels[attribute][depth - 1]
        if not isinstance(lower, dict):
            return  # suppress: one group, any map above keeps it together
            # identity: groups are singletons, trivially refined
        groups: dict[str, list[str]] = {}
        for raw, label in lower.items():
            groups.setdefault(label, []).append(raw)
        for label, raws in groups.items():
            above = {self.label(attribute, depth + 1, raw) for raw in raws}
            if len(above) > 1:
                raise ValidationError(
                    f"attribute {attribute!r}: values labeled {label!r} at level "
                    f"{depth} split apart at level {depth + 1}"
                )

    def max_level(self, attribute: str) -> int:
        return len(self.levels[attribute])

    def label(self, attribute: str, level: int, raw: str) -> str:
        """Generalize one raw value; unknown raws at a map level are errors."""
        if level == 0:
            return raw
        spec = self.levels[attribute][level - 1]
        if spec == "suppress":
            return SUPPRESSED
        if spec == "identity":
            return raw
        try:
            return spec[raw]
        except KeyError:
            raise ValidationError(
                f"attribute {attribute!r}: value {raw!r} missing from level {level}"
            ) from None

    def bottom(self) -> Node:
        return (0,) * len(self.attributes)

    def top(self) -> Node:
        return tuple(self.max_level(a) for a in self.attributes)

    def nodes(self) -> Iterable[Node]:
        """Every lattice node, in no particular order."""
        return itertools.product(
            *(range(self.max_level(a) + 1) for a in self.attributes)
        )

    def size(self) -> int:
        total = 1
        for a in self.attributes:
            total *= self.max_level(a) + 1
        return total

    def check_node(self, node: Sequence[int]) -> Node:
        if len(node) != len(self.attributes):
            raise ValidationError(
                f"node has {len(node)} components, hierarchy has "
                f"{len(self.attributes)} attributes"
            )
        for attribute, level in zip(self.attributes, node):
            if not 0 <= level <= self.max_level(attribute):
                raise ValidationError(
                    f"level {level} out of range for attribute {attribute!r} "
                    f"(0..{self.max_level(attribute)})"
                )
        return tuple(node)


def load_hierarchy(source: Source) -> Hierarchy:
    """Read a hierarchy from JSON: {attribute: [level1, level2, ...]}.

    Each level is an object mapping raw values to labels, or one of the
    keywords "suppress" and "identity". Level 0 is implicit.
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"hierarchy is not valid JSON: {exc}") from None
    if not isinstance(data, dict) or not data:
        raise ValidationError("hierarchy must be a non-empty JSON object")
    levels: dict[str, tuple[Level, ...]] = {}
    for attribute, declared in data.items():
        if not isinstance(declared, list):
            raise ValidationError(
                f"attribute {attribute!r}: expected a list of levels"
            )
        cleaned: list[Level] = []
        for index, level in enumerate(declared, start=1):
            if level in ("suppress", "identity"):
                cleaned.append(level)
            elif isinstance(level, dict):
                for raw, label in level.items():
                    if not isinstance(raw, str) or not isinstance(label, str):
                        raise ValidationError(
                            f"attribute {attribute!r} level {index}: raw values "
                            "and labels must be strings"
                        )
                cleaned.append(dict(level))
            else:
                raise ValidationError(
                    f"attribute {attribute!r} level {index}: expected a map, "
                    "'suppress', or 'identity'"
                )
        levels[attribute] = tuple(cleaned)
    return Hierarchy(tuple(data), levels)


def apply(table: Table, hierarchy: Hierarchy, node: Sequence[int]) -> Bucketization:
    """Bucket the table by generalized quasi-identifier tuples."""
    node = hierarchy.check_node(node)
    for attribute in hierarchy.attributes:
        if attribute not in table.attributes:
            raise ValidationError(
                f"hierarchy attribute {attribute!r} not in table"
            )
    groups: dict[tuple[str, ...], list] = {}
    for record in table.records:
        key = tuple(
            hierarchy.label(attribute, level, record.values[attribute])
            for attribute, level in zip(hierarchy.attributes, node)
        )
        groups.setdefault(key, []).append(record)
    used: set[str] = set()
    buckets = []
    for key, records in groups.items():
        bucket_id = "|".join(key)
        while bucket_id in used:  # label collision across distinct keys
            bucket_id += "+"
        used.add(bucket_id)
        buckets.append(
            make_bucket(
                bucket_id,
                tuple(r.person_id for r in records),
                tuple(r.sensitive for r in records),
            )
        )
    return Bucketization(tuple(buckets), table.domain)


def leq(finer: Bucketization, coarser: Bucketization) -> bool:
    """True iff every coarser bucket is a union of finer buckets."""
    if finer.person_ids != coarser.person_ids:
        raise ValidationError("bucketizations cover different person sets")
    home = {
        person: bucket.bucket_id
        for bucket in coarser.buckets
        for person in bucket.members
    }
    for bucket in finer.buckets:
        targets = {home[person] for person in bucket.members}
        if len(targets) > 1:
            return False
    return True


@dataclass(frozen=True)
class SafetyThreshold:
    """Disclosure must stay strictly below c against k knowledge units."""

    c: Fraction
    k: int

    def __post_init__(self):
        if not 0 <= self.c <= 1:
            raise ValidationError("threshold c must be within [0, 1]")
        if self.k < 0:
            raise ValidationError("threshold k must be non-negative")


def is_safe(bucketization: Bucketization, threshold: SafetyThreshold) -> bool:
    return max_disclosure(bucketization, threshold.k).disclosure < threshold.c


def binary_search_chain(
    table: Table,
    hierarchy: Hierarchy,
    chain: Iterable[Sequence[int]],
    threshold: SafetyThreshold,
) -> Node | None:
    """Least safe node on a totally ordered chain, or None if even the top fails.

    Safety is monotone going up the lattice, so the safe nodes form a suffix
    of the chain and binary search finds its first element with O(log) safety
    evaluations.
    """
    nodes = sorted(
        {hierarchy.check_node(n) for n in chain},
        key=lambda n: (sum(n), n),
    )
    if not nodes:
        raise ValidationError("empty chain")
    for below, above in zip(nodes, nodes[1:]):
        if any(b > a for b, a in zip(below, above)):
            raise ValidationError(
                f"chain nodes {below} and {above} are not ordered"
            )
    safe = lambda node: is_safe(apply(table, hierarchy, node), threshold)
    low, high = 0, len(nodes) - 1
    if not safe(nodes[high]):
        return None
    while low < high:
        mid = (low + high) // 2
        if safe(nodes[mid]):
            high = mid
        else:
            low = mid + 1
    return nodes[low]


def all_minimal_safe(
    table: Table,
    hierarchy: Hierarchy,
    threshold: SafetyThreshold,
    *,
    budget: int = 100_000,
) -> list[Node]:
    """Every safe node with no safe node strictly below it.

    Sweeps the lattice bottom-up by total generalization height. A node
    dominating an already-found safe node is skipped: whatever its safety, it
    cannot be minimal. The result is an antichain, sorted by (height, vector).
    """
    size = hierarchy.size()
    if size > budget:
        raise BudgetExceededError(size, budget)
    order = sorted(hierarchy.nodes(), key=lambda n: (sum(n), n))
    minimal: list[Node] = []
    for node in order:
        if any(all(n >= m for n, m in zip(node, found)) for found in minimal):
            continue
        if is_safe(apply(table, hierarchy, node), threshold):
            minimal.append(node)
    return minimal


def height_utility(node: Node, table=None, hierarchy=None):
    """Default utility cost: total generalization height, ties lexicographic."""
    return (sum(node), tuple(node))


def select_by_utility(
    nodes: Sequence[Node],
    table: Table | None = None,
    hierarchy: Hierarchy | None = None,
    metric: Callable | None = None,
) -> Node:
    """Pick the candidate with the least utility cost (default: height)."""
    if not nodes:
        raise ValidationError("no candidate nodes")
    cost = metric or height_utility
    return min(nodes, key=lambda n: cost(n, table, hierarchy))
