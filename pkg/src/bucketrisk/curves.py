"""Disclosure curves and plot-ready CSV emission.

Two experiment drivers: worst-case disclosure as the number of knowledge
units k grows (implications vs. the weaker negated-atoms class), and least
worst-case disclosure across a synthetic bucket family as its entropy
varies. Output is exact: every point carries a rational, and the CSV keeps
numerator and denominator alongside the decimal.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence, TextIO, Union

from .engine import max_disclosure, max_disclosure_negated_atoms
from .errors import ValidationError
from .table import Bucketization, make_bucket, min_bucket_entropy

Source = Union[str, Path, TextIO]


@dataclass(frozen=True)
class CurvePoint:
    series: str
    x: Union[int, float]
    value: Fraction


def disclosure_vs_k(bucketization: Bucketization, k_max: int) -> list[CurvePoint]:
    """Worst-case disclosure for k = 0..k_max, for both knowledge classes."""
    if k_max < 0:
        raise ValidationError("k_max must be non-negative")
    points = [
        CurvePoint("implications", k, max_disclosure(bucketization, k).disclosure)
        for k in range(k_max + 1)
    ]
    points += [
        CurvePoint("negations", k, max_disclosure_negated_atoms(bucketization, k))
        for k in range(k_max + 1)
    ]
    return points


@dataclass(frozen=True)
class SkewedSingleBucketFamily:
    """Single-bucket family sweeping entropy by skewing one value's count.

    Member t (t = 0..per_value) holds per_value + (domain_size-1)*t copies of
    the first value and per_value - t of each other, so the population stays
    fixed while entropy falls from log2(domain_size) (uniform, t=0) to 0
    (pure, t=per_value). Along this family disclosure rises as entropy falls
    for every k, which an unconstrained equal-entropy family does not
    guarantee.
    """

    domain_size: int
    per_value: int

    def __post_init__(self):
        if self.domain_size < 1:
            raise ValidationError("domain_size must be >= 1")
        if self.per_value < 1:
            raise ValidationError("per_value must be >= 1")

    def members(self) -> Iterable[tuple[float, Bucketization]]:
        m, c = self.domain_size, self.per_value
        domain = tuple(f"v{i:03d}" for i in range(m))
        persons = tuple(f"p{j:04d}" for j in range(m * c))
        for t in range(c + 1):
            counts = [c + (m - 1) * t] + [c - t] * (m - 1)
            values = []
            for value, count in zip(domain, counts):
                values.extend([value] * count)
            bucket = make_bucket("all", persons, tuple(values))
            bucketization = Bucketization((bucket,), domain)
            yield min_bucket_entropy(bucketization), bucketization


def entropy_vs_disclosure(family, k_list: Sequence[int]) -> list[CurvePoint]:
    """Least worst-case disclosure at each entropy value, one series per k."""
    members = list(family.members())
    points = []
    for k in k_list:
        if k < 0:
            raise ValidationError("k must be non-negative")
        best: dict[float, Fraction] = {}
        for h, bucketization in members:
            value = max_disclosure(bucketization, k).disclosure
            if h not in best or value < best[h]:
                best[h] = value
        series = f"k={k}"
        points += [CurvePoint(series, h, v) for h, v in best.items()]
    return points


def _format_x(x) -> str:
    return repr(x) if isinstance(x, float) else str(x)


def _parse_x(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def emit_csv(points: Iterable[CurvePoint], destination: Source) -> None:
    """Write points as `series,x,num,den,decimal`, sorted, bit-exact."""
    ordered = sorted(points, key=lambda p: (p.series, p.x))
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["series", "x", "num", "den", "decimal"])
    for p in ordered:
        writer.writerow(
            [
                p.series,
                _format_x(p.x),
                p.value.numerator,
                p.value.denominator,
                repr(float(p.value)),
            ]
        )
    text = buffer.getvalue()
    if isinstance(destination, (str, Path)):
        Path(destination).write_text(text, encoding="utf-8")
    else:
        destination.write(text)


def read_csv(source: Source) -> list[CurvePoint]:
    """Parse emitted curve data back into exact points."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != ["series", "x", "num", "den", "decimal"]:
        raise ValidationError("unrecognized curve CSV header")
    points = []
    for row in reader:
        if not row:
            continue
        if len(row) != 5:
            raise ValidationError(f"malformed curve CSV row: {row!r}")
        series, x, num, den, _ = row
        points.append(CurvePoint(series, _parse_x(x), Fraction(int(num), int(den))))
    return points
