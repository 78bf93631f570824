"""Polynomial-time worst-case disclosure for implication-shaped knowledge.

The worst case over conjunctions of k basic implications is achieved by k
simple implications sharing one consequent atom A (the brute-force oracle
re-verifies this on random instances). For such knowledge,

    Pr(A | B and (A_i -> A for all i))  =  1 / (1 + r),
    r = Pr(not A and all not A_i | B) / Pr(A | B),

so maximizing disclosure means minimizing r over all choices of the k+1 atoms.
Two memoized dynamic programs do that:

* within one bucket: among atom sets whose per-person atom counts form a
  partition (k_0 >= k_1 >= ... >= 1), the minimum avoidance probability has a
  closed form using the bucket's most frequent values; the DP minimizes it
  over partitions.
* across buckets: distribute the k+1 atoms (one of which is the target A,
  always a most-frequent-value atom of its bucket) over the buckets,
  multiplying independent per-bucket factors.

All probabilities are exact rationals. Internally the DP works on
unnormalized (numerator, denominator) integer pairs compared by
cross-multiplication; ``None`` marks an infeasible state. Fractions appear
only at the public boundary.

Within-bucket tables are memoized per histogram (identical histograms share
one table, and re-running after swapping buckets re-evaluates nothing for
unchanged ones). The cache is module-global: see ``cache_info`` and
``clear_cache``. Functions are deterministic and safe for concurrent readers;
cache population is effectively atomic per entry under the GIL.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ValidationError
from .knowledge import Atom, BasicImplication, simple_implication
from .table import Bucket, Bucketization


def avoidance_probability(bucket: Bucket, parts: Sequence[int]) -> Fraction:
    """Smallest probability that a set of atoms with this shape all fail.

    ``parts`` gives per-person atom counts (non-increasing, each >= 1) for
    len(parts) distinct persons of the bucket. The minimum over placements
    sits at the most frequent values: person i carries atoms for the top
    parts[i] values, and the probability that every atom is false is

        product over i of (n_b - i - (top parts[i] counts)) / (n_b - i).

    A non-positive numerator means no consistent world remains; the factor is
    clamped to 0. Counts past the bucket's distinct values are implicitly 0.
    """
    n = bucket.size
    if len(parts) > n:
        raise ValidationError(f"{len(parts)} involved persons exceed bucket size {n}")
    if any(p < 1 for p in parts):
        raise ValidationError("each involved person needs >= 1 atom")
    if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
        raise ValidationError("per-person atom counts must be non-increasing")
    counts = bucket.counts
    value = Fraction(1)
    for i, p in enumerate(parts):
        numerator = n - i - sum(counts[:p])
        if numerator <= 0:
            return Fraction(0)
        value *= Fraction(numerator, n - i)
    return value


# ============================================================================
# Within-bucket dynamic program
# ============================================================================

class _BucketTable:
    """Memoized minimizer of the avoidance probability for one histogram.

    States are (person index, cap on this person's atom count, atoms left);
    person i may take 1..cap atoms (caps enforce the non-increasing partition
    shape) or the walk may stop. Stopping early never undercuts the exact-k
    minimum (growing the largest part only shrinks the value), so the result
    equals the minimum over partitions of exactly k atoms.
    """

    __slots__ = ("counts", "n", "_prefix", "memo", "choice", "evaluations")

    def __init__(self, counts: tuple[int, ...]):
        self.counts = counts
        self.n = sum(counts)
        prefix = [0]
        for c in counts:
            prefix.append(prefix[-1] + c)
        self._prefix = prefix
        self.memo: dict[tuple[int, int, int], tuple[int, int]] = {}
        self.choice: dict[tuple[int, int, int], int] = {}
        self.evaluations = 0

    def top_sum(self, j: int) -> int:
        """Sum of the j largest counts (values past the distinct ones count 0)."""
        prefix = self._prefix
        return prefix[j] if j < len(prefix) else prefix[-1]

    def minimize(self, i: int, cap: int, rem: int) -> tuple[int, int]:
        if rem == 0 or i >= self.n:
            return (1, 1)
        key = (i, cap, rem)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.evaluations += 1
        n = self.n
        denominator = n - i
        best_n, best_d = 1, 1
        best_choice = 0
        # descending so ties prefer concentrated shapes (fewer persons)
        for ki in range(min(cap, rem), 0, -1):
            numerator = n - i - self.top_sum(ki)
            if numerator <= 0:
                cand_n, cand_d = 0, 1
            else:
                sub_n, sub_d = self.minimize(i + 1, ki, rem - ki)
                cand_n = numerator * sub_n
                cand_d = denominator * sub_d
            if cand_n * best_d < best_n * cand_d:
                best_n, best_d, best_choice = cand_n, cand_d, ki
                if cand_n == 0:
                    break
        self.memo[key] = (best_n, best_d)
        self.choice[key] = best_choice
        return (best_n, best_d)

    def best_partition(self, k: int) -> tuple[int, ...]:
        """The minimizing per-person atom counts for ``minimize(0, k, k)``."""
        self.minimize(0, k, k)
        parts = []
        i, cap, rem = 0, k, k
        while rem > 0 and i < self.n:
            ki = self.choice.get((i, cap, rem), 0)
            if ki == 0:
                break  # stopped early: value already 0 with fewer atoms
            parts.append(ki)
            i, cap, rem = i + 1, ki, rem - ki
        return tuple(parts)


_TABLES: dict[tuple[int, ...], _BucketTable] = {}
_LAST_ACROSS_ENTRIES = 0


def _bucket_table(counts: tuple[int, ...]) -> _BucketTable:
    table = _TABLES.get(counts)
    if table is None:
        table = _TABLES[counts] = _BucketTable(counts)
    return table


def clear_cache() -> None:
    """Drop all memoized within-bucket tables."""
    _TABLES.clear()


@dataclass(frozen=True)
class EngineCacheInfo:
    """Snapshot of memoization state, for complexity and reuse measurements."""

    histograms: int
    within_entries: dict[tuple[int, ...], int]
    within_evaluations: int
    across_entries: int


def cache_info() -> EngineCacheInfo:
    return EngineCacheInfo(
        histograms=len(_TABLES),
        within_entries={c: len(t.memo) for c, t in _TABLES.items()},
        within_evaluations=sum(t.evaluations for t in _TABLES.values()),
        across_entries=_LAST_ACROSS_ENTRIES,
    )


def minimize_within_bucket(bucket: Bucket, k: int) -> tuple[Fraction, tuple[int, ...]]:
    """Minimum avoidance probability over k atoms in one bucket, with its shape.

    Returns the minimum over all valid per-person count partitions of
    ``avoidance_probability`` together with a minimizing partition (which may
    use fewer than k atoms only when the value is already 0).
    """
    if k < 0:
        raise ValidationError("k must be non-negative")
    table = _bucket_table(bucket.counts)
    value = table.minimize(0, k, k)
    return Fraction(*value), table.best_partition(k)


# ============================================================================
# Across-buckets dynamic program
# ============================================================================

@dataclass(frozen=True)
class Placement:
    """Where the optimizer put the atoms.

    ``atom_counts[i]`` is the number of antecedent atoms assigned to bucket i
    (the target atom excluded); the target atom lives in bucket
    ``target_bucket``.
    """

    target_bucket: int
    atom_counts: tuple[int, ...]


def minimize_across_buckets(
    bucketization: Bucketization, k: int
) -> tuple[Fraction, Placement]:
    """Minimum of r over all placements of the k+1 atoms, with the placement.

    Buckets are independent, so a placement's r is the product of per-bucket
    avoidance minima, times n_b/n_b(top value) for the target atom's bucket
    (the target is always a most-frequent-value atom there, which both
    belongs to the numerator's minimal atom set and maximizes the
    denominator). The DP sweeps buckets once; states are (bucket, atoms still
    to place, target placed yet?), infeasible states are None. All k atoms
    are always placed: every within-bucket factor is <= 1, so using fewer
    can never win (and the padding argument makes the two minima equal).
    """
    if k < 0:
        raise ValidationError("k must be non-negative")
    buckets = bucketization.buckets
    m = len(buckets)
    if m == 0:
        raise ValidationError("empty bucketization")

    wb: list[list[tuple[int, int]]] = []
    shape: list[tuple[int, int]] = []
    for b in buckets:
        table = _bucket_table(b.counts)
        wb.append([table.minimize(0, h, h) for h in range(k + 2)])
        shape.append((b.size, b.counts[0]))

    # base rows: past the last bucket, feasible iff nothing left to place and
    # the target was placed somewhere
    t_next: list[tuple[int, int] | None] = [(1, 1)] + [None] * k
    f_next: list[tuple[int, int] | None] = [None] * (k + 1)
    choice_t: list[bytes] = [b""] * m
    choice_f: list[bytes] = [b""] * m

    for i in range(m - 1, -1, -1):
        wbi = wb[i]
        nb, top = shape[i]
        t_row: list[tuple[int, int] | None] = [None] * (k + 1)
        f_row: list[tuple[int, int] | None] = [None] * (k + 1)
        ct = bytearray(k + 1)
        cf = bytearray(k + 1)
        for h in range(k + 1):
            # target already placed: just distribute h atoms
            bn = bd = None
            bch = 0
            for hp in range(h + 1):
                sub = t_next[h - hp]
                if sub is None:
                    continue
                wn, wd = wbi[hp]
                if wn == 0:
                    cn, cd = 0, 1
                elif hp == 0:
                    cn, cd = sub
                else:
                    cn = wn * sub[0]
                    cd = wd * sub[1]
                if bn is None or cn * bd < bn * cd:
                    bn, bd, bch = cn, cd, hp
                    if cn == 0:
                        break
            if bn is not None:
                t_row[h] = (bn, bd)
                ct[h] = bch
            # target not placed yet: it goes here (hp extra atoms alongside
            # it) or into a later bucket
            bn = bd = None
            bcf = 0
            for hp in range(h + 1):
                sub = t_next[h - hp]
                if sub is not None:
                    wn, wd = wbi[hp + 1]
                    cn = wn * nb * sub[0]
                    cd = wd * top * sub[1]
                    if bn is None or cn * bd < bn * cd:
                        bn, bd, bcf = cn, cd, hp * 2 + 1
                sub = f_next[h - hp]
                if sub is not None:
                    wn, wd = wbi[hp]
                    if wn == 0:
                        cn, cd = 0, 1
                    elif hp == 0:
                        cn, cd = sub
                    else:
                        cn = wn * sub[0]
                        cd = wd * sub[1]
                    if bn is None or cn * bd < bn * cd:
                        bn, bd, bcf = cn, cd, hp * 2
            if bn is not None:
                f_row[h] = (bn, bd)
                cf[h] = bcf
        t_next, f_next = t_row, f_row
        choice_t[i] = bytes(ct)
        choice_f[i] = bytes(cf)

    global _LAST_ACROSS_ENTRIES
    _LAST_ACROSS_ENTRIES = 2 * m * (k + 1)

    result = f_next[k]
    assert result is not None  # the target atom can always be placed
    atom_counts = [0] * m
    target_bucket = -1
    h = k
    placed = False
    for i in range(m):
        if not placed:
            code = choice_f[i][h]
            hp, here = code >> 1, code & 1
            atom_counts[i] = hp
            if here:
                target_bucket = i
                placed = True
        else:
            if h == 0:
                break
            hp = choice_t[i][h]
            atom_counts[i] = hp
        h -= hp
    return Fraction(*result), Placement(target_bucket, tuple(atom_counts))


# ============================================================================
# Reports and the negated-atoms baseline
# ============================================================================

@dataclass(frozen=True)
class DisclosureReport:
    """Worst-case disclosure with a checkable witness.

    ``disclosure`` = 1/(1 + ratio). The witness is exactly k simple
    implications, every one with consequent ``target`` (padded by repetition
    or by the vacuous target->target when the optimum needs fewer distinct
    atoms); feeding them to the exact oracle reproduces ``disclosure``.
    ``bucket_atom_counts[i]`` counts the atom slots the optimizer assigned to
    bucket i, the target atom's slot included.
    """

    disclosure: Fraction
    ratio: Fraction
    target: Atom
    antecedents: tuple[Atom, ...]
    bucket_atom_counts: tuple[int, ...]
    implications: tuple[BasicImplication, ...]


def _partition_atoms(
    bucket: Bucket, parts: Sequence[int], skip_first: bool
) -> list[Atom]:
    """Materialize a partition as atoms on the bucket's first persons.

    Person i carries the top parts[i] values. Indices past the distinct
    values have count 0: such atoms change nothing (the closed form adds 0
    and the implication is vacuous), so they are dropped. ``skip_first``
    omits person 0's top-value atom (the target atom).
    """
    atoms = []
    for person_index, p in enumerate(parts):
        person = bucket.members[person_index]
        for j in range(p):
            if skip_first and person_index == 0 and j == 0:
                continue
            value = bucket.value_at(j)
            if value is not None:
                atoms.append(Atom(person, value))
    return atoms


def max_disclosure(bucketization: Bucketization, k: int) -> DisclosureReport:
    """Worst-case posterior over conjunctions of k implications, with witness."""
    ratio, placement = minimize_across_buckets(bucketization, k)
    disclosure = Fraction(
        ratio.denominator, ratio.numerator + ratio.denominator
    )
    buckets = bucketization.buckets
    target_bucket = buckets[placement.target_bucket]
    target = Atom(target_bucket.members[0], target_bucket.histogram[0][0])

    antecedents: list[Atom] = []
    for i, b in enumerate(buckets):
        budget = placement.atom_counts[i]
        if i == placement.target_bucket:
            parts = _bucket_table(b.counts).best_partition(budget + 1)
            antecedents.extend(_partition_atoms(b, parts, skip_first=True))
        elif budget:
            parts = _bucket_table(b.counts).best_partition(budget)
            antecedents.extend(_partition_atoms(b, parts, skip_first=False))

    implications = [simple_implication(a, target) for a in antecedents]
    while len(implications) < k:
        # a repeated conjunct (or target->target) changes nothing
        implications.append(
            implications[0] if implications else simple_implication(target, target)
        )
    counts = list(placement.atom_counts)
    counts[placement.target_bucket] += 1
    return DisclosureReport(
        disclosure=disclosure,
        ratio=ratio,
        target=target,
        antecedents=tuple(i.antecedents[0] for i in implications),
        bucket_atom_counts=tuple(counts),
        implications=tuple(implications),
    )


def max_disclosure_negated_atoms(bucketization: Bucketization, k: int) -> Fraction:
    """Worst-case posterior when the k knowledge units are negated atoms.

    The worst case concentrates every negation on one person: exclude u-1 of
    the bucket's top u values (u = min(k+1, distinct values)) and target the
    remaining one. Verified against the exhaustive negated-atoms search on
    random instances rather than proved.
    """
    if k < 0:
        raise ValidationError("k must be non-negative")
    best = Fraction(0)
    for b in bucketization.buckets:
        counts = b.counts
        n = b.size
        u = min(k + 1, len(counts))
        top_u = sum(counts[:u])
        for m in range(u):
            value = Fraction(counts[m], n - top_u + counts[m])
            if value > best:
                best = value
    return best
