"""Command-line interface.

Subcommands: disclose (worst-case disclosure of a bucketized table), oracle
(exact posterior for explicit knowledge), anonymize (minimal safe
generalizations), curve-k and curve-entropy (plot-ready CSV series).

Exit codes: 0 success, 2 validation or parse error, 3 enumeration budget
exceeded, 4 no safe generalization found.
"""

from __future__ import annotations

import functools
import random
import sys
from fractions import Fraction
from pathlib import Path

import click

from .curves import (
    SkewedSingleBucketFamily,
    disclosure_vs_k,
    emit_csv,
    entropy_vs_disclosure,
)
from .engine import max_disclosure, max_disclosure_negated_atoms
from .errors import BucketRiskError, BudgetExceededError, ValidationError
from .knowledge import Knowledge, format_knowledge, parse_atom, parse_knowledge
from .lattice import (
    SafetyThreshold,
    all_minimal_safe,
    binary_search_chain,
    load_hierarchy,
    select_by_utility,
)
from .oracle import DEFAULT_BUDGET, exact_posterior
from .table import Table, load_table, partition, read_assignment, read_domain


def _fmt(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator} ({float(value)!r})"


def handles_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except BudgetExceededError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)
        except BucketRiskError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


@click.group()
@click.option("--table", "table_path", type=click.Path(), help="input CSV table")
@click.option("--sensitive", help="name of the sensitive column")
@click.option("--id", "id_column", help="identifier column (default: row index)")
@click.option(
    "--partition",
    "partition_path",
    type=click.Path(),
    help="person-to-bucket assignment file (tab separated)",
)
@click.option(
    "--domain",
    "domain_path",
    type=click.Path(),
    help="extra sensitive values, one per line, beyond those in the table",
)
@click.option(
    "--budget",
    type=int,
    default=DEFAULT_BUDGET,
    show_default=True,
    help="largest enumeration the exact oracle or lattice search may attempt",
)
@click.option("--out", "out_path", type=click.Path(), help="write output here instead of stdout")
@click.pass_context
def main(ctx, table_path, sensitive, id_column, partition_path, domain_path, budget, out_path):
    """Worst-case disclosure of sensitive values in bucketized tables."""
    ctx.obj = {
        "table_path": table_path,
        "sensitive": sensitive,
        "id_column": id_column,
        "partition_path": partition_path,
        "domain_path": domain_path,
        "budget": budget,
        "out_path": out_path,
    }


def _load_table(obj) -> Table:
    if not obj["table_path"]:
        raise ValidationError("--table is required for this command")
    if not obj["sensitive"]:
        raise ValidationError("--sensitive is required for this command")
    extra = ()
    if obj["domain_path"]:
        extra = read_domain(obj["domain_path"])
    return load_table(
        obj["table_path"],
        obj["sensitive"],
        id_column=obj["id_column"],
        extra_domain=extra,
    )


def _bucketize(obj, table: Table, group_by: str | None):
    if obj["partition_path"] and group_by:
        raise ValidationError("use either --partition or --group-by, not both")
    if obj["partition_path"]:
        return partition(table, assignment=read_assignment(obj["partition_path"]))
    if group_by:
        columns = tuple(c.strip() for c in group_by.split(",") if c.strip())
        return partition(table, by=columns)
    return partition(table, by=())


def _emit_text(obj, lines) -> None:
    text = "\n".join(lines) + "\n"
    if obj["out_path"]:
        Path(obj["out_path"]).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _emit_points(obj, points) -> None:
    if obj["out_path"]:
        emit_csv(points, obj["out_path"])
    else:
        emit_csv(points, sys.stdout)


@main.command()
@click.option("--k", type=int, required=True, help="number of knowledge units")
@click.option(
    "--class",
    "knowledge_class",
    type=click.Choice(["implications", "negations"]),
    default="implications",
    show_default=True,
)
@click.option("--witness", is_flag=True, help="also print a worst-case knowledge formula")
@click.option("--group-by", help="bucket by these comma-separated columns")
@click.pass_obj
@handles_errors
def disclose(obj, k, knowledge_class, witness, group_by):
    """Worst-case posterior any attacker with k knowledge units can reach."""
    bucketization = _bucketize(obj, _load_table(obj), group_by)
    lines = []
    if knowledge_class == "negations":
        if witness:
            raise ValidationError("--witness requires --class implications")
        value = max_disclosure_negated_atoms(bucketization, k)
        lines.append(f"disclosure: {_fmt(value)}")
    else:
        report = max_disclosure(bucketization, k)
        lines.append(f"disclosure: {_fmt(report.disclosure)}")
        if witness:
            lines.append(f"target: {report.target}")
            if report.implications:
                lines.append("knowledge:")
                lines.extend(str(i) for i in report.implications)
    _emit_text(obj, lines)


@main.command()
@click.option(
    "--knowledge",
    "knowledge_path",
    type=click.Path(),
    help="knowledge file, one implication per line (default: none)",
)
@click.option("--target", required=True, help="atom to evaluate, e.g. 'Ed=Flu'")
@click.option("--group-by", help="bucket by these comma-separated columns")
@click.pass_obj
@handles_errors
def oracle(obj, knowledge_path, target, group_by):
    """Exact posterior of one atom given explicit knowledge, by enumeration."""
    table = _load_table(obj)
    bucketization = _bucketize(obj, table, group_by)
    if knowledge_path:
        knowledge = parse_knowledge(
            Path(knowledge_path).read_text(encoding="utf-8"), table
        )
    else:
        knowledge = Knowledge()
    atom = parse_atom(target)
    value = exact_posterior(bucketization, knowledge, atom, budget=obj["budget"])
    _emit_text(obj, [f"posterior: {_fmt(value)}"])


def _parse_threshold(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"cannot parse threshold {text!r}") from None


def _parse_chain(spec: str, hierarchy) -> list[tuple[int, ...]]:
    """Build a chain from 'Age=0..5,Sex=0..1': raise attributes left to right."""
    ranges = []
    for part in spec.split(","):
        part = part.strip()
        if "=" not in part or ".." not in part.split("=", 1)[1]:
            raise ValidationError(
                f"chain component {part!r} is not of the form attr=lo..hi"
            )
        attribute, bounds = part.split("=", 1)
        attribute = attribute.strip()
        if attribute not in hierarchy.attributes:
            raise ValidationError(f"unknown chain attribute {attribute!r}")
        low_text, high_text = bounds.split("..", 1)
        try:
            low, high = int(low_text), int(high_text)
        except ValueError:
            raise ValidationError(f"bad level range in {part!r}") from None
        if low > high:
            raise ValidationError(f"empty level range in {part!r}")
        ranges.append((attribute, low, high))
    index = {a: i for i, a in enumerate(hierarchy.attributes)}
    current = [0] * len(hierarchy.attributes)
    for attribute, low, _ in ranges:
        current[index[attribute]] = low
    chain = [tuple(current)]
    for attribute, low, high in ranges:
        for level in range(low + 1, high + 1):
            current[index[attribute]] = level
            chain.append(tuple(current))
    return chain


@main.command()
@click.option(
    "--hierarchy",
    "hierarchy_path",
    type=click.Path(),
    required=True,
    help="generalization hierarchy JSON",
)
@click.option("--c", "c_text", required=True, help="safety threshold, e.g. 7/10")
@click.option("--k", type=int, required=True, help="attacker knowledge units")
@click.option("--all-minimal", is_flag=True, help="search the whole lattice")
@click.option("--chain", "chain_spec", help="binary-search this chain, e.g. Age=0..5,Sex=0..1")
@click.option(
    "--utility",
    type=click.Choice(["height"]),
    default="height",
    show_default=True,
    help="how to pick among minimal safe nodes",
)
@click.pass_obj
@handles_errors
def anonymize(obj, hierarchy_path, c_text, k, all_minimal, chain_spec, utility):
    """Find generalizations keeping worst-case disclosure below c."""
    if all_minimal == bool(chain_spec):
        raise ValidationError("use exactly one of --all-minimal and --chain")
    table = _load_table(obj)
    hierarchy = load_hierarchy(hierarchy_path)
    threshold = SafetyThreshold(_parse_threshold(c_text), k)

    def describe(node) -> str:
        return ",".join(
            f"{a}={level}" for a, level in zip(hierarchy.attributes, node)
        )

    if all_minimal:
        minimal = all_minimal_safe(table, hierarchy, threshold, budget=obj["budget"])
        if not minimal:
            click.echo("no safe generalization in the lattice", err=True)
            sys.exit(4)
        selected = select_by_utility(minimal, table, hierarchy)
        lines = [f"minimal: {describe(node)}" for node in minimal]
        lines.append(f"selected: {describe(selected)}")
    else:
        chain = _parse_chain(chain_spec, hierarchy)
        found = binary_search_chain(table, hierarchy, chain, threshold)
        if found is None:
            click.echo("no safe generalization on the chain", err=True)
            sys.exit(4)
        lines = [f"selected: {describe(found)}"]
    _emit_text(obj, lines)


@main.command("curve-k")
@click.option("--k-max", type=int, required=True)
@click.option("--group-by", help="bucket by these comma-separated columns")
@click.option("--sample", type=float, help="keep only this fraction of rows")
@click.option("--seed", type=int, default=0, show_default=True, help="sampling seed")
@click.pass_obj
@handles_errors
def curve_k(obj, k_max, group_by, sample, seed):
    """Emit disclosure-vs-k series for implications and negations."""
    table = _load_table(obj)
    if sample is not None:
        if not 0 < sample <= 1:
            raise ValidationError("--sample must be in (0, 1]")
        keep = max(1, round(sample * len(table.records)))
        records = tuple(random.Random(seed).sample(table.records, keep))
        table = Table(table.attributes, table.sensitive_attribute, records, table.domain)
    bucketization = _bucketize(obj, table, group_by)
    _emit_points(obj, disclosure_vs_k(bucketization, k_max))


@main.command("curve-entropy")
@click.option("--domain-size", type=int, required=True, help="distinct sensitive values")
@click.option("--per-value", type=int, required=True, help="count of each value when uniform")
@click.option("--k", "k_text", required=True, help="comma-separated k values, e.g. 1,3,5")
@click.pass_obj
@handles_errors
def curve_entropy(obj, domain_size, per_value, k_text):
    """Emit least-disclosure-vs-entropy series over a synthetic bucket family."""
    try:
        k_list = [int(part) for part in k_text.split(",") if part.strip()]
    except ValueError:
        raise ValidationError(f"cannot parse k list {k_text!r}") from None
    if not k_list:
        raise ValidationError("empty k list")
    family = SkewedSingleBucketFamily(domain_size, per_value)
    _emit_points(obj, entropy_vs_disclosure(family, k_list))


if __name__ == "__main__":
    main()
