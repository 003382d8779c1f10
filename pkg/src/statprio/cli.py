"""Command-line front end.

Exit codes: 0 success, 1 domain-level negative result, 2 usage/IO/parse error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any

import click

from .derivation import generate_tests, prune_usage_model
from .errors import ModelError
from .family import Order, build_fts_prime, prioritize
from .features import FeatureDiagram, parse_feature_diagram
from .models import (
    FeaturedTransitionSystem,
    FiniteTrace,
    UsageModel,
    fts_to_json,
    parse_fts,
    parse_usage_model,
    project,
    usage_model_violations,
    validate_triple,
)
from .selection import SelectionAudit, SelectionParams, dfs_select


def fmt(x: float) -> float:
    """Round to 12 significant digits (round-half-even on the binary value)."""
    return float(f"{x:.12g}")


def dump(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def emit(doc: Any, output: str | None) -> None:
    text = dump(doc)
    if output is None or output == "-":
        click.echo(text, nl=False)
    else:
        try:
            Path(output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise click.exceptions.Exit(_fail(2, f"cannot write {output}: {exc}"))


def _fail(code: int, message: str) -> int:
    click.echo(f"error: {message}", err=True)
    return code


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise click.exceptions.Exit(_fail(2, f"cannot read {path}: {exc}"))


def load_triple(fd: str, fts: str, um: str | None) -> tuple[FeatureDiagram, FeaturedTransitionSystem, UsageModel | None]:
    texts = (_read(fd), _read(fts), _read(um) if um else None)
    try:
        d = parse_feature_diagram(texts[0])
        f = parse_fts(texts[1], d)
        u = parse_usage_model(texts[2]) if texts[2] is not None else None
    except ModelError as exc:
        raise click.exceptions.Exit(_fail(2, str(exc)))
    return d, f, u


def _require_valid(d, fts, um) -> None:
    report = validate_triple(d, fts, um)
    if not report.valid:
        click.echo(dump(report.to_json()), err=True, nl=False)
        raise click.exceptions.Exit(_fail(1, "models do not form a consistent triple"))


def _trace_json(t: FiniteTrace) -> dict[str, Any]:
    return {"trace": list(t.actions), "probability": fmt(t.probability)}


fd_option = click.option("--fd", required=True, help="Feature diagram JSON.")
fts_option = click.option("--fts", required=True, help="Featured transition system JSON.")
um_option = click.option("--um", required=True, help="Usage model (DTMC) JSON.")
output_option = click.option("-o", "--output", default=None, help="Output file (default: stdout).")


def selection_options(f):
    f = click.option("--pmax", type=click.FloatRange(0.0, 1.0), default=1.0, show_default=True)(f)
    f = click.option("--pmin", type=click.FloatRange(0.0, 1.0), default=0.0, show_default=True)(f)
    f = click.option("--lmax", type=click.IntRange(min=1), required=True, help="Maximum trace length.")(f)
    return f


def _params(lmax: int, pmin: float, pmax: float) -> SelectionParams:
    try:
        return SelectionParams(lmax, pmin, pmax)
    except ModelError as exc:
        raise click.UsageError(str(exc))


@click.group()
def main():
    """Statistical prioritization of product-line products for testing."""


@main.command()
@fd_option
@fts_option
@um_option
def validate(fd, fts, um):
    """Check that the feature diagram, FTS and usage model fit together."""
    d, f, u = load_triple(fd, fts, um)
    report = validate_triple(d, f, u)
    click.echo(dump(report.to_json()), nl=False)
    sys.exit(0 if report.valid else 1)


@main.command()
@fd_option
@fts_option
@um_option
@selection_options
@click.option("--audit", is_flag=True, help="Record traces rejected by the probability interval.")
@output_option
def traces(fd, fts, um, lmax, pmin, pmax, audit, output):
    """Step 1 only: extract i-to-i traces within the probability interval."""
    params = _params(lmax, pmin, pmax)
    d, f, u = load_triple(fd, fts, um)
    _require_valid(d, f, u)
    log = SelectionAudit() if audit else None
    selected = dfs_select(u, params, audit=log)
    doc: dict[str, Any] = {"params": {"lmax": lmax, "pmin": pmin, "pmax": pmax}, "traces": [_trace_json(t) for t in selected]}
    if log is not None:
        doc["audit"] = _selection_audit(log)
    emit(doc, output)


def _selection_audit(log: SelectionAudit) -> dict[str, Any]:
    return {
        "prunedBranches": log.pruned_branches,
        "rejected": [dict(_trace_json(t), reason="interval") for t in log.interval_rejected],
    }


def _family_steps(d, f, u, params, audit):
    log = SelectionAudit() if audit else None
    selected = dfs_select(u, params, audit=log)
    fts_prime, kept = build_fts_prime(f, selected)
    rejected = [t for t in selected if t not in kept.traces]
    audit_doc = None
    if log is not None:
        audit_doc = _selection_audit(log)
        audit_doc["rejected"] += [dict(_trace_json(t), reason="accept") for t in rejected]
    return fts_prime, kept, audit_doc


@main.command("fts-prime")
@fd_option
@fts_option
@um_option
@selection_options
@click.option("--audit", is_flag=True, help="List rejected traces with the reason.")
@output_option
def fts_prime_cmd(fd, fts, um, lmax, pmin, pmax, audit, output):
    """Steps 1-2: extract traces and build the pruned FTS from the accepted ones."""
    params = _params(lmax, pmin, pmax)
    d, f, u = load_triple(fd, fts, um)
    _require_valid(d, f, u)
    fts_prime, kept, audit_doc = _family_steps(d, f, u, params, audit)
    doc: dict[str, Any] = {"ftsPrime": fts_to_json(fts_prime), "traces": [_trace_json(t) for t in kept]}
    if audit_doc is not None:
        doc["audit"] = audit_doc
    emit(doc, output)


@main.command("prioritize")
@fd_option
@fts_option
@um_option
@selection_options
@click.option("--order", type=click.Choice(["ASC", "DESC"]), default="DESC", show_default=True)
@click.option("--emit-fts-prime", "fts_prime_path", default=None, help="Also write the pruned FTS here.")
@click.option("--audit", is_flag=True, help="Include rejected traces with the reason.")
@output_option
def prioritize_cmd(fd, fts, um, lmax, pmin, pmax, order, fts_prime_path, audit, output):
    """Steps 1-3: rank the surviving traces and their product sets by probability."""
    params = _params(lmax, pmin, pmax)
    d, f, u = load_triple(fd, fts, um)
    _require_valid(d, f, u)
    fts_prime, kept, audit_doc = _family_steps(d, f, u, params, audit)
    if fts_prime_path:
        emit(fts_to_json(fts_prime), fts_prime_path)
    report = prioritize(fts_prime, kept, Order(order))
    doc = report.to_json(fmt)
    if audit_doc is not None:
        doc["audit"] = audit_doc
    emit(doc, output)
    if not report.entries:
        sys.exit(_fail(1, "no trace survived selection and filtering"))


@main.command("product-tests")
@fd_option
@fts_option
@um_option
@click.option("--product", required=True, help="Comma-separated feature names, e.g. v,b,cur,t,c,eur,f.")
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--count", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--max-len", type=click.IntRange(min=1), default=50, show_default=True)
@click.option("--include-partial", is_flag=True, help="Keep walks cut at --max-len.")
@output_option
def product_tests(fd, fts, um, product, seed, count, max_len, include_partial, output):
    """Product-based scenario: project, prune the usage model, generate walks."""
    d, f, u = load_triple(fd, fts, um)
    _require_valid(d, f, u)
    selected = frozenset(name.strip() for name in product.split(",") if name.strip())
    try:
        pruned = prune_usage_model(u, project(f, selected))
    except ModelError as exc:
        sys.exit(_fail(1, str(exc)))
    assert not usage_model_violations(pruned)
    suite = generate_tests(pruned, count, max_len, seed, include_partial)
    emit(suite.to_json(), output)


if __name__ == "__main__":
    main()
