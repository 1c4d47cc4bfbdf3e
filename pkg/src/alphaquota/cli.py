"""Command-line front end.

Subcommands mirror the library layers: eval (committee scales), opt
(optimal scales), export-ilp, rule (voting rules), domain (structure
detection), sample (profile generators), experiment (batch runs).
Output conventions: scales print as exact p/q with a float rendering in
parentheses; indices print 0-indexed unless --one-indexed; --json emits
one machine-readable object on stdout and always stays 0-indexed.

Exit codes: 0 success, 1 infeasible or budget-exceeded, 2 usage or IO.
"""

from __future__ import annotations

import functools
import json

import click

from . import __version__
from .core import (
    Budgets,
    BudgetExceededError,
    DEFAULT_BUDGETS,
    InfeasibleError,
    ValidationError,
    format_rational,
    load_instance,
    parse_committee,
    parse_rational,
    serialize_instance,
)
from .domains import detect_structures, structured_optimal_alpha
from .experiments import ExperimentGrid, load_grid_config, run_grid, write_csv
from .optimize import (
    export_lp,
    optimal_alpha_ejr,
    optimal_alpha_jr,
    optimal_alpha_jr_brute,
)
from .rules import RULES
from .sampling import SamplerConfig, sample
from .verify import Axiom, alpha_of, satisfies

_AXIOMS = {"jr": Axiom.JR, "ejr": Axiom.EJR, "ejrplus": Axiom.EJR_PLUS}

_RULE_CHOICES = (
    "cc",
    "seqcc",
    "pav",
    "seqphragmen",
    "mes",
    "alphames",
    "gjcr",
    "alphagjcr",
)


def _scale_text(value) -> str:
    return f"{format_rational(value)} ({float(value)!r})"


def _indices_text(indices, offset: int) -> str:
    return ",".join(str(i + offset) for i in indices)


def _budgets(budget: int | None) -> Budgets:
    if budget is None:
        return DEFAULT_BUDGETS
    if budget < 1:
        raise click.UsageError("--budget must be positive")
    return Budgets(subset_nodes=budget, committees=budget)


def _frontend(f):
    """Map library errors onto the exit-code contract."""

    @functools.wraps(f)
    def wrapped(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except (InfeasibleError, BudgetExceededError) as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(1)
        except (ValidationError, ValueError, OSError) as exc:
            raise click.UsageError(str(exc))

    return wrapped


@click.group()
@click.version_option(__version__, prog_name="alpha")
def main():
    """Exact alpha-scaled representation toolkit."""


@main.command("eval")
@click.option("--instance", "instance_path", required=True, help="instance file")
@click.option("--committee", "committee_text", required=True, help="e.g. 0,2,5")
@click.option("--axiom", type=click.Choice(sorted(_AXIOMS)), required=True)
@click.option("--alpha", "query_text", default=None, help="also test satisfaction at this scale")
@click.option("--budget", type=int, default=None, help="enumeration budget")
@click.option("--json", "as_json", is_flag=True)
@click.option("--one-indexed", is_flag=True, help="display indices 1-indexed")
@_frontend
def eval_cmd(instance_path, committee_text, axiom, query_text, budget, as_json, one_indexed):
    """Alpha value of a committee, with a maximizing witness group."""
    inst = load_instance(instance_path)
    committee = parse_committee(committee_text, inst)
    budgets = _budgets(budget)
    result = alpha_of(inst, committee, _AXIOMS[axiom], budgets)
    query = parse_rational(query_text) if query_text is not None else None
    verdict = (
        satisfies(inst, committee, query, _AXIOMS[axiom], budgets)
        if query is not None
        else None
    )
    witness = result.witness
    if as_json:
        payload = {
            "axiom": axiom,
            "committee": list(committee),
            "alpha": format_rational(result.alpha_value),
            "alpha_float": float(result.alpha_value),
            "witness": None
            if witness is None
            else {
                "voters": list(witness.voters),
                "candidates": list(witness.candidates),
                "level": witness.level,
            },
            "query_alpha": format_rational(query) if query is not None else None,
            "satisfies": verdict,
        }
        click.echo(json.dumps(payload))
        return
    offset = 1 if one_indexed else 0
    click.echo(_scale_text(result.alpha_value))
    if witness is None:
        click.echo("witness: none")
    else:
        click.echo(
            f"witness: voters {_indices_text(witness.voters, offset)};"
            f" candidates {_indices_text(witness.candidates, offset)};"
            f" level {witness.level}"
        )
    if query is not None:
        click.echo(
            f"satisfies at {format_rational(query)}: {'yes' if verdict else 'no'}"
        )


def _generic_optimum(inst, axiom: Axiom, method: str, budgets: Budgets):
    if axiom is Axiom.JR:
        engine = optimal_alpha_jr_brute if method == "brute" else optimal_alpha_jr
        return engine(inst, budgets)
    if method == "bnb":
        raise click.UsageError("no branch-and-bound engine for ejr; use auto or brute")
    return optimal_alpha_ejr(inst, budgets)


@main.command("opt")
@click.option("--instance", "instance_path", required=True)
@click.option("--axiom", type=click.Choice(["jr", "ejr"]), required=True)
@click.option(
    "--method",
    type=click.Choice(["auto", "bnb", "brute"]),
    default="auto",
    show_default=True,
    help="engine for the generic domain",
)
@click.option(
    "--domain",
    type=click.Choice(["generic", "auto", "partylist", "vi", "ci"]),
    default="generic",
    show_default=True,
    help="route to a structure-specific algorithm",
)
@click.option("--budget", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
@click.option("--one-indexed", is_flag=True)
@_frontend
def opt_cmd(instance_path, axiom, method, domain, budget, as_json, one_indexed):
    """Smallest achievable alpha and a committee attaining it."""
    inst = load_instance(instance_path)
    budgets = _budgets(budget)
    if domain == "generic":
        outcome = _generic_optimum(inst, _AXIOMS[axiom], method, budgets)
        route = "generic"
    else:
        if method != "auto":
            raise click.UsageError("--method only applies to --domain generic")
        route, outcome = structured_optimal_alpha(
            inst, _AXIOMS[axiom], domain=domain, budgets=budgets
        )
    if as_json:
        payload = {
            "axiom": axiom,
            "alpha_star": format_rational(outcome.alpha_star),
            "alpha_star_float": float(outcome.alpha_star),
            "committee": list(outcome.committee),
            "method": outcome.method,
            "explored": outcome.explored,
            "route": route,
        }
        click.echo(json.dumps(payload))
        return
    offset = 1 if one_indexed else 0
    click.echo(_scale_text(outcome.alpha_star))
    click.echo(f"committee: {_indices_text(outcome.committee, offset)}")
    click.echo(f"method: {outcome.method}; explored: {outcome.explored}; route: {route}")


@main.command("export-ilp")
@click.option("--instance", "instance_path", required=True)
@click.option("--alpha", "alpha_text", required=True, help="scale, e.g. 1/2")
@click.option("--out", "out_path", required=True)
@click.option("--json", "as_json", is_flag=True)
@_frontend
def export_ilp_cmd(instance_path, alpha_text, out_path, as_json):
    """Write the committee-existence integer program in LP format."""
    inst = load_instance(instance_path)
    value = parse_rational(alpha_text)
    if value <= 0:
        raise click.UsageError("alpha must be positive")
    with open(out_path, "w", encoding="utf-8") as fh:
        export_lp(inst, value, fh)
    if as_json:
        click.echo(json.dumps({"out": out_path, "alpha": format_rational(value)}))
    else:
        click.echo(f"wrote {out_path}")


@main.command("rule")
@click.option("--instance", "instance_path", required=True)
@click.option("--rule", "rule_name", type=click.Choice(_RULE_CHOICES), required=True)
@click.option("--max-committees", type=int, default=5, show_default=True)
@click.option("--adversarial", is_flag=True, help="break ties against the final JR scale")
@click.option("--trace", is_flag=True, help="include round-by-round decisions")
@click.option("--json", "as_json", is_flag=True)
@click.option("--one-indexed", is_flag=True)
@_frontend
def rule_cmd(instance_path, rule_name, max_committees, adversarial, trace, as_json, one_indexed):
    """Run a voting rule; ties may yield several committees."""
    inst = load_instance(instance_path)
    outcome = RULES[rule_name](
        inst, max_committees=max_committees, adversarial=adversarial, trace=trace
    )
    if as_json:
        payload = {
            "rule": outcome.rule,
            "committees": [list(w) for w in outcome.committees],
            "padded_seats": list(outcome.padded_seats),
            "trace": list(outcome.trace) if outcome.trace is not None else None,
        }
        click.echo(json.dumps(payload))
        return
    offset = 1 if one_indexed else 0
    for committee in outcome.committees:
        click.echo(f"committee: {_indices_text(committee, offset)}")
    if trace and outcome.trace:
        for line in outcome.trace:
            click.echo(f"trace: {line}")


@main.command("domain")
@click.option("--instance", "instance_path", required=True)
@click.option("--json", "as_json", is_flag=True)
@click.option("--one-indexed", is_flag=True)
@_frontend
def domain_cmd(instance_path, as_json, one_indexed):
    """Detect party-list, voter-interval, and candidate-interval structure."""
    inst = load_instance(instance_path)
    found = detect_structures(inst)
    party, vi, ci = found["partylist"], found["vi"], found["ci"]
    if as_json:
        payload = {
            "partylist": None
            if party is None
            else {
                "sizes": list(party.sizes),
                "parties": [
                    {"voters": list(voters), "candidates": list(cands)}
                    for voters, cands in party.parties
                ],
            },
            "vi": None if vi is None else {"order": list(vi.order)},
            "ci": None if ci is None else {"order": list(ci.order)},
        }
        click.echo(json.dumps(payload))
        return
    offset = 1 if one_indexed else 0
    if party is None:
        click.echo("partylist: none")
    else:
        click.echo(f"partylist: sizes {','.join(str(s) for s in party.sizes)}")
    for label, order in (("vi", vi), ("ci", ci)):
        if order is None:
            click.echo(f"{label}: none")
        else:
            click.echo(f"{label}: order {_indices_text(order.order, offset)}")


@main.command("sample")
@click.option("--model", type=click.Choice(["ic", "euclidean"]), required=True)
@click.option("--n", type=int, required=True)
@click.option("--m", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--p", type=float, default=None, help="ic approval probability")
@click.option("--t", type=float, default=None, help="euclidean approval radius")
@click.option("--sigma", type=float, default=0.5, show_default=True, help="voter spread")
@click.option(
    "--candidates",
    "candidate_layout",
    type=click.Choice(["uniform", "gaussian"]),
    default="uniform",
    show_default=True,
)
@click.option("--seed", type=int, required=True)
@click.option("--out", "out_path", default=None)
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "plain"]),
    default="json",
    show_default=True,
)
@_frontend
def sample_cmd(model, n, m, k, p, t, sigma, candidate_layout, seed, out_path, fmt):
    """Draw one random profile and print or save it."""
    if model == "ic" and t is not None:
        raise click.UsageError("--t only applies to the euclidean model")
    if model == "euclidean" and p is not None:
        raise click.UsageError("--p only applies to the ic model")
    cfg = SamplerConfig(
        model=model,
        n=n,
        m=m,
        k=k,
        seed=seed,
        p=p,
        t=t,
        sigma=sigma,
        candidates=candidate_layout,
    )
    inst = sample(cfg)
    text = serialize_instance(inst, fmt)
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text.rstrip("\n"))


@main.command("experiment")
@click.option("--config", "config_path", default=None, help="grid config file")
@click.option("--out", "out_path", required=True, help="CSV destination")
@click.option("--scale", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--budget", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
@_frontend
def experiment_cmd(config_path, out_path, scale, seed, jobs, budget, as_json):
    """Run the sampled grid and write one CSV row per instance."""
    if config_path is None:
        grid = ExperimentGrid()
    else:
        with open(config_path, "r", encoding="utf-8") as fh:
            grid = load_grid_config(fh.read())
    records = run_grid(grid, scale=scale, seed=seed, jobs=jobs, budgets=_budgets(budget))
    with open(out_path, "w", encoding="utf-8") as fh:
        write_csv(records, fh)
    flagged = sum(1 for record in records if record.flags)
    if as_json:
        payload = {
            "out": out_path,
            "records": len(records),
            "flagged": flagged,
            "cells": len(grid.cells()),
            "scale": scale,
            "seed": seed,
        }
        click.echo(json.dumps(payload))
    else:
        click.echo(f"wrote {out_path}: {len(records)} records, {flagged} flagged")


if __name__ == "__main__":
    main()
