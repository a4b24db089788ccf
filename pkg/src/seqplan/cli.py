"""Command-line front end.

Exit codes: 0 identified (and verified), 2 criterion fails, 3 verification
deviation above tolerance, 4 input error.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np

from .estimand import from_json, render, to_json
from .exceptions import SeqPlanError
from .generate import random_diagram, random_query
from .identification import CriterionFails, PlanQuery, identify_plan, identify_unconditional
from .oracle import compare, random_model
from .textio import parse_graph, parse_model, parse_strategy

EXIT_OK = 0
EXIT_CRITERION_FAILS = 2
EXIT_DEVIATION = 3
EXIT_INPUT = 4

COMMANDS = ("identify", "verify", "render", "random-test")


@dataclass
class RunConfig:
    command: str
    graph: Path | None = None
    strategy: Path | None = None
    model: Path | None = None
    estimand: Path | None = None
    save: Path | None = None
    seed: int = 0
    tolerance: float = 1e-8
    trials: int = 100
    max_observed: int = 6
    max_latent: int = 3


@dataclass
class RunResult:
    code: int
    report: list[str] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    @property
    def text(self) -> str:
        return "".join(line + "\n" for line in self.report)


def _g(x: float) -> str:
    return "%.12g" % x


def _names(nodes) -> str:
    return "{" + ", ".join(sorted(nodes)) + "}"


def _check_config(cfg: RunConfig) -> None:
    if cfg.command not in COMMANDS:
        raise ValueError(f"unknown command {cfg.command!r}")
    if not cfg.tolerance > 0:
        raise ValueError("tolerance must be positive")
    if cfg.trials < 1:
        raise ValueError("trials must be at least 1")
    if cfg.seed < 0:
        raise ValueError("seed must be nonnegative")


def _load_query(cfg: RunConfig):
    spec = parse_graph(Path(cfg.graph).read_text())
    strategy = parse_strategy(Path(cfg.strategy).read_text(), spec.diagram)
    actions = spec.actions or strategy.actions
    if not spec.outcome:
        raise SeqPlanError("graph file declares no outcome")
    query = PlanQuery(spec.diagram, actions, spec.outcome, strategy, spec.cardinalities)
    return spec, query


def _identify_report(query: PlanQuery, result: RunResult):
    outcome = identify_plan(query)
    for note in outcome.notes:
        result.diagnostics.append(f"note: {note}")
    if isinstance(outcome.verdict, CriterionFails):
        v = outcome.verdict
        result.report += [
            "verdict: criterion fails",
            f"failing set: {_names(v.failing_set)}",
            f"failing component: {_names(v.failing_component)}",
            f"z_d: {_names(outcome.z_d)}",
            f"x_d: {_names(outcome.x_d)}",
            f"Q[{', '.join(sorted(v.failing_set))}] is not identifiable, so the sufficient "
            "condition for this plan does not hold (the plan itself may or may not be identifiable)",
        ]
        result.code = EXIT_CRITERION_FAILS
        return None
    result.report += [
        "verdict: identified",
        f"z_d: {_names(outcome.z_d)}",
        f"x_d: {_names(outcome.x_d)}",
        f"estimand: {render(outcome.estimand)}",
    ]
    return outcome


def _cmd_identify(cfg: RunConfig, result: RunResult) -> None:
    _, query = _load_query(cfg)
    outcome = _identify_report(query, result)
    if outcome is not None and cfg.save is not None:
        doc = {"outcome": sorted(query.outcome), "estimand": to_json(outcome.estimand)}
        Path(cfg.save).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
        result.diagnostics.append(f"saved estimand to {cfg.save}")


def _cmd_verify(cfg: RunConfig, result: RunResult) -> None:
    spec, query = _load_query(cfg)
    # build models first so a bad model file fails before any report is written
    if cfg.model is not None:
        models = [parse_model(Path(cfg.model).read_text(), spec.diagram, spec.cardinalities)]
    else:
        rng = np.random.default_rng(cfg.seed)
        models = [random_model(spec.diagram, spec.cardinalities, rng) for _ in range(cfg.trials)]
    outcome = _identify_report(query, result)
    if outcome is None:
        return
    worst = max(compare(m, query.strategy, query.outcome, outcome.estimand) for m in models)
    result.report += [f"models: {len(models)}", f"max deviation: {_g(worst)}"]
    if worst > cfg.tolerance:
        result.report.append(f"deviation exceeds tolerance {_g(cfg.tolerance)}")
        result.code = EXIT_DEVIATION


def _cmd_render(cfg: RunConfig, result: RunResult) -> None:
    try:
        doc = json.loads(Path(cfg.estimand).read_text())
    except json.JSONDecodeError as exc:
        raise SeqPlanError(f"not a saved estimand: {exc}") from None
    if not isinstance(doc, dict) or "estimand" not in doc:
        raise SeqPlanError("not a saved estimand: missing 'estimand'")
    e = from_json(doc["estimand"])
    if "outcome" in doc:
        result.report.append(f"outcome: {_names(doc['outcome'])}")
    result.report.append(f"estimand: {render(e)}")


def _cmd_random_test(cfg: RunConfig, result: RunResult) -> None:
    rng = np.random.default_rng(cfg.seed)
    identified = fails = violations = mono = 0
    worst = 0.0
    for _ in range(cfg.trials):
        g = random_diagram(rng, cfg.max_observed, cfg.max_latent)
        q = random_query(rng, g)
        out = identify_plan(q)
        if not out.identified:
            fails += 1
            continue
        identified += 1
        dev = max(compare(random_model(g, seed=rng), q.strategy, q.outcome, out.estimand) for _ in range(5))
        worst = max(worst, dev)
        if dev > cfg.tolerance:
            violations += 1
            result.diagnostics.append(f"violation: {g!r} actions={sorted(q.actions)} outcome={sorted(q.outcome)}")
        acts = q.strategy.without_idle().actions
        if not identify_unconditional(g, acts, q.outcome, {a: 0 for a in acts}).identified:
            mono += 1
    result.report += [
        f"queries: {cfg.trials}",
        f"identified: {identified}",
        f"criterion fails: {fails}",
        f"max deviation: {_g(worst)}",
        f"violations: {violations}",
        f"monotonicity violations: {mono}",
    ]
    if violations or mono:
        result.code = EXIT_DEVIATION


_HANDLERS = {
    "identify": _cmd_identify,
    "verify": _cmd_verify,
    "render": _cmd_render,
    "random-test": _cmd_random_test,
}


def run(cfg: RunConfig) -> RunResult:
    """Execute one command; never raises for bad input."""
    result = RunResult(EXIT_OK)
    try:
        _check_config(cfg)
        _HANDLERS[cfg.command](cfg, result)
    except (SeqPlanError, ValueError, OSError) as exc:
        result.code = EXIT_INPUT
        result.diagnostics.append(f"error: {exc}")
    return result


def _emit(result: RunResult) -> None:
    click.echo(result.text, nl=False)
    for line in result.diagnostics:
        click.echo(line, err=True)
    sys.exit(result.code)


class _Group(click.Group):
    """Usage errors exit with the input-error code."""

    def make_context(self, *args, **kwargs):
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as exc:
            exc.exit_code = EXIT_INPUT
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as exc:
            exc.exit_code = EXIT_INPUT
            raise


_path = click.Path(dir_okay=False, path_type=Path)


@click.group(cls=_Group)
@click.version_option(package_name="artifact")
def cli():
    """Identify and verify plan effects in causal diagrams."""


@cli.command()
@click.argument("graph", type=_path)
@click.argument("strategy", type=_path)
@click.option("--save", type=_path, help="Write the estimand as JSON.")
def identify(graph, strategy, save):
    """Identify the plan given by GRAPH and STRATEGY."""
    _emit(run(RunConfig("identify", graph=graph, strategy=strategy, save=save)))


@cli.command()
@click.argument("graph", type=_path)
@click.argument("strategy", type=_path)
@click.option("--model", type=_path, help="Check one fixed model instead of random ones.")
@click.option("--trials", default=100, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--tolerance", default=1e-8, show_default=True, type=float)
def verify(graph, strategy, model, trials, seed, tolerance):
    """Identify, then compare the estimand with exact enumeration."""
    _emit(run(RunConfig("verify", graph=graph, strategy=strategy, model=model,
                        trials=trials, seed=seed, tolerance=tolerance)))


@cli.command("render")
@click.argument("file", type=_path)
def render_cmd(file):
    """Print an estimand saved by 'identify --save'."""
    _emit(run(RunConfig("render", estimand=file)))


@cli.command("random-test")
@click.option("--trials", default=100, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--tolerance", default=1e-8, show_default=True, type=float)
@click.option("--max-observed", default=6, show_default=True, type=int)
@click.option("--max-latent", default=3, show_default=True, type=int)
def random_test(trials, seed, tolerance, max_observed, max_latent):
    """Check random queries against exact enumeration."""
    _emit(run(RunConfig("random-test", trials=trials, seed=seed, tolerance=tolerance,
                        max_observed=max_observed, max_latent=max_latent)))


def main(argv=None):
    cli.main(args=argv, prog_name="seqplan")


if __name__ == "__main__":  # pragma: no cover
    main()
