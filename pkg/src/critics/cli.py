"""Command-line front door: batch plan/text runs, pairwise evaluation, serving.

Config precedence: command-line flags > config file > built-in defaults.  The
config file is INI-style with a single ``[critics]`` section, e.g.::

    [critics]
    rounds = 3
    seed = 7
    model = gpt-3.5-turbo
"""

from __future__ import annotations

import configparser
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from critics.crplan import CrPlanConfig, get_criterion, run_crplan
from critics.crtext import CrTextConfig, run_crtext
from critics.errors import CriticsError, EmptyInput
from critics.evalharness import PLAN_METRICS, TEXT_METRICS, aggregate_win_rates, judge_pair
from critics.gateway import Backend, HttpBackend, ProviderConfig, load_script
from critics.story import parse_story_package, render_story_package, segment_sentences

log = logging.getLogger(__name__)

_DEFAULTS = {
    "rounds": 3,
    "seed": 0,
    "window": 5,
    "jobs": os.cpu_count() or 1,
    "model": "gpt-3.5-turbo",
    "endpoint": "https://api.openai.com/v1/chat/completions",
}


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise click.ClickException(f"config file not found: {path}")
    if "critics" not in parser:
        return {}
    return dict(parser["critics"])


def _setting(name: str, flag_value, file_config: dict, cast=int):
    """flags > config file > defaults."""
    if flag_value is not None:
        return flag_value
    if name in file_config:
        return cast(file_config[name])
    return _DEFAULTS[name]


def _make_backend(mock_script: str | None, endpoint: str, model: str) -> Backend:
    if mock_script:
        return load_script(mock_script)
    return HttpBackend(ProviderConfig(endpoint_url=endpoint, default_model=model))


def _write_summary(output_dir: Path, results: list[dict]) -> int:
    failures = sum(1 for r in results if not r["ok"])
    summary = {"results": results, "failures": failures, "total": len(results)}
    output_dir.mkdir(parents=True, exist_ok=True)
    (output_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    for r in results:
        status = "ok" if r["ok"] else f"failed: {r['error']}"
        click.echo(f"{r['input']}: {status}")
    return 1 if failures else 0


def _run_batch(inputs, jobs, worker) -> list[dict]:
    if jobs > 1 and len(inputs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, inputs))
    return [worker(path) for path in inputs]


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="INI config file.")
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
@click.pass_context
def main(ctx, config_path, verbose):
    """Collective-critique story refinement toolkit."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING)
    ctx.obj = _load_config_file(config_path)


@main.command("plan")
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--rounds", type=int, default=None)
@click.option("--criteria", multiple=True, help="Criterion ids (repeatable).")
@click.option("--no-leader", is_flag=True)
@click.option("--no-personas", is_flag=True)
@click.option("--seed", type=int, default=None)
@click.option("--mock-script", type=click.Path(exists=True), default=None)
@click.option("--endpoint", default=None)
@click.option("--model", default=None)
@click.option("--jobs", type=int, default=None)
@click.option("--output-dir", type=click.Path(), default="out")
@click.pass_context
def cmd_plan(ctx, inputs, rounds, criteria, no_leader, no_personas, seed, mock_script,
             endpoint, model, jobs, output_dir):
    """Run the plan-critique loop over story-package files."""
    file_config = ctx.obj
    model = _setting("model", model, file_config, str)
    endpoint = _setting("endpoint", endpoint, file_config, str)
    cfg = CrPlanConfig(
        rounds=_setting("rounds", rounds, file_config),
        criteria=tuple(get_criterion(cid) for cid in criteria),
        use_leader=not no_leader,
        use_personas=not no_personas,
        rng_seed=_setting("seed", seed, file_config),
        model=model,
    )
    out = Path(output_dir)

    def worker(path: str) -> dict:
        try:
            pkg = parse_story_package(Path(path).read_text(encoding="utf-8"))
            backend = _make_backend(mock_script, endpoint, model)
            result = run_crplan(pkg, cfg, backend)
            out.mkdir(parents=True, exist_ok=True)
            stem = Path(path).stem
            (out / f"{stem}.crplan.json").write_text(
                json.dumps(result.to_dict(), indent=1, sort_keys=True) + "\n", encoding="utf-8"
            )
            (out / f"{stem}.final.txt").write_text(
                render_story_package(result.candidates[result.selected_index]), encoding="utf-8"
            )
            return {"input": path, "ok": True, "error": None,
                    "selected_index": result.selected_index, "rounds": len(result.rounds)}
        except (CriticsError, OSError) as exc:
            log.error("plan run failed for %s: %s", path, exc)
            return {"input": path, "ok": False, "error": str(exc)}

    results = _run_batch(list(inputs), _setting("jobs", jobs, file_config), worker)
    sys.exit(_write_summary(out, results))


@main.command("text")
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--rounds", type=int, default=None)
@click.option("--window", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--no-leader", is_flag=True)
@click.option("--mock-script", type=click.Path(exists=True), default=None)
@click.option("--endpoint", default=None)
@click.option("--model", default=None)
@click.option("--jobs", type=int, default=None)
@click.option("--output-dir", type=click.Path(), default="out")
@click.pass_context
def cmd_text(ctx, inputs, rounds, window, seed, no_leader, mock_script,
             endpoint, model, jobs, output_dir):
    """Run the sentence refinement loop over plain-text story files."""
    file_config = ctx.obj
    model = _setting("model", model, file_config, str)
    endpoint = _setting("endpoint", endpoint, file_config, str)
    cfg = CrTextConfig(
        rounds=_setting("rounds", rounds, file_config),
        context_window=_setting("window", window, file_config),
        use_leader=not no_leader,
        rng_seed=_setting("seed", seed, file_config),
        model=model,
    )
    out = Path(output_dir)

    def worker(path: str) -> dict:
        try:
            story = segment_sentences(Path(path).read_text(encoding="utf-8"))
            backend = _make_backend(mock_script, endpoint, model)
            final, trace = run_crtext(story, cfg, backend)
            out.mkdir(parents=True, exist_ok=True)
            stem = Path(path).stem
            (out / f"{stem}.crtext.json").write_text(
                json.dumps([r.to_dict() for r in trace], indent=1, sort_keys=True) + "\n",
                encoding="utf-8",
            )
            (out / f"{stem}.refined.txt").write_text(final.body, encoding="utf-8")
            return {"input": path, "ok": True, "error": None, "rounds": len(trace)}
        except (CriticsError, OSError) as exc:
            log.error("text run failed for %s: %s", path, exc)
            return {"input": path, "ok": False, "error": str(exc)}

    results = _run_batch(list(inputs), _setting("jobs", jobs, file_config), worker)
    sys.exit(_write_summary(out, results))


@main.command("eval")
@click.argument("manifest", type=click.Path(exists=True))
@click.option("--stage", type=click.Choice(["plan", "text"]), default="plan")
@click.option("--seed", type=int, default=None)
@click.option("--mock-script", type=click.Path(exists=True), default=None)
@click.option("--endpoint", default=None)
@click.option("--model", default=None)
@click.option("--output-dir", type=click.Path(), default="out")
@click.pass_context
def cmd_eval(ctx, manifest, stage, seed, mock_script, endpoint, model, output_dir):
    """Judge pairs from a JSON-lines manifest: {pair_id, path_a, path_b}."""
    file_config = ctx.obj
    model = _setting("model", model, file_config, str)
    endpoint = _setting("endpoint", endpoint, file_config, str)
    seed = _setting("seed", seed, file_config)
    metrics = PLAN_METRICS if stage == "plan" else TEXT_METRICS
    pairs = [
        json.loads(line)
        for line in Path(manifest).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    out = Path(output_dir)
    try:
        if not pairs:
            raise EmptyInput("manifest lists no pairs")
        backend = _make_backend(mock_script, endpoint, model)
        verdict_sets = []
        for i, pair in enumerate(pairs):
            verdict_sets.append(
                judge_pair(
                    Path(pair["path_a"]).read_text(encoding="utf-8"),
                    Path(pair["path_b"]).read_text(encoding="utf-8"),
                    metrics,
                    seed + i,
                    backend,
                    pair_id=str(pair.get("pair_id", i)),
                    model=model,
                )
            )
        table = aggregate_win_rates(verdict_sets, metrics)
        report = {
            "win_rates": {
                m: {"rate_a": row.rate_a, "rate_b": row.rate_b, "n": row.n}
                for m, row in table.items()
            },
            "pairs": [
                {
                    "pair_id": vs.pair_id,
                    "presentation_order": vs.presentation_order,
                    "verdicts": {v.metric_id: v.outcome.value for v in vs.verdicts},
                    "raw_response": vs.raw_response,
                }
                for vs in verdict_sets
            ],
        }
        out.mkdir(parents=True, exist_ok=True)
        (out / "eval_report.json").write_text(json.dumps(report, indent=1) + "\n", encoding="utf-8")
        for metric, row in table.items():
            click.echo(f"{metric}: A={row.rate_a:.2f} B={row.rate_b:.2f} n={row.n}")
        sys.exit(0)
    except CriticsError as exc:
        click.echo(f"eval failed: {exc}", err=True)
        sys.exit(1)


@main.command("serve")
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
@click.option("--data-dir", type=click.Path(), default=None,
              help="Defaults to $CRITICS_DATA_DIR or ./sessions.")
@click.option("--mock-script", type=click.Path(exists=True), default=None)
@click.option("--endpoint", default=None)
@click.option("--model", default=None)
@click.option("--static-dir", type=click.Path(), default=None,
              help="UI bundle directory served at /.")
@click.pass_context
def cmd_serve(ctx, port, host, data_dir, mock_script, endpoint, model, static_dir):
    """Serve the session API (and the UI bundle, when present)."""
    import uvicorn

    from critics.session.http import create_app

    file_config = ctx.obj
    model = _setting("model", model, file_config, str)
    endpoint = _setting("endpoint", endpoint, file_config, str)
    data_dir = data_dir or os.environ.get("CRITICS_DATA_DIR", "sessions")
    if static_dir is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static_dir = str(bundled) if bundled.is_dir() else None
    app = create_app(data_dir, _make_backend(mock_script, endpoint, model), static_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
