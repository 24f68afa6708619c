"""Operator command line for the full prediction/feedback/retrain cycle.

Every subcommand is a thin shell over the library modules: ingest, train,
evaluate, predict, feedback, retrain, compare, explain, serve. Pass
``--json`` for machine-readable output, otherwise human tables print.

Exit codes: 0 ok, 2 usage, 3 data error, 4 model error, 5 service error.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from .errors import DataError, IntegrityError, ModelError, ScoreloopError
from .explain import explain as explain_fn
from .gbdt.model import GossConfig, TrainConfig
from .loop import (
    build_retrain_report,
    compare_predictions,
    evaluation_history,
    make_batch,
    retrain as retrain_fn,
    submit_feedback,
    train_initial,
)
from .metrics import MetricsReport
from .preprocess import transform
from .schema import default_schema, load_csv, parse_schema_file, record_from_mapping
from .store import DatasetStore

EXIT_DATA, EXIT_MODEL, EXIT_SERVICE = 3, 4, 5


def read_config_file(path) -> dict:
    """Key = value text config; '#' starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected 'key = value'")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k] = v
    return out


def handles_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (DataError, IntegrityError) as e:
            click.echo(f"data error: {e}", err=True)
            sys.exit(EXIT_DATA)
        except ModelError as e:
            click.echo(f"model error: {e}", err=True)
            sys.exit(EXIT_MODEL)
        except ScoreloopError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_SERVICE)

    return wrapper


@click.group()
@click.option("--data-dir", default="data", show_default=True,
              help="Store root directory.")
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="Key = value config file (data_dir, threshold, token, ...).")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def main(ctx, data_dir, config_path, as_json):
    """Student exam-score prediction with a feedback-driven retraining loop."""
    settings = {}
    if config_path:
        settings = read_config_file(config_path)
    ctx.obj = {
        "data_dir": settings.get("data_dir", data_dir),
        "json": as_json,
        "settings": settings,
    }


def open_store(ctx) -> DatasetStore:
    return DatasetStore.open(ctx.obj["data_dir"])


def emit(ctx, payload: dict, human: str):
    if ctx.obj["json"]:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        click.echo(human)


def metrics_table(reports: list[MetricsReport]) -> str:
    head = f"{'Phase':<16}{'RMSE':>8}{'MAE':>8}{'R2':>8}{'MAPE(%)':>10}{'Expl.Var':>10}{'n':>7}"
    lines = [head, "-" * len(head)]
    for m in reports:
        lines.append(f"{m.phase_label:<16}{m.rmse:>8.3f}{m.mae:>8.3f}{m.r2:>8.3f}"
                     f"{m.mape_percent:>10.3f}{m.explained_variance:>10.3f}{m.n:>7}")
    return "\n".join(lines)


def train_config_from(ctx, rounds, learning_rate, max_leaves, lam, goss, efb, seed) -> TrainConfig:
    goss_cfg = None
    if goss:
        a, b = (float(x) for x in goss.split(","))
        goss_cfg = GossConfig(top_rate=a, other_rate=b)
    return TrainConfig(learning_rate=learning_rate, num_rounds=rounds,
                       max_leaves=max_leaves, lam=lam, goss=goss_cfg,
                       efb_enabled=efb, seed=seed)


train_options = [
    click.option("--rounds", default=100, show_default=True),
    click.option("--learning-rate", default=0.05, show_default=True),
    click.option("--max-leaves", default=31, show_default=True),
    click.option("--lam", default=0.0, show_default=True, help="L2 leaf penalty."),
    click.option("--goss", default=None, help="Enable GOSS as 'a,b' rates."),
    click.option("--efb", is_flag=True, help="Enable exclusive feature bundling."),
    click.option("--seed", default=42, show_default=True),
]


def with_train_options(fn):
    for opt in reversed(train_options):
        fn = opt(fn)
    return fn


@main.command()
@click.argument("csv_path", type=click.Path(exists=True))
@click.option("--schema", "schema_path", type=click.Path(exists=True),
              help="Custom schema file; defaults to the 19-feature layout.")
@click.pass_context
@handles_errors
def ingest(ctx, csv_path, schema_path):
    """Create a store from a historical CSV."""
    schema = parse_schema_file(schema_path) if schema_path else default_schema()
    data = load_csv(csv_path, schema)
    store = DatasetStore.create(ctx.obj["data_dir"], data)
    store.close()
    emit(ctx, {"rows": data.n, "data_dir": ctx.obj["data_dir"]},
         f"ingested {data.n} rows into {ctx.obj['data_dir']}")


@main.command()
@with_train_options
@click.option("--test-fraction", default=0.2, show_default=True)
@click.option("--split-seed", default=42, show_default=True)
@click.pass_context
@handles_errors
def train(ctx, rounds, learning_rate, max_leaves, lam, goss, efb, seed,
          test_fraction, split_seed):
    """Train the initial model version."""
    store = open_store(ctx)
    cfg = train_config_from(ctx, rounds, learning_rate, max_leaves, lam, goss, efb, seed)
    version = train_initial(store, cfg, test_fraction=test_fraction,
                            split_seed=split_seed)
    store.close()
    emit(ctx, {"version_id": version.version_id,
               "trained_on_count": version.trained_on_count,
               "metrics": version.metrics.to_dict()},
         f"trained version {version.version_id}\n" + metrics_table([version.metrics]))


@main.command()
@click.pass_context
@handles_errors
def evaluate(ctx):
    """Frozen-test metrics of every trained version (history table)."""
    store = open_store(ctx)
    hist = evaluation_history(store)
    store.close()
    if not hist:
        raise ModelError("no trained versions yet")
    emit(ctx, {"history": [m.to_dict() for m in hist]}, metrics_table(hist))


def _load_records(store, path, *, require_target):
    path = Path(path)
    if path.suffix.lower() == ".csv":
        ds = load_csv(path, store.schema, with_target=require_target,
                      provenance="input")
        return list(ds.rows), ""
    try:
        body = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: bad JSON: {e}") from None
    note = ""
    if isinstance(body, dict):
        note = body.get("note", "")
        body = body["records"] if "records" in body else [body]
    if not isinstance(body, list) or not body:
        raise DataError(f"{path}: expected a list of records")
    records = [record_from_mapping(store.schema, m, record_id=f"input-{i + 1}",
                                   require_target=require_target)
               for i, m in enumerate(body)]
    return records, note


def _latest_version(store):
    vid = store.latest_version_id()
    if vid is None:
        raise ModelError("no trained model; run `scoreloop train` first")
    return store.get_version(vid)


@main.command()
@click.argument("records_path", type=click.Path(exists=True))
@click.option("--threshold", default=65.0, show_default=True,
              help="At-risk score threshold.")
@click.pass_context
@handles_errors
def predict(ctx, records_path, threshold):
    """Score records from a CSV (no target column) or JSON file."""
    store = open_store(ctx)
    version = _latest_version(store)
    records, _ = _load_records(store, records_path, require_target=False)
    rows = []
    for r in records:
        score = version.model.predict(transform(r, version.preprocessor).values)
        rows.append({"id": r.id, "score": score,
                     "at_risk": bool(score < threshold)})
    store.close()
    table = "\n".join(f"{r['id']:<16}{r['score']:>8.2f}"
                      f"{'  AT RISK' if r['at_risk'] else ''}" for r in rows)
    emit(ctx, {"version_id": version.version_id, "threshold": threshold,
               "predictions": rows}, table)


@main.command()
@click.argument("batch_path", type=click.Path(exists=True))
@click.option("--retrain", "do_retrain", is_flag=True,
              help="Retrain immediately after the append.")
@click.pass_context
@handles_errors
def feedback(ctx, batch_path, do_retrain):
    """Submit post-intervention records (JSON with observed Exam_Score)."""
    store = open_store(ctx)
    records, note = _load_records(store, batch_path, require_target=True)
    ids = submit_feedback(store, make_batch(records, note=note))
    payload = {"accepted": len(ids), "ids": ids, "store_size": store.row_count()}
    text = f"accepted {len(ids)} feedback rows (store size {payload['store_size']})"
    if do_retrain:
        version = retrain_fn(store, TrainConfig())
        payload["version_id"] = version.version_id
        text += f"\nretrained: version {version.version_id}"
    store.close()
    emit(ctx, payload, text)


@main.command(name="retrain")
@with_train_options
@click.option("--force", is_flag=True, help="Retrain even with no new feedback.")
@click.pass_context
@handles_errors
def retrain_cmd(ctx, rounds, learning_rate, max_leaves, lam, goss, efb, seed, force):
    """Retrain on the union of historical and feedback rows."""
    store = open_store(ctx)
    old = _latest_version(store)
    cfg = train_config_from(ctx, rounds, learning_rate, max_leaves, lam, goss, efb, seed)
    new = retrain_fn(store, cfg, force=force)
    report = build_retrain_report(store, old, new)
    store.close()
    emit(ctx, {"version_id": new.version_id, **report.to_dict()},
         metrics_table([report.before, report.after]) + "\n\n"
         + comparison_table(report.rows))


def comparison_table(rows) -> str:
    if not rows:
        return "(no feedback rows to compare)"
    arrows = {"up": "+", "down": "-", "flat": "="}
    head = f"{'Student':<16}{'Initial':>9}{'Post':>9}{'Diff':>8}  Trend"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(f"{r.id:<16}{r.initial_score:>9.2f}{r.post_retrain_score:>9.2f}"
                     f"{r.diff:>+8.2f}  {arrows[r.trend]}")
    return "\n".join(lines)


@main.command()
@click.pass_context
@handles_errors
def compare(ctx):
    """Before/after predictions for all feedback students (last two versions)."""
    store = open_store(ctx)
    versions = store.list_versions()
    if len(versions) < 2:
        raise ModelError("need at least two versions to compare")
    old = store.get_version(versions[-2])
    new = store.get_version(versions[-1])
    fb = [rec for rec, _ in store.feedback_records()]
    rows = compare_predictions(old, new, fb)
    store.close()
    emit(ctx, {"old_version": old.version_id, "new_version": new.version_id,
               "rows": [r.to_dict() for r in rows]}, comparison_table(rows))


def text_bar_chart(rows, width=40) -> str:
    top = max(abs(r["phi"]) for r in rows) or 1.0
    lines = []
    for r in rows:
        n = int(round(abs(r["phi"]) / top * width))
        bar = ("+" if r["phi"] >= 0 else "-") * n
        lines.append(f"{r['feature']:<28}{r['phi']:>+9.3f}  {bar}")
    return "\n".join(lines)


def svg_bar_chart(rows, path):
    bar_h, gap, width = 18, 6, 560
    top = max(abs(r["phi"]) for r in rows) or 1.0
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{len(rows) * (bar_h + gap) + gap}">']
    for i, r in enumerate(rows):
        y = gap + i * (bar_h + gap)
        w = abs(r["phi"]) / top * 260
        x0 = 290 if r["phi"] >= 0 else 290 - w
        color = "#2d8a4e" if r["phi"] >= 0 else "#b23a3a"
        parts.append(f'<text x="4" y="{y + 13}" font-size="11">{r["feature"]}</text>')
        parts.append(f'<rect x="{x0:.1f}" y="{y}" width="{w:.1f}" height="{bar_h}" '
                     f'fill="{color}"/>')
        parts.append(f'<text x="{width - 4}" y="{y + 13}" font-size="11" '
                     f'text-anchor="end">{r["phi"]:+.3f}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts), encoding="utf-8")


@main.command(name="explain")
@click.argument("record", type=str)
@click.option("--svg", "svg_path", type=click.Path(), help="Also write an SVG chart.")
@click.pass_context
@handles_errors
def explain_cmd(ctx, record, svg_path):
    """Per-feature score attributions for one record (file path or stored id)."""
    store = open_store(ctx)
    version = _latest_version(store)
    if Path(record).exists():
        records, _ = _load_records(store, record, require_target=False)
        if len(records) != 1:
            raise DataError("explain takes exactly one record")
        rec = records[0]
    else:
        rec = next((r for r in store.full_dataset().rows if r.id == record), None)
        if rec is None:
            raise DataError(f"no stored record with id {record!r}")
    fv = transform(rec, version.preprocessor)
    result = explain_fn(version.model, fv.values)
    rows = result.to_rows(version.model.feature_names, fv.values)
    store.close()
    if svg_path:
        svg_bar_chart(rows, svg_path)
    emit(ctx, {"id": rec.id, "base_value": result.base_value,
               "prediction": result.prediction, "contributions": rows},
         f"prediction {result.prediction:.2f} (baseline {result.base_value:.2f})\n"
         + text_bar_chart(rows))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--threshold", default=None, type=float,
              help="At-risk score threshold (default 65).")
@click.option("--auto-retrain", is_flag=True,
              help="Retrain automatically after each feedback batch.")
@click.option("--token", default=None, help="Bearer token (or SCORELOOP_TOKEN env).")
@click.option("--static-dir", default=None, type=click.Path(),
              help="Serve web UI assets from this directory.")
@click.pass_context
@handles_errors
def serve(ctx, host, port, threshold, auto_retrain, token, static_dir):
    """Run the HTTP JSON API."""
    from .service import ApiConfig, serve as run_server

    settings = ctx.obj["settings"]
    config = ApiConfig(
        data_dir=ctx.obj["data_dir"],
        at_risk_threshold=threshold if threshold is not None
        else float(settings.get("threshold", 65.0)),
        auto_retrain=auto_retrain or settings.get("auto_retrain", "") == "true",
        token=token or settings.get("token") or None,
        static_dir=static_dir or settings.get("static_dir") or None,
    )
    run_server(config, host=host, port=port)


if __name__ == "__main__":
    main()
