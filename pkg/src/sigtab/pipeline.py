"""Pipeline stages behind the CLI subcommands.

Every stage is a pure function of its input files and the configuration:
it validates inputs (including provenance digests), computes, and writes
deterministic artifacts.  The CLI is a thin argument-parsing layer on top.
"""

from __future__ import annotations

import datetime as dt
import json
import logging
import os

import numpy as np
import pandas as pd

from . import io
from .backtest import (
    CvScheme,
    RidgeRankModel,
    evaluate_predictions,
    fit_baseline_model,
    make_cv_schemes,
    predict_baseline,
)
from .calendar import TradingCalendar
from .catch22 import catch22_feature_matrix, catch22_feature_names
from .config import PipelineConfig
from .dataset import KEY_COLUMNS, assemble, rank_quantize, resample_financials, validate_targets
from .errors import InvalidInputError, IOStageError, SchemaError
from .moments import moment_feature_matrix, moment_feature_names
from .rolling import signature_feature_matrix, signature_feature_names
from .sentiment import (
    NewsEvent,
    select_top_categories,
    sentiment_feature_matrix,
    sentiment_feature_names,
)
from .series import OhlcBar, build_price_path
from .synth import generate

logger = logging.getLogger(__name__)

FAMILIES = ("stats", "catch22", "signature", "sentiment")


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------

def run_synth(config: PipelineConfig, outdir: str) -> dict[str, str]:
    os.makedirs(outdir, exist_ok=True)
    data = generate(config)
    provenance = {"format_version": 1, "config_digest": config.digest(), "inputs": {}}
    paths = {}
    for name, df in (
        ("prices", data.prices),
        ("events", data.events),
        ("financials", data.financials),
        ("universe", data.universe),
        ("targets", data.targets),
    ):
        path = os.path.join(outdir, f"{name}.csv")
        io.write_table(path, df, provenance)
        paths[name] = path
    return paths


# ---------------------------------------------------------------------------
# features
# ---------------------------------------------------------------------------

def _load_prices(path: str, config: PipelineConfig, force: bool) -> pd.DataFrame:
    df, provenance = io.read_table(path, io.PRICES_SCHEMA)
    io.check_provenance(path, provenance, config.digest(), force)
    offset = 2 + (1 if provenance is not None else 0)
    o, h = df["open"].to_numpy(), df["high"].to_numpy()
    lo, c = df["low"].to_numpy(), df["close"].to_numpy()
    bad = (np.minimum.reduce([o, h, lo, c]) <= 0) | (lo > np.minimum(o, c)) | (h < np.maximum(o, c))
    if bad.any():
        lines = [(offset + int(i), "low/high do not bracket open/close or price <= 0")
                 for i in np.flatnonzero(bad)[:20]]
        raise SchemaError(path, lines)
    if df.duplicated(["asset_id", "date"]).any():
        raise InvalidInputError(f"{path}: duplicate (asset_id, date) rows")
    return df


def _calendar_from_prices(prices: pd.DataFrame) -> TradingCalendar:
    dates = sorted({dt.date.fromisoformat(d) for d in prices["date"]})
    return TradingCalendar.from_dates(dates)


def _contiguous_runs(calendar_indices: np.ndarray) -> list[tuple[int, int]]:
    """[start, end) row ranges where calendar indices advance by exactly 1."""
    if calendar_indices.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(calendar_indices) != 1) + 1
    starts = np.concatenate(([0], breaks))
    ends = np.concatenate((breaks, [calendar_indices.size]))
    return list(zip(starts.tolist(), ends.tolist()))


def _price_family_rows(
    prices: pd.DataFrame,
    calendar: TradingCalendar,
    config: PipelineConfig,
    family: str,
) -> pd.DataFrame:
    """Per-asset feature rows at weekly anchors for stats/catch22/signature.

    An asset's bars are split into runs that are contiguous on the shared
    calendar; windows never span a gap in the daily data.
    """
    windows = config.windows
    if family == "stats":
        names = moment_feature_names(windows)
    elif family == "catch22":
        names = catch22_feature_names(windows)
    else:
        names = signature_feature_names(windows, config.signature_depth, dim=1 + len(config.ma_lags))
    anchor_set = {d.isoformat(): d for d in calendar.anchors}
    rows: list[list] = []
    min_bars = max(config.ma_lags)
    for asset, group in prices.groupby("asset_id", sort=True):
        group = group.sort_values("date", kind="mergesort")
        cal_idx = np.array([calendar.index_of(dt.date.fromisoformat(d)) for d in group["date"]])
        bars_all = [
            OhlcBar(dt.date.fromisoformat(r.date), r.open, r.high, r.low, r.close)
            for r in group.itertuples(index=False)
        ]
        for lo, hi in _contiguous_runs(cal_idx):
            if hi - lo < min_bars:
                continue
            bars = bars_all[lo:hi]
            history = build_price_path(asset, bars, config.ma_lags)
            anchor_positions = [
                i for i, b in enumerate(bars) if b.date.isoformat() in anchor_set
            ]
            if not anchor_positions:
                continue
            if family == "stats":
                matrix = moment_feature_matrix(history, anchor_positions, windows)
            elif family == "catch22":
                matrix = catch22_feature_matrix(history, anchor_positions, windows)
            else:
                matrix = signature_feature_matrix(
                    history, anchor_positions, windows, config.signature_depth
                )
            keep = ~np.isnan(matrix).any(axis=1)
            for pos, values in zip(np.asarray(anchor_positions)[keep], matrix[keep]):
                rows.append([bars[pos].date.isoformat(), asset] + values.tolist())
    out = pd.DataFrame(rows, columns=KEY_COLUMNS + names)
    return out.sort_values(["asset_id", "week"], kind="mergesort").reset_index(drop=True)


def _sentiment_rows(
    prices: pd.DataFrame,
    events_df: pd.DataFrame,
    calendar: TradingCalendar,
    config: PipelineConfig,
) -> pd.DataFrame:
    events_by_asset: dict[str, list[NewsEvent]] = {}
    all_events: list[NewsEvent] = []
    for r in events_df.itertuples(index=False):
        e = NewsEvent(
            date=dt.date.fromisoformat(r.date),
            asset_id=r.asset_id,
            relevance=int(r.relevance),
            similar_days=float(r.similar_days),
            sentiment=float(r.sentiment),
            category=r.category,
        )
        events_by_asset.setdefault(e.asset_id, []).append(e)
        all_events.append(e)
    selection = select_top_categories(
        all_events,
        dt.date.fromisoformat(config.category_selection_start),
        dt.date.fromisoformat(config.category_selection_end),
        config.category_count,
    )
    names = sentiment_feature_names(selection.categories)
    anchor_idx = [calendar.index_of(a) for a in calendar.anchors]
    anchor_iso = [a.isoformat() for a in calendar.anchors]
    rows: list[list] = []
    for asset in sorted(prices["asset_id"].unique()):
        matrix = sentiment_feature_matrix(
            events_by_asset.get(asset, []), calendar, anchor_idx, selection.categories
        )
        keep = ~np.isnan(matrix).all(axis=1)
        for wi in np.flatnonzero(keep):
            rows.append([anchor_iso[wi], asset] + matrix[wi].tolist())
    out = pd.DataFrame(rows, columns=KEY_COLUMNS + names)
    return out.sort_values(["asset_id", "week"], kind="mergesort").reset_index(drop=True)


def run_features(
    config: PipelineConfig,
    family: str,
    prices_path: str,
    out_path: str,
    events_path: str | None = None,
    force: bool = False,
) -> str:
    if family not in FAMILIES:
        raise InvalidInputError(f"unknown feature family '{family}', expected one of {FAMILIES}")
    prices = _load_prices(prices_path, config, force)
    calendar = _calendar_from_prices(prices)
    inputs = {"prices": prices_path}
    if family == "sentiment":
        if events_path is None:
            raise IOStageError("the sentiment family needs --events (run synth or supply events.csv)")
        events_df, ev_prov = io.read_table(events_path, io.EVENTS_SCHEMA)
        io.check_provenance(events_path, ev_prov, config.digest(), force)
        table = _sentiment_rows(prices, events_df, calendar, config)
        inputs["events"] = events_path
    else:
        table = _price_family_rows(prices, calendar, config, family)
    provenance = io.make_provenance(config.digest(), inputs)
    provenance["metadata"] = {"family": family, "n_rows": int(len(table))}
    io.write_table(out_path, table, provenance)
    return out_path


# ---------------------------------------------------------------------------
# assemble / normalize
# ---------------------------------------------------------------------------

def run_assemble(
    config: PipelineConfig,
    features_paths: list[str],
    universe_path: str,
    out_path: str,
    financials_path: str | None = None,
    force: bool = False,
) -> str:
    universe, u_prov = io.read_table(universe_path, io.UNIVERSE_SCHEMA)
    io.check_provenance(universe_path, u_prov, config.digest(), force)
    families: dict[str, pd.DataFrame] = {}
    inputs = {"universe": universe_path}
    for path in features_paths:
        df, prov = io.read_table(path, io.FEATURES_SCHEMA)
        io.check_provenance(path, prov, config.digest(), force)
        name = (prov or {}).get("metadata", {}).get("family") or os.path.basename(path)
        if name in families:
            raise InvalidInputError(f"duplicate feature family '{name}'")
        families[name] = df
        inputs[f"features:{name}"] = path
    if financials_path is not None:
        monthly, f_prov = io.read_table(financials_path, io.FINANCIALS_SCHEMA)
        io.check_provenance(financials_path, f_prov, config.digest(), force)
        weeks = sorted(universe["week"].unique())
        families["financials"] = resample_financials(monthly, weeks)
        inputs["financials"] = financials_path
    result = assemble(families, universe)
    provenance = io.make_provenance(config.digest(), inputs)
    provenance["metadata"] = {"drops": result.drop_counts, "n_rows": int(len(result.table))}
    io.write_table(out_path, result.table, provenance)
    return out_path


def run_normalize(
    config: PipelineConfig, dataset_path: str, out_path: str, force: bool = False
) -> str:
    table, prov = io.read_table(dataset_path, io.FEATURES_SCHEMA)
    io.check_provenance(dataset_path, prov, config.digest(), force)
    quantized, fallbacks = rank_quantize(table, config.quantiles)
    provenance = io.make_provenance(config.digest(), {"dataset": dataset_path})
    provenance["metadata"] = {"allzero_fallback_groups": fallbacks}
    io.write_table(out_path, quantized, provenance)
    return out_path


# ---------------------------------------------------------------------------
# split
# ---------------------------------------------------------------------------

def run_split(config: PipelineConfig, outdir: str) -> list[str]:
    os.makedirs(outdir, exist_ok=True)
    calendar = TradingCalendar.business_days(
        dt.date.fromisoformat(config.calendar_start), dt.date.fromisoformat(config.calendar_end)
    )
    schemes = make_cv_schemes(config.cv_table, calendar)
    paths = []
    for i, scheme in enumerate(schemes):
        manifest = {
            "name": scheme.name,
            "train_start": scheme.train_start.isoformat(),
            "train_end": scheme.train_end.isoformat(),
            "validation_start": scheme.validation_start.isoformat(),
            "validation_end": scheme.validation_end.isoformat(),
            "test_start": scheme.test_start.isoformat(),
            "test_end": scheme.test_end.isoformat(),
            "config_digest": config.digest(),
        }
        path = os.path.join(outdir, f"cv{i}.json")
        io.atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        paths.append(path)
    return paths


def load_scheme(path: str, config: PipelineConfig, force: bool = False) -> CvScheme:
    if not os.path.exists(path):
        raise IOStageError(f"missing scheme manifest: {path} (run the split command first)")
    with open(path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    found = manifest.get("config_digest")
    if found is not None and found != config.digest() and not force:
        raise InvalidInputError(
            f"{path}: scheme manifest from config {found[:12]}..., current is "
            f"{config.digest()[:12]}... (use --force to override)"
        )
    return CvScheme(
        name=manifest["name"],
        train_start=dt.date.fromisoformat(manifest["train_start"]),
        train_end=dt.date.fromisoformat(manifest["train_end"]),
        validation_start=dt.date.fromisoformat(manifest["validation_start"]),
        validation_end=dt.date.fromisoformat(manifest["validation_end"]),
        test_start=dt.date.fromisoformat(manifest["test_start"]),
        test_end=dt.date.fromisoformat(manifest["test_end"]),
    )


# ---------------------------------------------------------------------------
# train-baseline / evaluate / report
# ---------------------------------------------------------------------------

def run_train_baseline(
    config: PipelineConfig,
    dataset_path: str,
    targets_path: str,
    scheme_path: str,
    out_path: str,
    force: bool = False,
) -> str:
    table, d_prov = io.read_table(dataset_path, io.FEATURES_SCHEMA)
    io.check_provenance(dataset_path, d_prov, config.digest(), force)
    targets, t_prov = io.read_table(targets_path, io.TARGETS_SCHEMA)
    io.check_provenance(targets_path, t_prov, config.digest(), force)
    validate_targets(targets)
    scheme = load_scheme(scheme_path, config, force)
    lo, hi = scheme.train_start.isoformat(), scheme.train_end.isoformat()
    train = table[(table["week"] >= lo) & (table["week"] <= hi)]
    if train.empty:
        raise InvalidInputError(f"no dataset rows in the training period {lo}..{hi}")
    model = fit_baseline_model(train, targets, config.ridge_lambda)
    payload = {
        "model": "ridge_rank",
        "columns": list(model.columns),
        "weights": model.weights.tolist(),
        "target_mean": model.target_mean,
        "ridge_lambda": model.ridge_lambda,
        "scheme": scheme.name,
        "config_digest": config.digest(),
    }
    io.atomic_write_text(out_path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return out_path


def load_model(path: str, config: PipelineConfig, force: bool = False) -> RidgeRankModel:
    if not os.path.exists(path):
        raise IOStageError(f"missing model file: {path} (run the train-baseline command first)")
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    found = payload.get("config_digest")
    if found is not None and found != config.digest() and not force:
        raise InvalidInputError(
            f"{path}: model from config {found[:12]}..., current is "
            f"{config.digest()[:12]}... (use --force to override)"
        )
    return RidgeRankModel(
        columns=tuple(payload["columns"]),
        weights=np.array([float(w) for w in payload["weights"]]),
        target_mean=float(payload["target_mean"]),
        ridge_lambda=float(payload["ridge_lambda"]),
    )


def run_evaluate(
    config: PipelineConfig,
    targets_path: str,
    scheme_path: str,
    period: str,
    outdir: str,
    predictions_path: str | None = None,
    model_path: str | None = None,
    dataset_path: str | None = None,
    force: bool = False,
) -> dict[str, str]:
    if (predictions_path is None) == (model_path is None):
        raise InvalidInputError("provide exactly one of --predictions or --model")
    os.makedirs(outdir, exist_ok=True)
    targets, t_prov = io.read_table(targets_path, io.TARGETS_SCHEMA)
    io.check_provenance(targets_path, t_prov, config.digest(), force)
    validate_targets(targets)
    scheme = load_scheme(scheme_path, config, force)
    inputs = {"targets": targets_path, "scheme": scheme_path}
    written: dict[str, str] = {}

    if predictions_path is not None:
        predictions, p_prov = io.read_table(predictions_path, io.PREDICTIONS_SCHEMA)
        io.check_provenance(predictions_path, p_prov, config.digest(), force)
        inputs["predictions"] = predictions_path
    else:
        if dataset_path is None:
            raise InvalidInputError("--model needs --dataset to predict from")
        table, d_prov = io.read_table(dataset_path, io.FEATURES_SCHEMA)
        io.check_provenance(dataset_path, d_prov, config.digest(), force)
        model = load_model(model_path, config, force)
        lo, hi = (d.isoformat() for d in scheme.period_range(period))
        period_table = table[(table["week"] >= lo) & (table["week"] <= hi)]
        predictions = predict_baseline(model, period_table)
        inputs["model"] = model_path
        inputs["dataset"] = dataset_path
        pred_path = os.path.join(outdir, "predictions.csv")
        io.write_table(pred_path, predictions, io.make_provenance(config.digest(), inputs))
        written["predictions"] = pred_path

    weeks = sorted({dt.date.fromisoformat(w) for w in targets["week"]})
    report, series = evaluate_predictions(predictions, targets, scheme, period, weeks)

    provenance = io.make_provenance(config.digest(), inputs)
    provenance["metadata"] = {"scheme": scheme.name, "period": period}
    report_df = pd.DataFrame(
        {
            "metric": [
                "mean_corr", "volatility", "sharpe", "max_drawdown", "calmar",
                "n_weeks", "n_skipped_weeks", "n_degenerate_weeks",
            ],
            "value": [
                io.FLOAT_FORMAT % report.mean_corr,
                io.FLOAT_FORMAT % report.volatility,
                "" if report.sharpe is None else io.FLOAT_FORMAT % report.sharpe,
                io.FLOAT_FORMAT % report.max_drawdown,
                "" if report.calmar is None else io.FLOAT_FORMAT % report.calmar,
                str(report.n_weeks),
                str(report.n_skipped_weeks),
                str(report.n_degenerate_weeks),
            ],
        }
    )
    report_path = os.path.join(outdir, "report.csv")
    io.write_table(report_path, report_df, provenance)
    written["report"] = report_path
    series_df = pd.DataFrame(
        {
            "week": [w.isoformat() for w in series.weeks],
            "corr": series.corrs,
            "degenerate": [int(f) for f in series.degenerate],
        }
    )
    series_path = os.path.join(outdir, "corr_series.csv")
    io.write_table(series_path, series_df, provenance)
    written["corr_series"] = series_path
    return written


def render_report(report_path: str, series_path: str | None = None) -> str:
    df, _ = io.read_table(report_path)
    values = dict(zip(df["metric"], df["value"]))
    lines = ["strategy report", "-" * 40]
    for metric in ("mean_corr", "volatility", "sharpe", "max_drawdown", "calmar"):
        value = values.get(metric)
        shown = "undefined" if value is None or (isinstance(value, float) and pd.isna(value)) else value
        lines.append(f"{metric:<22}{shown}")
    for metric in ("n_weeks", "n_skipped_weeks", "n_degenerate_weeks"):
        lines.append(f"{metric:<22}{values.get(metric)}")
    if series_path is not None and os.path.exists(series_path):
        series, _ = io.read_table(series_path)
        corrs = series["corr"].astype(float)
        lines.append("-" * 40)
        lines.append(f"weeks scored          {len(series)}")
        if len(series):
            lines.append(f"first/last week       {series['week'].iloc[0]} / {series['week'].iloc[-1]}")
            lines.append(f"corr range            {corrs.min():.4f} .. {corrs.max():.4f}")
    return "\n".join(lines)
