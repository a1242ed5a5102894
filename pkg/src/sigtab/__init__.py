"""sigtab: point-in-time tabular features and weekly rank backtesting.

Transforms multivariate financial time series into weekly cross-sectional
datasets (statistical moments, the canonical 22-feature set, truncated
log-signatures, event sentiment), rank-quantizes them, and evaluates
stock-ranking predictions with walk-forward splits and Spearman-based
strategy statistics.
"""

from .backtest import (
    CorrSeries,
    CvScheme,
    DEFAULT_CV_TABLE,
    RidgeRankModel,
    StrategyReport,
    evaluate_predictions,
    fit_baseline_model,
    make_cv_schemes,
    max_drawdown,
    predict_baseline,
    spearman_corr,
    strategy_report,
)
from .calendar import TradingCalendar, weekly_anchors
from .catch22 import CATCH22_NAMES, Catch22Vector, catch22, catch22_feature_row
from .config import PipelineConfig, SynthConfig, load_config, save_config
from .dataset import assemble, rank_quantize, resample_financials
from .errors import (
    ConfigurationError,
    InvalidInputError,
    IOStageError,
    SchemaError,
    SigtabError,
)
from .lyndon import (
    LogSignature,
    LyndonBasis,
    exp_log_signature,
    log_signature,
    log_signature_labels,
    lyndon_basis,
    lyndon_words,
    witt_number,
)
from .moments import MomentFeatures, moment_feature_row, moments
from .rolling import (
    rolling_log_signature,
    signature_feature_row,
)
from .sentiment import (
    NewsEvent,
    daily_average_sentiment,
    filter_events,
    select_top_categories,
    sentiment_feature_row,
)
from .series import (
    LookbackWindow,
    MultivariateSeries,
    OhlcBar,
    average_price,
    build_price_path,
    log_return_series,
    moving_average,
)
from .signature import (
    GradedTensor,
    PiecewiseLinearPath,
    chen_concat,
    signature,
    tensor_exp,
    tensor_log,
)

__version__ = "0.1.0"

__all__ = [
    "CATCH22_NAMES",
    "Catch22Vector",
    "ConfigurationError",
    "CorrSeries",
    "CvScheme",
    "DEFAULT_CV_TABLE",
    "GradedTensor",
    "InvalidInputError",
    "IOStageError",
    "LogSignature",
    "LookbackWindow",
    "LyndonBasis",
    "MomentFeatures",
    "MultivariateSeries",
    "NewsEvent",
    "OhlcBar",
    "PiecewiseLinearPath",
    "PipelineConfig",
    "RidgeRankModel",
    "SchemaError",
    "SigtabError",
    "StrategyReport",
    "SynthConfig",
    "TradingCalendar",
    "assemble",
    "average_price",
    "build_price_path",
    "catch22",
    "catch22_feature_row",
    "chen_concat",
    "daily_average_sentiment",
    "evaluate_predictions",
    "exp_log_signature",
    "filter_events",
    "fit_baseline_model",
    "load_config",
    "log_return_series",
    "log_signature",
    "log_signature_labels",
    "lyndon_basis",
    "lyndon_words",
    "make_cv_schemes",
    "max_drawdown",
    "moment_feature_row",
    "moments",
    "moving_average",
    "predict_baseline",
    "rank_quantize",
    "resample_financials",
    "rolling_log_signature",
    "save_config",
    "select_top_categories",
    "sentiment_feature_row",
    "signature",
    "signature_feature_row",
    "spearman_corr",
    "strategy_report",
    "tensor_exp",
    "tensor_log",
    "weekly_anchors",
    "witt_number",
]
