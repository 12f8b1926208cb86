from gvrisk.arcal import ARCoefficients
from gvrisk.arcal import Forecast
from gvrisk.arcal import calibrate
from gvrisk.arcal import fit_ar1
from gvrisk.arcal import forecast_one_step
from gvrisk.backtest import BacktestReport
from gvrisk.backtest import build_report
from gvrisk.backtest import count_violations
from gvrisk.backtest import lr_ind
from gvrisk.backtest import lr_uc
from gvrisk.gheat import expectation_of
from gvrisk.gheat import numeric_g_cdf
from gvrisk.gheat import solve_gheat
from gvrisk.gnormal import GNormalParams
from gvrisk.gnormal import g_cdf
from gvrisk.gnormal import g_function
from gvrisk.gnormal import g_quantile
from gvrisk.gnormal import g_var
from gvrisk.pipeline import EngineConfig
from gvrisk.pipeline import ForecastRecord
from gvrisk.pipeline import gaussian_var_baseline
from gvrisk.pipeline import grid_search
from gvrisk.pipeline import horizon_reports
from gvrisk.pipeline import run_gvar
from gvrisk.pipeline import simulate_regime_switching
from gvrisk.tables import emit_report
from gvrisk.tables import load_prices
from gvrisk.windows import LocalEstimates
from gvrisk.windows import ReturnSeries
from gvrisk.windows import WindowConfig
from gvrisk.windows import local_estimates
from gvrisk.windows import rolling_estimates

__version__ = "0.1.0"
__version_info__ = __version__.split(".")


__all__ = (
    "ARCoefficients",
    "BacktestReport",
    "EngineConfig",
    "Forecast",
    "ForecastRecord",
    "GNormalParams",
    "LocalEstimates",
    "ReturnSeries",
    "WindowConfig",
    "build_report",
    "calibrate",
    "count_violations",
    "emit_report",
    "expectation_of",
    "fit_ar1",
    "forecast_one_step",
    "g_cdf",
    "g_function",
    "g_quantile",
    "g_var",
    "gaussian_var_baseline",
    "grid_search",
    "horizon_reports",
    "load_prices",
    "local_estimates",
    "lr_ind",
    "lr_uc",
    "numeric_g_cdf",
    "rolling_estimates",
    "run_gvar",
    "simulate_regime_switching",
    "solve_gheat",
)
