from __future__ import annotations
from typing import Any
from typing import Optional
from typing import Sequence

from argparse import ArgumentParser
from dataclasses import replace
import logging
import os
import sys

from gvrisk import config
from gvrisk import tables
from gvrisk.errors import GVaRError
from gvrisk.gheat import GridSpec
from gvrisk.gheat import numeric_g_cdf_table
from gvrisk.gnormal import GNormalParams
from gvrisk.pipeline import Calibration
from gvrisk.pipeline import EngineConfig
from gvrisk.pipeline import gaussian_var_baseline
from gvrisk.pipeline import grid_search
from gvrisk.pipeline import horizon_reports
from gvrisk.pipeline import run_gvar
from gvrisk.pipeline import simulate_regime_switching
from gvrisk.tables import Destination

logger = logging.getLogger("gvrisk")

GVAR_MODEL = "G-VaR"
GAUSSIAN_MODEL = "Gaussian"


def _destination(args: Any) -> Destination:
    return sys.stdout if args.output is None else args.output


def _engine_config(args: Any) -> EngineConfig:
    layers = []
    if args.config is not None:
        layers.append(config.load_config_file(args.config))
    layers.append({key: getattr(args, key) for key in config.CONFIG_KEYS})

    cfg = config.build_config(config.merge_values(*layers))
    logger.debug(f"cfg={cfg!r}")
    return cfg


def _handler_help(parser: ArgumentParser, args: Any) -> None:
    _ = args

    parser.print_help()


def _handler_ingest(parser: ArgumentParser, args: Any) -> None:
    _ = parser

    series = tables.load_prices(args.prices)
    text = tables.render(tables.returns_frame(series))
    tables.deliver(text, _destination(args), "returns.csv")


def _handler_forecast(parser: ArgumentParser, args: Any) -> None:
    _ = parser

    cfg = _engine_config(args)
    records = run_gvar(tables.load_prices(args.prices), cfg)
    tables.emit_report(records, None, _destination(args))


def _handler_backtest(parser: ArgumentParser, args: Any) -> None:
    _ = parser

    cfg = _engine_config(args)
    series = tables.load_prices(args.prices)
    records = run_gvar(series, cfg)

    summary = [
        (GVAR_MODEL, report)
        for report in horizon_reports(records, cfg.alpha, cfg.horizons)
    ]
    if cfg.baseline:
        baseline = gaussian_var_baseline(series, cfg)
        summary.extend(
            (GAUSSIAN_MODEL, report)
            for report in horizon_reports(baseline, cfg.alpha, cfg.horizons)
        )

    (model, report), *extra = summary
    tables.emit_report(
        records, report, _destination(args), model=model, extra=extra
    )


def _handler_baseline(parser: ArgumentParser, args: Any) -> None:
    _ = parser

    cfg = _engine_config(args)
    records = gaussian_var_baseline(tables.load_prices(args.prices), cfg)
    report, *rest = horizon_reports(records, cfg.alpha, cfg.horizons)
    tables.emit_report(
        records,
        report,
        _destination(args),
        model=GAUSSIAN_MODEL,
        extra=[(GAUSSIAN_MODEL, r) for r in rest],
    )


def _handler_grid(parser: ArgumentParser, args: Any) -> None:
    _ = parser

    cfg = _engine_config(args)
    result = grid_search(tables.load_prices(args.prices), cfg)
    text = tables.render(tables.grid_frame(result))
    tables.deliver(text, _destination(args), "grid.csv")


def _handler_simulate(parser: ArgumentParser, args: Any) -> None:
    _ = parser

    cfg = _engine_config(args)
    series = simulate_regime_switching(
        n=args.n_returns,
        sigma_lo=args.sigma_lo,
        sigma_hi=args.sigma_hi,
        mu=args.mu,
        switch_prob=args.switch_prob,
        seed=cfg.seed,
        start_high=not args.start_low,
    )
    target = sys.stdout if args.path == "-" else args.path
    tables.write_prices(series, target)


def _handler_pde_check(parser: ArgumentParser, args: Any) -> None:
    _ = parser

    p = GNormalParams(args.mu, args.sigma_lo, args.sigma_hi)
    rows = numeric_g_cdf_table(p, replace(GridSpec(), nx=args.nx))

    worst = max(abs(row[3]) for row in rows)
    logger.info(
        f"pde-check: sup |closed form - numeric| = {worst:.3g} "
        f"over {len(rows)} interior nodes"
    )

    # Every node is too much to read; keep roughly 201 evenly spaced rows.
    stride = max(1, len(rows) // 200)
    picked = rows[::stride]
    text = tables.render(tables.pde_frame(picked))
    tables.deliver(text, _destination(args), "pde_check.csv")


def _add_config_arguments(parser: ArgumentParser) -> None:
    # Every flag defaults to None so that unset flags leave the config file
    # value in place.
    parser.add_argument("-c", "--config", default=None, dest="config")
    parser.add_argument("--alpha", default=None, dest="alpha")
    parser.add_argument("--k", default=None, dest="k")
    parser.add_argument("--l", default=None, dest="l")
    parser.add_argument("--n", default=None, dest="n")
    parser.add_argument("--start", default=None, dest="start")
    parser.add_argument("--end", default=None, dest="end")
    parser.add_argument(
        "--validation-start", default=None, dest="validation_start"
    )
    parser.add_argument(
        "--validation-end", default=None, dest="validation_end"
    )
    parser.add_argument("--k-range", default=None, dest="k_range")
    parser.add_argument("--l-range", default=None, dest="l_range")
    parser.add_argument(
        "--baseline",
        default=None,
        dest="baseline",
        action="store_const",
        const="true",
    )
    parser.add_argument("--seed", default=None, dest="seed")
    parser.add_argument("--horizons", default=None, dest="horizons")
    parser.add_argument(
        "--calibration",
        default=None,
        dest="calibration",
        choices=[c.value for c in Calibration],
    )


def _add_output_argument(parser: ArgumentParser) -> None:
    parser.add_argument("-o", "--output", default=None, dest="output")


def make_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="gvrisk")
    parser.set_defaults(handler=_handler_help)

    parser.add_argument("-v", "--verbose", dest="verbose", action="store_true")

    engine = ArgumentParser(add_help=False)
    _add_config_arguments(engine)

    output = ArgumentParser(add_help=False)
    _add_output_argument(output)

    subparsers = parser.add_subparsers()

    help_parser = subparsers.add_parser("help")
    help_parser.set_defaults(handler=_handler_help)

    ingest_parser = subparsers.add_parser("ingest")
    ingest_parser.set_defaults(handler=_handler_ingest)
    ingest_parser.add_argument("prices")
    _add_output_argument(ingest_parser)

    for name, handler in (
        ("forecast", _handler_forecast),
        ("backtest", _handler_backtest),
        ("baseline", _handler_baseline),
        ("grid", _handler_grid),
    ):
        command_parser = subparsers.add_parser(
            name, parents=[engine, output]
        )
        command_parser.set_defaults(handler=handler)
        command_parser.add_argument("prices")

    simulate_parser = subparsers.add_parser("simulate", parents=[engine])
    simulate_parser.set_defaults(handler=_handler_simulate)
    simulate_parser.add_argument("path", nargs="?", default="-")
    simulate_parser.add_argument(
        "--n-returns", type=int, default=2500, dest="n_returns"
    )
    simulate_parser.add_argument(
        "--sigma-lo", type=float, default=0.5, dest="sigma_lo"
    )
    simulate_parser.add_argument(
        "--sigma-hi", type=float, default=2.0, dest="sigma_hi"
    )
    simulate_parser.add_argument("--mu", type=float, default=0.0, dest="mu")
    simulate_parser.add_argument(
        "--switch-prob", type=float, default=0.02, dest="switch_prob"
    )
    simulate_parser.add_argument(
        "--start-low", default=False, dest="start_low", action="store_true"
    )

    pde_parser = subparsers.add_parser("pde-check")
    pde_parser.set_defaults(handler=_handler_pde_check)
    pde_parser.add_argument(
        "--sigma-lo", type=float, default=0.5, dest="sigma_lo"
    )
    pde_parser.add_argument(
        "--sigma-hi", type=float, default=1.5, dest="sigma_hi"
    )
    pde_parser.add_argument("--mu", type=float, default=0.0, dest="mu")
    pde_parser.add_argument(
        "--nx", type=int, default=GridSpec().nx, dest="nx"
    )
    _add_output_argument(pde_parser)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=os.getenv("LOG_LEVEL", "INFO"))

    parser = make_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        logger.setLevel(logging.DEBUG)

    try:
        args.handler(parser, args)
    except GVaRError as e:
        logger.error(f"{type(e).__name__}: {e}")
        logger.debug("Traceback", exc_info=e)
        return e.exit_code

    return 0


if __name__ == "__main__":
    raise SystemExit(main())
