import pytest

from gvrisk.__main__ import main
from gvrisk.tables import FORECAST_COLUMNS
from gvrisk.tables import GRID_COLUMNS
from gvrisk.tables import PDE_COLUMNS
from gvrisk.tables import load_prices

SMALL = ["--k", "5", "--l", "6", "--n", "30"]


@pytest.fixture
def prices(tmp_path):
    path = tmp_path / "prices.csv"
    code = main(
        [
            "simulate",
            str(path),
            "--n-returns",
            "200",
            "--switch-prob",
            "0.05",
            "--seed",
            "3",
        ]
    )
    assert code == 0
    return path


def test_simulate_to_stdout(capsys):
    assert main(["simulate", "--n-returns", "5", "--seed", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "date,close"
    assert len(lines) == 7


def test_simulate_is_seeded(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["simulate", str(first), "--n-returns", "50", "--seed", "9"])
    main(["simulate", str(second), "--n-returns", "50", "--seed", "9"])
    assert first.read_text() == second.read_text()


def test_ingest(prices, tmp_path, capsys):
    assert main(["ingest", str(prices)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "date,z"
    assert len(lines) == 201

    out = tmp_path / "ingested"
    assert main(["ingest", str(prices), "-o", str(out)]) == 0
    assert (out / "returns.csv").read_text().splitlines() == lines


def test_forecast(prices, capsys):
    assert main(["forecast", str(prices), *SMALL]) == 0
    lines = capsys.readouterr().out.splitlines()

    assert lines[0] == ",".join(FORECAST_COLUMNS)
    # First forecast index is L + K - 2 + N = 39.
    assert len(lines) == 1 + 200 - 39
    assert "" not in lines


def test_backtest_with_baseline(prices, tmp_path):
    out = tmp_path / "run"
    code = main(
        ["backtest", str(prices), *SMALL, "--baseline", "-o", str(out)]
    )
    assert code == 0

    summary = (out / "summary.csv").read_text().splitlines()
    assert [row.split(",")[0] for row in summary[1:]] == ["G-VaR", "Gaussian"]
    assert all(row.split(",")[1] == "161" for row in summary[1:])
    assert len((out / "forecasts.csv").read_text().splitlines()) == 162


def test_backtest_reads_config_file(prices, tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("alpha = 0.01\nk = 5\nl = 6\nn = 30\ncalibration = fixed\n")

    assert main(["backtest", str(prices), "-c", str(cfg)]) == 0
    forecasts, summary = capsys.readouterr().out.split("\n\n")
    assert len(forecasts.splitlines()) == 162
    assert summary.splitlines()[1].startswith("G-VaR,161,")


def test_flags_override_config_file(prices, tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("k = 5\nl = 6\nn = 30\n")

    assert main(["forecast", str(prices), "-c", str(cfg), "--n", "50"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1 + 200 - 59


def test_baseline(prices, capsys):
    assert main(["baseline", str(prices), *SMALL]) == 0
    _, summary = capsys.readouterr().out.split("\n\n")
    assert summary.splitlines()[1].startswith("Gaussian,")


def test_grid(prices, tmp_path):
    out = tmp_path / "grid"
    code = main(
        [
            "grid",
            str(prices),
            "--n",
            "30",
            "--k-range",
            "3:4",
            "--l-range",
            "5:6",
            "-o",
            str(out),
        ]
    )
    assert code == 0

    lines = (out / "grid.csv").read_text().splitlines()
    assert lines[0] == ",".join(GRID_COLUMNS)
    assert len(lines) == 5
    selected = GRID_COLUMNS.index("selected")
    assert sum(int(row.split(",")[selected]) for row in lines[1:]) == 1


def test_pde_check(tmp_path, caplog):
    out = tmp_path / "pde"
    with caplog.at_level("INFO", logger="gvrisk"):
        assert main(["pde-check", "--nx", "201", "-o", str(out)]) == 0

    lines = (out / "pde_check.csv").read_text().splitlines()
    assert lines[0] == ",".join(PDE_COLUMNS)
    assert len(lines) > 100
    difference = PDE_COLUMNS.index("difference")
    gaps = [abs(float(row.split(",")[difference])) for row in lines[1:]]
    assert max(gaps) < 0.1
    assert "sup |closed form - numeric|" in caplog.text


def test_help(capsys):
    assert main([]) == 0
    assert "usage: gvrisk" in capsys.readouterr().out
    assert main(["help"]) == 0


def test_bad_price_file_exits_3(tmp_path, caplog):
    path = tmp_path / "bad.csv"
    path.write_text("date,close\n2020-01-02,100\n2020-01-03,-1\n")
    assert main(["forecast", str(path)]) == 3
    assert "IngestionError" in caplog.text
    assert f"{path}:3" in caplog.text


def test_short_history_exits_4(tmp_path, caplog):
    path = tmp_path / "short.csv"
    main(["simulate", str(path), "--n-returns", "20"])
    assert len(load_prices(path)) == 20

    assert main(["forecast", str(path), *SMALL]) == 4
    assert "short by" in caplog.text


@pytest.mark.parametrize(
    "flags",
    [
        ["--alpha", "0.9"],
        ["--k", "20"],
        ["--start", "yesterday"],
        ["--start", "2001-01-01", "--end", "2000-01-01"],
    ],
)
def test_bad_config_exits_2(prices, flags):
    assert main(["forecast", str(prices), *flags]) == 2


def test_unknown_config_key_exits_2(prices, tmp_path, caplog):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("alpha = 0.05\nwindow = 10\n")
    assert main(["forecast", str(prices), "-c", str(cfg)]) == 2
    assert "line=2" in caplog.text


def test_backtest_trailing_horizons(prices, tmp_path):
    out = tmp_path / "horizons"
    code = main(
        [
            "backtest",
            str(prices),
            *SMALL,
            "--horizons",
            "50,100,161",
            "--baseline",
            "-o",
            str(out),
        ]
    )
    assert code == 0

    rows = [
        row.split(",")
        for row in (out / "summary.csv").read_text().splitlines()[1:]
    ]
    assert [(row[0], row[1]) for row in rows] == [
        ("G-VaR", "50"),
        ("G-VaR", "100"),
        ("G-VaR", "161"),
        ("Gaussian", "50"),
        ("Gaussian", "100"),
        ("Gaussian", "161"),
    ]


def test_horizon_beyond_forecasts_exits_4(prices, caplog):
    code = main(["backtest", str(prices), *SMALL, "--horizons", "250"])
    assert code == 4
    assert "forecast dates" in caplog.text
