import csv
import io
import math
import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heston_is import cli
from heston_is.config import (
    KINDS,
    ConfigError,
    ExperimentConfig,
    dumps,
    load,
    loads,
    parse_number,
    with_overrides,
)
from heston_is.experiments import (
    OPTIMALITY_HEADER,
    PRICE_HEADER,
    SCGF_HEADER,
    SWEEP_HEADER,
    TABLE1_HEADER,
    run,
)
from heston_is.model import HestonParams, Scheme
from heston_is.report import NA, PlotSpec, Table, format_cell, to_csv, write_outputs

finite = st.floats(allow_nan=False, allow_infinity=False, min_value=1e-6, max_value=1e6)
grid = st.lists(finite, min_size=1, max_size=5, unique=True).map(lambda xs: tuple(sorted(xs)))
params = st.builds(
    HestonParams,
    kappa=finite,
    theta=finite,
    sigma=finite,
    rho=st.floats(-0.99, 0.99),
    v0=finite,
)
configs = st.builds(
    ExperimentConfig,
    kind=st.sampled_from(KINDS),
    regime=st.sampled_from([None, "short", "deep"]),
    params=st.none() | params,
    s0=finite,
    strike=st.none() | finite,
    maturity=st.none() | finite,
    moneyness=st.none() | grid,
    maturities=st.none() | grid,
    paths=st.integers(2, 2**30),
    steps=st.none() | st.integers(1, 10_000),
    scheme=st.sampled_from(list(Scheme)),
    seed=st.integers(0, 2**64 - 1),
    chunk_size=st.integers(1, 2**20),
    workers=st.none() | st.integers(1, 64),
    scgf_points=st.integers(1, 50),
    scgf_fraction=st.floats(0.01, 0.99),
    scgf_scales=grid,
    output=st.none() | st.sampled_from(["out.csv", "results/sweep.csv"]),
)


def parse_csv(text):
    return list(csv.reader(io.StringIO(text)))


def assert_cells_valid(rows):
    for row in rows[1:]:
        for cell in row:
            if cell in (NA, "true", "false"):
                continue
            try:
                assert math.isfinite(float(cell))
            except ValueError:
                assert cell and not cell[0].isdigit()


class TestConfig:
    @settings(max_examples=200)
    @given(configs)
    def test_round_trip(self, cfg):
        assert loads(dumps(cfg)) == cfg

    def test_example_file(self, tmp_path):
        path = tmp_path / "c.ini"
        path.write_text(
            "[experiment]\nkind = vrr-sweep\nregime = deep\n\n"
            "[model]\nkappa = 15\ntheta = 0.5\nsigma = 1\nrho = -0.1\nv0 = 0.5\n\n"
            "[market]\nmoneyness = 1.0, 1.5, 2.0\nmaturities = 1/252, 1\n\n"
            "[simulation]\npaths = 1024\nscheme = Euler\nseed = 7\n"
        )
        cfg = load(str(path))
        assert cfg.kind == "vrr-sweep" and cfg.regime == "deep"
        assert cfg.maturities == (1 / 252, 1.0)
        assert cfg.scheme is Scheme.EULER and cfg.paths == 1024
        assert cfg.params == HestonParams(15, 0.5, 1, -0.1, 0.5)

    @pytest.mark.parametrize(
        "text",
        [
            "[experiment]\nkind = nope\n",
            "[market]\nmoneyness = 1.5, 1.0\n",
            "[market]\nmaturities = 1, 1\n",
            "[simulation]\npaths = 1\n",
            "[simulation]\npaths = 2.5\n",
            "[simulation]\nscheme = rk4\n",
            "[simulation]\nbogus = 1\n",
            "[weird]\nx = 1\n",
            "[model]\nkappa = 1\n",
            "[model]\nkappa = 1\ntheta = 1\nsigma = 1\nrho = 2\nv0 = 1\n",
            "[market]\ns0 = abc\n",
            "[experiment]\nkind = table1\nregime = both\n",
            "not an ini file",
        ],
    )
    def test_rejects(self, text):
        with pytest.raises(ConfigError):
            loads(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load(str(tmp_path / "missing.ini"))

    def test_overrides_win(self):
        cfg = with_overrides(loads("[simulation]\npaths = 100\nseed = 3\n"), paths=50, seed=None)
        assert cfg.paths == 50 and cfg.seed == 3
        with pytest.raises(ConfigError):
            with_overrides(cfg, colour="red")

    def test_fractions(self):
        assert parse_number("1/252") == 1 / 252
        with pytest.raises(ConfigError):
            parse_number("1/0")


class TestReport:
    def test_cells(self):
        assert format_cell(None) == NA
        assert format_cell(math.nan) == NA
        assert format_cell(math.inf) == NA
        assert format_cell(True) == "true"
        assert format_cell(0.1) == "0.1"
        assert format_cell(3) == "3"

    def test_row_length_checked(self):
        with pytest.raises(ValueError):
            Table(("a", "b")).add(1)

    def test_outputs(self, tmp_path):
        t = Table(("x", "y", "g"), plot=PlotSpec("x", "y", group="g", logy=True))
        for g in ("a", "b"):
            for x in range(4):
                t.add(float(x), 2.0**x, g)
        out = tmp_path / "sub" / "r.csv"
        written = write_outputs(t, str(out))
        assert [os.path.basename(p) for p in written] == ["r.csv", "r.gp", "r.png"]
        script = (tmp_path / "sub" / "r.gp").read_text()
        assert "'r.csv'" in script and "set output 'r.png'" in script and "g=a" in script
        assert (tmp_path / "sub" / "r.png").read_bytes()[:4] == b"\x89PNG"


class TestRunners:
    def test_table1_schema(self):
        t = run(ExperimentConfig(kind="table1", paths=4096, steps=16))
        assert t.header == TABLE1_HEADER
        methods = t.column("method")
        assert methods.count("BMC") == 2 and methods.count("IS") == 2 and methods.count("VRR") == 2
        assert_cells_valid(parse_csv(to_csv(t)))

    def test_table1_deterministic_and_thread_free(self):
        a = to_csv(run(ExperimentConfig(kind="table1", paths=3000, steps=8, chunk_size=512, workers=1)))
        b = to_csv(run(ExperimentConfig(kind="table1", paths=3000, steps=8, chunk_size=512, workers=4)))
        assert a == b

    def test_sweep_schema(self):
        t = run(ExperimentConfig(kind="vrr-sweep", paths=2048, steps=8, moneyness=(1.0, 1.5), maturities=(1 / 252,)))
        assert t.header[:8] == ("maturity", "strike", "moneyness", "bmc_se", "is_se", "vrr", "bmc_price", "is_price")
        assert t.header == SWEEP_HEADER
        assert len(t.rows) == 2
        first = dict(zip(t.header, t.rows[0]))
        assert first["moneyness"] == 1.0 and first["hbar"] == 0.0 and math.isfinite(first["vrr"])
        assert_cells_valid(parse_csv(to_csv(t)))

    def test_scgf_check(self):
        t = run(ExperimentConfig(kind="scgf-check", regime="both"))
        assert t.header == SCGF_HEADER
        worst = {}
        for row in t.rows:
            r = dict(zip(t.header, row))
            if r["scale"] == 1e-4:
                worst[r["kind"]] = max(worst.get(r["kind"], 0.0), r["abs_diff"])
        assert len(worst) == 4 and max(worst.values()) <= 1e-3

    def test_optimality_report(self):
        t = run(ExperimentConfig(kind="optimality-report", regime="short"))
        assert t.header == OPTIMALITY_HEADER and len(t.rows) == 1
        assert math.isfinite(dict(zip(t.header, t.rows[0]))["relative_gap"])
        assert t.plot_data is not None and len(t.plot_data.rows) == 200

    def test_price_zero_strike(self):
        t = run(ExperimentConfig(kind="price", strike=0.0, paths=4096, steps=16, maturity=21 / 252))
        r = dict(zip(PRICE_HEADER, t.rows[0]))
        assert r["reference"] == 2000.0 and r["hbar"] == 0.0


class TestCli:
    def test_stdout(self, capsys):
        assert cli.main(["price", "--paths", "2048", "--steps", "8"]) == cli.EXIT_OK
        rows = parse_csv(capsys.readouterr().out)
        assert tuple(rows[0]) == PRICE_HEADER and len(rows) == 2

    def test_files(self, tmp_path):
        out = tmp_path / "t1.csv"
        assert cli.main(["table1", "--paths", "2048", "--steps", "8", "--out", str(out)]) == cli.EXIT_OK
        assert out.exists() and (tmp_path / "t1.gp").exists() and (tmp_path / "t1.png").exists()

    def test_no_figure(self, tmp_path):
        out = tmp_path / "s.csv"
        assert cli.main(["scgf-check", "--regime", "deep", "--out", str(out), "--no-figure"]) == 0
        assert (tmp_path / "s.gp").exists() and not (tmp_path / "s.png").exists()

    def test_config_flag_and_override(self, tmp_path, capsys):
        path = tmp_path / "c.ini"
        path.write_text("[simulation]\npaths = 1\n")
        assert cli.main(["price", "--config", str(path)]) == cli.EXIT_CONFIG
        assert cli.main(["price", "--config", str(path), "--paths", "2048", "--steps", "4"]) == cli.EXIT_OK

    @pytest.mark.parametrize(
        "argv, code",
        [
            (["price", "--paths", "1"], cli.EXIT_CONFIG),
            (["price", "--seed", "-3"], cli.EXIT_CONFIG),
            (["price", "--config", "/nonexistent.ini"], cli.EXIT_CONFIG),
            (["price", "--regime", "both"], cli.EXIT_CONFIG),
            (["optimality-report", "--regime", "short", "--strike", "1000"], cli.EXIT_PARAMETER),
            (["price", "--strike", "-5"], cli.EXIT_PARAMETER),
            (["price", "--maturity", "0"], cli.EXIT_PARAMETER),
        ],
    )
    def test_exit_codes(self, argv, code):
        assert cli.main(argv) == code

    def test_argparse_errors_are_config_errors(self):
        with pytest.raises(SystemExit) as info:
            cli.main(["price", "--scheme", "rk4"])
        assert info.value.code == cli.EXIT_CONFIG
        with pytest.raises(SystemExit) as info:
            cli.main([])
        assert info.value.code == cli.EXIT_CONFIG

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        code = cli.main(["scgf-check", "--regime", "deep", "--out", str(blocker / "r.csv"), "--no-figure"])
        assert code == cli.EXIT_RUNTIME
