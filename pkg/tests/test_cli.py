import csv
import json
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from firmbank import cli
from firmbank.config import ConfigError, parse_config, serialize_config
from firmbank.engine import run
from firmbank.model import EconomyMode, InfoMode, ModelParams
from firmbank.outputs import TIMESERIES_HEADER, emit_outputs, fit_report, read_sizes, read_timeseries


# -- config -------------------------------------------------------------------------


def test_empty_config_gives_defaults():
    p = parse_config("")
    assert p == ModelParams()
    assert (p.phi, p.sigma, p.alpha, p.omega) == (0.1, 0.5, 0.08, 0.002)


def test_single_override_and_comments():
    assert parse_config("sigma=0.9") == ModelParams(sigma=0.9)
    text = "# economy\ninfo_mode = perfect   # rational firms\n\nsnapshots = 10, 20\n"
    p = parse_config(text)
    assert p.info_mode is InfoMode.PERFECT and p.snapshots == (10, 20)


def test_unknown_key_names_line():
    with pytest.raises(ConfigError, match="line 1.*sigmma"):
        parse_config("sigmma=0.9")
    with pytest.raises(ConfigError, match="line 3"):
        parse_config("phi = 0.1\n\nalpha = lots\n")
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("phi = 0.1\njust words\n")


@given(
    phi=st.floats(1e-6, 10, allow_nan=False),
    sigma=st.floats(1e-6, 1),
    seed=st.integers(0, 2**64 - 1),
    n=st.integers(1, 10**6),
    info=st.sampled_from(list(InfoMode)),
    econ=st.sampled_from(list(EconomyMode)),
    entrant=st.one_of(st.none(), st.floats(1e-3, 1e3)),
    snaps=st.one_of(st.none(), st.lists(st.integers(0, 50), max_size=4).map(tuple)),
)
def test_config_round_trip(phi, sigma, seed, n, info, econ, entrant, snaps):
    p = ModelParams(phi=phi, sigma=sigma, seed=seed, n_firms=n, info_mode=info, economy_mode=econ,
                    entrant_equity=entrant, snapshots=snaps)
    assert parse_config(serialize_config(p)) == p


# -- outputs ------------------------------------------------------------------------


def _emit(p, out):
    r = run(p)
    emit_outputs(r, fit_report(r.snapshots, r.history), out)
    return r


def test_zero_period_run_has_header_only(tmp_path):
    _emit(ModelParams(n_firms=5, horizon=0), tmp_path)
    lines = (tmp_path / "timeseries.csv").read_text().splitlines()
    assert lines == [",".join(TIMESERIES_HEADER)]


def test_identical_runs_identical_digests(tmp_path):
    p = ModelParams(n_firms=300, horizon=80, snapshots=(40, 80))
    _emit(p, tmp_path / "a")
    _emit(p, tmp_path / "b")
    ma = json.loads((tmp_path / "a" / "manifest.json").read_text())
    mb = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert ma["files"] == mb["files"]
    assert {f["name"] for f in ma["files"]} >= {"timeseries.csv", "sizes_40.csv", "sizes_80.csv",
                                                "bankruptcies.csv", "fits.json"}
    for f in ma["files"]:
        assert (tmp_path / "a" / f["name"]).read_bytes() == (tmp_path / "b" / f["name"]).read_bytes()


def test_perfect_run_has_empty_bankruptcy_body(tmp_path):
    _emit(ModelParams(n_firms=100, horizon=50, info_mode="perfect"), tmp_path)
    rows = list(csv.reader((tmp_path / "bankruptcies.csv").open()))
    assert rows == [["period", "firm", "size", "bad_debt"]]


def test_manifest_reproduces_run(tmp_path):
    p = ModelParams(n_firms=100, horizon=30, seed=99)
    r = _emit(p, tmp_path)
    m = json.loads((tmp_path / "manifest.json").read_text())
    assert m["seed"] == 99 and m["terminal"] == r.terminal and m["periods_completed"] == 30
    assert ModelParams(**m["params"]) == p


def test_reingested_outputs_reproduce_fits_and_history(tmp_path):
    p = ModelParams(n_firms=2000, horizon=150, snapshots=(50, 100, 150))
    r = _emit(p, tmp_path)
    assert read_timeseries(tmp_path) == r.history
    snaps = read_sizes(tmp_path)
    for k in r.snapshots:
        assert snaps[k].tobytes() == r.snapshots[k].tobytes()
    again = fit_report(snaps, read_timeseries(tmp_path))
    stored = json.loads((tmp_path / "fits.json").read_text())
    assert json.loads(json.dumps(again, sort_keys=True)) == stored


# -- command line -------------------------------------------------------------------


def test_oracle_prints_reference_values(capsys):
    assert cli.main(["oracle"]) == 0
    out = dict(line.split(" = ") for line in capsys.readouterr().out.splitlines())
    assert float(out["xi"]) == pytest.approx(0.046, abs=1e-12)
    assert abs(float(out["r_star"]) - 0.0995) < 5e-5
    assert float(out["approx_error"]) < 1e-5


def test_run_and_analyze(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("n_firms = 500\nhorizon = 60\n")
    out = tmp_path / "out"
    code = cli.main(["run", "--config", str(cfg), "--out-dir", str(out), "--snapshots", "30,60",
                     "--info-mode", "perfect", "--seed", "5"])
    assert code == 0
    m = json.loads((out / "manifest.json").read_text())
    assert m["params"]["info_mode"] == "perfect" and m["seed"] == 5
    capsys.readouterr()
    assert cli.main(["analyze", "--out-dir", str(out)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report == json.loads((out / "fits.json").read_text())
    assert [s["period"] for s in report["snapshots"]] == [30, 60]


def test_config_errors_exit_2(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("sigmma = 0.9\n")
    assert cli.main(["run", "--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 2
    cfg.write_text("sigma = 0\n")
    assert cli.main(["oracle", "--config", str(cfg)]) == 2


def test_bank_failure_exits_3(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["run", "--n-firms", "20", "--horizon", "3000", "--seed", "3", "--out-dir", str(out)]) == 3
    assert json.loads((out / "manifest.json").read_text())["terminal"] == "bank_failure"


def test_unwritable_output_exits_4(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["run", "--n-firms", "10", "--horizon", "5", "--out-dir", str(blocker / "sub")]) == 4


def test_sweep_writes_one_manifest_per_cell(tmp_path):
    out = tmp_path / "sweep"
    code = cli.main(["sweep", "--param", "sigma", "--values", "0.3,0.5", "--n-firms", "100",
                     "--horizon", "20", "--info-mode", "perfect", "--out-dir", str(out)])
    assert code == 0
    index = json.loads((out / "sweep.json").read_text())
    assert [c["value"] for c in index["cells"]] == ["0.3", "0.5"]
    for c in index["cells"]:
        m = json.loads((out / c["dir"] / "manifest.json").read_text())
        assert m["params"]["sigma"] == float(c["value"])


def test_sweep_rejects_bad_value(tmp_path):
    assert cli.main(["sweep", "--param", "alpha", "--values", "0.5,1.5", "--n-firms", "10",
                     "--horizon", "2", "--out-dir", str(tmp_path)]) == 2


def test_analyze_missing_dir_is_io_error(tmp_path):
    assert cli.main(["analyze", "--out-dir", str(tmp_path / "nowhere")]) == cli.EXIT_IO
