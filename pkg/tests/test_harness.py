import json
import math

import numpy as np
import pytest

from rcisec import SystemConfig, ValidationError, optimal_regularizer, secrecy_rate_deq
from rcisec.cli import main
from rcisec.harness import (
    SweepSpec,
    csv_text,
    emit_csv,
    ergodic_secrecy_rate_mc,
    parse_spec_text,
    read_csv,
    recipe,
    run_sweep,
    run_trials,
    trial_secrecy_rate,
)
from rcisec.harness.io import CSV_COLUMNS, write_meta
from rcisec.harness.selftest import run_selftest
from rcisec.harness.sweep import SweepResult, with_overrides


def _cfg(**kw):
    base = dict(M=4, K=4, rho_db=10.0, tau2=0.01)
    base.update(kw)
    return SystemConfig.from_db(**base)


# Monte Carlo ---------------------------------------------------------------

def test_single_trial_matches_direct_call():
    cfg = _cfg()
    est = ergodic_secrecy_rate_mc(cfg, 1, 5)
    direct = trial_secrecy_rate(cfg, optimal_regularizer(cfg.beta, cfg.rho), 5, 0)
    assert est.mean == direct[0]
    assert math.isnan(est.std_error)


def test_stderr_shrinks_with_trials():
    cfg = _cfg()
    a = ergodic_secrecy_rate_mc(cfg, 400, 1)
    b = ergodic_secrecy_rate_mc(cfg, 800, 1)
    assert b.std_error / a.std_error == pytest.approx(1 / math.sqrt(2), rel=0.2)
    lo, hi = b.ci95
    assert lo < b.mean < hi


@pytest.mark.parametrize("workers", [2, 3, 8])
def test_worker_count_does_not_change_results(workers):
    cfg = _cfg(M=6, K=5)
    a = run_trials(cfg, 37, 11)
    b = run_trials(cfg, 37, 11, workers=workers)
    assert np.array_equal(a, b)
    assert ergodic_secrecy_rate_mc(cfg, 37, 11) == ergodic_secrecy_rate_mc(cfg, 37, 11, workers=workers)


def test_trials_validated():
    with pytest.raises(ValidationError):
        run_trials(_cfg(), 0, 0)


def test_estimate_is_consistent_at_moderate_size():
    # beta < 1 converges quickly; the deterministic value should sit close
    cfg = SystemConfig.from_db(M=32, K=16, rho_db=20.0, tau2=0.01)
    est = ergodic_secrecy_rate_mc(cfg, 200, 3)
    deq = secrecy_rate_deq(cfg).sum_rate(cfg.K)
    assert abs(est.mean / deq - 1) < 0.05


@pytest.mark.xfail(strict=True, reason="finite-size bias at beta=1 is ~20% at M=10; see decisions ledger")
def test_square_system_within_eight_percent_at_m10():
    cfg = SystemConfig.from_db(M=10, K=10, rho_db=20.0, tau2=0.01)
    est = ergodic_secrecy_rate_mc(cfg, 1000, 0)
    deq = secrecy_rate_deq(cfg).sum_rate(cfg.K)
    assert abs(est.mean / deq - 1) < 0.08


@pytest.mark.slow
def test_relative_error_decreases_with_m():
    errs = []
    for M in (8, 16, 32, 64):
        cfg = SystemConfig.from_db(M=M, K=M, rho_db=20.0, tau2=0.01)
        est = ergodic_secrecy_rate_mc(cfg, 200, 2)
        errs.append(abs(est.mean / secrecy_rate_deq(cfg).sum_rate(M) - 1))
    assert all(b < a for a, b in zip(errs, errs[1:]))


# sweeps --------------------------------------------------------------------

def _spec(**kw):
    base = dict(axis="M", values=(4, 8), fixed=_cfg(), trials=20, master_seed=3)
    base.update(kw)
    return SweepSpec(**base)


def test_spec_validation():
    with pytest.raises(ValidationError):
        _spec(axis="gamma")
    with pytest.raises(ValidationError):
        _spec(values=(8, 4))
    with pytest.raises(ValidationError):
        _spec(values=())
    with pytest.raises(ValidationError):
        _spec(outputs={"bogus"})
    with pytest.raises(ValidationError):
        _spec(axis="T_t")
    with pytest.raises(ValidationError):
        _spec(normalize="N")


def test_axis_m_keeps_load():
    res = run_sweep(_spec(fixed=SystemConfig.from_db(M=4, K=2, rho_db=10.0), values=(4, 8, 12)))
    assert [r.extra.split(";")[1] for r in res.rows] == ["K=2", "K=4", "K=6"]
    assert all(r.ci95_low < r.mc_mean < r.ci95_high for r in res.rows)


def test_failed_row_is_isolated():
    res = run_sweep(_spec(axis="tau", values=(0.1, 1.0)))
    ok, bad = res.rows
    assert math.isfinite(ok.mc_mean) and math.isfinite(ok.deq_value)
    # no CSIT: the estimate is identically zero and the precoder is undefined
    assert math.isnan(bad.mc_mean) and "error=" in bad.extra


def test_normalization_scales_rows():
    a = run_sweep(_spec(values=(8,)))
    b = run_sweep(_spec(values=(8,), normalize="M"))
    assert b.rows[0].mc_mean == pytest.approx(a.rows[0].mc_mean / 8, rel=1e-15)
    assert b.rows[0].deq_value == pytest.approx(a.rows[0].deq_value / 8, rel=1e-15)


def test_training_axis_applies_prelog():
    spec = _spec(axis="T_t", values=(20.0,), fixed=_cfg(M=10, K=10, rho_db=30.0, tau2=0.0),
                 outputs={"deq_rate"}, tdd_T=100, tdd_c=10.0)
    row = run_sweep(spec).rows[0]
    tau2 = 1 / (1 + 20 * 100.0)
    expected = 0.8 * secrecy_rate_deq(_cfg(M=10, K=10, rho_db=30.0, tau2=tau2)).sum_rate(10)
    assert row.deq_value == pytest.approx(expected, rel=1e-12)


def test_meta_echoes_spec():
    res = run_sweep(_spec())
    assert res.meta["spec"]["axis"] == "M"
    assert res.meta["spec"]["values"] == [4.0, 8.0]
    assert res.meta["wall_time"] >= 0


@pytest.mark.parametrize("name", ["fig1", "fig2", "fig3"])
def test_recipes_run(name):
    specs = [with_overrides(s, trials=4) for s in recipe(name, trials=4)]
    for s in specs:
        res = run_sweep(with_overrides(s, values=s.values[:2]))
        assert len(res.rows) == 2
        assert all("error=" not in r.extra for r in res.rows)


def test_unknown_recipe():
    with pytest.raises(ValidationError):
        recipe("fig9")


# I/O -----------------------------------------------------------------------

def _key(row):
    # NaN-aware comparison key
    return tuple("NaN" if isinstance(v, float) and math.isnan(v) else v for v in vars(row).values())


def test_csv_round_trip(tmp_path):
    res = run_sweep(_spec(outputs={"mc_rate", "deq_rate", "gap"}, label="a,b \"q\""))
    path = tmp_path / "out.csv"
    emit_csv(res, path)
    back = read_csv(path)
    assert [_key(r) for r in back.rows] == [_key(r) for r in res.rows]
    assert csv_text(back) == path.read_text()
    meta = json.loads(write_meta(res, path).read_text())
    assert meta["spec"]["label"] == "a,b \"q\""


def test_empty_result_is_header_only():
    assert csv_text(SweepResult()) == ",".join(CSV_COLUMNS) + "\n"


def test_csv_header_checked(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValidationError):
        read_csv(path)


CONFIG = """
[sweep]
axis = rho_dB
values = 0:20:10
trials = 5
seed = 9
outputs = mc_rate, deq_rate
normalize = K

[system]
M = 4
K = 4
tau2 = 0.0
"""


def test_config_parsing():
    spec = parse_spec_text(CONFIG)
    assert spec.values == (0.0, 10.0, 20.0)
    assert spec.master_seed == 9 and spec.trials == 5 and spec.normalize == "K"
    assert spec.fixed.M == 4


def test_config_inline_comments():
    spec = parse_spec_text(CONFIG.replace("normalize = K", "normalize = K   ; per user"))
    assert spec.normalize == "K"


@pytest.mark.parametrize("text", [
    CONFIG + "\n[extra]\nx = 1\n",
    CONFIG.replace("seed = 9", "sead = 9"),
    CONFIG.replace("values = 0:20:10", "values = 0:20:0"),
    "[sweep]\naxis = M\n",
    "not an ini file",
])
def test_config_errors(text):
    with pytest.raises(ValidationError):
        parse_spec_text(text)


# CLI -----------------------------------------------------------------------

def test_cli_deq_json(capsys):
    assert main(["deq", "--M", "10", "--K", "10", "--rho-db", "10", "--format", "json"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["sum_rate"] == pytest.approx(14.146, rel=1e-3)


def test_cli_fdd_bits(capsys):
    assert main(["fdd-bits", "--M", "10", "--K", "5", "--rho-db", "20"]) == 0
    header, values = capsys.readouterr().out.strip().splitlines()
    rec = dict(zip(header.split(","), values.split(",")))
    assert float(rec["B"]) == pytest.approx(66.248, abs=1e-3)
    assert rec["B_ceil"] == "67"


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["mc", "--M", "0"]) == 1
    assert main(["deq", "--beta", "1.25", "--rho-db", "40", "--tau2", "0.09"]) == 2
    assert main(["mc", "--trials", "2", "--out", str(tmp_path / "nope" / "x.csv")]) == 3
    with pytest.raises(SystemExit) as info:
        main(["sweep"])
    assert info.value.code == 1
    capsys.readouterr()


def test_cli_sweep_spec_file(tmp_path):
    cfg = tmp_path / "s.ini"
    cfg.write_text(CONFIG)
    out = tmp_path / "s.csv"
    assert main(["sweep", "--spec", str(cfg), "--out", str(out), "--trials", "3"]) == 0
    rows = read_csv(out).rows
    assert len(rows) == 3
    meta = json.loads((tmp_path / "s.csv.meta.json").read_text())
    assert meta["spec"]["trials"] == 3


def test_selftest_passes(capsys):
    assert run_selftest()
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines and all(l.startswith("PASS") for l in lines)
