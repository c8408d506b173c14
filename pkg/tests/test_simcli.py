"""Experiment configuration, sweep drivers, CSV output, CLI entry point."""

import dataclasses
import math

import numpy as np
import pytest

from nnoma import (
    ConfigError,
    ExperimentConfig,
    OutageEstimate,
    emit_csv,
    figure_preset,
    load_config,
    parse_csv,
    run_outage_sweep,
    run_sum_rate_sweep,
)
from nnoma.simcli import CSV_COLUMNS, main

GOOD_CONFIG = """\
# minimal sweep
side_length_m = 400
big_radius_m = 250
near_radius_m_list = 10, 10, 10
alpha = 3
beta0_sq = 0.8
rate_bpcu_list = 2, 1, 1, 1
power_dbm_list = -10, 0
trials = 2000
seed = 42
"""


def _write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_load_config_round_trip(tmp_path):
    cfg = load_config(_write(tmp_path, GOOD_CONFIG))
    assert cfg.side_length_m == 400.0
    assert cfg.big_radius_m == 250.0
    assert cfg.near_radius_m == (10.0, 10.0, 10.0)
    assert cfg.alpha == 3.0
    assert cfg.rate_bpcu == (2.0, 1.0, 1.0, 1.0)
    assert cfg.power_dbm == (-10.0, 0.0)
    assert cfg.trials == 2000 and cfg.seed == 42
    assert cfg.schemes == ("n-noma", "oma")
    assert not cfg.interference_on


def test_load_config_single_near_radius_replicates(tmp_path):
    text = GOOD_CONFIG.replace("near_radius_m_list = 10, 10, 10",
                               "near_radius_m_list = 25")
    assert load_config(_write(tmp_path, text)).near_radius_m == (25.0, 25.0, 25.0)


def test_load_config_exponent_trials(tmp_path):
    text = GOOD_CONFIG.replace("trials = 2000", "trials = 1e6")
    assert load_config(_write(tmp_path, text)).trials == 10**6


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda t: t.replace("alpha = 3", "alpha = 3\nwavelength = 0.1"), "wavelength"),
        (lambda t: t + "alpha = 4\n", "alpha"),
        (lambda t: t.replace("side_length_m = 400\n", ""), "side_length_m"),
        (lambda t: t.replace("alpha = 3", "alpha = three"), "alpha"),
        (lambda t: t.replace("alpha = 3", "alpha"), "config"),
    ],
)
def test_load_config_parse_errors(tmp_path, mutate, field):
    with pytest.raises(ConfigError) as exc:
        load_config(_write(tmp_path, mutate(GOOD_CONFIG)))
    assert exc.value.field == field


def test_missing_file_is_a_config_error(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "absent.cfg"))


def test_validation_names_the_field():
    base = dict(
        side_length_m=400.0, big_radius_m=250.0, near_radius_m=(10.0,) * 3,
        alpha=3.0, beta0_sq=0.8, rate_bpcu=(2.0, 1.0, 1.0, 1.0),
        power_dbm=(0.0,),
    )
    with pytest.raises(ConfigError) as exc:
        ExperimentConfig(**{**base, "big_radius_m": 100.0})
    assert exc.value.field == "big_radius_m"

    # beta0^2 = 1/2 cannot carry eta0 = 3: the superposition margin closes
    with pytest.raises(ConfigError, match="standing assumption") as exc:
        ExperimentConfig(**{**base, "beta0_sq": 0.5})
    assert exc.value.field == "beta0_sq"

    with pytest.raises(ConfigError) as exc:
        ExperimentConfig(**{**base, "schemes": ("n-noma", "tdma")})
    assert exc.value.field == "schemes"

    with pytest.raises(ConfigError) as exc:
        ExperimentConfig(**{**base, "interferer_power_dbm": 6.0})
    assert exc.value.field in ("interferer_power_dbm", "interferer_density_per_m2")


def test_noise_and_snr_conversions():
    cfg = figure_preset("fig2")
    assert cfg.noise_power_mw == pytest.approx(1e-10, rel=1e-12)
    assert cfg.transmit_snr(30.0) == pytest.approx(1e13, rel=1e-12)
    assert cfg.transmit_snr(-20.0) == pytest.approx(1e8, rel=1e-12)


def test_preset_contents():
    fig2 = figure_preset("fig2")
    assert (fig2.side_length_m, fig2.big_radius_m) == (400.0, 250.0)
    assert fig2.rate_bpcu == (2.0, 1.0, 1.0, 1.0)
    assert fig2.schemes == ("n-noma", "oma")
    assert figure_preset("fig3") == fig2
    assert figure_preset("fig2-case2") == fig2
    assert figure_preset("fig2-case1").rate_bpcu == (1.5, 0.5, 0.5, 0.5)

    fig4 = figure_preset("fig4")
    assert fig4.schemes == ("n-noma", "noma-no-comp", "noma-best-bs")

    fig5 = figure_preset("fig5")
    assert (fig5.side_length_m, fig5.big_radius_m, fig5.alpha) == (600.0, 400.0, 2.0)

    fig6 = figure_preset("fig6")
    assert fig6.big_radius_m == pytest.approx(1.1 * 400.0 / math.sqrt(3.0))
    assert fig6.alpha == 3.0

    fig7 = figure_preset("fig7")
    assert (fig7.side_length_m, fig7.big_radius_m, fig7.alpha) == (300.0, 200.0, 4.0)
    assert fig7.near_radius_m == (20.0, 20.0, 20.0)
    assert fig7.interferer_power_dbm == 6.0
    assert fig7.interferer_density_per_m2 == pytest.approx(1.0 / (math.pi * 200.0**2))
    assert fig7.interference_on

    fig9 = figure_preset("fig9")
    assert (fig9.side_length_m, fig9.big_radius_m) == (600.0, 400.0)
    assert fig9.near_radius_m == (30.0, 30.0, 30.0)

    with pytest.raises(ConfigError, match="known:"):
        figure_preset("fig1")


def test_outage_sweep_row_order_and_ci():
    cfg = dataclasses.replace(
        figure_preset("fig2"), power_dbm=(-10.0, 0.0), trials=4000, seed=3
    )
    rows = run_outage_sweep(cfg)
    key = [(r.power_dbm, r.scheme, r.user_index) for r in rows]
    assert key == [
        (-10.0, "n-noma", 0), (-10.0, "n-noma", 1), (-10.0, "n-noma", 2),
        (-10.0, "n-noma", 3), (-10.0, "oma", 0),
        (0.0, "n-noma", 0), (0.0, "n-noma", 1), (0.0, "n-noma", 2),
        (0.0, "n-noma", 3), (0.0, "oma", 0),
    ]
    for r in rows:
        assert r.trials == 4000
        expect = 1.96 * math.sqrt(r.p_hat * (1.0 - r.p_hat) / 4000)
        assert r.ci_half_width == pytest.approx(expect, abs=1e-12)
        assert r.sum_rate_bpcu == pytest.approx((1.0 - r.p_hat) * r.rate_bpcu)
    # analytic overlays on the interference-free sweep
    assert all(r.analytic is not None for r in rows)


def test_csv_round_trip(tmp_path):
    cfg = dataclasses.replace(
        figure_preset("fig2"), power_dbm=(0.0,), trials=3000, seed=8
    )
    rows = run_outage_sweep(cfg)
    path = str(tmp_path / "out.csv")
    emit_csv(rows, path)
    text = open(path).read()
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    back = parse_csv(path)
    assert len(back) == len(rows)
    for orig, rec in zip(rows, back):
        assert rec["scheme"] == orig.scheme
        assert rec["user_index"] == orig.user_index
        assert rec["p_out_mc"] == pytest.approx(orig.p_hat, rel=1e-7)
        assert rec["sum_rate_bpcu"] == pytest.approx(orig.sum_rate_bpcu, rel=1e-7)
        if orig.analytic is None:
            assert rec["p_out_analytic"] is None
        else:
            assert rec["p_out_analytic"] == pytest.approx(orig.analytic.value, rel=1e-7)


def test_csv_bytes_do_not_depend_on_threads(tmp_path):
    base = dataclasses.replace(
        figure_preset("fig7"), power_dbm=(-20.0, -10.0), trials=70_000, seed=21
    )
    paths = []
    for threads in (1, 4):
        cfg = dataclasses.replace(base, threads=threads)
        p = str(tmp_path / f"t{threads}.csv")
        emit_csv(run_outage_sweep(cfg), p)
        paths.append(p)
    assert open(paths[0], "rb").read() == open(paths[1], "rb").read()


def test_sum_rate_aggregation_from_synthetic_rows():
    def row(scheme, user, p, rate):
        return OutageEstimate(
            power_dbm=0.0, scheme=scheme, user_index=user, p_hat=p,
            trials=1000, ci_half_width=0.0, analytic=None, rate_bpcu=rate,
        )

    rows = [row("n-noma", 0, 0.0, 2.0)] + [row("n-noma", j, 0.0, 1.0) for j in (1, 2, 3)]
    rows += [row("oma", 0, 0.1, 2.0)]
    cfg = dataclasses.replace(figure_preset("fig2"), power_dbm=(0.0,))
    table = run_sum_rate_sweep(cfg, rows=rows)
    n_noma = next(t for t in table if t.scheme == "n-noma")
    oma = next(t for t in table if t.scheme == "oma")
    assert n_noma.outage_sum_rate_bpcu == pytest.approx(5.0)
    assert oma.outage_sum_rate_bpcu == pytest.approx(0.9 * 2.0)
    # rate loss against the non-orthogonal edge rate: (1-0.1)*2 - (1-0)*2
    assert n_noma.rate_loss_bpcu == pytest.approx(-0.2)
    assert oma.rate_loss_bpcu is None

    sunk = [dataclasses.replace(r, p_hat=1.0) for r in rows]
    table = run_sum_rate_sweep(cfg, rows=sunk)
    assert all(t.outage_sum_rate_bpcu == 0.0 for t in table)


def test_main_exit_codes(tmp_path, capsys):
    out = str(tmp_path / "sweep.csv")
    assert main(["simulate", str(tmp_path / "nope.cfg"), "--out", out]) == 2
    assert "config rejected" in capsys.readouterr().err

    assert main(["preset", "fig1", "--out", out]) == 2
    assert "config rejected" in capsys.readouterr().err

    cfg = _write(tmp_path, GOOD_CONFIG.replace("trials = 2000", "trials = 500"))
    assert main(["simulate", cfg, "--out", out, "--trials", "1000", "--seed", "7"]) == 0
    text = capsys.readouterr().out
    assert "wrote" in text and "2 power points" in text
    recs = parse_csv(out)
    assert {r["power_dbm"] for r in recs} == {-10.0, 0.0}
    assert all(r["scheme"] in ("n-noma", "oma") for r in recs)
