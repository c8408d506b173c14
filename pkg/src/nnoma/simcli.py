"""Experiment runner: flat-file configs, figure presets, CSV output.

A config file (or a named preset) pins one experiment: the three-cell
geometry, power split, target rates, a transmit-power sweep in dBm, the
scheme subset, and optional co-channel interference. ``run_outage_sweep``
walks the power grid and Monte Carlo estimates every (scheme, user) outage
with a 95% confidence half-width, attaching the matching closed form
wherever one applies to the configured regime. ``emit_csv`` serializes the
table with a fixed eight-column schema and byte-deterministic output, so
identical config + seed reproduce identical files regardless of thread
count. ``run_sum_rate_sweep`` aggregates the same estimates into per-scheme
outage sum rates and the cell-edge rate-loss column.

Config keys carry their units in the name (``side_length_m``,
``power_dbm_list``); lists are comma separated. Noise is specified as a
spectral density plus bandwidth, so the default -170 dBm/Hz over 10 MHz
gives a -100 dBm noise floor and the transmit SNR at each sweep point is
rho = P_s / sigma^2 in linear units.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from .analytics import (
    AnalyticOutage,
    p0_noma_analytic,
    p0_oma_analytic,
    pj_noma_analytic,
    pj_noma_interference_analytic,
)
from .engine import SCHEMES, estimate_outage
from .geometry import SQRT3, NetworkLayout, make_layout
from .interference import DEFAULT_WINDOW_RADIUS, InterferenceConfig
from .schemes import SchemeConfig

CSV_COLUMNS = (
    "power_dbm",
    "scheme",
    "user_index",
    "p_out_mc",
    "ci_half_width",
    "p_out_analytic",
    "sum_rate_bpcu",
    "regime_note",
)

_REQUIRED_KEYS = (
    "side_length_m",
    "big_radius_m",
    "near_radius_m_list",
    "alpha",
    "beta0_sq",
    "rate_bpcu_list",
    "power_dbm_list",
)


class ConfigError(ValueError):
    """Config rejection carrying the violated field name."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class ExperimentConfig:
    """One validated experiment: geometry, rates, sweep, schemes, seeding."""

    side_length_m: float
    big_radius_m: float
    near_radius_m: tuple
    alpha: float
    beta0_sq: float
    rate_bpcu: tuple
    power_dbm: tuple
    noise_dbm_per_hz: float = -170.0
    bandwidth_hz: float = 1.0e7
    schemes: tuple = ("n-noma", "oma")
    trials: int = 100_000
    seed: int = 1234
    interferer_power_dbm: Optional[float] = None
    interferer_density_per_m2: float = 0.0
    interference_window_m: float = DEFAULT_WINDOW_RADIUS
    shared_interference: bool = False
    gauss_chebyshev_n: int = 100
    threads: int = 1

    def __post_init__(self):
        if not self.side_length_m > 0.0:
            raise ConfigError("side_length_m", "must be > 0")
        lo = SQRT3 / 3.0 * self.side_length_m
        hi = SQRT3 / 2.0 * self.side_length_m
        if not lo <= self.big_radius_m <= hi:
            raise ConfigError(
                "big_radius_m",
                f"must lie in [l/sqrt(3), l*sqrt(3)/2] = [{lo:.6g}, {hi:.6g}] "
                f"for side_length_m={self.side_length_m:.6g}, "
                f"got {self.big_radius_m:.6g}",
            )
        if len(self.near_radius_m) != 3:
            raise ConfigError("near_radius_m_list", "expected 1 or 3 values")
        if any(r <= 0.0 for r in self.near_radius_m):
            raise ConfigError("near_radius_m_list", "radii must be > 0")
        if self.alpha < 2.0:
            raise ConfigError("alpha", f"path-loss exponent must be >= 2, got {self.alpha:.6g}")
        if not 0.0 < self.beta0_sq <= 1.0:
            raise ConfigError("beta0_sq", f"must lie in (0, 1], got {self.beta0_sq:.6g}")
        if len(self.rate_bpcu) != 4:
            raise ConfigError("rate_bpcu_list", f"expected 4 rates, got {len(self.rate_bpcu)}")
        if any(r < 0.0 for r in self.rate_bpcu):
            raise ConfigError("rate_bpcu_list", "rates must be >= 0")
        eta0 = 2.0 ** self.rate_bpcu[0] - 1.0
        margin = self.beta0_sq - (1.0 - self.beta0_sq) * eta0
        if margin <= 0.0:
            raise ConfigError(
                "beta0_sq",
                "standing assumption beta0_sq - beta1_sq*eta0 > 0 violated: "
                f"beta0_sq={self.beta0_sq:.6g}, eta0=2^r0-1={eta0:.6g} gives "
                f"{margin:.6g}; raise beta0_sq or lower rate_bpcu_list[0]",
            )
        if len(self.power_dbm) == 0:
            raise ConfigError("power_dbm_list", "at least one sweep point required")
        if self.bandwidth_hz <= 0.0:
            raise ConfigError("bandwidth_hz", "must be > 0")
        unknown = [s for s in self.schemes if s not in SCHEMES]
        if unknown:
            raise ConfigError(
                "schemes", f"unknown scheme(s) {unknown}; valid: {', '.join(SCHEMES)}"
            )
        if len(set(self.schemes)) != len(self.schemes):
            raise ConfigError("schemes", "duplicate scheme names")
        if len(self.schemes) == 0:
            raise ConfigError("schemes", "at least one scheme required")
        if self.trials < 1:
            raise ConfigError("trials", "must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed", "must be >= 0")
        has_power = self.interferer_power_dbm is not None
        has_field = self.interferer_density_per_m2 > 0.0
        if has_power != has_field:
            raise ConfigError(
                "interferer_power_dbm",
                "interference needs both interferer_power_dbm and "
                "interferer_density_per_m2 > 0 (or neither)",
            )
        if self.interferer_density_per_m2 < 0.0:
            raise ConfigError("interferer_density_per_m2", "must be >= 0")
        if self.interference_window_m <= 0.0:
            raise ConfigError("interference_window_m", "must be > 0")
        if self.gauss_chebyshev_n < 1:
            raise ConfigError("gauss_chebyshev_n", "must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads", "must be >= 1")

    @property
    def interference_on(self) -> bool:
        return self.interferer_power_dbm is not None

    @property
    def noise_power_mw(self) -> float:
        """Total noise power in mW from the density + bandwidth pair."""
        dbm = self.noise_dbm_per_hz + 10.0 * math.log10(self.bandwidth_hz)
        return 10.0 ** (dbm / 10.0)

    def transmit_snr(self, power_dbm: float) -> float:
        return 10.0 ** (power_dbm / 10.0) / self.noise_power_mw

    def layout(self) -> NetworkLayout:
        return make_layout(self.side_length_m, self.big_radius_m, self.near_radius_m)

    def scheme_config(self, power_dbm: float) -> SchemeConfig:
        return SchemeConfig(
            beta0_sq=self.beta0_sq,
            beta1_sq=1.0 - self.beta0_sq,
            rates_r=self.rate_bpcu,
            transmit_snr_rho=self.transmit_snr(power_dbm),
        )

    def interference_config(self, power_dbm: float) -> Optional[InterferenceConfig]:
        """Interferer field for one sweep point; rho_I tracks the sweep power."""
        if not self.interference_on:
            return None
        rho_i = 10.0 ** ((self.interferer_power_dbm - power_dbm) / 10.0)
        return InterferenceConfig(
            intensity_lambda_I=self.interferer_density_per_m2,
            power_ratio_rho_I=rho_i,
            window_radius=self.interference_window_m,
        )


@dataclass(frozen=True)
class OutageEstimate:
    """One (power, scheme, user) cell of the sweep table."""

    power_dbm: float
    scheme: str
    user_index: int
    p_hat: float
    trials: int
    ci_half_width: float
    analytic: Optional[AnalyticOutage]
    rate_bpcu: float
    note: str = ""

    @property
    def sum_rate_bpcu(self) -> float:
        """This user's outage-weighted rate; group sums give the scheme rate."""
        return (1.0 - self.p_hat) * self.rate_bpcu

    @property
    def regime_note(self) -> str:
        parts = []
        if self.analytic is not None and self.analytic.regime_note:
            parts.append(self.analytic.regime_note)
        if self.note:
            parts.append(self.note)
        return "; ".join(parts)


@dataclass(frozen=True)
class SumRateRow:
    """Per-scheme outage sum rate at one sweep point.

    rate_loss_bpcu is filled on n-noma rows when the same sweep also ran
    oma: the cell-edge rate ceded to superposition, (1-P0_oma)r0 -
    (1-P0_nnoma)r0.
    """

    power_dbm: float
    scheme: str
    per_user_outage: tuple
    outage_sum_rate_bpcu: float
    rate_loss_bpcu: Optional[float] = None


def _analytic_overlay(
    scheme: str,
    user: int,
    layout: NetworkLayout,
    scheme_cfg: SchemeConfig,
    alpha: float,
    inter_cfg: Optional[InterferenceConfig],
    gc_nodes: int,
):
    """Closed form + note for one table cell; (None, note) when none applies."""
    if scheme == "n-noma":
        if user == 0:
            if inter_cfg is not None:
                return None, "no cell-edge closed form under co-channel interference"
            return p0_noma_analytic(layout, scheme_cfg, alpha), ""
        if inter_cfg is None:
            return pj_noma_analytic(layout, scheme_cfg, alpha, user), ""
        if alpha <= 2.0:
            return None, "near-user interference form needs alpha > 2"
        ana = pj_noma_interference_analytic(
            layout, scheme_cfg, inter_cfg, alpha, user, n_nodes=gc_nodes
        )
        return ana, ""
    if scheme == "oma":
        if inter_cfg is not None:
            return None, "no oma closed form under co-channel interference"
        eta0 = 2.0 ** scheme_cfg.rates_r[0] - 1.0
        ana = p0_oma_analytic(
            layout.side_length_l, alpha, eta0, scheme_cfg.transmit_snr_rho
        )
        return ana, ""
    # single-BS benchmarks: simulation only
    note = ""
    if 3.0 * scheme_cfg.beta0_sq > 1.0:
        note = (
            "benchmark concentrates 3*beta0_sq*Ps at one bs "
            "(exceeds the per-bs budget Ps)"
        )
    return None, note


def run_outage_sweep(config: ExperimentConfig) -> list:
    """Monte Carlo + analytic table, ordered (power, scheme, user)."""
    layout = config.layout()
    rows = []
    for power_index, power_dbm in enumerate(config.power_dbm):
        scheme_cfg = config.scheme_config(power_dbm)
        inter_cfg = config.interference_config(power_dbm)
        for scheme in config.schemes:
            result = estimate_outage(
                scheme,
                layout,
                config.alpha,
                scheme_cfg,
                inter_cfg,
                trials=config.trials,
                seed=config.seed,
                power_index=power_index,
                threads=config.threads,
                shared_interference=config.shared_interference,
            )
            for k, user in enumerate(result.user_indices):
                analytic, note = _analytic_overlay(
                    scheme, user, layout, scheme_cfg, config.alpha,
                    inter_cfg, config.gauss_chebyshev_n,
                )
                rows.append(
                    OutageEstimate(
                        power_dbm=power_dbm,
                        scheme=scheme,
                        user_index=user,
                        p_hat=float(result.p_hat[k]),
                        trials=config.trials,
                        ci_half_width=float(result.ci_half_width[k]),
                        analytic=analytic,
                        rate_bpcu=config.rate_bpcu[user],
                        note=note,
                    )
                )
    return rows


def run_sum_rate_sweep(config: ExperimentConfig, rows=None) -> list:
    """Aggregate outage rows into per-scheme sum rates and the rate loss.

    Reuses a table from run_outage_sweep when given, so both views come
    from one set of trials.
    """
    if rows is None:
        rows = run_outage_sweep(config)
    by_point = {}
    for row in rows:
        by_point.setdefault((row.power_dbm, row.scheme), []).append(row)
    oma_edge = {
        key[0]: group[0].p_hat
        for key, group in by_point.items()
        if key[1] == "oma" and group[0].user_index == 0
    }
    out = []
    for power_dbm in config.power_dbm:
        for scheme in config.schemes:
            group = by_point.get((power_dbm, scheme))
            if group is None:
                continue
            outage = [None] * 4
            for row in group:
                outage[row.user_index] = row.p_hat
            sum_rate = sum(row.sum_rate_bpcu for row in group)
            rate_loss = None
            if scheme == "n-noma" and power_dbm in oma_edge:
                r0 = config.rate_bpcu[0]
                rate_loss = (1.0 - oma_edge[power_dbm]) * r0 - (1.0 - outage[0]) * r0
            out.append(
                SumRateRow(
                    power_dbm=power_dbm,
                    scheme=scheme,
                    per_user_outage=tuple(outage),
                    outage_sum_rate_bpcu=sum_rate,
                    rate_loss_bpcu=rate_loss,
                )
            )
    return out


def _fmt(value) -> str:
    if value is None:
        return ""
    return format(value, ".8g")


def emit_csv(rows: Sequence, path: str) -> None:
    """Write the eight-column sweep table; bytes are run-to-run stable."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            analytic = row.analytic.value if row.analytic is not None else None
            writer.writerow(
                [
                    _fmt(row.power_dbm),
                    row.scheme,
                    str(row.user_index),
                    _fmt(row.p_hat),
                    _fmt(row.ci_half_width),
                    _fmt(analytic),
                    _fmt(row.sum_rate_bpcu),
                    row.regime_note,
                ]
            )


def parse_csv(path: str) -> list:
    """Read an emitted table back into dict rows (floats where present)."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected header {reader.fieldnames}")
        for rec in reader:
            row = dict(rec)
            for key in ("power_dbm", "p_out_mc", "ci_half_width", "sum_rate_bpcu"):
                row[key] = float(row[key])
            row["user_index"] = int(row["user_index"])
            row["p_out_analytic"] = (
                float(row["p_out_analytic"]) if row["p_out_analytic"] else None
            )
            out.append(row)
    return out


# ---------------------------------------------------------------------------
# config file parsing

_LIST_KEYS = {"near_radius_m_list", "rate_bpcu_list", "power_dbm_list", "schemes"}

_KEY_TO_FIELD = {
    "side_length_m": "side_length_m",
    "big_radius_m": "big_radius_m",
    "near_radius_m_list": "near_radius_m",
    "alpha": "alpha",
    "beta0_sq": "beta0_sq",
    "rate_bpcu_list": "rate_bpcu",
    "power_dbm_list": "power_dbm",
    "noise_dbm_per_hz": "noise_dbm_per_hz",
    "bandwidth_hz": "bandwidth_hz",
    "schemes": "schemes",
    "trials": "trials",
    "seed": "seed",
    "interferer_power_dbm": "interferer_power_dbm",
    "interferer_density_per_m2": "interferer_density_per_m2",
    "interference_window_m": "interference_window_m",
    "shared_interference": "shared_interference",
    "gauss_chebyshev_n": "gauss_chebyshev_n",
    "threads": "threads",
}

_INT_KEYS = {"trials", "seed", "gauss_chebyshev_n", "threads"}
_BOOL_KEYS = {"shared_interference"}


def _parse_float(key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r} as a number") from None
    if not math.isfinite(value):
        raise ConfigError(key, f"must be finite, got {raw!r}")
    return value


def _parse_int(key: str, raw: str) -> int:
    value = _parse_float(key, raw)
    if value != int(value):
        raise ConfigError(key, f"expected an integer, got {raw!r}")
    return int(value)


def _parse_value(key: str, raw: str):
    if key == "schemes":
        return tuple(part.strip() for part in raw.split(",") if part.strip())
    if key in _BOOL_KEYS:
        low = raw.strip().lower()
        if low not in ("true", "false"):
            raise ConfigError(key, f"expected true or false, got {raw!r}")
        return low == "true"
    if key in _LIST_KEYS:
        parts = [part.strip() for part in raw.split(",") if part.strip()]
        return tuple(_parse_float(key, part) for part in parts)
    if key in _INT_KEYS:
        return _parse_int(key, raw)
    return _parse_float(key, raw)


def load_config(path: str) -> ExperimentConfig:
    """Parse and validate a flat key = value config file."""
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError("config", f"line {lineno}: expected key = value, got {text!r}")
        key, raw = (part.strip() for part in text.split("=", 1))
        if key not in _KEY_TO_FIELD:
            raise ConfigError(key, f"unknown configuration key (line {lineno})")
        if key in values:
            raise ConfigError(key, f"duplicate key (line {lineno})")
        values[key] = _parse_value(key, raw)
    missing = [key for key in _REQUIRED_KEYS if key not in values]
    if missing:
        raise ConfigError(missing[0], "required key missing")
    if len(values.get("near_radius_m_list", ())) == 1:
        values["near_radius_m_list"] = values["near_radius_m_list"] * 3
    fields = {_KEY_TO_FIELD[key]: value for key, value in values.items()}
    return ExperimentConfig(**fields)


# ---------------------------------------------------------------------------
# figure presets

_LAMBDA_200 = 1.0 / (math.pi * 200.0**2)


def _span(start: float, stop: float, step: float) -> tuple:
    n = int(round((stop - start) / step)) + 1
    return tuple(start + i * step for i in range(n))


def figure_preset(name: str) -> ExperimentConfig:
    """Named parameter sets reproducing the reference experiments.

    fig3 shares the fig2 config (rate-loss view of the same sweep);
    fig2-case1 / fig2-case2 expose the two rate tuples, with case II the
    fig2 default. Sweep grids are placed where the bare d^-alpha link
    budget actually transitions; see the decisions record for the fills
    applied where a figure leaves a parameter unstated.
    """
    key = name.strip().lower()
    base = dict(
        side_length_m=400.0,
        big_radius_m=250.0,
        near_radius_m=(10.0, 10.0, 10.0),
        alpha=3.0,
        beta0_sq=0.8,
        rate_bpcu=(2.0, 1.0, 1.0, 1.0),
        power_dbm=_span(-30.0, 30.0, 5.0),
        schemes=("n-noma", "oma"),
    )
    if key in ("fig2", "fig2-case2", "fig3"):
        return ExperimentConfig(**base)
    if key == "fig2-case1":
        base["rate_bpcu"] = (1.5, 0.5, 0.5, 0.5)
        return ExperimentConfig(**base)
    if key == "fig4":
        base["schemes"] = ("n-noma", "noma-no-comp", "noma-best-bs")
        base["power_dbm"] = _span(-30.0, 15.0, 5.0)
        return ExperimentConfig(**base)
    if key == "fig5":
        base.update(
            side_length_m=600.0,
            big_radius_m=400.0,
            alpha=2.0,
            power_dbm=_span(-50.0, -10.0, 5.0),
            schemes=("n-noma",),
        )
        return ExperimentConfig(**base)
    if key == "fig6":
        base.update(
            big_radius_m=1.1 * 400.0 / SQRT3,
            power_dbm=_span(-24.0, -12.0, 2.0),
            schemes=("n-noma",),
        )
        return ExperimentConfig(**base)
    if key == "fig7":
        base.update(
            side_length_m=300.0,
            big_radius_m=200.0,
            near_radius_m=(20.0, 20.0, 20.0),
            alpha=4.0,
            rate_bpcu=(0.5, 0.5, 0.5, 0.5),
            power_dbm=_span(-45.0, 15.0, 5.0),
            schemes=("n-noma",),
            interferer_power_dbm=6.0,
            interferer_density_per_m2=_LAMBDA_200,
        )
        return ExperimentConfig(**base)
    if key == "fig8":
        base.update(
            near_radius_m=(20.0, 20.0, 20.0),
            rate_bpcu=(0.5, 0.5, 0.5, 0.5),
            power_dbm=_span(-40.0, 10.0, 5.0),
            schemes=("n-noma",),
            interferer_power_dbm=6.0,
            interferer_density_per_m2=_LAMBDA_200,
        )
        return ExperimentConfig(**base)
    if key == "fig9":
        base.update(
            side_length_m=600.0,
            big_radius_m=400.0,
            near_radius_m=(30.0, 30.0, 30.0),
            power_dbm=_span(-20.0, 20.0, 5.0),
            schemes=("n-noma",),
            interferer_power_dbm=6.0,
            interferer_density_per_m2=_LAMBDA_200,
        )
        return ExperimentConfig(**base)
    known = "fig2 fig2-case1 fig2-case2 fig3 fig4 fig5 fig6 fig7 fig8 fig9"
    raise ConfigError("preset", f"unknown preset {name!r}; known: {known}")


# ---------------------------------------------------------------------------
# CLI

def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    updates = {}
    if args.trials is not None:
        updates["trials"] = args.trials
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.threads is not None:
        updates["threads"] = args.threads
    if not updates:
        return config
    return dataclasses.replace(config, **updates)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument("--trials", type=int, default=None, help="override trials per point")
    parser.add_argument("--seed", type=int, default=None, help="override master seed")
    parser.add_argument("--threads", type=int, default=None, help="override worker threads")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nnoma",
        description="Monte Carlo + closed-form outage sweeps for the "
        "three-cell CoMP-NOMA downlink",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sim = sub.add_parser("simulate", help="run a config file")
    sim.add_argument("config", help="flat key = value config file")
    _add_common(sim)
    pre = sub.add_parser("preset", help="run a named figure preset")
    pre.add_argument("name", help="fig2 fig2-case1 fig2-case2 fig3 ... fig9")
    _add_common(pre)
    args = parser.parse_args(argv)

    try:
        if args.command == "simulate":
            config = load_config(args.config)
        else:
            config = figure_preset(args.name)
        config = _apply_overrides(config, args)
    except ConfigError as exc:
        print(f"config rejected: {exc}", file=sys.stderr)
        return 2

    rows = run_outage_sweep(config)
    emit_csv(rows, args.out)
    print(f"wrote {len(rows)} rows ({len(config.power_dbm)} power points) to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
