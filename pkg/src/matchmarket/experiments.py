"""Declarative Monte Carlo sweeps and their CSV output.

Each experiment turns an :class:`ExperimentConfig` into a :class:`ResultTable`
whose columns map onto the axes of one plot:

========================  ====================================================
``fig1_delta_k``          inequality of the k-norm matchmaker versus ``k``
``fig2_multibuyer``       best per-buyer utility versus number of buyers ``M``
``fig3_correlated``       best total utility of correlated normals versus ``st``
``fig4_vendor_proposes``  matchmaker versus vendor-proposes, versus ``N``
``fig5_search``           expected net search utility versus ``n``
``claims_table``          scalar claims (inequality trade-offs, error of the
                          large-N mean)
========================  ====================================================

Monte Carlo columns come in ``<name>_mean`` / ``<name>_se`` pairs where the
standard error is the sample standard deviation over ``sqrt(realizations)``.
Realizations whose selection ends in no trade are excluded from conditional
means and counted in ``no_trade_fraction``.
"""

from __future__ import annotations

import csv
import io
import math
import sys
from dataclasses import dataclass, field, fields, replace
from functools import partial
from pathlib import Path

import numpy as np

from . import __version__, analytics
from .distributions import CorrelationParams, DistributionSpec, SeedSpec, combine_correlated
from .errors import ApproximationDomainError, DegenerateVarianceError, InvalidParameterError, MatchMarketError
from .market import RuleKind, UtilityRule, select_batch
from .montecarlo import DEFAULT_BLOCK_SIZE, run_blocks, summarize
from .protocols import n_opt_from_curve, prefix_max_curve, rises_then_falls, vendor_proposes_batch

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "ResultTable",
    "ConfigError",
    "default_config",
    "load_config",
    "parse_config_text",
    "parse_config_mapping",
    "config_from_mapping",
    "run_experiment",
    "claims_report",
    "threshold_scan",
    "n_opt_versus_beta",
    "search_curves",
    "fig5_tables",
    "write_csv",
    "read_csv",
]

EXPERIMENTS = {
    "fig1_delta_k": "inequality Delta(k) of the k-norm matchmaker, uniform utilities",
    "fig2_multibuyer": "best per-buyer utility <u_m''> for M buyers and N variants",
    "fig3_correlated": "<u_m> versus correlation st for normal utilities, with both approximations",
    "fig4_vendor_proposes": "total utility and inequality, matchmaker versus vendor-proposes",
    "fig5_search": "net search utility u_S(beta, n) and N_opt for uniform, normal, power-law",
    "claims_table": "scalar claims: min-rule trade-off, inequalities with and without matchmaker, large-N error",
}

# distributions in the column order of the search table
_SEARCH_DISTRIBUTIONS = ("uniform", "normal", "powerlaw")


class ConfigError(MatchMarketError, ValueError):
    """The experiment configuration is malformed."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one sweep.

    Sweep fields are tuples; only the ones an experiment uses are read.
    ``rule`` is the matchmaker rule of the correlated and vendor-proposes
    sweeps; ``correlation`` the (t, s) pair of the vendor-proposes sweep.
    """

    experiment: str
    n_variants: tuple[int, ...] = (1000,)
    m_buyers: tuple[int, ...] = (1,)
    k_values: tuple[float, ...] = (1.0,)
    st_values: tuple[float, ...] = (0.0,)
    rule: UtilityRule = field(default_factory=UtilityRule.linear)
    correlation: CorrelationParams = field(default_factory=lambda: CorrelationParams(0.0, 1))
    beta: float = 0.01
    beta_values: tuple[float, ...] = ()
    gamma: float = 4.0
    n_max: int = 1000
    threshold: float = 0.25
    realizations: int = 1000
    master_seed: int = 20080101
    block_size: int = DEFAULT_BLOCK_SIZE
    workers: int = 1
    output_path: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if self.realizations < 1:
            raise ConfigError(f"realizations must be at least 1, got {self.realizations}")
        for name in ("n_variants", "m_buyers", "k_values", "st_values", "beta_values"):
            values = tuple(getattr(self, name))
            object.__setattr__(self, name, values)
            if name != "beta_values" and not values:
                raise ConfigError(f"{name} must not be empty")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ConfigError(f"{name} must be strictly increasing, got {values}")
        if any(n < 1 for n in self.n_variants) or any(m < 1 for m in self.m_buyers):
            raise ConfigError("numbers of variants and buyers must be positive")
        if any(not k > 0 for k in self.k_values):
            raise ConfigError(f"k values must be positive, got {self.k_values}")
        if any(not -1.0 <= st <= 1.0 for st in self.st_values):
            raise ConfigError(f"st values must lie in [-1, 1], got {self.st_values}")
        if not self.beta > 0 or any(not b > 0 for b in self.beta_values):
            raise ConfigError("search costs must be positive")
        if not self.gamma > 2:
            raise ConfigError(f"gamma must exceed 2, got {self.gamma}")
        if self.n_max < 2:
            raise ConfigError(f"n_max must be at least 2, got {self.n_max}")
        if self.block_size < 1 or self.workers < 1:
            raise ConfigError("block_size and workers must be positive")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.master_seed}")

    def echo(self) -> dict[str, str]:
        """Config as ordered text fields for the CSV metadata block.

        ``workers`` and ``output_path`` are left out: neither affects the
        numbers, and the file must not depend on them.
        """
        out = {}
        for f in fields(self):
            if f.name in ("workers", "output_path"):
                continue
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = ",".join(_fmt(v) for v in value)
            elif isinstance(value, UtilityRule):
                value = value.kind.value if value.k is None else f"{value.kind.value}:{_fmt(value.k)}"
            elif isinstance(value, CorrelationParams):
                value = f"t={_fmt(value.t)},s={value.s}"
            else:
                value = _fmt(value)
            out[f.name] = value
        return out


_DEFAULTS = {
    "fig1_delta_k": dict(
        n_variants=(1000,),
        k_values=(0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0),
        realizations=10_000,
    ),
    "fig2_multibuyer": dict(n_variants=(10, 100, 1000), m_buyers=(1, 3, 10, 30, 100), realizations=1000),
    "fig3_correlated": dict(
        n_variants=(1000,),
        st_values=tuple(round(-1.0 + 0.1 * i, 10) for i in range(21)),
        realizations=1000,
    ),
    "fig4_vendor_proposes": dict(
        # N = 1 offers no choice: both mechanisms pick the single variant
        n_variants=(2, 5, 10, 20, 50, 100, 200, 500, 1000),
        realizations=1000,
    ),
    "fig5_search": dict(
        beta=0.01,
        gamma=4.0,
        n_max=1000,
        beta_values=(0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1),
        realizations=10_000,
    ),
    "claims_table": dict(n_variants=(1000,), realizations=100_000),
}


def default_config(experiment: str, **overrides) -> ExperimentConfig:
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    params = dict(_DEFAULTS[experiment])
    params.update(overrides)
    return ExperimentConfig(experiment=experiment, **params)


# ---------------------------------------------------------------------------
# config files

def _parse_list(text: str, cast) -> tuple:
    return tuple(cast(v.strip()) for v in text.split(",") if v.strip())


def _parse_rule(text: str) -> UtilityRule:
    name, _, k = text.partition(":")
    if name.strip() == RuleKind.KNORM.value:
        return UtilityRule.knorm(float(k))
    return UtilityRule(name.strip())


# key in files / CLI -> (config field, parser)
_KEYS = {
    "n": ("n_variants", lambda s: _parse_list(s, int)),
    "m": ("m_buyers", lambda s: _parse_list(s, int)),
    "k": ("k_values", lambda s: _parse_list(s, float)),
    "st": ("st_values", lambda s: _parse_list(s, float)),
    "rule": ("rule", _parse_rule),
    "beta": ("beta", float),
    "beta_values": ("beta_values", lambda s: _parse_list(s, float)),
    "gamma": ("gamma", float),
    "n_max": ("n_max", int),
    "threshold": ("threshold", float),
    "realizations": ("realizations", int),
    "seed": ("master_seed", int),
    "block_size": ("block_size", int),
    "workers": ("workers", int),
    "out": ("output_path", str),
}


def parse_config_mapping(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines to a dict; ``#`` starts a comment."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        raw[key.strip()] = value.strip()
    return raw


def parse_config_text(text: str, experiment: str | None = None) -> ExperimentConfig:
    """Build a config from a flat key-value file.

    Keys are the CLI flag names (``n``, ``m``, ``k``, ``st``, ``t``, ``s``,
    ``rule``, ``beta``, ``gamma``, ``realizations``, ``seed``, ``out``, ...)
    plus ``experiment``.  Unset fields take the experiment's defaults.
    """
    raw = parse_config_mapping(text)
    name = raw.pop("experiment", experiment)
    if name is None:
        raise ConfigError("config does not name an experiment")
    return config_from_mapping(name, raw)


def config_from_mapping(experiment: str, raw: dict) -> ExperimentConfig:
    """Config from CLI-style keys mapped to strings (or already-parsed values)."""
    raw = dict(raw)
    overrides = {}
    t = raw.pop("t", None)
    s = raw.pop("s", None)
    try:
        for key, value in raw.items():
            if key not in _KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            name, parse = _KEYS[key]
            overrides[name] = parse(value) if isinstance(value, str) else value
        if t is not None or s is not None:
            overrides["correlation"] = CorrelationParams(float(t or 0.0), int(s or 1))
        return default_config(experiment, **overrides)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path, experiment: str | None = None) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config_text(text, experiment)


# ---------------------------------------------------------------------------
# result tables and CSV

@dataclass
class ResultTable:
    """Named columns of equal length plus a metadata mapping."""

    columns: dict[str, list]
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise InvalidParameterError(f"columns have unequal lengths {sorted(lengths)}")
        self.columns = {k: list(v) for k, v in self.columns.items()}

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def __getitem__(self, name: str) -> np.ndarray:
        return np.asarray(self.columns[name])

    def row(self, **match) -> dict:
        """The unique row whose columns equal the given values."""
        hits = [
            i for i in range(self.n_rows)
            if all(self.columns[k][i] == v for k, v in match.items())
        ]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} rows match {match}")
        return {k: v[hits[0]] for k, v in self.columns.items()}


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _to_text(table: ResultTable) -> str:
    buf = io.StringIO()
    for key, value in table.metadata.items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(table.columns))
    for i in range(table.n_rows):
        writer.writerow([_fmt(col[i]) for col in table.columns.values()])
    return buf.getvalue()


def write_csv(table: ResultTable, path) -> None:
    """Write ``# key: value`` metadata lines, a header row and one row per sweep point.

    Floats are written with ``repr`` so they read back bit-exactly.
    """
    text = _to_text(table)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc.strerror}") from exc


def _parse_cell(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(path) -> ResultTable:
    metadata, lines = {}, []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(": ")
                metadata[key] = value
            else:
                lines.append(line)
    rows = list(csv.reader(lines))
    header, body = rows[0], rows[1:]
    columns = {name: [_parse_cell(r[j]) for r in body] for j, name in enumerate(header)}
    return ResultTable(columns, metadata)


def _metadata(config: ExperimentConfig, **extra) -> dict[str, str]:
    meta = {"matchmarket_version": __version__, "experiment": config.experiment}
    meta.update(config.echo())
    meta.update({k: _fmt(v) for k, v in extra.items()})
    return meta


def _add_estimate(cols: dict, name: str, values) -> None:
    est = summarize(values)
    cols.setdefault(f"{name}_mean", []).append(est.mean)
    cols.setdefault(f"{name}_se", []).append(est.se)


def _add_fraction(cols: dict, name: str, flags) -> None:
    flags = np.asarray(flags, dtype=float)
    p = float(flags.mean())
    cols.setdefault(f"{name}_mean", []).append(p)
    cols.setdefault(f"{name}_se", []).append(math.sqrt(p * (1.0 - p) / flags.size))


def _run(kernel, config: ExperimentConfig, progress: bool, first_index: int = 0):
    return run_blocks(
        kernel,
        config.realizations,
        config.master_seed,
        block_size=config.block_size,
        workers=config.workers,
        first_index=first_index,
        progress=progress,
    )


def _safe(fn, *args) -> float:
    try:
        return fn(*args)
    except (ApproximationDomainError, DegenerateVarianceError, InvalidParameterError):
        return math.nan


# ---------------------------------------------------------------------------
# inequality versus k

def _kernel_delta_k(n_values, k_values, rng, count):
    n_max = max(n_values)
    x = rng.uniform(-1.0, 1.0, (count, n_max))
    y = rng.uniform(-1.0, 1.0, (count, n_max))
    shape = (count, len(n_values), len(k_values))
    out = {key: np.empty(shape) for key in ("delta", "rule_value", "sum")}
    for i, n in enumerate(n_values):
        for j, k in enumerate(k_values):
            sel = select_batch(UtilityRule.knorm(k), x[:, :n], y[:, :n])
            out["delta"][:, i, j] = sel.inequality
            out["rule_value"][:, i, j] = sel.total
            out["sum"][:, i, j] = sel.sum_utility
    return out


def _fig1(config, progress):
    data = _run(partial(_kernel_delta_k, config.n_variants, config.k_values), config, progress)
    cols: dict[str, list] = {}
    for i, n in enumerate(config.n_variants):
        for j, k in enumerate(config.k_values):
            cols.setdefault("n", []).append(n)
            cols.setdefault("k", []).append(k)
            _add_estimate(cols, "delta", data["delta"][:, i, j])
            _add_estimate(cols, "rule_value", data["rule_value"][:, i, j])
            _add_estimate(cols, "sum_utility", data["sum"][:, i, j])
            _add_fraction(cols, "no_trade_fraction", np.isnan(data["delta"][:, i, j]))
            cols.setdefault("rule_value_gamma_formula", []).append(_safe(analytics.u_m_knorm_approx, n, k))
            cols.setdefault("rule_value_corner_approx", []).append(_safe(analytics.u_m_knorm_corner_approx, n, k))
    return ResultTable(cols, _metadata(config))


# ---------------------------------------------------------------------------
# several buyers

_FIG2_CHUNK_ELEMENTS = 2_000_000


def _kernel_multibuyer(n_values, m_values, rng, count):
    n_max, m_max = max(n_values), max(m_values)
    shape = (count, len(n_values), len(m_values))
    out = {key: np.empty(shape) for key in ("u", "buyer", "vendor")}
    chunk = max(1, _FIG2_CHUNK_ELEMENTS // (n_max * m_max))
    linear = UtilityRule.linear()
    for start in range(0, count, chunk):
        stop = min(count, start + chunk)
        y = rng.uniform(-1.0, 1.0, (stop - start, n_max))
        x = rng.uniform(-1.0, 1.0, (stop - start, m_max, n_max))
        partial_sums = np.cumsum(x, axis=1)
        for j, m in enumerate(m_values):
            a = partial_sums[:, m - 1, :] / m
            for i, n in enumerate(n_values):
                sel = select_batch(linear, a[:, :n], y[:, :n])
                out["u"][start:stop, i, j] = sel.total
                out["buyer"][start:stop, i, j] = sel.buyer
                out["vendor"][start:stop, i, j] = sel.vendor
    return out


def _fig2(config, progress):
    data = _run(partial(_kernel_multibuyer, config.n_variants, config.m_buyers), config, progress)
    cols: dict[str, list] = {}
    for i, n in enumerate(config.n_variants):
        for j, m in enumerate(config.m_buyers):
            cols.setdefault("n", []).append(n)
            cols.setdefault("m", []).append(m)
            _add_estimate(cols, "u_per_buyer", data["u"][:, i, j])
            _add_estimate(cols, "buyer_average", data["buyer"][:, i, j])
            _add_estimate(cols, "vendor", data["vendor"][:, i, j])
            cols.setdefault("single_buyer_approx", []).append(_safe(analytics.u_m_uniform_approx, n))
    scan = threshold_scan(tuple(range(1, 13)), config.threshold)
    return ResultTable(cols, _metadata(config, **{k: scan.metadata[k] for k in ("threshold_slope", "threshold_intercept")}))


def threshold_scan(m_values=tuple(range(1, 13)), threshold: float = 0.25) -> ResultTable:
    """Smallest number of variants ``N*`` whose expected best buyer average reaches ``threshold``.

    The expectation is computed exactly from the distribution of an average
    of ``m`` uniforms, and ``log N*`` is fitted linearly against ``m``.
    """
    n_star = [analytics.variant_threshold(m, threshold) for m in m_values]
    reached = [analytics.mean_max_of_averages(n, m) for n, m in zip(n_star, m_values)]
    logs = [math.log(n) for n in n_star]
    if len(m_values) > 1:
        slope, intercept = np.polyfit(np.asarray(m_values, dtype=float), np.asarray(logs), 1)
    else:
        slope = intercept = math.nan
    cols = {"m": list(m_values), "n_star": n_star, "log_n_star": logs, "mean_max_average": reached}
    meta = {"threshold": _fmt(threshold), "threshold_slope": _fmt(float(slope)), "threshold_intercept": _fmt(float(intercept))}
    return ResultTable(cols, meta)


# ---------------------------------------------------------------------------
# correlated normal utilities

def _kernel_correlated(n_values, st_values, rule, rng, count):
    n_max = max(n_values)
    big_x = rng.standard_normal((count, n_max))
    big_y = rng.standard_normal((count, n_max))
    big_c = rng.standard_normal((count, n_max))
    out = np.empty((count, len(n_values), len(st_values)))
    for j, st in enumerate(st_values):
        x, y = combine_correlated(CorrelationParams.from_st(st), big_x, big_y, big_c)
        for i, n in enumerate(n_values):
            out[:, i, j] = select_batch(rule, x[:, :n], y[:, :n]).total
    return {"u": out}


def _correlated_root(n, st):
    if st == -1.0:
        # u = x + y vanishes identically
        return 0.0
    return _safe(analytics.u_m_correlated_root, n, st)


def _fig3(config, progress):
    config.rule.check_buyers(1)
    data = _run(partial(_kernel_correlated, config.n_variants, config.st_values, config.rule), config, progress)
    cols: dict[str, list] = {}
    for i, n in enumerate(config.n_variants):
        for j, st in enumerate(config.st_values):
            cols.setdefault("n", []).append(n)
            cols.setdefault("st", []).append(st)
            _add_estimate(cols, "u_max", data["u"][:, i, j])
            cols.setdefault("implicit_root", []).append(_correlated_root(n, st))
            cols.setdefault("explicit_approx", []).append(_safe(analytics.u_m_normal_approx, n, st))
    return ResultTable(cols, _metadata(config))


# ---------------------------------------------------------------------------
# vendor proposes

def _kernel_vendor(n_values, params, rule, rng, count):
    n_max = max(n_values)
    big_x = rng.standard_normal((count, n_max))
    big_y = rng.standard_normal((count, n_max))
    big_c = rng.standard_normal((count, n_max))
    x, y = combine_correlated(params, big_x, big_y, big_c)
    shape = (count, len(n_values))
    out = {key: np.empty(shape) for key in ("mm_total", "mm_ineq", "vp_total", "vp_ineq")}
    for i, n in enumerate(n_values):
        mm = select_batch(rule, x[:, :n], y[:, :n])
        vp = vendor_proposes_batch(x[:, :n], y[:, :n])
        out["mm_total"][:, i] = mm.sum_utility
        out["mm_ineq"][:, i] = mm.inequality
        out["vp_total"][:, i] = vp.sum_utility
        out["vp_ineq"][:, i] = vp.inequality
    return out


def _fig4(config, progress):
    config.rule.check_buyers(1)
    kernel = partial(_kernel_vendor, config.n_variants, config.correlation, config.rule)
    data = _run(kernel, config, progress)
    cols: dict[str, list] = {}
    for i, n in enumerate(config.n_variants):
        cols.setdefault("n", []).append(n)
        _add_estimate(cols, "matchmaker_total", data["mm_total"][:, i])
        _add_estimate(cols, "vendor_proposes_total", data["vp_total"][:, i])
        _add_estimate(cols, "matchmaker_inequality", data["mm_ineq"][:, i])
        _add_estimate(cols, "vendor_proposes_inequality", data["vp_ineq"][:, i])
        _add_estimate(cols, "total_gap", data["mm_total"][:, i] - data["vp_total"][:, i])
        _add_fraction(cols, "no_trade_fraction", np.isnan(data["vp_total"][:, i]))
    return ResultTable(cols, _metadata(config))


# ---------------------------------------------------------------------------
# buyer's search

def _search_spec(name: str, gamma: float) -> DistributionSpec:
    if name == "powerlaw":
        return DistributionSpec.power_law(gamma)
    return DistributionSpec(name)


def _search_analytic(name: str, n: int, beta: float, gamma: float) -> float:
    if name == "uniform":
        x_m = analytics.x_m_uniform_exact(n)
    elif name == "normal":
        x_m = _safe(analytics.x_m_normal_approx, n)
    else:
        x_m = analytics.x_m_powerlaw_approx(n, gamma)
    return x_m - beta * n


def _search_n_opt_analytic(name: str, beta: float, gamma: float) -> float:
    if name == "uniform":
        return analytics.n_opt_uniform(beta)
    if name == "normal":
        return _safe(analytics.n_opt_normal, beta)
    return analytics.n_opt_powerlaw(beta, gamma)


def search_curves(config: ExperimentConfig, progress: bool = False) -> dict:
    """Running-maximum mean and standard error for each search distribution.

    Maps the distribution name to ``(mean, se, n_kept, x_m_at_n_kept)`` where
    ``n_kept`` is the analytic optimum for ``config.beta`` (clipped to n_max).
    """
    curves = {}
    for d, name in enumerate(_SEARCH_DISTRIBUTIONS):
        spec = _search_spec(name, config.gamma)
        n_keep = int(min(config.n_max, max(1, round(_search_n_opt_analytic(name, config.beta, config.gamma)))))
        mean, se, kept = prefix_max_curve(
            spec,
            config.n_max,
            config.realizations,
            # each distribution reads its own range of stream indices
            SeedSpec(config.master_seed, d << 32),
            keep=(n_keep,),
            block_size=config.block_size,
            workers=config.workers,
            progress=progress,
        )
        curves[name] = (mean, se, n_keep, kept[:, 0])
    return curves


def _fig5(config, progress, curves=None):
    if curves is None:
        curves = search_curves(config, progress)
    n = np.arange(1, config.n_max + 1)
    cols: dict[str, list] = {"n": list(n)}
    extra = {}
    for name in _SEARCH_DISTRIBUTIONS:
        mean, se, n_keep, kept = curves[name]
        net = mean - config.beta * n
        cols[f"{name}_mean"] = list(net)
        cols[f"{name}_se"] = list(se)
        cols[f"{name}_analytic"] = [_search_analytic(name, int(k), config.beta, config.gamma) for k in n]
        n_opt, bracketed = n_opt_from_curve(mean, config.beta)
        extra[f"{name}_n_opt_empirical"] = n_opt
        extra[f"{name}_n_opt_analytic"] = _search_n_opt_analytic(name, config.beta, config.gamma)
        extra[f"{name}_bracketed"] = bracketed
        extra[f"{name}_rises_then_falls"] = rises_then_falls(net, se)
        extra[f"{name}_x_m_at"] = n_keep
        extra[f"{name}_x_m_mean"] = float(np.mean(kept))
        extra[f"{name}_x_m_median"] = float(np.median(kept))
    n_pl = curves["powerlaw"][2]
    extra["powerlaw_x_m_exact_mean"] = analytics.x_m_powerlaw_exact(n_pl, config.gamma)
    extra["powerlaw_x_m_exact_median"] = analytics.x_m_powerlaw_median(n_pl, config.gamma)
    extra["powerlaw_x_m_exact_mode"] = analytics.x_m_powerlaw_mode(n_pl, config.gamma)
    return ResultTable(cols, _metadata(config, **extra))


def fig5_tables(config: ExperimentConfig, progress: bool = False) -> tuple[ResultTable, ResultTable]:
    """The search curve table and the N_opt-versus-beta table from one set of draws."""
    curves = search_curves(config, progress)
    return _fig5(config, progress, curves), n_opt_versus_beta(config, curves)


def n_opt_versus_beta(config: ExperimentConfig, curves=None, progress: bool = False) -> ResultTable:
    """Empirical and analytic optimal search length for each cost in ``beta_values``.

    Reuses one set of running-maximum curves for every cost.
    """
    if curves is None:
        curves = search_curves(config, progress)
    cols: dict[str, list] = {"beta": list(config.beta_values)}
    for name in _SEARCH_DISTRIBUTIONS:
        mean = curves[name][0]
        for beta in config.beta_values:
            n_opt, bracketed = n_opt_from_curve(mean, beta)
            cols.setdefault(f"{name}_n_opt_empirical", []).append(n_opt)
            cols.setdefault(f"{name}_bracketed", []).append(bracketed)
            cols.setdefault(f"{name}_n_opt_analytic", []).append(_search_n_opt_analytic(name, beta, config.gamma))
    return ResultTable(cols, _metadata(config))


# ---------------------------------------------------------------------------
# scalar claims

def _kernel_claims_uniform(n, rng, count):
    x = rng.uniform(-1.0, 1.0, (count, n))
    y = rng.uniform(-1.0, 1.0, (count, n))
    lin = select_batch(UtilityRule.linear(), x, y)
    low = select_batch(UtilityRule.min_rule(), x, y)
    return {
        "lin_delta": lin.inequality,
        "lin_sum": lin.sum_utility,
        "min_delta": low.inequality,
        "min_sum": low.sum_utility,
    }


def _kernel_claims_normal(n, rng, count):
    x = rng.standard_normal((count, n))
    y = rng.standard_normal((count, n))
    mm = select_batch(UtilityRule.linear(), x, y)
    vp = vendor_proposes_batch(x, y)
    return {
        "mm_ineq": mm.inequality,
        "mm_sum": mm.sum_utility,
        "vp_ineq": vp.inequality,
        "vp_sum": vp.sum_utility,
    }


def ratio_reduction(a, b) -> tuple[float, float]:
    """``1 - mean(b)/mean(a)`` for paired samples, with a delta-method standard error."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ok = ~(np.isnan(a) | np.isnan(b))
    a, b = a[ok], b[ok]
    ma, mb = a.mean(), b.mean()
    r = mb / ma
    cov = np.cov(np.vstack([a, b]), ddof=1)
    var_r = (cov[1, 1] / mb**2 + cov[0, 0] / ma**2 - 2.0 * cov[0, 1] / (ma * mb)) * r**2 / a.size
    return float(1.0 - r), float(math.sqrt(max(var_r, 0.0)))


def claims_report(config: ExperimentConfig | None = None, progress: bool = False) -> ResultTable:
    """Scalar claims at ``N = n_variants[0]`` (1000 by default).

    Rows: inequality of the linear and min rules on uniform utilities and the
    relative reductions of inequality and total utility; matchmaker and
    vendor-proposes inequality on independent normals; relative error of the
    large-N mean formula at N = 17.
    """
    if config is None:
        config = default_config("claims_table")
    n = config.n_variants[0]
    uni = _run(partial(_kernel_claims_uniform, n), config, progress)
    nor = _run(partial(_kernel_claims_normal, n), config, progress, first_index=1 << 32)

    rows: list[tuple[str, float, float, float]] = []

    def add(name, est, reference=math.nan):
        rows.append((name, est[0], est[1], reference))

    add("delta_linear", summarize(uni["lin_delta"]), analytics.delta_uniform_approx(n) if n >= 2 else math.nan)
    add("delta_min_rule", summarize(uni["min_delta"]))
    add("inequality_reduction_min_rule", ratio_reduction(uni["lin_delta"], uni["min_delta"]), 0.29)
    add("total_utility_linear", summarize(uni["lin_sum"]), analytics.u_m_uniform_approx(n) if n >= 2 else math.nan)
    add("total_utility_min_rule", summarize(uni["min_sum"]))
    add("total_utility_reduction_min_rule", ratio_reduction(uni["lin_sum"], uni["min_sum"]), 0.003)
    add("inequality_matchmaker_normal", summarize(nor["mm_ineq"]), 1.1)
    add("inequality_vendor_proposes_normal", summarize(nor["vp_ineq"]), 0.4)
    add("total_utility_matchmaker_normal", summarize(nor["mm_sum"]))
    add("total_utility_vendor_proposes_normal", summarize(nor["vp_sum"]))
    add("no_trade_fraction_vendor_proposes_normal", summarize(np.isnan(nor["vp_sum"]).astype(float)), 2.0**-n)
    exact17 = analytics.u_m_uniform_exact(17)
    add("large_n_mean_relative_error_n17", (abs(analytics.u_m_uniform_approx(17) - exact17) / exact17, 0.0), 0.01)

    cols = {
        "claim": [r[0] for r in rows],
        "value": [r[1] for r in rows],
        "se": [r[2] for r in rows],
        "reference": [r[3] for r in rows],
    }
    return ResultTable(cols, _metadata(config))


_RUNNERS = {
    "fig1_delta_k": _fig1,
    "fig2_multibuyer": _fig2,
    "fig3_correlated": _fig3,
    "fig4_vendor_proposes": _fig4,
    "fig5_search": _fig5,
    "claims_table": lambda config, progress: claims_report(config, progress),
}


def run_experiment(config: ExperimentConfig, progress: bool = False) -> ResultTable:
    if progress:
        print(f"running {config.experiment} with {config.realizations} realizations", file=sys.stderr)
    return _RUNNERS[config.experiment](config, progress)


def with_overrides(config: ExperimentConfig, **changes) -> ExperimentConfig:
    return replace(config, **changes)
