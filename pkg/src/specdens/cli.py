"""Command-line interface: simulate, estimate, ci, rates, mc-study.

All data products are CSV with header rows.  Defaults reproduce the
bundled reference study setup.  A key-value config file (dotted keys,
``section.name = value``) can preload any option; explicit flags win.

Exit codes: 0 success, 1 data/validation error, 2 usage error.
"""

from __future__ import annotations

import csv
import functools
import math
import sys
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from . import __version__
from .estimator import MultichannelSamples, estimate_cross_spectrum
from .inference import confidence_interval, limiting_covariance
from .io import (
    read_estimate_csv,
    read_samples_csv,
    write_estimate_csv,
    write_samples_csv,
    write_study_csvs,
)
from .kernels import get_kernel, variance_constant
from .mcstudy import McConfig, run_study, study_grid
from .rates import RatePlan, default_plan, optimal_exponents, reference_rate_plan
from .simulation import DEFAULT_ALPHA, DEFAULT_BETA, OuMixtureModel, simulate

_CONFIG_SECTIONS = ("simulate", "estimate", "ci", "rates", "mc-study", "model", "common")
_SHARED_KEYS = {
    "beta": "model.beta",
    "alpha": "model.alpha",
    "threads": "common.threads",
    "p": "rates.p",
    "q": "rates.q",
    "bn_const": "rates.bn_const",
    "bn_exp": "rates.bn_exp",
    "rho_const": "rates.rho_const",
    "rho_exp": "rates.rho_exp",
    "paper_rates": "rates.paper_rates",
}


def _parse_config_file(path: str) -> dict[str, str]:
    data: dict[str, str] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'section.key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        section, dot, _ = key.partition(".")
        if not dot or section not in _CONFIG_SECTIONS:
            raise ValueError(
                f"{path}:{lineno}: unknown config section {key!r} "
                f"(expected one of {', '.join(_CONFIG_SECTIONS)})"
            )
        data[key] = value
    return data


def _apply_config(ctx: click.Context, section: str) -> None:
    """Fill params not given on the command line from the config file."""
    path = ctx.params.get("config")
    if not path:
        return
    data = _parse_config_file(path)
    for param in ctx.command.params:
        name = param.name
        if name == "config":
            continue
        source = ctx.get_parameter_source(name)
        if source is not None and source.name == "COMMANDLINE":
            continue
        for key in (f"{section}.{name}", _SHARED_KEYS.get(name, "")):
            if key and key in data:
                raw = data[key]
                if param.nargs != 1:
                    value = tuple(
                        param.type(piece.strip(), param, ctx) for piece in raw.split(",")
                    )
                    if len(value) != param.nargs:
                        raise ValueError(
                            f"config key {key!r} needs {param.nargs} comma-separated values"
                        )
                elif isinstance(param.type, click.types.BoolParamType) or param.is_flag:
                    value = raw.strip().lower() in ("1", "true", "yes", "on")
                else:
                    value = param.type(raw, param, ctx)
                ctx.params[name] = value
                break


def _guard(func):
    """Turn data errors into one-line diagnostics with exit code 1."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ValueError, OSError, KeyError, RuntimeError) as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _common_options(section: str):
    def decorate(func):
        func = click.option(
            "--config",
            type=click.Path(exists=True, dir_okay=False),
            default=None,
            help="Key-value config file (dotted keys) supplying defaults.",
        )(func)
        func = click.option(
            "--threads",
            type=int,
            default=1,
            envvar="SPECDENS_THREADS",
            show_default=True,
            help="Worker count for replicated runs; outputs do not depend on it.",
        )(func)

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            ctx = click.get_current_context()
            try:
                _apply_config(ctx, section)
            except (ValueError, OSError) as exc:
                raise click.ClickException(str(exc)) from exc
            kwargs.update(ctx.params)
            return func(*args, **kwargs)

        return wrapper

    return decorate


def _require(name: str, value):
    if value is None:
        raise ValueError(f"missing required option --{name} (set it as a flag or in the config file)")
    return value


def _build_model(beta, alpha) -> OuMixtureModel:
    return OuMixtureModel(
        beta=tuple(beta) if beta else DEFAULT_BETA,
        alpha=tuple(alpha) if alpha else DEFAULT_ALPHA,
    )


def _build_plan(p, q, bn_const, bn_exp, rho_const, rho_exp, paper_rates) -> RatePlan:
    if paper_rates:
        return reference_rate_plan()
    if bn_exp is None or rho_exp is None:
        plan = default_plan(p=_as_rational(p), q=_as_rational(q))
        bn_exp = plan.bn_exponent if bn_exp is None else Fraction(bn_exp)
        rho_exp = plan.rho_exponent if rho_exp is None else Fraction(rho_exp)
    return RatePlan(
        bn_constant=bn_const,
        bn_exponent=_as_rational(bn_exp),
        rho_constant=rho_const,
        rho_exponent=_as_rational(rho_exp),
        p=_as_rational(p),
        q=_as_rational(q),
    )


def _as_rational(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(value).limit_denominator(10**6) if float(value).is_integer() else float(value)


@click.group()
@click.version_option(version=__version__, prog_name="specdens")
def main():
    """Spectral density estimation for uniformly sampled continuous-time records."""


@main.command()
@click.option("--n", type=int, default=None, help="Number of samples per channel.")
@click.option("--rho", type=float, default=None, help="Sampling rate (samples per unit time).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--model-default", is_flag=True, help="Use the reference model parameters.")
@click.option("--beta", type=float, nargs=4, default=None, help="Component gains b1 b2 b3 b4.")
@click.option("--alpha", type=float, nargs=4, default=None, help="Component decay rates a1 a2 a3 a4.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default="samples.csv", show_default=True)
@_common_options("simulate")
@_guard
def simulate_cmd(n, rho, seed, model_default, beta, alpha, output, config, threads, **_):
    """Simulate the two-channel reference process and write a samples CSV."""
    n = _require("n", n)
    rho = _require("rho", rho)
    if model_default and (beta or alpha):
        raise ValueError("--model-default cannot be combined with --beta/--alpha")
    model = _build_model(beta, alpha)
    out = simulate(model, n, rho, seed)
    write_samples_csv(output, out.samples.data)
    click.echo(f"wrote {n} samples x {out.samples.n_channels} channels to {output}")


main.add_command(simulate_cmd, name="simulate")


@main.command()
@click.argument("samples_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--rho", type=float, default=None, help="Sampling rate of the record.")
@click.option("--bn", type=float, default=None, help="Kernel bandwidth; default from the rate plan.")
@click.option("--kernel", type=str, default="tukey-hanning", show_default=True)
@click.option("--freq-min", type=float, default=0.0, show_default=True)
@click.option("--freq-max", type=float, default=3.0 * math.pi, show_default="3*pi")
@click.option("--freq-step", type=float, default=0.01 * math.pi, show_default="0.01*pi")
@click.option("--subtract-mean", is_flag=True, help="Subtract per-channel sample means first.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default="estimate.csv", show_default=True)
@_common_options("estimate")
@_guard
def estimate_cmd(
    samples_csv, rho, bn, kernel, freq_min, freq_max, freq_step, subtract_mean, output, config, threads, **_
):
    """Estimate the spectral matrix of a samples CSV on a uniform grid."""
    rho = _require("rho", rho)
    data = read_samples_csv(samples_csv)
    samples = MultichannelSamples(data, rho)
    if bn is None:
        bn, _ignored = default_plan().evaluate(samples.n_samples)
    if freq_step <= 0:
        raise ValueError(f"--freq-step must be positive, got {freq_step}")
    if freq_max < freq_min:
        raise ValueError("--freq-max must be at least --freq-min")
    count = int(math.floor((freq_max - freq_min) / freq_step + 1e-9)) + 1
    freqs = freq_min + freq_step * np.arange(count)
    estimate = estimate_cross_spectrum(samples, kernel, bn, freqs, subtract_mean=subtract_mean)
    write_estimate_csv(output, estimate)
    click.echo(f"wrote estimate on {count} frequencies to {output}")


main.add_command(estimate_cmd, name="estimate")


@main.command()
@click.argument("estimate_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--n", type=int, default=None, help="Sample count behind the estimate.")
@click.option("--bn", type=float, default=None, help="Bandwidth behind the estimate.")
@click.option("--kernel", type=str, default="tukey-hanning", show_default=True)
@click.option("--level", type=float, default=0.95, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default="ci.csv", show_default=True)
@_common_options("ci")
@_guard
def ci_cmd(estimate_csv, n, bn, kernel, level, output, config, threads, **_):
    """Pointwise confidence intervals from an estimate CSV (plug-in variances)."""
    n = _require("n", n)
    bn = _require("bn", bn)
    freqs, values = read_estimate_csv(estimate_csv)
    var_const = variance_constant(get_kernel(kernel))
    r = values.shape[1]
    with open(output, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["lambda", "pair", "component", "lo", "hi"])
        for f, lam in enumerate(freqs):
            spectrum = values[f]
            for a1 in range(r):
                for a2 in range(a1, r):
                    block = limiting_covariance(spectrum, (a1, a2, a1, a2), lam, lam, var_const)
                    entry = spectrum[a1, a2]
                    components = [("re", entry.real, block.rr)]
                    if a1 != a2:
                        components.append(("im", entry.imag, block.ii))
                    for name, value, variance in components:
                        lo, hi = confidence_interval(value, max(variance, 0.0), n, bn, level)
                        writer.writerow(
                            [
                                format(lam, ".17g"),
                                f"{a1 + 1}-{a2 + 1}",
                                name,
                                format(lo, ".17g"),
                                format(hi, ".17g"),
                            ]
                        )
    click.echo(f"wrote intervals to {output}")


main.add_command(ci_cmd, name="ci")


@main.command()
@click.option("--p", type=float, default=2.0, show_default=True, help="Spectral decay index.")
@click.option("--q", type=float, default=2.0, show_default=True, help="Spectral smoothness index.")
@click.option("--bn-const", type=float, default=0.25, show_default=True)
@click.option("--bn-exp", type=str, default=None, help="Bandwidth exponent (fraction, e.g. -1/3).")
@click.option("--rho-const", type=float, default=4.0, show_default=True)
@click.option("--rho-exp", type=str, default=None, help="Sampling-rate exponent (fraction).")
@click.option("--paper-rates", is_flag=True, help="Use the reference-study schedule.")
@click.option("--n", type=int, default=None, help="Also evaluate the plan at this sample count.")
@_common_options("rates")
@_guard
def rates_cmd(p, q, bn_const, bn_exp, rho_const, rho_exp, paper_rates, n, config, threads, **_):
    """Print rate exponents, schedule diagnostics, and optional values at n."""
    bn_e, rho_e, rate_e = optimal_exponents(_as_rational(p), _as_rational(q))
    click.echo(f"bn_exponent={bn_e}, rho_exponent={rho_e}, rate_exponent={rate_e}")
    plan = _build_plan(p, q, bn_const, bn_exp, rho_const, rho_exp, paper_rates)
    click.echo(
        f"plan: b_n = {plan.bn_constant:g} * n^({plan.bn_exponent}), "
        f"rho_n = {plan.rho_constant:g} * n^({plan.rho_exponent})"
    )
    click.echo(
        f"diagnostics: variance_vanishes={plan.variance_vanishes}, "
        f"bias_vanishes={plan.bias_vanishes}, bias_below_noise={plan.bias_below_noise}"
    )
    if n is not None:
        bandwidth, rate = plan.evaluate(n)
        click.echo(f"at n={n}: b_n={bandwidth:.10g}, rho_n={rate:.10g}")


main.add_command(rates_cmd, name="rates")


@main.command()
@click.option("--n", type=int, default=None, help="Samples per replicate (profile default).")
@click.option("--replicates", type=int, default=None, help="Replicate count (profile default).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--desk/--full",
    "desk",
    default=True,
    help="Desk profile: 61 frequencies, n=10000, 200 replicates; full: 301, n=100000, 500.",
)
@click.option("--level", type=float, default=0.95, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default="mc-out", show_default=True)
@click.option("--beta", type=float, nargs=4, default=None)
@click.option("--alpha", type=float, nargs=4, default=None)
@_common_options("mc-study")
@_guard
def mc_study_cmd(n, replicates, seed, desk, level, out_dir, beta, alpha, config, threads, **_):
    """Replicated simulate/estimate study: normality screening and coverage."""
    if n is None:
        n = 10_000 if desk else 100_000
    if replicates is None:
        replicates = 200 if desk else 500
    config_obj = McConfig(
        n=n,
        replicates=replicates,
        frequencies=study_grid(desk=desk),
        master_seed=seed,
        level=level,
        n_jobs=threads,
    )
    report = run_study(config_obj, _build_model(beta, alpha))
    paths = write_study_csvs(out_dir, report)
    percents = report.pct_p_above(0.05)
    for name, pct in zip(report.stat_names, percents):
        click.echo(f"{name}: {pct:.1f}% of frequencies with KS p > 0.05")
    click.echo("wrote " + ", ".join(paths))


main.add_command(mc_study_cmd, name="mc-study")


if __name__ == "__main__":
    sys.exit(main())
