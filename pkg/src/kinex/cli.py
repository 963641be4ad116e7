"""Command-line front end.

    kinex simulate --lambda 0.5 --alpha 1 --out runs/d
    kinex sweep --tau 5,7,10,13 --mc --thermalize 10000
    kinex variance-table --mc
    kinex diversify --k 1,2,3,4
    kinex microcheck --cc-limit --lambda 0.5

Values come from built-in defaults, then a ``--config`` file of flat
``key = value`` lines (keys are flag names without dashes), then flags.
Exit codes: 0 success, 1 invalid configuration, 2 runtime/numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

from .analytics import closed_form_variance
from .core import ConservationError, ModelParams, RandomSource, SimConfig, derive_seed

COMMANDS = ("simulate", "sweep", "variance-table", "microcheck", "diversify")

DEFAULTS: dict[str, object] = {
    "lambda": None,  # per command, see COMMAND_DEFAULTS
    "alpha": None,
    "tau": "5,7,10,13",
    "k": "1,2,3,4",
    "agents": 100,
    "steps": None,
    "thermalize": 100_000,
    "samples": 1000,
    "interval": 10,
    "seed": 0,
    "replicas": 1,
    "bins": 50,
    "mc": False,
    "cc_limit": False,
    "trials": 10_000,
    "draws": 1_000_000,
    "workers": 1,
    "out": "kinex_out",
}

COMMAND_DEFAULTS: dict[str, dict[str, object]] = {
    "simulate": {"lambda": "0", "alpha": "1"},
    "sweep": {},
    "variance-table": {"lambda": "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9", "alpha": "0,0.25,0.5,0.75,1"},
    "microcheck": {"lambda": "0.5"},
    "diversify": {},
}

_INT_KEYS = {"agents", "steps", "thermalize", "samples", "interval", "seed", "replicas", "bins",
             "trials", "draws", "workers"}
_BOOL_KEYS = {"mc", "cc_limit"}


class ConfigError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kinex", description="Generalized kinetic exchange model experiments.")
    p.add_argument("command", choices=COMMANDS)
    s = argparse.SUPPRESS
    p.add_argument("--config", default=None, help="flat key = value file; flags override it")
    p.add_argument("--lambda", dest="lambda", default=s, help="savings propensity (comma list for variance-table)")
    p.add_argument("--alpha", default=s, help="correlation parameter (comma list for variance-table)")
    p.add_argument("--tau", default=s, help="comma list of path exponents (default 5,7,10,13)")
    p.add_argument("--k", default=s, help="comma list of commodity-pair counts (default 1,2,3,4)")
    p.add_argument("--agents", default=s, help="number of agents (default 100)")
    p.add_argument("--steps", default=s,
                   help="total MC steps; thermalization becomes steps - samples*interval")
    p.add_argument("--thermalize", default=s, help="thermalization MC steps (default 100000)")
    p.add_argument("--samples", default=s, help="snapshots recorded after thermalization (default 1000)")
    p.add_argument("--interval", default=s, help="MC steps between snapshots (default 10)")
    p.add_argument("--seed", default=s, help="base seed (default 0)")
    p.add_argument("--replicas", default=s, help="independent ensemble members (default 1)")
    p.add_argument("--bins", default=s, help="histogram bins (default 50)")
    p.add_argument("--mc", action="store_const", const="true", default=s, help="add Monte Carlo columns")
    p.add_argument("--cc-limit", dest="cc_limit", action="store_const", const="true", default=s,
                   help="microcheck: identical exponents for both agents and a steady-state run")
    p.add_argument("--trials", default=s, help="microcheck: random trade setups (default 10000)")
    p.add_argument("--draws", default=s, help="microcheck: preference draws for the correlation (default 1e6)")
    p.add_argument("--workers", default=s, help="threads for independent grid points (default 1)")
    p.add_argument("--out", default=s, help="output directory (default kinex_out)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def read_config_file(path: str | Path) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key == "command" or value == "":
            continue  # lets an echoed run.cfg be fed back in
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def resolve(command: str, file_values: dict[str, str], flag_values: dict[str, str]) -> dict[str, object]:
    merged: dict[str, object] = dict(DEFAULTS)
    merged.update(COMMAND_DEFAULTS[command])
    merged.update(file_values)
    merged.update(flag_values)
    out: dict[str, object] = {}
    for key, value in merged.items():
        try:
            if value is None:
                out[key] = None
            elif key in _INT_KEYS:
                out[key] = _to_int(value)
            elif key in _BOOL_KEYS:
                out[key] = value if isinstance(value, bool) else str(value).lower() in {"1", "true", "yes", "on"}
            else:
                out[key] = str(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {value!r}") from exc
    return out


def _to_int(value) -> int:
    try:
        return int(value)
    except ValueError:
        f = float(value)  # accepts 1e5
        if not f.is_integer():
            raise
        return int(f)


def float_list(text: str | None, name: str) -> list[float]:
    if text is None:
        raise ConfigError(f"--{name} is required")
    try:
        vals = [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"--{name} must be a comma list of numbers") from exc
    if not vals:
        raise ConfigError(f"--{name} is empty")
    return vals


def sim_config(cfg: dict[str, object]) -> SimConfig:
    samples, interval = cfg["samples"], cfg["interval"]
    thermalize = cfg["thermalize"]
    if cfg["steps"] is not None:
        thermalize = cfg["steps"] - samples * interval
        if thermalize < 0:
            raise ConfigError("--steps is shorter than samples * interval")
    try:
        return SimConfig(
            n_agents=cfg["agents"],
            thermalization_steps=thermalize,
            sample_steps=samples,
            sample_interval=interval,
            seed=cfg["seed"],
            replicas=cfg["replicas"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def echo_config(command: str, cfg: dict[str, object]) -> str:
    lines = [f"command = {command}"]
    lines += [f"{k} = {'' if cfg[k] is None else str(cfg[k]).lower() if isinstance(cfg[k], bool) else cfg[k]}"
              for k in sorted(cfg)]
    return "\n".join(lines) + "\n"


def csv_text(header, rows) -> str:
    from .kuznets import format_cell

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([c if isinstance(c, str) else format_cell(c) for c in r])
    return buf.getvalue()


def histogram_csv(hist) -> str:
    rows = zip(hist.edges[:-1], hist.edges[1:], hist.densities)
    return csv_text(("bin_left", "bin_right", "density"), rows)


def _write(out: Path, name: str, text: str) -> Path:
    path = out / name
    path.write_text(text, encoding="utf-8", newline="")
    return path


def _tau_tag(tau: float) -> str:
    return f"{tau:g}"


def cmd_simulate(cfg, out: Path) -> list[str]:
    from .kernels import Kernel, run_simulation

    lam = float_list(cfg["lambda"], "lambda")
    alpha = float_list(cfg["alpha"], "alpha")
    if len(lam) != 1 or len(alpha) != 1:
        raise ConfigError("simulate takes a single --lambda and --alpha")
    try:
        params = ModelParams(lam[0], alpha[0])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    config = sim_config(cfg)
    res = run_simulation(config, params, Kernel.GENERALIZED, bins=cfg["bins"])
    rep = res.report
    closed = closed_form_variance(params.lam, params.alpha)
    _write(out, "histogram.csv", histogram_csv(rep.histogram))
    header = ("lambda", "alpha", "mean", "variance", "variance_closed", "cv", "gini",
              "n_snapshots", "max_conservation_error", "seed")
    row = (params.lam, params.alpha, rep.mean, rep.variance, closed, rep.cv, rep.gini,
           rep.n_snapshots, res.max_conservation_error, config.seed)
    _write(out, "report.csv", csv_text(header, [row]))
    return [
        f"lambda={params.lam:g} alpha={params.alpha:g} agents={config.n_agents} snapshots={rep.n_snapshots}",
        f"mean={rep.mean:.6f} variance={rep.variance:.6f} (closed form {closed:.6f})",
        f"cv={rep.cv:.6f} gini={rep.gini:.6f} max conservation error={res.max_conservation_error:.2e}",
    ]


def cmd_sweep(cfg, out: Path) -> list[str]:
    from .kuznets import PathSpec, detect_reversal, sweep_closed_form, sweep_monte_carlo

    taus = float_list(cfg["tau"], "tau")
    try:
        paths = [PathSpec(t) for t in taus]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    config = sim_config(cfg) if cfg["mc"] else None
    combined, rev_rows, summary = [], [], []
    for path in paths:
        res = sweep_monte_carlo(path, config, cfg["workers"]) if config else sweep_closed_form(path)
        _write(out, f"sweep_tau{_tau_tag(path.tau)}.csv", res.to_csv())
        combined.append(res.to_csv(with_tau=True))
        cols = ["cv_closed"] + (["cv_mc", "gini_mc"] if config else [])
        for col in cols:
            peak, rev = detect_reversal(res, col)
            rev_rows.append((path.tau, col, peak, float(path.lambda_grid[peak]), "true" if rev else "false"))
            summary.append(f"tau={path.tau:g} {col}: peak at lambda={path.lambda_grid[peak]:.2f} "
                           f"(index {peak}) is_reversal={rev}")
    body = combined[0] + "".join(c.split("\n", 1)[1] for c in combined[1:])
    _write(out, "sweep_all.csv", body)
    _write(out, "reversal.csv", csv_text(("tau", "column", "peak_index", "peak_lambda", "is_reversal"), rev_rows))
    return summary


def cmd_variance_table(cfg, out: Path) -> list[str]:
    from .kernels import Kernel, run_simulation

    lams = float_list(cfg["lambda"], "lambda")
    alphas = float_list(cfg["alpha"], "alpha")
    try:
        grid = [ModelParams(l, a) for l in lams for a in alphas]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    config = sim_config(cfg) if cfg["mc"] else None
    rows, worst = [], 0.0
    for idx, p in enumerate(grid):
        closed = closed_form_variance(p.lam, p.alpha)
        if config is None:
            rows.append((p.lam, p.alpha, closed, None, None, None))
            continue
        seed = derive_seed(config.seed, idx)
        mc = run_simulation(config, p, Kernel.GENERALIZED, seed=seed).report.variance
        rel = abs(mc - closed) / closed
        worst = max(worst, rel)
        rows.append((p.lam, p.alpha, closed, mc, rel, seed))
    _write(out, "variance_table.csv",
           csv_text(("lambda", "alpha", "variance_closed", "variance_mc", "rel_error", "seed"), rows))
    msg = [f"{len(rows)} grid points written"]
    if config is not None:
        msg.append(f"max relative error |mc - closed| / closed = {worst:.4f}")
    return msg


def cmd_diversify(cfg, out: Path) -> list[str]:
    from .kernels import Kernel, KernelSpec, run_simulation

    ks = [int(k) for k in float_list(cfg["k"], "k")]
    if any(k < 1 for k in ks):
        raise ConfigError("--k values must be >= 1")
    config = sim_config(cfg)
    rows, summary = [], []
    for idx, k in enumerate(ks):
        seed = derive_seed(config.seed, idx)
        # lambda/alpha are not read by this kernel
        res = run_simulation(config, ModelParams(0.0, 1.0), KernelSpec(Kernel.DIVERSIFIED, k=k),
                             bins=cfg["bins"], seed=seed)
        rep = res.report
        _write(out, f"diversify_k{k}.csv", histogram_csv(rep.histogram))
        rows.append((k, rep.mean, rep.variance, rep.cv, rep.gini, seed))
        summary.append(f"K={k}: variance={rep.variance:.6f} gini={rep.gini:.6f}")
    _write(out, "diversify.csv", csv_text(("k", "mean", "variance", "cv", "gini", "seed"), rows))
    return summary


def cmd_microcheck(cfg, out: Path) -> list[str]:
    from .microtrade import coefficient_correlation, verify_identities

    lam = float_list(cfg["lambda"], "lambda")
    if len(lam) != 1 or not 0.0 < lam[0] < 1.0:
        raise ConfigError("microcheck needs a single --lambda in (0, 1)")
    lam = lam[0]
    rng = RandomSource(cfg["seed"])
    ident = verify_identities(rng.child(0), cfg["trials"])
    rho = coefficient_correlation(rng.child(1), lam, cfg["draws"])
    rows = [
        ("trials", ident.trials),
        ("max_clearing_residual", ident.max_clearing_residual),
        ("max_conservation_error", ident.max_conservation_error),
        ("max_theta_equivalence_error", ident.max_theta_error),
        ("max_theta_column_sum_error", ident.max_column_sum_error),
        ("max_q_rescale_error", ident.max_rescale_error),
        ("min_price", ident.min_price),
        ("lambda", lam),
        ("coefficient_correlation", rho),
    ]
    summary = [f"{name} = {value:.6g}" for name, value in rows]
    if cfg["cc_limit"]:
        from .kernels import Kernel, KernelSpec, run_simulation

        res = run_simulation(sim_config(cfg), ModelParams(lam, 1.0), KernelSpec(Kernel.MICROTRADE, cc_limit=True))
        target = closed_form_variance(lam, 1.0)
        extra = [("cc_steady_state_variance", res.report.variance), ("cc_closed_form_variance", target)]
        rows += extra
        summary += [f"{name} = {value:.6g}" for name, value in extra]
    _write(out, "microcheck.csv", csv_text(("metric", "value"), rows))
    return summary


HANDLERS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "variance-table": cmd_variance_table,
    "microcheck": cmd_microcheck,
    "diversify": cmd_diversify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = vars(parser.parse_args(argv))
    command = ns.pop("command")
    config_path = ns.pop("config")
    verbose = ns.pop("verbose")
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")

    try:
        file_values = read_config_file(config_path) if config_path else {}
        cfg = resolve(command, file_values, ns)
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        echo = echo_config(command, cfg)
        _write(out, "run.cfg", echo)
        lines = HANDLERS[command](cfg, out)
    except (ConfigError, ValueError) as exc:
        print(f"kinex: invalid configuration: {exc}", file=sys.stderr)
        return 1
    except (ConservationError, ArithmeticError, OSError, RuntimeError) as exc:
        print(f"kinex: run failed: {exc}", file=sys.stderr)
        return 2

    sys.stdout.write("".join(f"# {line}\n" for line in echo.splitlines()))
    for line in lines:
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
