"""Command-line interface: bounds, figure data, cost tables and desk checks.

Exit codes: 0 success, 2 bad parameters, 3 numerical failure.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources

import numpy as np

from . import bayes, bounds, channels, errorprop
from .errors import DomainError, NumericError, QmetroError
from .fock_core import make_named_state

EXIT_OK, EXIT_PARAM, EXIT_NUMERIC = 0, 2, 3
N_MAX_FIGURE = 40


class ParamError(Exception):
    pass


def parse_n_range(text):
    """"1..100", "10" or "2,4,8" as a sorted list of positive integers."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split(".."))
            ns = list(range(lo, hi + 1))
        else:
            ns = [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ParamError(f"bad N range {text!r}") from exc
    if not ns or min(ns) < 1:
        raise ParamError(f"N range {text!r} must be nonempty and positive")
    return ns


def fmt(x):
    """12 significant digits without locale; infinities spelled out."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".12g")


def _json_value(x):
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, str):
        return x
    x = float(x)
    if not np.isfinite(x):
        return fmt(x)
    return float(fmt(x))


def render(command, config, columns, rows, out_format):
    if out_format == "json":
        doc = {"command": command,
               "config": {k: _json_value(v) if not isinstance(v, (list, bool)) else v
                          for k, v in config.items()},
               "columns": columns,
               "rows": [[_json_value(v) for v in row] for row in rows]}
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"
    head = " ".join(f"{k}={v if isinstance(v, str) else fmt(v)}" for k, v in sorted(config.items()))
    lines = [f"# qmetro {command} {head}", ",".join(columns)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def thread_count():
    raw = os.environ.get("QMETRO_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ParamError("QMETRO_THREADS must be an integer") from exc
    if n < 1:
        raise ParamError("QMETRO_THREADS must be positive")
    return n


def ordered_map(func, items):
    """Map in parallel, keeping input order."""
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        return list(pool.map(func, items))


def _eta_pair(args):
    ea = args.eta_a if args.eta_a is not None else args.eta
    eb = args.eta_b if args.eta_b is not None else args.eta
    if ea is None or eb is None:
        raise ParamError("give --eta or both --eta-a and --eta-b")
    for e in (ea, eb):
        if not 0.0 <= e <= 1.0:
            raise ParamError("eta must lie in [0, 1]")
    return ea, eb


def cmd_bounds(args):
    ns = parse_n_range(args.n)
    rows = []
    config = {"model": args.model, "n": args.n}
    if args.model == "loss":
        ea, eb = _eta_pair(args)
        config.update(eta_a=ea, eta_b=eb)
        for n in ns:
            rows.append([n, "asymptotic_loss", bounds.asymptotic_loss_bound(n, ea, eb)])
    elif args.model == "dephasing":
        if args.eta is None or not 0.0 <= args.eta <= 1.0:
            raise ParamError("dephasing needs --eta in [0, 1]")
        config["eta"] = args.eta
        for n in ns:
            rows.append([n, "asymptotic_dephasing", bounds.asymptotic_dephasing_bound(n, args.eta)])
    else:
        if args.gamma is None or args.gamma < 0:
            raise ParamError("phase diffusion needs --gamma >= 0")
        config["gamma"] = args.gamma
        for n in ns:
            b = bounds.phase_diffusion_bounds(n, args.gamma)
            rows.append([n, "phase_diffusion_exact", b["exact"]])
            rows.append([n, "phase_diffusion_purification", b["purification"]])
    return "bounds", config, ["N", "method", "delta_phi"], rows


def figure_loss_rows(eta, n_max, method="qfi"):
    """Rows (N, series, delta_phi) for equal losses eta and N = 1..n_max."""
    if not 0.0 < eta < 1.0:
        raise ParamError("eta must lie in (0, 1)")
    if not 1 <= n_max <= N_MAX_FIGURE:
        raise ParamError(f"n-max must lie in 1..{N_MAX_FIGURE}")
    params = channels.LossParams.equal(eta)
    penalty = errorprop.DecoherencePenalty("loss", eta)

    def one(n):
        if method == "qfi":
            _, f = channels.optimal_lossy_state(n, params)
            opt = 1 / np.sqrt(f)
        else:
            _, cost = bayes.optimal_state_and_cost(bayes.build_cost_matrix(params, n))
            opt = np.sqrt(cost)
        noon = 1 / (np.sqrt(eta ** n) * n)
        bound = bounds.asymptotic_loss_bound(n, eta)
        cs = errorprop.optimal_coherent_squeezed(float(n), penalty)[1]
        return [[n, "optimal", opt], [n, "noon", noon], [n, "bound", bound],
                [n, "coherent_squeezed", cs]]

    rows = []
    for block in ordered_map(one, range(1, n_max + 1)):
        rows.extend(block)
    return rows


def cmd_figure_loss(args):
    rows = figure_loss_rows(args.eta, args.n_max, args.method)
    config = {"eta": args.eta, "n_max": args.n_max, "method": args.method}
    return "figure-loss", config, ["N", "series", "delta_phi"], rows


def ligo_gap(eta, squeeze):
    """1 - sqrt(f / (e^{-2r} + f)) for loss eta and squeezing e^{-2r}."""
    if not 0.0 < eta <= 1.0 or squeeze < 0:
        raise ParamError("need eta in (0, 1] and a nonnegative squeezing factor")
    f = (1 - eta) / eta
    if f + squeeze == 0:
        return 0.0
    return float(1 - np.sqrt(f / (squeeze + f)))


def cmd_ligo_check(args):
    eta, sq, n = args.eta, args.squeeze, args.mean_n
    if n <= 0:
        raise ParamError("mean photon number must be positive")
    gap = ligo_gap(eta, sq)
    f = (1 - eta) / eta
    rows = [["achieved", np.sqrt(sq + f) / np.sqrt(n)],
            ["bound", np.sqrt(f) / np.sqrt(n)],
            ["gap", gap]]
    config = {"eta": eta, "squeeze": sq, "mean_n": n}
    return "ligo-check", config, ["quantity", "value"], rows


def _model(args):
    """The cost-matrix model and the parameters to record in the config."""
    if args.model == "ideal":
        return bayes.IDEAL, {}
    if args.model == "loss":
        ea, eb = _eta_pair(args)
        return channels.LossParams(ea, eb), {"eta_a": ea, "eta_b": eb}
    if args.gamma is None or args.gamma < 0:
        raise ParamError("phase diffusion needs --gamma >= 0")
    return channels.PhaseDiffusionParams(args.gamma), {"gamma": args.gamma}


def cmd_cost_table(args):
    ns = parse_n_range(args.n)
    model, extra = _model(args)

    def one(n):
        a = bayes.build_cost_matrix(model, n)
        _, cost = bayes.optimal_state_and_cost(a)
        lb = bayes.lossy_lower_bound(a) if a.tag == "loss" else cost
        return [n, cost, np.sqrt(cost), lb]

    rows = ordered_map(one, ns)
    config = {"model": args.model, "n": args.n, **extra}
    return "cost-table", config, ["N", "min_cost", "sqrt_cost", "lower_bound"], rows


def cmd_optimal_state(args):
    (n,) = parse_n_range(str(args.n))
    model, extra = _model(args)
    state, cost = bayes.optimal_state_and_cost(bayes.build_cost_matrix(model, n))
    rows = [[k, float(c.real)] for k, c in enumerate(state.coeffs)]
    config = {"model": args.model, "n": n, "min_cost": cost, **extra}
    return "optimal-state", config, ["n_a", "amplitude"], rows


def cmd_qfi(args):
    ns = parse_n_range(args.n)
    ea, eb = _eta_pair(args)
    params = channels.LossParams(ea, eb)

    def one(n):
        state = make_named_state(args.state, n)
        f = channels.lossy_qfi(state, params)
        return [n, f, 1 / np.sqrt(f) if f > 0 else np.inf]

    rows = ordered_map(one, ns)
    config = {"state": args.state, "n": args.n, "eta_a": ea, "eta_b": eb}
    return "qfi", config, ["N", "qfi", "delta_phi"], rows


def build_parser():
    # output flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="write to this path instead of stdout")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="recorded for reproducibility")
    p = argparse.ArgumentParser(prog="qmetro", description="Optical phase estimation limits.")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", help="write to this path instead of stdout")
    p.add_argument("--seed", type=int, default=0, help="recorded for reproducibility")
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    def eta_flags(sp, default=None):
        sp.add_argument("--eta", type=float, default=default)
        sp.add_argument("--eta-a", type=float)
        sp.add_argument("--eta-b", type=float)

    b = sub.add_parser("bounds", help="asymptotic precision bounds")
    b.add_argument("--model", choices=["loss", "dephasing", "phase-diffusion"], required=True)
    eta_flags(b)
    b.add_argument("--gamma", type=float)
    b.add_argument("--n", required=True)
    b.set_defaults(func=cmd_bounds)

    f = sub.add_parser("figure-loss", help="precision versus N for equal losses")
    f.add_argument("--eta", type=float, default=0.9)
    f.add_argument("--n-max", type=int, default=N_MAX_FIGURE)
    f.add_argument("--method", choices=["qfi", "bayes"], default="qfi")
    f.set_defaults(func=cmd_figure_loss)

    g = sub.add_parser("ligo-check", help="gap between squeezed light and the loss bound")
    g.add_argument("--eta", type=float, default=0.62)
    g.add_argument("--squeeze", type=float, default=0.1, help="e^{-2r}")
    g.add_argument("--mean-n", type=float, default=1.0)
    g.set_defaults(func=cmd_ligo_check)

    c = sub.add_parser("cost-table", help="minimal Bayesian costs")
    c.add_argument("--model", choices=["ideal", "loss", "phase-diffusion"], required=True)
    eta_flags(c)
    c.add_argument("--gamma", type=float)
    c.add_argument("--n", required=True)
    c.set_defaults(func=cmd_cost_table)

    o = sub.add_parser("optimal-state", help="Bayesian optimal input amplitudes")
    o.add_argument("--model", choices=["ideal", "loss", "phase-diffusion"], required=True)
    eta_flags(o)
    o.add_argument("--gamma", type=float)
    o.add_argument("--n", type=int, required=True)
    o.set_defaults(func=cmd_optimal_state)

    q = sub.add_parser("qfi", help="lossy QFI of a named input")
    q.add_argument("--state", choices=["noon", "sine", "balanced", "twin_fock"], required=True)
    eta_flags(q, default=1.0)
    q.add_argument("--n", required=True)
    q.set_defaults(func=cmd_qfi)
    return p


def run(argv=None):
    """Execute a command and return (exit code, text output)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        command, config, columns, rows = args.func(args)
    except (ParamError, DomainError) as exc:
        return EXIT_PARAM, f"error: {exc}\n"
    except (NumericError, ArithmeticError, np.linalg.LinAlgError, QmetroError) as exc:
        return EXIT_NUMERIC, f"numeric failure: {exc}\n"
    if args.seed:
        config["seed"] = args.seed
    return EXIT_OK, render(command, config, columns, rows, args.format)


def main(argv=None):
    code, text = run(argv)
    if code != EXIT_OK:
        sys.stderr.write(text)
        return code
    args = build_parser().parse_args(argv)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def output_schema():
    """The JSON schema that --format json output follows."""
    text = resources.files("qmetro").joinpath("data/output.schema.json").read_text()
    return json.loads(text)


if __name__ == "__main__":
    sys.exit(main())
