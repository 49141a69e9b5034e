"""Command-line interface.

Usage: ``pfaffpp <command> [<subcommand>] [options]``. Every command accepts
``--config FILE``, a flat ``key = value`` file whose keys are option names
(dashes or underscores). Precedence is command-line flag, then config file,
then built-in default.

Exit codes: 0 success, 1 a check failed, 2 usage or parameter error.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from typing import Sequence

import numpy as np

from .errors import ContractError, QuadratureError, ResourceError

KERNELS = ("sine1", "sine4", "bessel1", "bessel4")

# JSON outputs and the schema file each one validates against
SCHEMAS = {
    ("kernel", "eval"): "kernel_eval",
    ("corr",): "corr",
    ("variance", "sweep"): "variance_sweep",
    ("screening",): "screening",
    ("defect",): "defect",
    ("spectral", "check"): "spectral_check",
    ("mollifier",): "mollifier",
    ("occupation", "cov"): "occupation_cov",
    ("occupation", "diverge"): "occupation_diverge",
    ("ensemble", "sample"): "ensemble_sample",
    ("ensemble", "validate"): "ensemble_validate",
    ("verify", "all"): "verify",
}


def load_schema(name: str) -> dict:
    """The published JSON schema ``name`` (see :data:`SCHEMAS`)."""
    from importlib.resources import files

    return json.loads((files("pfaffpp") / "schemas" / f"{name}.json").read_text(encoding="utf-8"))


class UsageError(Exception):
    pass


def _f(x) -> str:
    if x is None:
        return ""
    return format(float(x) + 0.0, ".17g")


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x) + 0.0  # no negative zeros
        return v if math.isfinite(v) else str(v)
    return x


def _dump_json(doc) -> str:
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


# option handling ---------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Records defaults separately so that config files can sit in between."""

    def __init__(self, *a, **kw):
        super().__init__(*a, **kw)
        self.late_defaults: dict[str, object] = {}

    def opt(self, *flags, default=None, **kw):
        action = self.add_argument(*flags, default=None, **kw)
        self.late_defaults[action.dest] = default
        return action

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def read_config(path: str) -> dict[str, str]:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{ln}: expected key = value")
            k, v = (t.strip() for t in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def _convert(action: argparse.Action, text: str):
    conv = action.type or str
    if action.nargs in ("+", "*") or isinstance(action.nargs, int):
        vals = [conv(t) for t in text.replace(",", " ").split()]
        return vals
    if action.const is True and action.nargs == 0:
        return text.lower() in ("1", "true", "yes", "on")
    return conv(text)


def _resolve(parser: _Parser, ns: argparse.Namespace) -> argparse.Namespace:
    cfg = read_config(ns.config) if getattr(ns, "config", None) else {}
    by_dest = {a.dest: a for a in parser._actions}
    unknown = set(cfg) - set(by_dest)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for dest, default in parser.late_defaults.items():
        if getattr(ns, dest, None) is not None:
            continue
        if dest in cfg:
            try:
                setattr(ns, dest, _convert(by_dest[dest], cfg[dest]))
            except ValueError as e:
                raise UsageError(f"config key {dest}: {e}") from None
        else:
            setattr(ns, dest, default)
    return ns


def _emit(text: str, out: str | None, stdout) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _kernel(ns):
    from .kernels import matrix_kernel

    s = ns.s if ns.kernel.startswith("bessel") else None
    return matrix_kernel(ns.kernel, s)


# commands ------------------------------------------------------------------------------


def cmd_kernel_eval(ns):
    K = _kernel(ns)
    x, y = np.broadcast_arrays(np.asarray(ns.x, float), np.asarray(ns.y, float))
    m = K(x, y)
    if ns.format == "csv":
        buf = io.StringIO()
        buf.write("kernel,s,x,y,k11,k12,k21,k22\n")
        for xi, yi, mi in zip(x, y, m):
            buf.write(",".join([K.name, _f(K.s), _f(xi), _f(yi)] + [_f(v) for v in mi.ravel()]) + "\n")
        return 0, buf.getvalue()
    if x.size == 1:
        doc = {"kernel": K.name, "s": K.s, "x": float(x[0]), "y": float(y[0]), "matrix": m[0]}
    else:
        doc = {"kernel": K.name, "s": K.s, "x": x, "y": y, "matrix": m}
    return 0, _dump_json(doc)


def cmd_corr(ns):
    from .kernels import correlation

    K = _kernel(ns)
    r = correlation(K, ns.points)
    return 0, _dump_json({"kernel": K.name, "s": K.s, "points": ns.points,
                          "value": r.value, "degenerate": r.degenerate})


def cmd_variance_sweep(ns):
    from .rigidity import variance_sweep, write_sweep_csv

    rows = variance_sweep(_kernel(ns), ns.R, ns.T, resolution=ns.resolution)
    if ns.format == "json":
        return 0, _dump_json({"rows": [r._asdict() for r in rows]})
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    return 0, buf.getvalue()


def cmd_screening(ns):
    from .rigidity import (screening_average, screening_integral, screening_residual,
                           screening_residual_closed_form)

    K = _kernel(ns)
    doc = {"kernel": K.name, "s": K.s, "x": ns.x}
    if K.stationary:
        doc["M"] = ns.M
        doc["integral"] = screening_integral(K, ns.x, ns.M)
        doc["target"] = -(1.0 if K.name == "sine1" else 0.5)
    r = screening_residual(K, ns.x if not K.stationary else 0.0)
    doc["residual"] = r.value
    doc["residual_err"] = r.error
    if not K.stationary:
        doc["closed_form"] = screening_residual_closed_form(K, ns.x)
    if ns.X:
        av = screening_average(K, ns.X)
        doc["average"] = [{"X": X, "value": a.value, "err_estimate": a.error}
                          for X, a in zip(ns.X, av)]
    return 0, _dump_json(doc)


def cmd_defect(ns):
    from .rigidity import defect, defect_closed_form

    K = _kernel(ns)
    buf = io.StringIO()
    buf.write("kernel,s,x,defect,err_estimate,closed_form,closed_form_corrected\n")
    rows = []
    for x in ns.x:
        d = defect(K, x)
        c0 = defect_closed_form(K, x)
        c1 = defect_closed_form(K, x, corrected=True)
        rows.append({"x": x, "defect": d.value, "err_estimate": d.error,
                     "closed_form": c0, "closed_form_corrected": c1})
        buf.write(",".join([K.name, _f(K.s), _f(x), _f(d.value), _f(d.error), _f(c0), _f(c1)]) + "\n")
    if ns.format == "json":
        return 0, _dump_json({"kernel": K.name, "s": K.s, "rows": rows})
    return 0, buf.getvalue()


def cmd_spectral_check(ns):
    from .spectral import check_linear_bound

    r = check_linear_bound(ns.process, ns.lmax, ns.C, points=ns.points)
    doc = r._asdict()
    doc["violations"] = list(r.violations)
    return (0 if r.passed else 1), _dump_json(doc)


def cmd_spectral_table(ns):
    from .spectral import write_spectral_csv

    lams = np.round(np.arange(1, ns.count + 1) * ns.lmax / ns.count, 15)
    buf = io.StringIO()
    write_spectral_csv(ns.process, lams, buf)
    return 0, buf.getvalue()


def _svg(series, title: str, xlabel: str) -> str:
    W, H, pad = 640, 400, 50
    xs = np.concatenate([s[1] for s in series])
    ys = np.concatenate([s[2] for s in series])
    ys = ys[np.isfinite(ys)]
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if y1 == y0:
        y1 = y0 + 1.0

    def px(x):
        return pad + (x - x0) / (x1 - x0) * (W - 2 * pad)

    def py(y):
        return H - pad - (y - y0) / (y1 - y0) * (H - 2 * pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<text x="{W / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
           f'<text x="{W / 2}" y="{H - 10}" text-anchor="middle" font-size="12">{xlabel}</text>',
           f'<line x1="{pad}" y1="{H - pad}" x2="{W - pad}" y2="{H - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{H - pad}" stroke="black"/>',
           f'<text x="{pad - 5}" y="{py(y0):.2f}" text-anchor="end" font-size="10">{y0:.3g}</text>',
           f'<text x="{pad - 5}" y="{py(y1):.2f}" text-anchor="end" font-size="10">{y1:.3g}</text>',
           f'<text x="{pad}" y="{H - pad + 15}" text-anchor="middle" font-size="10">{x0:.3g}</text>',
           f'<text x="{W - pad}" y="{H - pad + 15}" text-anchor="middle" font-size="10">{x1:.3g}</text>']
    colors = ("#1f77b4", "#d62728", "#2ca02c")
    for i, (label, x, y, dash) in enumerate(series):
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y) if math.isfinite(b))
        extra = ' stroke-dasharray="6,4"' if dash else ""
        out.append(f'<polyline fill="none" stroke="{colors[i % 3]}" stroke-width="1.5"{extra} points="{pts}"/>')
        out.append(f'<text x="{W - pad - 150}" y="{pad + 15 * (i + 1)}" font-size="11" '
                   f'fill="{colors[i % 3]}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_plot(ns):
    from .spectral import closed_form_fhat_delta, stationary_profile

    p = stationary_profile(ns.process)
    lam = np.round(np.arange(1, ns.count + 1) * ns.lmax / ns.count, 15)
    num = p.fhat(lam) - p.fhat(0.0)
    cf = closed_form_fhat_delta(ns.process, lam)
    svg = _svg([("numeric", lam, num, False), ("closed form", lam, cf, True)],
               f"{ns.process}: F^(lambda) - F^(0)", "lambda")
    return 0, svg


def cmd_mollifier(ns):
    from .spectral import build_mollifier, spectral_variance

    m = build_mollifier(ns.n, ns.R, ns.process, ns.C)
    x = np.linspace(-ns.R, ns.R, 401)
    var = spectral_variance(ns.process, m.statistic)
    dev = float(np.max(np.abs(m.statistic(x) - 1.0)))
    ok = var <= 1.0 / ns.n and dev <= 1.0 / ns.n
    doc = {"process": ns.process, "n": m.n, "R": m.R, "k": m.k, "C": m.C, "eps": m.eps,
           "variance": var, "sup_deviation": dev, "passed": ok}
    return (0 if ok else 1), _dump_json(doc)


def cmd_occupation_cov(ns):
    from .occupation import cov_abs_tail, cov_total_sum, covariance_series, write_occupation_csv

    ser = covariance_series(ns.process, ns.lam, n_max=max(ns.n_max, ns.N))
    if ns.format == "csv":
        buf = io.StringIO()
        write_occupation_csv(ser, buf, ns.N)
        return 0, buf.getvalue()
    tot = cov_total_sum(ser, ns.N)
    doc = {"process": ser.process, "lambda": ser.lam, "N": ns.N,
           "total_sum": tot.value, "total_tail_bound": tot.tail_estimate,
           "tail_constant": ser.tail_constant}
    if ser.tail_constant is not None:
        Ns = [n for n in range(10, min(ns.N, ser.n_max) + 1, 10)]
        doc["scaled_abs_tail"] = [{"N": t.N, "tail": t.tail, "scaled": t.scaled}
                                  for t in (cov_abs_tail(ser, n) for n in Ns)]
    return 0, _dump_json(doc)


def cmd_occupation_diverge(ns):
    from .occupation import divergence_probe_sine4_lambda1

    rows = divergence_probe_sine4_lambda1(ns.N, ns.lam)
    if ns.format == "csv":
        return 0, "N,partial_abs_sum\n" + "".join(f"{n},{_f(v)}\n" for n, v in rows)
    return 0, _dump_json({"process": "sine4", "lambda": ns.lam,
                          "rows": [{"N": n, "partial_abs_sum": v} for n, v in rows]})


def cmd_ensemble_sample(ns):
    from .ensembles import Bulk, EnsembleSpec, HardEdge, counts_in, empirical_count_stats, \
        rescale, sample_many, semicircle_density, write_counts_csv, MIN_SAMPLES

    spec = EnsembleSpec(ns.beta, ns.weight, ns.N, ns.seed, ns.a)
    if ns.rescale == "bulk":
        mode = Bulk(0.0, semicircle_density(ns.beta, ns.N))
    elif ns.rescale == "hard-edge":
        mode = HardEdge(ns.N)
    else:
        mode = None
    confs = sample_many(spec, ns.samples)
    if mode is not None:
        confs = [rescale(c, mode) for c in confs]
    counts = counts_in(confs, tuple(ns.interval))
    if ns.format == "json":
        doc = {"beta": ns.beta, "weight": ns.weight, "a": ns.a, "N": ns.N, "seed": ns.seed,
               "samples": ns.samples, "interval": ns.interval, "rescale": ns.rescale}
        if ns.samples >= MIN_SAMPLES:
            doc.update(empirical_count_stats(counts, tuple(ns.interval))._asdict())
        else:
            doc.update({"mean": float(counts.mean()) if counts.size else 0.0})
        return 0, _dump_json(doc)
    buf = io.StringIO()
    write_counts_csv(counts, buf)
    return 0, buf.getvalue()


def cmd_ensemble_validate(ns):
    from .ensembles import summary_json, validate_bessel4_hard_edge, validate_sine1_bulk

    if ns.case == "sine1-bulk":
        r = validate_sine1_bulk(ns.samples or 10_000, ns.N or 200, ns.seed)
    else:
        r = validate_bessel4_hard_edge(ns.s, ns.samples or 40_000, ns.N or 100, ns.seed)
    if ns.counts:
        from .ensembles import write_counts_csv
        with open(ns.counts, "w", encoding="utf-8", newline="\n") as fh:
            write_counts_csv(r.counts, fh)
    return (0 if r.passed else 1), summary_json(r)


def cmd_verify_all(ns):
    from .verify import format_report, run_all

    res = run_all(quick=ns.quick, seed=ns.seed, only=ns.only)
    ok = all(r.passed for r in res)
    if ns.format == "json":
        text = _dump_json({"quick": ns.quick, "seed": ns.seed, "passed": ok,
                           "checks": [r._asdict() for r in res]})
    else:
        text = format_report(res)
    return (0 if ok else 1), text


# parser --------------------------------------------------------------------------------


def _common(p: _Parser, formats=("json", "csv"), default="json"):
    p.add_argument("--config", help="flat key = value file with option defaults")
    p.opt("--out", help="output file (default: stdout)")
    p.opt("--format", choices=formats, default=default)


def _kernel_opts(p: _Parser, kernels=KERNELS):
    p.opt("--kernel", choices=kernels, default="sine1")
    p.opt("--s", type=float, default=1.0, help="Bessel parameter")


def build_parser() -> _Parser:
    top = _Parser(prog="pfaffpp", description="Pfaffian point processes: kernels, variances, rigidity checks.")
    cmds = top.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    cmds.required = True
    leaves: dict[tuple, _Parser] = {}

    def group(name, help):
        g = cmds.add_parser(name, help=help)
        sub = g.add_subparsers(dest="sub", metavar="subcommand", parser_class=_Parser)
        sub.required = True
        return sub

    def leaf(parent, name, fn, help, key):
        p = parent.add_parser(name, help=help)
        p.set_defaults(_fn=fn)
        leaves[key] = p
        return p

    kernel = group("kernel", "kernel evaluation")
    p = leaf(kernel, "eval", cmd_kernel_eval, "matrix kernel K(x, y)", ("kernel", "eval"))
    _common(p)
    _kernel_opts(p)
    p.opt("--x", type=float, nargs="+", default=[0.0])
    p.opt("--y", type=float, nargs="+", default=[0.0])

    p = leaf(cmds, "corr", cmd_corr, "k-point correlation function", ("corr",))
    _common(p, ("json",))
    _kernel_opts(p)
    p.opt("--points", type=float, nargs="+", default=[0.0])

    variance = group("variance", "variance of additive statistics")
    p = leaf(variance, "sweep", cmd_variance_sweep, "taper variance over T", ("variance", "sweep"))
    _common(p, default="csv")
    _kernel_opts(p)
    p.opt("--R", type=float, default=1.0)
    p.opt("--T", type=float, nargs="+", default=[10.0, 100.0, 1000.0])
    p.opt("--resolution", type=int, default=16)

    p = leaf(cmds, "screening", cmd_screening, "screening integral and residual", ("screening",))
    _common(p, ("json",))
    _kernel_opts(p)
    p.opt("--x", type=float, default=1.0)
    p.opt("--M", type=float, default=100.0)
    p.opt("--X", type=float, nargs="+", default=[], help="averaged residual upper limits")

    p = leaf(cmds, "defect", cmd_defect, "reproducing-property defect", ("defect",))
    _common(p, default="csv")
    _kernel_opts(p)
    p.opt("--x", type=float, nargs="+", default=[0.5, 1.0, 2.0, 5.0, 10.0])

    spectral = group("spectral", "spectral measure checks")
    p = leaf(spectral, "check", cmd_spectral_check, "0 <= F^ + rho <= C |lambda|", ("spectral", "check"))
    _common(p, ("json",))
    p.opt("--process", choices=("sine1", "sine4"), default="sine1")
    p.opt("--lmax", type=float, default=1.0)
    p.opt("--C", type=float, default=2.1)
    p.opt("--points", type=int, default=200)
    p = leaf(spectral, "table", cmd_spectral_table, "numeric vs closed-form F^", ("spectral", "table"))
    _common(p, ("csv",), "csv")
    p.opt("--process", choices=("sine1", "sine4"), default="sine1")
    p.opt("--lmax", type=float, default=2.0)
    p.opt("--count", type=int, default=20)

    p = leaf(cmds, "plot", cmd_plot, "SVG of F^(lambda) - F^(0)", ("plot",))
    _common(p, ("svg",), "svg")
    p.opt("--process", choices=("sine1", "sine4"), default="sine1")
    p.opt("--lmax", type=float, default=2.0)
    p.opt("--count", type=int, default=400)

    p = leaf(cmds, "mollifier", cmd_mollifier, "build and check phi_n", ("mollifier",))
    _common(p, ("json",))
    p.opt("--process", choices=("sine1", "sine4"), default="sine1")
    p.opt("--n", type=int, default=1)
    p.opt("--R", type=float, default=2.0)
    p.opt("--C", type=float)

    occ = group("occupation", "occupation-number covariances")
    p = leaf(occ, "cov", cmd_occupation_cov, "Cov(X_0, X_n)", ("occupation", "cov"))
    _common(p, default="csv")
    p.opt("--process", choices=("sine1", "sine4"), default="sine1")
    p.opt("--lam", type=float, default=1.0)
    p.opt("--N", type=int, default=200)
    p.opt("--n-max", type=int, default=512)
    p = leaf(occ, "diverge", cmd_occupation_diverge, "partial sums of |Cov| for sine4", ("occupation", "diverge"))
    _common(p)
    p.opt("--lam", type=float, default=1.0)
    p.opt("--N", type=int, nargs="+", default=[100, 200, 400])

    ens = group("ensemble", "Monte Carlo beta-ensembles")
    p = leaf(ens, "sample", cmd_ensemble_sample, "per-sample counts", ("ensemble", "sample"))
    _common(p, default="csv")
    p.opt("--beta", type=int, choices=(1, 2, 4), default=1)
    p.opt("--weight", choices=("hermite", "laguerre"), default="hermite")
    p.opt("--a", type=float, default=0.0)
    p.opt("--N", type=int, default=200)
    p.opt("--seed", type=int, default=0)
    p.opt("--samples", type=int, default=1000)
    p.opt("--interval", type=float, nargs=2, default=[-0.5, 0.5])
    p.opt("--rescale", choices=("none", "bulk", "hard-edge"), default="bulk")
    p = leaf(ens, "validate", cmd_ensemble_validate, "compare with the scaling limit", ("ensemble", "validate"))
    _common(p, ("json",))
    p.opt("--case", choices=("sine1-bulk", "bessel4-hard-edge"), default="sine1-bulk")
    p.opt("--s", type=float, default=1.0)
    p.opt("--N", type=int)
    p.opt("--samples", type=int)
    p.opt("--seed", type=int, default=0)
    p.opt("--counts", help="also write per-sample counts CSV here")

    ver = group("verify", "acceptance checks")
    p = leaf(ver, "all", cmd_verify_all, "run every check", ("verify", "all"))
    _common(p, ("text", "json"), "text")
    p.opt("--quick", action="store_const", const=True, default=False)
    p.opt("--seed", type=int, default=0)
    p.opt("--only", type=int, nargs="+")

    top.leaves = leaves
    return top


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        ns = parser.parse_args(argv)
        key = (ns.command,) if getattr(ns, "sub", None) is None else (ns.command, ns.sub)
        ns = _resolve(parser.leaves[key], ns)
        code, text = ns._fn(ns)
        _emit(text, ns.out, stdout)
        return code
    except UsageError as e:
        stderr.write(f"{e}\n")
        return 2
    except SystemExit as e:  # --help
        return int(e.code or 0) if isinstance(e.code, int) else 2
    except (ContractError, ResourceError, OSError) as e:
        stderr.write(f"pfaffpp: error: {e}\n")
        return 2
    except QuadratureError as e:
        stderr.write(f"pfaffpp: quadrature failed: {e}\n")
        return 1


run = main

if __name__ == "__main__":
    sys.exit(main())
