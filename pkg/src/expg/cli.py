"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 numerical failure.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .base import FAMILIES, make_base
from .datasets import FATIGUE_ANNOUNCED_N, fatigue, load_csv
from .exceptions import (
    DataError,
    DomainError,
    FitError,
    NonexistentMomentError,
    ParameterError,
    QuadratureError,
    TruncationError,
    UnsupportedOperationError,
)
from .inference import TESTS, lr_test, mle_fit, score_test, wald_test
from .info import constraint_expectations, kl_divergence, shannon_entropy, texp_entropy
from .model import ExpGModel
from .quadrature import integrate
from .series import moment, skewness_kurtosis

COMMANDS = ("fit", "test", "moments", "entropy", "sample", "curves", "demo")
QUANTITIES = ("pdf", "hazard", "cdf", "skewness", "kurtosis")
EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


class InputError(Exception):
    """Invalid command-line input."""


class NumericalFailure(Exception):
    """A computation failed; reported with exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    family: str = "weibull"
    theta: tuple = None
    lam: float = 0.0
    fix_lambda: float = None
    data_path: str = None
    stat: str = "lr"
    order: int = 4
    grid: tuple = None
    lambda_grid: tuple = None
    quantity: str = "pdf"
    level: float = 0.95
    n: int = 10
    seed: int = None
    out_format: str = "json"


def build_parser():
    p = _Parser(prog="expg", description="exp-G distributions: fitting, tests, moments and curves.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--family", default="weibull", choices=sorted(FAMILIES))
    p.add_argument("--data", dest="data_path", metavar="PATH",
                   help="CSV of observations; fit/test default to the embedded fatigue data")
    p.add_argument("--theta", help="base parameters, comma separated, in the family's order "
                                   "(weibull/frechet: alpha,beta; beta: a,b; bernoulli: p)")
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--fix-lambda", type=float, default=None,
                   help="fit: pin lambda; test: null value of lambda (default 0)")
    p.add_argument("--stat", default="lr", choices=sorted(TESTS))
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--grid", help="x grid a:b:step")
    p.add_argument("--lambda-grid", help="lambda grid a:b:step")
    p.add_argument("--quantity", default="pdf", choices=QUANTITIES)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("-n", "--n", type=int, default=10)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", dest="out_format", default="json", choices=("json", "text"))
    return p


def parse_grid(spec, name):
    """Parse ``a:b:step`` into an inclusive grid."""
    try:
        a, b, step = (float(v) for v in spec.split(":"))
    except ValueError:
        raise InputError(f"{name} must look like a:b:step, got {spec!r}") from None
    if not (step > 0 and b >= a and all(map(math.isfinite, (a, b, step)))):
        raise InputError(f"{name} needs a finite step > 0 and b >= a, got {spec!r}")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    if count > 100000:
        raise InputError(f"{name} has {count} points; the limit is 100000")
    return tuple(a + step * np.arange(count))


def parse_theta(spec, family):
    names = FAMILIES[family].param_names
    if spec is None:
        raise InputError(f"--theta is required for this command ({','.join(names)})")
    try:
        theta = tuple(float(v) for v in spec.split(","))
    except ValueError:
        raise InputError(f"--theta must be comma-separated numbers, got {spec!r}") from None
    if len(theta) != len(names):
        raise InputError(f"{family} takes {len(names)} parameters ({','.join(names)}), got {len(theta)}")
    return theta


def make_config(args):
    cfg = RunConfig(
        command=args.command, family=args.family, lam=args.lam, fix_lambda=args.fix_lambda,
        data_path=args.data_path, stat=args.stat, order=args.order, quantity=args.quantity,
        level=args.level, n=args.n, seed=args.seed, out_format=args.out_format,
    )
    if not 0.0 < cfg.level < 1.0:
        raise InputError(f"--level must lie in (0, 1), got {cfg.level}")
    if not math.isfinite(cfg.lam):
        raise InputError("--lambda must be finite")
    if cfg.command in ("moments", "entropy", "sample", "curves"):
        cfg.theta = parse_theta(args.theta, cfg.family)
    if cfg.command == "moments" and cfg.order < 1:
        raise InputError(f"--order must be at least 1, got {cfg.order}")
    if cfg.command == "sample" and cfg.n < 1:
        raise InputError(f"-n must be at least 1, got {cfg.n}")
    if args.grid is not None:
        cfg.grid = parse_grid(args.grid, "--grid")
    if args.lambda_grid is not None:
        cfg.lambda_grid = parse_grid(args.lambda_grid, "--lambda-grid")
    if cfg.command == "curves":
        if cfg.quantity in ("skewness", "kurtosis"):
            if cfg.lambda_grid is None:
                raise InputError(f"--quantity {cfg.quantity} needs --lambda-grid")
        elif cfg.grid is None:
            raise InputError(f"--quantity {cfg.quantity} needs --grid")
    if cfg.command in ("fit", "test") and FAMILIES[cfg.family].discrete:
        raise InputError(f"fitting is not available for the discrete {cfg.family} family")
    return cfg


def _load(cfg):
    if cfg.data_path is None:
        return fatigue()
    try:
        return load_csv(cfg.data_path)
    except OSError as exc:
        raise InputError(f"cannot read {cfg.data_path}: {exc.strerror or exc}") from None


def _model(cfg, lam=None):
    return ExpGModel(cfg.lam if lam is None else lam, make_base(cfg.family, cfg.theta))


# ---------------------------------------------------------------- commands


def cmd_fit(cfg):
    data = _load(cfg)
    report = mle_fit(cfg.family, data, fix_lambda=cfg.fix_lambda, level=cfg.level)
    out = report.as_dict()
    out["data"] = {"source": data.source, "n": data.n}
    if not report.converged:
        raise NumericalFailure(out)
    return out


def cmd_test(cfg):
    data = _load(cfg)
    null = {"lambda": 0.0 if cfg.fix_lambda is None else cfg.fix_lambda}
    full = mle_fit(cfg.family, data, level=cfg.level, with_covariance=cfg.stat == "wald")
    restricted = mle_fit(cfg.family, data, fixed=null, with_covariance=False)
    if cfg.stat == "lr":
        rep = lr_test(cfg.family, data, null, full=full, restricted=restricted)
    elif cfg.stat == "wald":
        rep = wald_test(cfg.family, data, null, full=full)
    else:
        rep = score_test(cfg.family, data, null, restricted=restricted)
    out = rep.as_dict()
    out["n"] = data.n
    out["loglik_full"] = full.loglik
    out["loglik_null"] = restricted.loglik
    return out


def cmd_moments(cfg):
    m = _model(cfg)
    raw, rows = [1.0], []
    for r in range(1, cfg.order + 1):
        res = moment(m, r)
        quad = float(moment(m, r, route="quadrature"))
        raw.append(float(res))
        rows.append({
            "order": r, "value": float(res), "route": res.route, "terms": int(res.terms),
            "achieved_tol": float(res.achieved_tol), "quadrature": quad,
            "agreement": abs(float(res) - quad) / max(abs(quad), 1e-300),
        })
    mu = raw[1]
    central = []
    for r in range(2, cfg.order + 1):
        c = sum(math.comb(r, j) * raw[j] * (-mu) ** (r - j) for j in range(r + 1))
        central.append({"order": r, "value": c})
    return {"family": cfg.family, "lambda": m.lam, "theta": list(cfg.theta), "raw": rows, "central": central}


def cmd_entropy(cfg):
    m = _model(cfg)
    c1, c2 = constraint_expectations(m)
    kls = {}
    for direction in ("G_vs_expG", "expG_vs_G"):
        d = kl_divergence(m, direction)
        kls[direction] = {"closed_form": d.closed_form, "quadrature": d.quadrature_value,
                          "discrepancy": d.discrepancy}
    return {
        "family": cfg.family, "lambda": m.lam, "theta": list(cfg.theta),
        "entropy": shannon_entropy(m), "C1": c1, "C2": c2,
        "texp_entropy": texp_entropy(m.lam), "divergences": kls,
    }


def cmd_sample(cfg):
    m = _model(cfg)
    return {"family": cfg.family, "lambda": m.lam, "theta": list(cfg.theta), "seed": cfg.seed,
            "values": m.sample(cfg.n, seed=cfg.seed).tolist()}


def cmd_curves(cfg):
    """Rows of ``(grid_value, quantity)``; a third leading column carries
    lambda when an x-curve is swept over ``--lambda-grid``."""
    rows = []
    if cfg.quantity in ("skewness", "kurtosis"):
        for lam in cfg.lambda_grid:
            skew, kurt = skewness_kurtosis(_model(cfg, lam))
            rows.append((lam, skew if cfg.quantity == "skewness" else kurt))
        return {"header": ("lambda", cfg.quantity), "rows": rows}
    x = np.asarray(cfg.grid)
    lams = cfg.lambda_grid if cfg.lambda_grid is not None else (cfg.lam,)
    for lam in lams:
        m = _model(cfg, lam)
        if cfg.quantity == "hazard":
            lo, hi = m.base.support
            ok = (x >= lo) & (np.asarray(m.base.sf(x)) > 0)
            vals = np.full(x.shape, np.nan)
            vals[ok] = m.hazard(x[ok])
        else:
            vals = getattr(m, cfg.quantity)(x)
        for xi, v in zip(x, np.atleast_1d(vals)):
            rows.append((lam, xi, float(v)) if cfg.lambda_grid is not None else (xi, float(v)))
    header = ("lambda", "x", cfg.quantity) if cfg.lambda_grid is not None else ("x", cfg.quantity)
    return {"header": header, "rows": rows}


def cmd_demo(cfg):
    data = fatigue() if cfg.data_path is None else _load(cfg)
    base_fit = mle_fit("weibull", data, fix_lambda=0.0, level=cfg.level)
    full_fit = mle_fit("weibull", data, level=cfg.level)
    tests = [
        lr_test("weibull", data, full=full_fit, restricted=base_fit).as_dict(),
        wald_test("weibull", data, full=full_fit).as_dict(),
        score_test("weibull", data, restricted=base_fit).as_dict(),
    ]
    grid = np.arange(60.0, 221.0, 1.0)
    f_full = np.asarray(full_fit.model.pdf(grid))
    f_base = np.asarray(base_fit.model.pdf(grid))
    mass = integrate(full_fit.model.pdf, (0.0, math.inf), 1e-10, 1e-10, scale=100.0).value
    return {
        "data": {"source": data.source, "n": data.n, "announced_n": FATIGUE_ANNOUNCED_N},
        "weibull": base_fit.as_dict(),
        "exp_weibull": full_fit.as_dict(),
        "tests": tests,
        "exp_weibull_density_mass": mass,
        "density_table": {
            "columns": ["x", "exp_weibull_pdf", "weibull_pdf"],
            "rows": [[float(a), float(b), float(c)] for a, b, c in zip(grid, f_full, f_base)],
        },
    }


HANDLERS = {"fit": cmd_fit, "test": cmd_test, "moments": cmd_moments, "entropy": cmd_entropy,
            "sample": cmd_sample, "curves": cmd_curves, "demo": cmd_demo}


# ------------------------------------------------------------------ output


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _nested(v):
    return isinstance(v, dict) or (isinstance(v, list) and bool(v) and isinstance(v[0], (dict, list)))


def _text(obj, prefix=""):
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if _nested(v):
                lines.append(f"{prefix}{k}:")
                lines.extend(_text(v, prefix + "  "))
            else:
                lines.append(f"{prefix}{k}: {_scalar(v)}")
    else:
        for item in obj:
            if isinstance(item, dict):
                lines.extend(_text(item, prefix + "- "))
            else:
                lines.append(f"{prefix}{_scalar(item)}")
    return lines


def _scalar(v):
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, list):
        return ", ".join(_scalar(x) for x in v)
    return str(v)


def emit(cfg, result, stream):
    if cfg.command == "curves":
        stream.write("\t".join(result["header"]) + "\n")
        for row in result["rows"]:
            stream.write("\t".join(f"{v:.12g}" for v in row) + "\n")
        return
    if cfg.command == "sample" and cfg.out_format == "text":
        stream.write("".join(f"{v!r}\n" for v in result["values"]))
        return
    result = _jsonable(result)
    if cfg.out_format == "json":
        stream.write(json.dumps(result, indent=2) + "\n")
    else:
        stream.write("\n".join(_text(result)) + "\n")


def _attach_negative_values(argv):
    # "--lambda-grid -10:10:1" would otherwise be read as an unknown option
    out, it = [], iter(argv)
    for tok in it:
        if tok in ("--grid", "--lambda-grid", "--theta"):
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-"):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
        else:
            out.append(tok)
    return out


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_negative_values(argv))
    try:
        cfg = make_config(args)
        result = HANDLERS[cfg.command](cfg)
    except (InputError, DataError, ParameterError, DomainError, UnsupportedOperationError) as exc:
        stderr.write(f"expg: error: {exc}\n")
        return EXIT_INPUT
    except NumericalFailure as exc:
        payload = exc.args[0]
        emit(cfg, payload, stdout)
        stderr.write(f"expg: fit did not converge: {payload.get('message', '')}\n")
        return EXIT_NUMERIC
    except NonexistentMomentError as exc:
        stderr.write(f"expg: moment does not exist: {exc}\n")
        return EXIT_NUMERIC
    except (FitError, QuadratureError, TruncationError, ArithmeticError, np.linalg.LinAlgError) as exc:
        stderr.write(f"expg: numerical failure: {exc}\n")
        return EXIT_NUMERIC
    emit(cfg, result, stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
