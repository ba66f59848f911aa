"""Command-line front end, configuration, result cache and reporting.

Subcommands cover the library surface: class-number, classes, chi,
cm-trace, cycle-trace, l-value, f-series, e32, verify, eta-check, theta,
lift-coeff.  Output is JSON by default (--format csv for flat tables);
floats are printed with 17 significant digits, exact rationals as "p/q".
Exit codes: 0 success, 1 identity-suite failure, 2 usage error.
"""

import json
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import click
import mpmath
from mpmath import mpc, mpf

from . import __version__
from .specfun import Precision
from .qforms import QForm, class_reps, genus_char, hurwitz_class_number
from . import cmtraces, cycles, forms, thetacore

CODE_VERSION = __version__


@dataclass(frozen=True)
class Config:
    precision_digits: int = 30
    threads: int = 1
    cache_dir: str = ""
    fmt: str = "json"
    tolerance: float = None

    def __post_init__(self):
        if self.precision_digits < 15:
            raise ValueError("precision must be >= 15 digits")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.fmt not in ("json", "csv"):
            raise ValueError("format must be json or csv")

    @property
    def prec(self):
        return Precision(self.precision_digits)

    def describe(self):
        return {"precision_digits": self.precision_digits, "threads": self.threads,
                "cache_dir": self.cache_dir or None, "format": self.fmt,
                "tolerance": self.tolerance, "version": CODE_VERSION}


def parallel_map(fn, items, threads=1):
    """Order-preserving map, optionally on a worker pool."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _encode(v):
    if isinstance(v, Fraction):
        return str(v)   # "p/q", or "p" for integers
    if isinstance(v, (mpf,)):
        return float(v)
    if isinstance(v, (mpc, complex)):
        c = complex(v)
        if c.imag == 0:
            return c.real
        return {"re": c.real, "im": c.imag}
    if isinstance(v, dict):
        return {str(k): _encode(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_encode(x) for x in v]
    return v


def _format_float(x):
    return format(x, ".17g")


def emit_report(reports, fmt="json", out=None):
    """Serialize a list of flat dicts as JSON or CSV (shared header)."""
    out = out or sys.stdout
    rows = [_flatten(_encode(r)) for r in reports]
    for row in rows:
        for k, v in row.items():
            if isinstance(v, float):
                row[k] = _format_float(v)
    if fmt == "json":
        out.write(json.dumps(rows, indent=2) + "\n")
        return
    if not rows:
        out.write("\n")
        return
    header = list(rows[0].keys())
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(str(row.get(h, "")) for h in header) + "\n")


def _flatten(d, prefix=""):
    flat = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            flat.update(_flatten(v, key + "."))
        else:
            flat[key] = v
    return flat


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------

def cache_path(config, op, params):
    key = "__".join(f"{k}={params[k]}" for k in sorted(params))
    safe = "".join(ch if ch.isalnum() or ch in "=_.-" else "_" for ch in key)
    return os.path.join(config.cache_dir, f"{op}__{safe}.json")


def cache_roundtrip(config, op, params, compute):
    """Read-through JSON cache keyed by (op, params, code version).

    Writes go to a temp file followed by an atomic rename, so concurrent
    readers see either the old or the new complete file.  Corrupt or
    stale-version files are recomputed and overwritten with a warning.
    """
    if not config.cache_dir:
        return compute()
    os.makedirs(config.cache_dir, exist_ok=True)
    path = cache_path(config, op, params)
    if os.path.exists(path):
        try:
            with open(path) as fh:
                payload = json.load(fh)
            if payload.get("version") == CODE_VERSION:
                return payload["value"]
        except (json.JSONDecodeError, KeyError, OSError):
            click.echo(f"warning: corrupt cache file {path}, recomputing",
                       err=True)
    value = _encode(compute())
    payload = {"version": CODE_VERSION, "op": op,
               "key": _encode(params), "value": value}
    fd, tmp = tempfile.mkstemp(dir=config.cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, indent=1)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)
    return value


# ---------------------------------------------------------------------------
# the command group
# ---------------------------------------------------------------------------

@click.group()
@click.option("--precision", default=30, show_default=True,
              help="working precision in decimal digits")
@click.option("--threads", default=1, show_default=True)
@click.option("--cache-dir", default=None,
              help="result cache directory (or env SHINTANI_CACHE_DIR)")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
              default="json", show_default=True)
@click.option("--tolerance", type=float, default=None,
              help="per-run override of identity tolerances")
@click.pass_context
def main(ctx, precision, threads, cache_dir, fmt, tolerance):
    """Quadratic-form classes, cycle-integral traces and theta-kernel checks."""
    if cache_dir is None:
        cache_dir = os.environ.get("SHINTANI_CACHE_DIR", "")
    try:
        ctx.obj = Config(precision, threads, cache_dir or "", fmt, tolerance)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    mpmath.mp.dps = precision


@main.command("class-number")
@click.argument("d", type=int)
@click.pass_obj
def cmd_class_number(config, d):
    """Hurwitz class number H(D)."""
    value = cache_roundtrip(config, "class-number", {"D": d},
                            lambda: hurwitz_class_number(d))
    emit_report([{"D": d, "H": value}], config.fmt)


@main.command("classes")
@click.option("--disc", type=int, required=True)
@click.pass_obj
def cmd_classes(config, disc):
    """Class representatives of a discriminant."""
    value = cache_roundtrip(config, "classes", {"disc": disc},
                            lambda: class_reps(disc).to_json())
    emit_report([value], config.fmt)


@main.command("chi")
@click.option("--delta", type=int, required=True)
@click.option("--form", "form_str", required=True, metavar="a,b,c")
@click.pass_obj
def cmd_chi(config, delta, form_str):
    """Genus character of a form."""
    try:
        a, b, c = (int(t) for t in form_str.split(","))
    except ValueError:
        raise click.UsageError("--form expects three integers a,b,c")
    chi = genus_char(delta, QForm(a, b, c))
    emit_report([{"delta": delta, "form": [a, b, c], "chi": chi}], config.fmt)


@main.command("cm-trace")
@click.option("--delta", type=int, required=True)
@click.option("--D", "dd", type=int, required=True)
@click.option("--F", "fname", type=click.Choice(["one", "J"]), default="J",
              show_default=True)
@click.pass_obj
def cmd_cm_trace(config, delta, dd, fname):
    """Twisted trace of CM values tr+_delta(F, D), D < 0."""
    F = 1 if fname == "one" else forms.build_standard_forms(128)["J"]
    tr = cmtraces.trace_cm(F, delta, dd, config.prec)
    emit_report([{"delta": delta, "D": dd, "F": fname,
                  "value": tr.value, "classes": tr.class_count}], config.fmt)


@main.command("cycle-trace")
@click.option("--delta", type=int, required=True)
@click.option("--D", "dd", type=int, required=True)
@click.option("--k", type=int, default=0, show_default=True)
@click.pass_obj
def cmd_cycle_trace(config, delta, dd, k):
    """Twisted trace of cycle integrals of the completed weight-2
    Eisenstein series."""
    G = forms.e2_star_data(64, config.prec)
    ev = lambda z: forms.e2_star_modular(z, 64, config.prec)
    tr, qerr = cycles.trace_cycle(G, delta, dd, k, prec=config.prec, evaluator=ev)
    emit_report([{"delta": delta, "D": dd, "k": k, "value": tr,
                  "quadrature_error": qerr}], config.fmt)


@main.command("l-value")
@click.option("--delta", type=int, required=True)
@click.pass_obj
def cmd_l_value(config, delta):
    """(1/(12 sqrt|delta|)) L*(E2*, 1) with the sigma-sum cross-check."""
    G = forms.e2_star_data(64, config.prec)
    ev = lambda z: forms.e2_star_modular(z, 64, config.prec)
    L, qerr = cycles.l_star_value(G, delta, 0, prec=config.prec, evaluator=ev)
    with mpmath.mp.workdps(config.precision_digits):
        val = L / (12 * mpmath.sqrt(abs(delta)))
        sig = cycles.sigma_exp_sum(delta, config.prec)
    emit_report([{"delta": delta, "normalized_lvalue": val,
                  "sigma_sum": sig, "abs_difference": float(abs(val - sig))}],
                config.fmt)


@main.command("f-series")
@click.option("--delta", type=int, required=True)
@click.option("--dmax", type=int, default=12, show_default=True)
@click.pass_obj
def cmd_f_series(config, delta, dmax):
    """Coefficients of the twisted singular-moduli generating series."""
    coeffs = cmtraces.f_series(delta, dmax, prec=config.prec)
    emit_report([{"delta": delta, "index": n,
                  "coefficient": float(mpmath.re(mpmath.mpmathify(v))),
                  "imag_residual": float(mpmath.im(mpmath.mpmathify(v)))}
                 for n, v in sorted(coeffs.items())], config.fmt)


@main.command("e32")
@click.option("--dmax", type=int, default=20, show_default=True)
@click.pass_obj
def cmd_e32(config, dmax):
    """Holomorphic coefficients H(D) of the weight-3/2 Eisenstein series."""
    holo, _ = forms.e32_star_coeffs(dmax, config.prec)
    emit_report([{"D": D, "H": v} for D, v in sorted(holo.items())], config.fmt)


@main.command("verify")
@click.option("--identity", "which", default="all",
              type=click.Choice(["all", "hecke", "square-lvalue", "class-number",
                                 "square-trace"]))
@click.option("--delta", "deltas", type=int, multiple=True)
@click.option("--D", "ds", type=int, multiple=True)
@click.pass_obj
def cmd_verify(config, which, deltas, ds):
    """Run the closed-form identity suite; exit 1 if any check fails."""
    deltas = list(deltas) or [-3, -4]
    ds = list(ds) or [3, 4]
    kw = {}
    if config.tolerance is not None:
        kw = {"hecke_tol": config.tolerance, "lvalue_tol": config.tolerance,
              "class_number_tol": config.tolerance,
              "square_trace_tol": config.tolerance}
    # one worker per delta; collection order is the submission order, so
    # the emitted report is byte-identical for any thread count
    chunks = parallel_map(lambda d: cmtraces.identity_suite([d], ds, config.prec, **kw),
                          deltas, config.threads)
    reports = [r for chunk in chunks for r in chunk]
    wanted = {"hecke": ("hecke",),
              "square-lvalue": ("square-lvalue", "sigma-sum"),
              "class-number": ("class-number-L0", "class-number-L1"),
              "square-trace": ("square-trace",)}.get(which)
    if wanted:
        reports = [r for r in reports if r.identity_id in wanted]
    emit_report([r.to_json() for r in reports], config.fmt)
    if any(not r.passed for r in reports):
        sys.exit(1)


@main.command("eta-check")
@click.option("--k", type=int, default=0, show_default=True)
@click.option("--samples", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=1)
@click.pass_obj
def cmd_eta_check(config, k, samples, seed):
    """Finite-difference check of the differential equations for eta."""
    import random
    rng = random.Random(seed)
    delta = -3 if k % 2 == 0 else 5
    rows = []
    for _ in range(samples):
        ctx = thetacore.ThetaContext(delta, k,
                                     mpc(rng.uniform(-0.4, 0.4), rng.uniform(0.5, 1.5)))
        D0 = rng.choice([-1, 1, 2]) if delta == 5 else rng.choice([-1, 1])
        Q = _form_of_disc(abs(delta) * D0, rng)
        z = mpc(rng.uniform(-0.8, 0.8), rng.uniform(0.6, 1.6))
        from .hyperbolic import form_polynomials
        p, qz, _ = form_polynomials(Q, z)
        if abs(qz) / z.imag ** 2 < 0.05 or abs(p) < 0.05:
            continue
        f = lambda w: thetacore.eta(ctx, Q, w, "recursion", config.prec)
        xi, lap = thetacore.fd_operators(f, 2 * k + 2, z)
        rows.append({
            "k": k, "delta": delta, "form": [Q.a, Q.b, Q.c],
            "xi_error": float(abs(xi - thetacore.xi_eta_closed(ctx, Q, z, config.prec))),
            "laplace_error": float(abs(lap - thetacore.phi_sh0(ctx, Q, z, "preimage"))),
        })
    emit_report(rows, config.fmt)


def _form_of_disc(disc, rng):
    from .qforms import class_reps as _cr
    reps = _cr(disc).reps
    Q = rng.choice(reps)
    if Q.disc < 0 and Q.a < 0:
        Q = Q.neg()
    return Q


@main.command("theta")
@click.option("--delta", type=int, required=True)
@click.option("--k", type=int, default=0, show_default=True)
@click.option("--tau", default="0.1,0.8", metavar="u,v", show_default=True)
@click.option("--z", "z_str", default="0.2,1.3", metavar="x,y", show_default=True)
@click.option("--radius", type=int, default=25, show_default=True)
@click.pass_obj
def cmd_theta(config, delta, k, tau, z_str, radius):
    """Truncated theta-kernel sum with its tail bound."""
    try:
        u, v = (float(t) for t in tau.split(","))
        x, y = (float(t) for t in z_str.split(","))
    except ValueError:
        raise click.UsageError("--tau and --z expect two floats each")
    ctx = thetacore.ThetaContext(delta, k, mpc(u, v), radius)
    val, tail = thetacore.theta_truncated(ctx, mpc(x, y))
    emit_report([{"delta": delta, "k": k, "tau": [u, v], "z": [x, y],
                  "radius": radius, "value": val, "tail_bound": tail}],
                config.fmt)


@main.command("lift-coeff")
@click.option("--delta", type=int, required=True)
@click.option("--D", "dd", type=int, required=True)
@click.option("--v", type=float, default=0.25, show_default=True)
@click.option("--grid", type=int, default=10, show_default=True)
@click.option("--radius", type=int, default=40, show_default=True)
@click.pass_obj
def cmd_lift_coeff(config, delta, dd, v, grid, radius):
    """Direct 2D quadrature of the lift's q^D coefficient (k = 0, E2*)."""
    import math
    t0 = time.time()
    coeff, est = thetacore.lift_coefficient_quadrature(delta, dd, v=v,
                                                       grid=grid, radius=radius)
    target = float(12 * hurwitz_class_number(abs(delta)) * hurwitz_class_number(dd)
                   / math.sqrt(abs(delta)))
    emit_report([{"delta": delta, "D": dd, "coefficient": coeff.real,
                  "imag_residual": coeff.imag,
                  "target": target, "abs_error": abs(coeff.real - target),
                  "error_estimate": est,
                  "runtime_ms": int((time.time() - t0) * 1000)}], config.fmt)


if __name__ == "__main__":
    main()
