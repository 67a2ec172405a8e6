"""Batch command-line front end.

Subcommands: eval (point evaluation), norm (annulus trace + growth fit),
density (counting extremes), verify (the full certification suite).  Each
command writes RFC-4180-style CSVs plus summary.txt into the output
directory, and renders matching PNG figures unless --no-figures is given.

Exit codes: 0 success, 1 assertion failure, 2 config/parse error,
3 quadrature under-resolution advisory in two or more annuli.
"""

import argparse
import csv
import os
import re
import sys
from dataclasses import fields

from .checks import GROUPS, run_all
from .config import RunConfig
from .density import density_profile, uniform_density_estimate
from .errors import (ConfigError, DomainPole, FockzeroError,
                     TruncationNotConverged)
from .fock_norm import (FIT_RADIUS_FACTOR, QUAD_POLICY, dyadic_ladder,
                        growth_exponent, norm_traces, verdict)
from .sigma import (TruncationPolicy, log_modified_sigma_direct, log_sigma,
                    psi)

__all__ = ["main"]

EVAL_POLICY = TruncationPolicy(m_min=16, tol=1e-8, max_doublings=12)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, header, rows):
    """Deterministic CSV: fixed header, repr-formatted floats, LF endings."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _summary_line(name, value, bound, passed):
    status = "pass" if passed else "fail"
    return f"{name}, {value:.9g}, {bound}, {status}"


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {
    "alpha": float,
    "r_shift": float,
    "rho_max": float,
    "seed": int,
    "output_dir": str,
    "figures": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
    "trunc_tol": float,
    "trunc_m_min": int,
    "trunc_max_doublings": int,
    "radial_step": float,
    "angular_step": float,
}


def _parse_p_list(text):
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse exponent list {text!r}") from exc


def _read_config_file(path):
    """Plain key=value file; blank lines and # comments ignored."""
    out = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                key, val = (tok.strip() for tok in line.split("=", 1))
                if key == "p_exponents":
                    out[key] = _parse_p_list(val)
                elif key in _CONFIG_KEYS:
                    try:
                        out[key] = _CONFIG_KEYS[key](val)
                    except ValueError as exc:
                        raise ConfigError(
                            f"{path}:{lineno}: bad value for {key}: {val!r}"
                        ) from exc
                else:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return out


def _build_config(args) -> RunConfig:
    kwargs = {}
    if args.config:
        kwargs.update(_read_config_file(args.config))
    overrides = {
        "alpha": args.alpha,
        "r_shift": args.R,
        "rho_max": args.rho_max,
        "seed": args.seed,
        "output_dir": args.out,
        "trunc_tol": args.tol,
        "trunc_m_min": args.m_min,
        "trunc_max_doublings": args.max_doublings,
        "radial_step": args.radial_step,
        "angular_step": args.angular_step,
    }
    if args.p is not None:
        overrides["p_exponents"] = _parse_p_list(args.p)
    if args.no_figures:
        overrides["figures"] = False
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    valid = {f.name for f in fields(RunConfig)}
    return RunConfig(**{k: v for k, v in kwargs.items() if k in valid})


def _ensure_outdir(config):
    try:
        os.makedirs(config.output_dir, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"output_dir not writable: {exc}") from exc
    return config.output_dir


def _maybe_figures(config, tables):
    if not config.figures:
        return
    from .figures import render_table_figure
    for name, (header, rows) in tables.items():
        render_table_figure(config.output_dir, name, header, rows)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _parse_points(tokens):
    pts = []
    for tok in tokens:
        try:
            re_s, im_s = tok.split(",")
            pts.append(complex(float(re_s), float(im_s)))
        except ValueError as exc:
            raise ConfigError(f"cannot parse point {tok!r} as 're,im'") from exc
    return pts


def cmd_eval(config, subtarget, points):
    outdir = _ensure_outdir(config)
    spec = config.lattice_spec()
    policy = config.policy(EVAL_POLICY)
    rows = []
    for z in points:
        note = ""
        try:
            if subtarget == "sigma":
                v = log_sigma(spec, z, policy)
            elif subtarget == "modified":
                v = log_modified_sigma_direct(spec, z, policy)
            else:
                v = psi(config.r_shift, z, policy)
            rows.append((z.real, z.imag, v.log_mag, v.err_est, v.at_zero, note))
        except DomainPole:
            rows.append((z.real, z.imag, float("nan"), float("nan"), False,
                         "domain_pole"))
        except TruncationNotConverged:
            rows.append((z.real, z.imag, float("nan"), float("nan"), False,
                         "not_converged"))
    header = ("z_re", "z_im", "log_mag", "err_est", "at_zero", "note")
    path = os.path.join(outdir, f"eval_{subtarget}.csv")
    write_csv(path, header, rows)
    for row in rows:
        print(",".join(_fmt(v) for v in row))
    return 0


def cmd_norm(config):
    outdir = _ensure_outdir(config)
    spec = config.lattice_spec()
    n_fit = sum(r0 >= FIT_RADIUS_FACTOR * spec.a
                for (r0, _r1) in dyadic_ladder(spec, config.rho_max))
    if n_fit < 3:
        raise ConfigError(
            f"rho_max={config.rho_max:g} leaves only {n_fit} annuli beyond "
            f"4a for the growth fit; need at least 3 (rho_max >= 32a)")
    traces = norm_traces(spec, config.p_exponents, config.rho_max,
                         config.quadrature_spec(), config.policy(QUAD_POLICY),
                         check_resolution=True)
    summary = []
    norm_rows = []
    advisories = 0
    for p in config.p_exponents:
        tr = traces[float(p)]
        rows = []
        for k, ((r0, r1, mass), cum) in enumerate(zip(tr.annuli, tr.cumulative)):
            flag = tr.under_resolved[k]
            rows.append((r0, r1, mass, float(cum), flag))
            norm_rows.append((float(p), r0, r1, mass, float(cum)))
        write_csv(os.path.join(outdir, f"norm_p{p:g}.csv"),
                  ("r_in", "r_out", "mass", "cumulative", "under_resolved"),
                  rows)
        advisories = max(advisories, sum(tr.under_resolved))
        slope = growth_exponent(tr)
        summary.append(f"norm p={p:g}, exponent={slope:.6g}, "
                       f"verdict={verdict(slope)}")
    with open(os.path.join(outdir, "summary.txt"), "w", encoding="ascii") as fh:
        fh.write("\n".join(summary) + "\n")
    for line in summary:
        print(line)
    _maybe_figures(config, {"norm_trace": (("p", "r_in", "r_out", "mass",
                                            "cumulative"), norm_rows)})
    return 3 if advisories >= 2 else 0


def cmd_density(config):
    outdir = _ensure_outdir(config)
    spec = config.lattice_spec()
    a = spec.a
    ladder = (8.0 * a, 16.0 * a, 32.0 * a)
    rows = []
    summary = []
    for label, modified in (("lattice", False),
                            (f"modified_R{config.r_shift:g}", True)):
        rep = density_profile(spec, modified, ladder)
        dp, dm = uniform_density_estimate(rep)
        for rho, s, i in zip(rep.rho_ladder, rep.sup_ratio, rep.inf_ratio):
            rows.append((label, rho, s, i))
        summary.append(f"density {label}, d_plus={dp:.6g}, d_minus={dm:.6g}, "
                       f"target={spec.alpha / 3.141592653589793:.6g}")
    write_csv(os.path.join(outdir, "density_profile.csv"),
              ("set", "rho", "sup_ratio", "inf_ratio"), rows)
    with open(os.path.join(outdir, "summary.txt"), "w", encoding="ascii") as fh:
        fh.write("\n".join(summary) + "\n")
    for line in summary:
        print(line)
    _maybe_figures(config, {"density": (("set", "rho", "sup_ratio",
                                         "inf_ratio"), rows)})
    return 0


def cmd_verify(config, group_names=None):
    outdir = _ensure_outdir(config)
    lines = []
    all_passed = True
    for group in run_all(config, group_names):
        for name, (header, rows) in group.tables.items():
            write_csv(os.path.join(outdir, f"verify_{name}.csv"), header, rows)
        _maybe_figures(config, group.tables)
        for res in group.results:
            line = _summary_line(res.name, res.value, res.bound, res.passed)
            lines.append(line)
            print(line)
            all_passed &= res.passed
    with open(os.path.join(outdir, "summary.txt"), "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    return 0 if all_passed else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(parser):
    parser.add_argument("--alpha", type=float, default=None,
                        help="Gaussian weight parameter (default pi)")
    parser.add_argument("--R", type=float, default=None,
                        help="row shift of the modified set (default 0.75)")
    parser.add_argument("--p", type=str, default=None,
                        help="comma-separated exponent list (default 2,0.5)")
    parser.add_argument("--rho-max", dest="rho_max", type=float, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--config", type=str, default=None,
                        help="key=value file; flags override file values")
    parser.add_argument("--out", type=str, default=None,
                        help="output directory (default fockzero_out)")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip PNG rendering next to the CSVs")
    parser.add_argument("--tol", type=float, default=None,
                        help="truncation tolerance override")
    parser.add_argument("--m-min", dest="m_min", type=int, default=None)
    parser.add_argument("--max-doublings", dest="max_doublings", type=int,
                        default=None)
    parser.add_argument("--radial-step", dest="radial_step", type=float,
                        default=None)
    parser.add_argument("--angular-step", dest="angular_step", type=float,
                        default=None)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="fockzero",
        description="Perturbed-lattice Weierstrass products: evaluation, "
                    "norm traces, densities, and estimate verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate log-magnitudes at points")
    p_eval.add_argument("subtarget", choices=("sigma", "modified", "psi"))
    p_eval.add_argument("points", nargs="+", help="points as 're,im'")
    _add_common(p_eval)
    # let "-1,0"-style point tokens through; no option names start with a digit
    p_eval._negative_number_matcher = re.compile(r"^-\d")

    for name, help_text in (("norm", "dyadic annulus masses and growth fit"),
                            ("density", "counting extremes and density fit"),
                            ("verify", "run the full certification suite")):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name == "verify":
            p.add_argument("--checks", type=str, default=None,
                           help="comma-separated subset of check groups")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _build_config(args)
        if args.command == "eval":
            return cmd_eval(config, args.subtarget, _parse_points(args.points))
        if args.command == "norm":
            return cmd_norm(config)
        if args.command == "density":
            return cmd_density(config)
        names = None
        if getattr(args, "checks", None):
            known = {g for g, _ in GROUPS}
            names = [tok.strip() for tok in args.checks.split(",") if tok.strip()]
            unknown = [n for n in names if n not in known]
            if unknown:
                raise ConfigError(f"unknown check group(s): {', '.join(unknown)}")
        return cmd_verify(config, names)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FockzeroError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
