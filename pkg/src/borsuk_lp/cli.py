"""Command-line interface: ``borsuk-lp {bound,search,curve,corollary2,verify}``.

Exit codes: 0 success, 1 usage or I/O error, 2 valid input but no result
(rejected parameters, no admissible certificate, failed oracle).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from fractions import Fraction

from . import asymptotic, bounds, oracles
from .errors import BorsukError, DomainError, NoCertificateError
from .lifting import DEFAULT_ENUM_CAP, LiftedConfiguration, Parameters, as_fraction

EXIT_OK, EXIT_USAGE, EXIT_NO_RESULT = 0, 1, 2

DEFAULTS = {
    "enum_cap": DEFAULT_ENUM_CAP,
    "mis_cap": oracles.MIS_CAP,
    "jobs": 1,
    "seed": 0,
    "lambda_m": 512,
}
_SETTING_TYPES = {"enum_cap": int, "mis_cap": int, "jobs": int, "seed": int, "lambda_m": int}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def read_settings(path: str) -> dict:
    """Parse a ``key = value`` settings file; ``#`` starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read settings file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in _SETTING_TYPES:
            raise UsageError(f"{path}:{lineno}: unknown or malformed setting {line!r}")
        try:
            out[key] = _SETTING_TYPES[key](value.strip())
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value.strip()!r}") from exc
    return out


def resolve_settings(args) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "settings", None):
        cfg.update(read_settings(args.settings))
    for key in ("jobs", "seed"):
        if getattr(args, key, None) is not None:
            cfg[key] = getattr(args, key)
    if getattr(args, "m", None) is not None:
        cfg["lambda_m"] = args.m
    if cfg["jobs"] < 1:
        raise UsageError("parallelism must be a positive integer")
    return cfg


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str) -> None:
    if args.output:
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text)


def parse_lambda(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def parse_grid(spec: str) -> list[float]:
    """``start:stop:step`` (inclusive), a comma list, or ``reference``."""
    spec = spec.strip()
    if spec == "reference":
        return list(asymptotic.REFERENCE_P)
    try:
        if ":" in spec:
            start, stop, step = (float(tok) for tok in spec.split(":"))
            if step <= 0 or stop < start:
                raise UsageError(f"bad grid {spec!r}: need start <= stop and step > 0")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [round(start + i * step, 10) for i in range(count)]
        else:
            values = [float(tok) for tok in spec.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"bad grid {spec!r}: {exc}") from exc
    if not values:
        raise UsageError("empty p grid")
    return values


# --- renderers ---------------------------------------------------------------


def render_certificate_table(cert: bounds.BoundCertificate) -> str:
    d = cert.to_dict()
    rows = [(key, d[key]) for key in ("n", "k", "p", "lambda", "d", "t0", "t1", "adjusted_lambda",
                                      "numerator", "denominator", "lower_bound")]
    rows.append(("ratio", f"{cert.numerator}/{cert.denominator}"))
    rows += [(f"check {name}", "pass" if ok else "FAIL") for name, ok in cert.checks]
    width = max(len(k) for k, _ in rows)
    return "".join(f"{k:<{width}}  {v}\n" for k, v in rows)


def render_rejection(rej: bounds.Rejection, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"status": "rejected", "reason": rej.reason, "message": rej.message}) + "\n"
    return f"status = rejected\nreason = {rej.reason}\nmessage = {rej.message}\n"


def _certificate_csv(cert: bounds.BoundCertificate) -> str:
    d = cert.to_dict()
    keys = ["n", "k", "p", "lambda", "d", "t0", "t1", "adjusted_lambda", "numerator", "denominator", "lower_bound"]
    return ",".join(keys) + "\n" + ",".join(str(d[k]) for k in keys) + "\n"


def _format(args) -> str:
    if getattr(args, "json", False):
        return "json"
    if getattr(args, "record", False):
        return "record"
    if getattr(args, "csv", False):
        return "csv"
    return "table"


# --- subcommands -------------------------------------------------------------


def cmd_bound(args, cfg) -> int:
    params = Parameters(args.n, args.k, args.p, parse_lambda(args.lam))
    result = bounds.theorem1_bound(params)
    fmt = _format(args)
    if isinstance(result, bounds.Rejection):
        _emit(args, render_rejection(result, fmt))
        return EXIT_NO_RESULT
    if fmt == "record":
        text = result.to_record()
    elif fmt == "json":
        text = json.dumps(result.to_dict(), indent=2) + "\n"
    elif fmt == "csv":
        text = _certificate_csv(result)
    else:
        text = render_certificate_table(result)
    _emit(args, text)
    return EXIT_OK


def cmd_search(args, cfg) -> int:
    if args.d < 3:
        raise UsageError("dimension must be at least 3")
    try:
        res = bounds.search_best_bound(args.d, args.p, m=cfg["lambda_m"], jobs=cfg["jobs"], top=args.top)
    except NoCertificateError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_NO_RESULT
    fmt = _format(args)
    ranking = [(i + 1, c.params.n, c.params.k, str(c.params.lam), c.t1, c.lower_bound)
               for i, c in enumerate(res.ranked)]
    if fmt == "csv":
        text = "rank,n,k,lambda,t1,bound\n" + "".join(",".join(map(str, r)) + "\n" for r in ranking)
    elif fmt == "record":
        text = f"d_target = {res.d_target}\n" + res.best.to_record()
    elif fmt == "json":
        text = json.dumps({"d_target": res.d_target, "best": res.best.to_dict(),
                           "ranking": [dict(zip(("rank", "n", "k", "lambda", "t1", "bound"), r)) for r in ranking]},
                          indent=2) + "\n"
    else:
        head = f"d_target = {res.d_target} (n = {res.n}, d = {res.best.d}), p = {res.p:g}\nbest certificate:\n"
        body = "".join("  " + line + "\n" for line in render_certificate_table(res.best).splitlines())
        rank = f"{'rank':>4} {'n':>4} {'k':>4} {'lambda':>12} {'t1':>4} {'bound':>12}\n"
        rank += "".join(f"{r[0]:>4} {r[1]:>4} {r[2]:>4} {r[3]:>12} {r[4]:>4} {r[5]:>12}\n" for r in ranking)
        text = head + body + "top candidates:\n" + rank
    _emit(args, text)
    return EXIT_OK


def render_curve_table(rows) -> str:
    out = [f"{'p':>6} {'-lambda':>8} {'k/n':>8} {'t0/n':>8} {'c(p)':>8}"]
    for row in rows:
        o = row.optimum
        if o is None:
            out.append(f"{row.p:>6.2f}  error: {row.error}")
        else:
            out.append(f"{o.p:>6.2f} {-o.lambda_star:>8.4f} {o.kappa_star:>8.4f} {o.tau_star:>8.4f} {o.c_value:>8.4f}")
    return "\n".join(out) + "\n"


def cmd_curve(args, cfg) -> int:
    grid = parse_grid(args.grid)
    rows = asymptotic.emit_curve(grid, jobs=cfg["jobs"])
    csv_text = asymptotic.curve_csv(rows)
    if args.output:
        write_atomic(args.output, csv_text)
    sys.stdout.write(csv_text if args.csv else render_curve_table(rows))
    return EXIT_OK if all(r.optimum is not None for r in rows) else EXIT_NO_RESULT


def corollary2_sweep(p_min: float, p_max: float, steps: int, n: int = 29, k: int = 9, lam=Fraction(-1, 3)):
    """Rows (p, t0, t1, lower_bound) over an evenly spaced p grid, plus the threshold."""
    if not 1 <= p_min <= p_max:
        raise UsageError("need 1 <= p_min <= p_max")
    if steps < 0:
        raise UsageError("steps must be non-negative")
    ps = [p_min] if steps == 0 else [round(p_min + i * (p_max - p_min) / steps, 10) for i in range(steps + 1)]
    rows = []
    for p in ps:
        res = bounds.theorem1_bound(Parameters(n, k, p, lam), adjust=False)
        if isinstance(res, bounds.Rejection):
            rows.append((p, bounds.vertex_t0(Parameters(n, k, p, lam)), None, None))
        else:
            rows.append((p, res.t0, res.t1, res.lower_bound))
    best_t1 = max((r[2] for r in rows if r[2] is not None), default=None)
    threshold = next((r[0] for r in rows if r[2] is not None and r[2] == best_t1), None)
    return rows, threshold, best_t1


def cmd_corollary2(args, cfg) -> int:
    rows, threshold, best_t1 = corollary2_sweep(args.p_min, args.p_max, args.steps)
    if args.csv:
        text = "p,t0,t1,bound\n" + "".join(
            f"{p:.6f},{t0:.9f},{'' if t1 is None else t1},{'' if b is None else b}\n" for p, t0, t1, b in rows)
    else:
        text = f"{'p':>8} {'t0':>12} {'t1':>4} {'bound':>8}\n"
        text += "".join(f"{p:>8.4f} {t0:>12.6f} {'-' if t1 is None else t1:>4} {'-' if b is None else b:>8}\n"
                        for p, t0, t1, b in rows)
        if threshold is None:
            text += "no grid point yields a certificate\n"
        else:
            text += f"smallest grid p with t1 = {best_t1}: {threshold:g}\n"
    _emit(args, text)
    return EXIT_OK


def cmd_verify(args, cfg) -> int:
    if args.dump_lifted:
        if args.n is None or args.k is None:
            raise UsageError("--dump-lifted needs -n and -k")
        conf = LiftedConfiguration(args.n, args.k, parse_lambda(args.lam), cfg["enum_cap"])
        write_atomic(args.dump_lifted, conf.to_text())
        return EXIT_OK
    if args.lifted:
        try:
            with open(args.lifted, encoding="utf-8") as fh:
                conf = LiftedConfiguration.from_text(fh.read(), cfg["enum_cap"])
        except OSError as exc:
            raise UsageError(f"cannot read {args.lifted}: {exc}") from exc
        reports = [oracles.verify_distance_law(Parameters(conf.n, conf.k, p, conf.lam), cfg["enum_cap"])
                   for p in oracles.LAW_PS]
    else:
        reports = oracles.run_suite(args.scope, seed=cfg["seed"], enum_cap=cfg["enum_cap"],
                                    mis_cap=cfg["mis_cap"], inject_fault=args.inject_fault)
    failed = [r for r in reports if r.status == "FAIL"]
    summary = {
        "total": len(reports),
        "passed": sum(r.status == "PASS" for r in reports),
        "skipped": sum(r.status == "SKIP" for r in reports),
        "failed": len(failed),
    }
    if args.json:
        text = json.dumps({"summary": summary, "reports": [r.to_dict() for r in reports]}, indent=2) + "\n"
    else:
        text = "".join(r.to_line() + "\n" for r in reports)
        text += " ".join(f"{k}={v}" for k, v in summary.items()) + "\n"
    _emit(args, text)
    return EXIT_OK if not failed else EXIT_NO_RESULT


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--settings", metavar="FILE", help="key = value settings file; flags override it")
    common.add_argument("-o", "--output", metavar="FILE", help="write output to FILE (atomically)")
    common.add_argument("--jobs", type=int, default=None, help="worker processes for grids and curves")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized oracle trials")

    fmt = argparse.ArgumentParser(add_help=False)
    group = fmt.add_mutually_exclusive_group()
    group.add_argument("--csv", action="store_true", help="CSV output")
    group.add_argument("--record", action="store_true", help="flat key = value record")
    group.add_argument("--json", action="store_true", help="JSON output")

    parser = _Parser(prog="borsuk-lp", description="Lower bounds on Borsuk numbers of l_p^d.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound", parents=[common, fmt], help="certificate for one (n, k, p, lambda)")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-p", type=float, required=True)
    p.add_argument("--lambda", dest="lam", default="-1/2", help="rational like -1/3 or a decimal")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("search", parents=[common, fmt], help="best certificate in dimension d")
    p.add_argument("-d", type=int, required=True)
    p.add_argument("-p", type=float, required=True)
    p.add_argument("--m", type=int, default=None, help="lambda grid is -j/(2m), j = 0..m (default 512)")
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("curve", parents=[common], help="asymptotic constant c(p) over a p grid")
    p.add_argument("--grid", default="reference", help="start:stop:step, comma list, or 'reference'")
    p.add_argument("--csv", action="store_true", help="print CSV instead of the table")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("corollary2", parents=[common], help="p sweep for n=29, k=9, lambda=-1/3")
    p.add_argument("--p-min", type=float, default=2.70)
    p.add_argument("--p-max", type=float, default=2.90)
    p.add_argument("--steps", type=int, default=40, help="number of grid intervals")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_corollary2)

    p = sub.add_parser("verify", parents=[common], help="run the brute-force oracle suite")
    p.add_argument("--scope", choices=("quick", "full"), default="quick")
    p.add_argument("--json", action="store_true", help="JSON summary")
    p.add_argument("--lifted", metavar="FILE", help="check a serialized lifted configuration instead")
    p.add_argument("--dump-lifted", metavar="FILE", help="write the lifted configuration for -n -k --lambda")
    p.add_argument("-n", type=int)
    p.add_argument("-k", type=int)
    p.add_argument("--lambda", dest="lam", default="-1/2")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_settings(args)
        return args.func(args, cfg)
    except UsageError as exc:
        sys.stderr.write(f"borsuk-lp: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"borsuk-lp: I/O error: {exc}\n")
        return EXIT_USAGE
    except BorsukError as exc:
        sys.stderr.write(f"borsuk-lp: {exc}\n")
        return EXIT_NO_RESULT


if __name__ == "__main__":
    sys.exit(main())
