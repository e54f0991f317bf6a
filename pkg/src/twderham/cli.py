"""Command-line entry point.

Exit codes: 0 on success, 2 when a flag cannot be validated, 1 when the
computation itself raises.  Error payloads carry the exception class name.
"""

from __future__ import annotations

import argparse
import json
import os
import signal
import sys
import warnings
from contextlib import contextmanager

from . import __version__
from .constraints import ConstraintProblem, certify_delta_chain_map, codim_m_map, regularity_report
from .dwork import FrobContext, frobenius_eigenvalue
from .errors import InputError, TimeBudgetExceeded, TorsionRing, TwDeRhamError
from .families import FIELD, FamilyProblem, picard_fuchs
from .milnor import exactness_witness, milnor_basis, reduce_nform
from .parse import parse_form, parse_poly, used_x_variables, x_names
from .perturb import LAMBDA, GaussianProblem, integrate
from .rings import PiAdic, Rationals, parse_ring, parse_ring_options
from .selfcheck import CRITERIA, run_checks


class FlagError(Exception):
    """Validation failure tied to one command-line flag."""

    def __init__(self, flag: str, exc: Exception):
        super().__init__(f"{flag}: {exc}")
        self.flag = flag
        self.exc = exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise FlagError("argv", InputError(message))


@contextmanager
def _flag(name: str):
    try:
        yield
    except FlagError:
        raise
    except (TwDeRhamError, ValueError, ZeroDivisionError) as exc:
        raise FlagError(name, exc) from exc


# ---------------------------------------------------------------------------
# flag parsers
# ---------------------------------------------------------------------------

def parse_matrix(text: str, ring, param: str | None = None) -> list:
    """``"[a,b;c,d]"``: rows separated by ``;``, entries by ``,``."""
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise InputError(f"matrix must be written as [a,b;c,d], got {text!r}")
    body = s[1:-1].strip()
    if not body:
        raise InputError("empty matrix")
    rows = []
    for row in body.split(";"):
        entries = []
        for entry in row.split(","):
            p = parse_poly(entry.strip(), ring, [], param)
            entries.append(p.constant_term())
        rows.append(entries)
    if any(len(r) != len(rows) for r in rows):
        raise InputError(f"matrix must be square, got rows of lengths {[len(r) for r in rows]}")
    return rows


def _nvars(explicit, *texts) -> int:
    n = explicit if explicit is not None else max(used_x_variables(*texts), 1)
    if n < 1 or n > 9:
        raise InputError(f"number of variables must be in 1..9, got {n}")
    if used_x_variables(*texts) > n:
        raise InputError(f"expression uses x{used_x_variables(*texts)} but only {n} variables are declared")
    return n


# ---------------------------------------------------------------------------
# subcommands: each returns (validated job, runner)
# ---------------------------------------------------------------------------

def _integrate(args):
    with _flag("--ring"):
        ring = parse_ring(args.ring)
    with _flag("--A"):
        A = parse_matrix(args.A, ring)
    texts = [t for t in (args.V, args.g) if t]
    with _flag("--n"):
        n = _nvars(args.n if args.n is not None else len(A), *texts)
    with _flag("--order"):
        if args.order < 1:
            raise InputError(f"order must be >= 1, got {args.order}")
    names = x_names(n)
    if len(A) != n:
        raise FlagError("--A", InputError(f"A is {len(A)}x{len(A)} but n = {n}"))
    with _flag("--V"):
        V = parse_poly(args.V, ring, names) if args.V else None
    with _flag("--g"):
        g = parse_poly(args.g, ring, names)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            P = GaussianProblem(ring, A, V, args.order)
    except TorsionRing as exc:
        raise FlagError("--ring", exc) from exc
    except TwDeRhamError as exc:
        raise FlagError("--A", exc) from exc

    def run():
        s = integrate(P, g, strategy=args.strategy, seed=args.seed)
        return {"lambda_order": args.order, "coefficients": s.strings()}

    return run


def _milnor(args):
    with _flag("--ring"):
        ring = parse_ring(args.ring)
    with _flag("--f"):
        n = _nvars(args.n, args.f)
        f = parse_poly(args.f, ring, x_names(n))

    def run():
        M = milnor_basis(f)
        return {"mu": M.mu, "basis": M.basis_strings(x_names(n))}

    return run


def _reduce(args):
    with _flag("--ring"):
        ring = parse_ring(args.ring)
    with _flag("--f"):
        n = _nvars(args.n, args.f, args.g)
        names = x_names(n)
        f = parse_poly(args.f, ring, names)
    with _flag("--g"):
        g = parse_poly(args.g, ring, names)

    def run():
        M = milnor_basis(f)
        red = reduce_nform(M, g)
        out = {
            "mu": M.mu,
            "basis": M.basis_strings(names),
            "coordinates": [ring.fmt(c) for c in red.coords],
        }
        try:
            h = exactness_witness(M, g, red.coords)
            out["witness"] = True
            if args.show_witness:
                out["witness_form"] = h.format(names)
        except ArithmeticError:
            out["witness"] = False
        return out

    return run


def _picard_fuchs(args):
    with _flag("--f"):
        n = _nvars(args.n, args.f, args.seed_class)
        names = x_names(n)
        f = parse_poly(args.f, FIELD, names, LAMBDA)
    with _flag("--seed"):
        g = parse_poly(args.seed_class, FIELD, names, LAMBDA)

    def run():
        F = FamilyProblem(f, seed=args.seed)
        op = picard_fuchs(F, g)
        return {"mu": F.mu, "order": op.order, "coefficients": op.strings()}

    return run


def _delta(args):
    with _flag("--ring"):
        ring = parse_ring(args.ring)
    constraints = list(args.constraint or [])
    if args.P:
        constraints = [args.P] + constraints
    if not constraints:
        raise FlagError("--P", InputError("give --P or at least one --constraint"))
    if len(constraints) > 1 and not args.codim:
        raise FlagError("--constraint", InputError("several constraints need --codim"))
    texts = constraints + [args.omega] + ([args.f] if args.f else [])
    with _flag("--omega"):
        n = _nvars(args.n, *texts)
    names = x_names(n)
    with _flag("--constraint" if args.codim else "--P"):
        cs = [parse_poly(c, ring, names) for c in constraints]
    with _flag("--f"):
        f = parse_poly(args.f, ring, names) if args.f else None
    with _flag("--omega"):
        omega = parse_form(args.omega, ring, names)
    if args.codim and args.codim != len(cs):
        raise FlagError("--codim", InputError(f"--codim {args.codim} but {len(cs)} constraints given"))
    P = ConstraintProblem(f, cs)
    big = names + (["t"] if P.m == 1 else [f"t{i + 1}" for i in range(P.m)])

    def run():
        image = codim_m_map(P, omega)
        out = {"form": image.format(big), "degree_shift": 2 * P.m}
        if P.m == 1:
            out["chain_map_verified"] = certify_delta_chain_map(P, omega).verified
        if ring.is_field:
            out["regularity"] = regularity_report(P, seed=args.seed).status
        return out

    return run


def _frobenius(args):
    p, N, D = args.p, args.N, args.D
    if args.ring:
        with _flag("--ring"):
            ring = parse_ring(args.ring)
            if not isinstance(ring, PiAdic):
                raise InputError("frobenius needs a padic:p=..:N=.. ring")
            opts = parse_ring_options(args.ring)
            p, N, D = ring.p, ring.N, opts.get("D", D)
    for flag, val in (("--p", p), ("--N", N), ("--D", D)):
        if val is None:
            raise FlagError(flag, InputError("required"))
    with _flag("--p"):
        ctx = FrobContext(p, N, D)
    with _flag("--f"):
        n = _nvars(args.n, args.f)
        if n != 1:
            raise InputError("Frobenius is implemented for one variable")
        f = parse_poly(args.f, Rationals(), x_names(1))

    def run():
        res = frobenius_eigenvalue(ctx, f)
        sep = "" if p <= 10 else " "
        return {
            "alpha": sep.join(str(d) for d in res.digits),
            "valuation": str(res.valuation),
            "alpha_squared_mod": res.alpha_squared_mod(),
            "precision_ok": res.precision_ok,
            "horizon": str(res.horizon),
            "digits_lost": res.loss,
        }

    return run


def _selftest(args):
    only = []
    for item in args.only or []:
        only.extend(k.strip() for k in item.split(",") if k.strip())
    keys = {c.key for c in CRITERIA}
    for k in only:
        if k not in keys:
            raise FlagError("--only", InputError(f"unknown check {k!r}; choose from {', '.join(sorted(keys))}"))
    return only


# ---------------------------------------------------------------------------
# argument parser
# ---------------------------------------------------------------------------

def _add_globals(p, *, with_seed=True, top=False):
    default = None if top else argparse.SUPPRESS
    p.add_argument("--format", choices=["json", "text"], default="json" if top else default)
    if with_seed:
        p.add_argument("--seed", type=int, default=default)
    p.add_argument("--time-budget-ms", type=int, default=default, dest="time_budget_ms")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twderham", description="Twisted de Rham computations.", allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"twderham {__version__}")
    _add_globals(parser, top=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("integrate", help="normalized perturbative integral", allow_abbrev=False)
    p.add_argument("--ring", default="QQ")
    p.add_argument("--n", type=int)
    p.add_argument("--A", required=True)
    p.add_argument("--V")
    p.add_argument("--g", required=True)
    p.add_argument("--order", type=int, default=1)
    p.add_argument("--strategy", choices=["leftmost", "random"], default="leftmost")
    _add_globals(p)

    p = sub.add_parser("milnor", help="Milnor number and monomial basis", allow_abbrev=False)
    p.add_argument("--ring", default="QQ")
    p.add_argument("--n", type=int)
    p.add_argument("--f", required=True)
    _add_globals(p)

    p = sub.add_parser("reduce", help="coordinates of [g dx] with an exactness witness", allow_abbrev=False)
    p.add_argument("--ring", default="QQ")
    p.add_argument("--n", type=int)
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--show-witness", action="store_true")
    _add_globals(p)

    p = sub.add_parser("picard-fuchs", help="operator annihilating a class in a family", allow_abbrev=False)
    p.add_argument("--n", type=int)
    p.add_argument("--f", required=True)
    p.add_argument("--seed", dest="seed_class", default="1", help="representative g of the class [g dx]")
    _add_globals(p, with_seed=False)

    p = sub.add_parser("delta", help="constraint elimination map", allow_abbrev=False)
    p.add_argument("--ring", default="QQ")
    p.add_argument("--n", type=int)
    p.add_argument("--P")
    p.add_argument("--constraint", action="append")
    p.add_argument("--codim", type=int)
    p.add_argument("--f")
    p.add_argument("--omega", required=True)
    _add_globals(p)

    p = sub.add_parser("frobenius", help="Frobenius eigenvalue on a rank-one cohomology", allow_abbrev=False)
    p.add_argument("--ring")
    p.add_argument("--p", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--D", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--f", required=True)
    _add_globals(p)

    p = sub.add_parser("selftest", help="randomized acceptance checks", allow_abbrev=False)
    p.add_argument("--only", action="append")
    p.add_argument("--full", action="store_true", help="run at acceptance scale")
    _add_globals(p)
    return parser


HANDLERS = {
    "integrate": _integrate,
    "milnor": _milnor,
    "reduce": _reduce,
    "picard-fuchs": _picard_fuchs,
    "delta": _delta,
    "frobenius": _frobenius,
}


def _emit(payload: dict, fmt: str, stream):
    if fmt == "json":
        stream.write(json.dumps(payload) + "\n")
    else:
        for k, v in payload.items():
            if isinstance(v, list):
                v = ", ".join(str(x) for x in v)
            elif isinstance(v, bool):
                v = str(v).lower()
            stream.write(f"{k}: {v}\n")


@contextmanager
def _budget(ms):
    if not ms or not hasattr(signal, "setitimer"):
        yield
        return

    def fire(signum, frame):
        raise TimeBudgetExceeded(f"time budget of {ms} ms exhausted")

    old = signal.signal(signal.SIGALRM, fire)
    signal.setitimer(signal.ITIMER_REAL, ms / 1000.0)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("TWDERHAM_SEED")
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise FlagError("TWDERHAM_SEED", InputError(f"not an integer: {env!r}")) from None


def _attach_negative_values(argv):
    """``--f -x^2`` -> ``--f=-x^2``; argparse would read the value as a flag.

    Only long flags exist, so a token with a single leading dash is a value.
    """
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (
            tok.startswith("--") and "=" not in tok and nxt is not None
            and nxt.startswith("-") and not nxt.startswith("--") and nxt != "-h"
        ):
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    fmt = "json"
    argv = _attach_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = build_parser().parse_args(argv)
        fmt = args.format
        args.seed = _resolve_seed(args)
        if args.time_budget_ms is not None and args.time_budget_ms <= 0:
            raise FlagError("--time-budget-ms", InputError("must be positive"))
        if args.command == "selftest":
            only = _selftest(args)
            lines = []
            with _budget(args.time_budget_ms):
                results = run_checks(
                    only=only or None,
                    seed=args.seed,
                    scale="full" if args.full else "reduced",
                    emit=(lambda s: (stdout.write(s + "\n"), stdout.flush())) if fmt == "text" else lines.append,
                )
            if fmt == "json":
                payload = {
                    "seed": args.seed,
                    "results": [{"criterion": r.name, "passed": r.passed, "detail": r.detail} for r in results],
                }
                _emit(payload, fmt, stdout)
            return 0 if all(r.passed for r in results) else 1
        runner = HANDLERS[args.command](args)
    except FlagError as err:
        exc = err.exc
        name = type(exc).__name__
        stderr.write(f"twderham: error in {err.flag}: {name}: {exc}\n")
        _emit({"error": name, "flag": err.flag, "message": str(exc)}, fmt, stdout)
        return 2
    except TwDeRhamError as exc:
        # validation that is not tied to a single flag
        name = type(exc).__name__
        code = 2 if isinstance(exc, InputError) else 1
        stderr.write(f"twderham: {name}: {exc}\n")
        _emit({"error": name, "message": str(exc)}, fmt, stdout)
        return code
    try:
        with _budget(args.time_budget_ms):
            payload = runner()
    except TwDeRhamError as exc:
        name = type(exc).__name__
        code = 2 if isinstance(exc, InputError) else 1
        stderr.write(f"twderham: {name}: {exc}\n")
        _emit({"error": name, "message": str(exc)}, fmt, stdout)
        return code
    _emit(payload, fmt, stdout)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
