"""Command-line interface.

Every command prints a line-oriented ``key = value`` report, optionally
followed by ``--- begin <name> --- / --- end <name> ---`` blocks holding
matrices or JSON.  Exit codes:

    0  success
    1  a computed check failed (residual or norm bound out of tolerance)
    2  metric-axiom violation in an input space
    3  parse or usage error
    4  internal LP failure
    5  suite property failure
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, arith
from .errors import CapExceeded, InvalidSpace, LpError, MetricError, ParseError
from .free_space import free_norm_witness, optimal_representation
from .io import Loader, format_function, format_lifting, format_space
from .lifting import (
    build_lifting,
    composition_lifting,
    composition_operator,
    lifting_norm,
    operator_norm,
    operator_norm_witness,
    unit_ball_residual_bound,
    verify_commutation,
)
from .lipschitz import apply_de_leeuw, de_leeuw_matrix, lip_norm, resolve_point_map
from .metric_space import CAP_ENV, gen_ultrametric_cube, point_cap, ultrametric_witness

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_METRIC = 2
EXIT_PARSE = 3
EXIT_LP = 4
EXIT_SUITE = 5

DEFAULT_TOL = 1e-8


@dataclass
class RunReport:
    command: str
    mode: str
    inputs: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    scalars: dict = field(default_factory=dict)
    blocks: dict = field(default_factory=dict)
    duration: float = 0.0

    def render(self, with_duration=True):
        lines = [f"command = {self.command}", f"version = {__version__}", f"mode = {self.mode}"]
        for path, dig in self.inputs.items():
            lines.append(f"input = {path} {dig}")
        for key, value in self.tolerances.items():
            lines.append(f"tol.{key} = {_show(value)}")
        for key, value in self.scalars.items():
            lines.append(f"{key} = {_show(value)}")
        if with_duration:
            lines.append(f"duration_s = {self.duration:.6f}")
        for name, text in self.blocks.items():
            lines.append(f"--- begin {name} ---")
            lines.extend(text.rstrip("\n").splitlines())
            lines.append(f"--- end {name} ---")
        return "\n".join(lines) + "\n"


def _show(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return v
    return arith.format_number(v)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--mode", choices=arith.MODES, default=arith.FLOAT, help="arithmetic backend")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL,
                   help="float-mode tolerance for commutation and norm checks (default %(default)g)")
    p.add_argument("--lp-tol", type=float, default=arith.FLOAT_TOL,
                   help="float-mode LP feasibility/optimality and duality-gap tolerance (default %(default)g)")
    p.add_argument("--epsilon", type=str, default="0", help="lifting norm slack over ||S|| (default 0)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--emit-matrices", action="store_true", help="append matrices to the report")
    p.add_argument("--jobs", type=int, default=1, help="concurrent per-pair LP solves")
    p.add_argument("--lp-log", metavar="FILE", help="write simplex tableau iterations to FILE")
    return p


def build_parser():
    common = _common()
    parser = _Parser(prog="liplift", description="Lipschitz operator norms and De Leeuw liftings on finite metric spaces.")
    parser.add_argument("--version", action="version", version=f"liplift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", parents=[common], help="validate a space file")
    p.add_argument("space")
    p = sub.add_parser("lipnorm", parents=[common], help="Lipschitz norm of a function file")
    p.add_argument("function")
    p = sub.add_parser("freenorm", parents=[common], help="free norm and optimal molecular representation")
    p.add_argument("freevector")
    p = sub.add_parser("deleeuw", parents=[common], help="De Leeuw matrix of a space")
    p.add_argument("space")
    p.add_argument("--function", help="also embed this function file")
    p = sub.add_parser("opnorm", parents=[common], help="operator norm of an operator file")
    p.add_argument("operator")
    p = sub.add_parser("lift", parents=[common], help="build and check a lifting of an operator")
    p.add_argument("operator")
    p.add_argument("-o", "--output", help="write the lifting matrix file here")
    p = sub.add_parser("lift-compose", parents=[common], help="explicit lifting of f -> r * (f o gamma)")
    p.add_argument("pointmap")
    p.add_argument("--r", type=str, required=True, help="nonzero scalar")
    p.add_argument("-o", "--output", help="write the lifting matrix file here")
    p = sub.add_parser("verify", parents=[common], help="check a lifting file against an operator file")
    p.add_argument("operator")
    p.add_argument("lifting")
    p = sub.add_parser("gen-ultrametric", parents=[common], help="binary ultrametric cube of a given depth")
    p.add_argument("depth", type=int)
    p.add_argument("-o", "--output", help="write the space file here")
    p = sub.add_parser("suite", parents=[common], help="randomised property battery")
    p.add_argument("--sizes", default="1,2,3,4,5", help="comma-separated point counts")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--inject-fault", action="store_true", help="corrupt every built lifting (negative control)")
    return parser


def _number(text, exact):
    from .io import parse_number

    return parse_number(text, exact)


# -- commands ----------------------------------------------------------------


def cmd_validate(args, rep, load):
    space = load.space(args.space)
    rep.scalars["points"] = space.n
    rep.scalars["base"] = space.base_label
    rep.scalars["pairs"] = len(space.pairs)
    rep.scalars["ultrametric"] = ultrametric_witness(space) is None
    return EXIT_OK


def cmd_lipnorm(args, rep, load):
    f = load.function(args.function)
    rep.scalars["lip_norm"] = lip_norm(f)
    if args.emit_matrices:
        quot = apply_de_leeuw(f)
        rep.blocks["de_leeuw"] = "\n".join(
            f"{f.space.pair_label(p)} {arith.format_number(v)}" for p, v in zip(f.space.pairs, quot)
        )
    return EXIT_OK


def cmd_freenorm(args, rep, load):
    mu = load.free_vector(args.freevector)
    norm, f = free_norm_witness(mu, args.lp_tol)
    rep_ = optimal_representation(mu, args.lp_tol)
    gap = abs(norm - rep_.l1_value)
    tol = arith.tolerance(load.exact, args.lp_tol)
    rep.scalars["free_norm"] = norm
    rep.scalars["representation_l1"] = rep_.l1_value
    rep.scalars["duality_gap"] = gap
    rep.scalars["status"] = "ok" if gap <= tol else "fail"
    if args.emit_matrices:
        rep.blocks["witness"] = format_function(f, _header_args(args.freevector)[0])
        rep.blocks["representation"] = "\n".join(
            f"{mu.space.pair_label(p)} {arith.format_number(a)}"
            for p, a in zip(mu.space.pairs, rep_.coefficients) if a != 0
        )
    return EXIT_OK if gap <= tol else EXIT_CHECK_FAILED


def cmd_deleeuw(args, rep, load):
    space = load.space(args.space)
    D = de_leeuw_matrix(space)
    rep.scalars["rows"] = D.shape[0]
    rep.scalars["columns"] = D.shape[1]
    lines = ["columns " + " ".join(space.labels[i] for i in space.nonbase)]
    for p, row in zip(space.pairs, D.matrix):
        lines.append(" ".join([space.pair_label(p)] + [arith.format_number(v) for v in row]))
    rep.blocks["de_leeuw_matrix"] = "\n".join(lines)
    if args.function:
        f = load.function(args.function)
        if f.space is not space:
            raise ParseError("function file refers to a different space", args.function, 1)
        quot = apply_de_leeuw(f)
        rep.scalars["lip_norm"] = lip_norm(f)
        rep.scalars["sup_embedded"] = arith.max_abs(quot)
        rep.blocks["embedded"] = "\n".join(
            f"{space.pair_label(p)} {arith.format_number(v)}" for p, v in zip(space.pairs, quot)
        )
    return EXIT_OK


def cmd_opnorm(args, rep, load):
    S = load.operator(args.operator)
    norm, pair, f = operator_norm_witness(S, args.lp_tol)
    rep.scalars["operator_norm"] = norm
    if pair is not None:
        rep.scalars["attained_at"] = S.codomain.pair_label(pair)
        rep.scalars["witness_lip_norm"] = lip_norm(f)
        rep.scalars["witness_image_lip_norm"] = lip_norm(S(f))
    if args.emit_matrices and pair is not None:
        rep.blocks["witness"] = format_function(f, _header_args(args.operator)[0])
    return EXIT_OK


def _lifting_checks(rep, S, L, epsilon, args, exact):
    norm = operator_norm(S, args.lp_tol)
    lnorm = lifting_norm(L)
    residual = verify_commutation(S, L)
    tol = arith.tolerance(exact, args.tol)
    ok_res = residual <= tol
    ok_norm = lnorm <= norm + epsilon + tol
    rep.scalars["operator_norm"] = norm
    rep.scalars["lifting_norm"] = lnorm
    rep.scalars["epsilon"] = epsilon
    rep.scalars["commutation_residual"] = residual
    rep.scalars["unit_ball_residual_bound"] = unit_ball_residual_bound(S, L)
    rep.scalars["lifting_rank"] = L.rank()
    rep.scalars["status"] = "ok" if ok_res and ok_norm else "fail"
    return EXIT_OK if ok_res and ok_norm else EXIT_CHECK_FAILED


def _header_args(path):
    """File names referenced on the first line of an input file."""
    return Path(path).read_text(encoding="utf-8").splitlines()[0].split()[1:]


def cmd_lift(args, rep, load):
    S = load.operator(args.operator)
    epsilon = _number(args.epsilon, load.exact)
    if epsilon < 0:
        raise ParseError(f"--epsilon must be nonnegative, got {args.epsilon}")
    L = build_lifting(S, epsilon, args.lp_tol, workers=args.jobs)
    code = _lifting_checks(rep, S, L, epsilon, args, load.exact)
    dom, cod = _header_args(args.operator)
    text = format_lifting(L, dom, cod)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        rep.scalars["output"] = args.output
    if args.emit_matrices:
        rep.blocks["lifting"] = text
    return code


def cmd_lift_compose(args, rep, load):
    gamma, N, M = load.point_map(args.pointmap)
    r = _number(args.r, load.exact)
    if r == 0:
        raise ParseError("--r must be nonzero")
    g = resolve_point_map(gamma, N, M)
    S = composition_operator(gamma, r, M, N)
    L = composition_lifting(gamma, r, M, N)
    zero = arith.zeros((), load.exact)[()]
    closed = max((abs(r) * M.dist[g[x], g[y]] / N.dist[x, y] for x, y in N.pairs if g[x] != g[y]), default=zero)
    residual = verify_commutation(S, L)
    lnorm = lifting_norm(L)
    built = lifting_norm(build_lifting(S, 0, args.lp_tol, workers=args.jobs))
    tol = arith.tolerance(load.exact, args.tol)
    # the explicit lifting may cost more than ||S||; the LP lifting may not exceed it
    ok = residual <= tol and abs(lnorm - closed) <= tol and built <= closed + tol
    rep.scalars["r"] = r
    rep.scalars["operator_norm"] = operator_norm(S, args.lp_tol)
    rep.scalars["lifting_norm"] = lnorm
    rep.scalars["closed_form_norm"] = closed
    rep.scalars["lp_lifting_norm"] = built
    rep.scalars["commutation_residual"] = residual
    rep.scalars["status"] = "ok" if ok else "fail"
    source, target = _header_args(args.pointmap)
    text = format_lifting(L, target, source)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        rep.scalars["output"] = args.output
    if args.emit_matrices:
        rep.blocks["lifting"] = text
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_verify(args, rep, load):
    S = load.operator(args.operator)
    L = load.lifting(args.lifting, S.domain, S.codomain)
    epsilon = _number(args.epsilon, load.exact)
    return _lifting_checks(rep, S, L, epsilon, args, load.exact)


def cmd_gen_ultrametric(args, rep, load):
    space = gen_ultrametric_cube(args.depth, exact=load.exact)
    witness = ultrametric_witness(space)
    rep.scalars["depth"] = args.depth
    rep.scalars["points"] = space.n
    rep.scalars["point_cap"] = point_cap()
    rep.scalars["ultrametric"] = witness is None
    text = format_space(space)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        rep.scalars["output"] = args.output
    if args.emit_matrices or not args.output:
        rep.blocks["space"] = text
    return EXIT_OK if witness is None else EXIT_CHECK_FAILED


def cmd_suite(args, rep, load):
    from .suite import SuiteConfig, run_suite

    try:
        sizes = tuple(int(s) for s in args.sizes.split(",") if s.strip())
    except ValueError:
        raise ParseError(f"--sizes must be comma-separated integers, got {args.sizes!r}") from None
    cap = point_cap()
    if not sizes or min(sizes) < 1 or max(sizes) > cap:
        raise CapExceeded(f"sizes must lie in 1..{cap} ({CAP_ENV})")
    cfg = SuiteConfig(seed=args.seed, sizes=sizes, trials=args.trials, exact=load.exact,
                      tol=args.tol, lp_tol=args.lp_tol, inject_fault=args.inject_fault)
    rep.scalars["seed"] = args.seed
    rep.scalars["sizes"] = ",".join(map(str, sizes))
    rep.scalars["trials"] = args.trials
    results = run_suite(cfg)
    for res in results:
        rep.scalars[f"{res.name}.worst"] = res.worst
        rep.scalars[f"{res.name}"] = "pass" if res.passed else "FAIL"
    failed = [r for r in results if not r.passed]
    if failed:
        rep.scalars["failed_property"] = failed[0].name
        rep.blocks["witness"] = json.dumps(failed[0].witness, indent=1, sort_keys=True)
        return EXIT_SUITE
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "lipnorm": cmd_lipnorm,
    "freenorm": cmd_freenorm,
    "deleeuw": cmd_deleeuw,
    "opnorm": cmd_opnorm,
    "lift": cmd_lift,
    "lift-compose": cmd_lift_compose,
    "verify": cmd_verify,
    "gen-ultrametric": cmd_gen_ultrametric,
    "suite": cmd_suite,
}


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_PARSE

    handler = None
    if args.lp_log:
        handler = logging.FileHandler(args.lp_log, mode="w", encoding="utf-8")
        lp_log = logging.getLogger("liplift.lp")
        lp_log.setLevel(logging.DEBUG)
        lp_log.addHandler(handler)
        from . import lp_core

        lp_core.DEBUG_DEFAULT = True

    load = Loader(exact=args.mode == arith.RATIONAL)
    rep = RunReport(args.command, args.mode)
    exact = load.exact
    rep.tolerances["check"] = arith.tolerance(exact, args.tol)
    rep.tolerances["lp"] = arith.tolerance(exact, args.lp_tol)
    start = time.perf_counter()
    try:
        code = COMMANDS[args.command](args, rep, load)
    except MetricError as exc:
        rep.inputs = load.inputs
        rep.scalars["error"] = type(exc).__name__
        rep.scalars["message"] = str(exc)
        rep.scalars["witness"] = ",".join(str(i) for i in exc.witness)
        code = EXIT_METRIC
    except (ParseError, InvalidSpace, CapExceeded) as exc:
        print(f"liplift: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_PARSE
    except LpError as exc:
        print(f"liplift: LP failure: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_LP
    finally:
        if handler is not None:
            logging.getLogger("liplift.lp").removeHandler(handler)
            handler.close()
            from . import lp_core

            lp_core.DEBUG_DEFAULT = False
    rep.inputs = load.inputs
    rep.duration = time.perf_counter() - start
    stdout.write(rep.render())
    return code


def entry():
    sys.exit(main())
