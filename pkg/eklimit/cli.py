"""
The `ek` command line.

    ek eval kstar --a 0 --z0 0,0 --w0 0,0 --s 3,0 --lattice 1,0,0,1
    ek eval theta|sigma|wp --z 0.25,0.4
    ek eval log-theta-hat --g2 4 --g3 0 --p 5 --N 8 --M 16
    ek verify second-limit --z 0.25,0.4
    ek verify all --lattice 1,0,0.3,1.2 --jobs 4
    ek table --start 1.1 --stop 3.0 --step 0.1

stdout only carries JSON, CSV or series dumps. Exit codes: 0 success, 1 failing
check, 2 usage or configuration error, 3 mathematical domain error.
"""
from dataclasses import dataclass, field, fields, replace
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence, TextIO
import argparse
import csv
import json
import logging
import sys

import mpipe
import numpy as np
from sympy import Rational, SympifyError
from tqdm import tqdm

from .common import ConfigError, EKError, parse_complex, to_pair
from .eklerch import EKQuery, kstar
from .lattice import Lattice, gaussian_lattice, parse_lattice, random_points
from .numeric import DEFAULT_CONFIG, PrecisionConfig
from .padic.formal import (CMCurveModel, dump_series, log_theta_hat,
                           verify_padic_distribution)
from .report import VerificationReport, reports_to_json
from .verify import (SEED, Check, standard_checks, verify_delta_consistency, verify_distribution,
                     verify_first_limit, verify_first_limit_extrapolation,
                     verify_kronecker_theorem, verify_prop_c, verify_second_limit,
                     verify_theta_constant_term, verify_theta_distribution_2)
from .weierstrass import cached_context, sigma, theta, wp

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3

OUTPUTS = ("json", "table")
EVAL_FUNCTIONS: Dict[str, Callable] = {"theta": theta, "sigma": sigma, "wp": wp}
# the models behind the p-adic part of `verify all`
PADIC_SUITE = ((4, 0, 5), (4, 0, 7))


@dataclass
class CliConfig:
    lattice: Lattice = field(default_factory=gaussian_lattice)
    truncation_radius_factor: float = DEFAULT_CONFIG.truncation_radius_factor
    quad_tol: float = DEFAULT_CONFIG.quad_tol
    target_abs_error: float = DEFAULT_CONFIG.target_abs_error
    seed: int = SEED
    output: str = "json"

    def __post_init__(self):
        if self.output not in OUTPUTS:
            raise ConfigError(f"output must be one of {OUTPUTS}, got {self.output!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        # raises ConfigError on bad overrides
        PrecisionConfig(self.truncation_radius_factor, self.quad_tol, self.target_abs_error)

    @property
    def precision(self) -> PrecisionConfig:
        return PrecisionConfig(self.truncation_radius_factor, self.quad_tol, self.target_abs_error)


def _convert(key: str, text: str):
    try:
        if key == "lattice":
            return parse_lattice(text)
        if key == "seed":
            return int(text, 0)
        if key == "output":
            return text
        return float(text)
    except ValueError as e:
        raise ConfigError(f"bad value for {key}: {text!r} ({e})") from e


def read_config_file(stream: TextIO) -> Dict[str, object]:
    """
    Flat key=value lines; blank lines and lines starting with # are skipped.

    >>> import io
    >>> read_config_file(io.StringIO("# run\\nseed = 7\\noutput=table\\n"))
    {'seed': 7, 'output': 'table'}
    """
    known = {f.name for f in fields(CliConfig)}
    values: Dict[str, object] = {}
    for number, line in enumerate(stream, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, text = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"line {number}: expected key=value, got {line!r}")
        if key not in known:
            raise ConfigError(f"line {number}: unknown key {key!r}")
        values[key] = _convert(key, text.strip())
    return values


def resolve_config(args: argparse.Namespace) -> CliConfig:
    """Defaults, then the --config file, then the flags"""
    values: Dict[str, object] = {}
    if args.config is not None:
        try:
            with open(args.config, "r") as file:
                values.update(read_config_file(file))
        except OSError as e:
            raise ConfigError(f"cannot read config file {args.config}: {e}") from e
    for f in fields(CliConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    return replace(CliConfig(), **values)


def _argument_type(convert: Callable, what: str) -> Callable:
    def parse(text: str):
        try:
            return convert(text)
        except (ValueError, TypeError, SympifyError, EKError) as e:
            raise argparse.ArgumentTypeError(f"invalid {what} {text!r}: {e}")
    parse.__name__ = what
    return parse


complex_arg = _argument_type(parse_complex, "complex re,im")
lattice_arg = _argument_type(parse_lattice, "lattice re1,im1,re2,im2")
rational_arg = _argument_type(Rational, "rational")
seed_arg = _argument_type(lambda text: int(text, 0), "seed")


def _at_least(minimum: int) -> Callable:
    def convert(text: str) -> int:
        value = int(text)
        if value < minimum:
            raise ValueError(f"must be >= {minimum}")
        return value
    return _argument_type(convert, f"integer >= {minimum}")


positive_int = _at_least(1)
torsion_order = _at_least(2)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lattice", type=lattice_arg, help="re1,im1,re2,im2 (default Z[i])")
    common.add_argument("--config", help="key=value file, overridden by flags")
    common.add_argument("--truncation-radius-factor", dest="truncation_radius_factor", type=float)
    common.add_argument("--quad-tol", dest="quad_tol", type=float)
    common.add_argument("--target-abs-error", dest="target_abs_error", type=float)
    common.add_argument("--seed", type=seed_arg)
    common.add_argument("--output", choices=OUTPUTS)
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    return common


def _model_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--g2", type=rational_arg, required=True)
    parser.add_argument("--g3", type=rational_arg, required=True)
    parser.add_argument("--p", type=int, required=True)
    parser.add_argument("--N", type=positive_int, required=True, help="p-adic precision")
    parser.add_argument("--M", type=positive_int, required=True, help="t-adic order")
    parser.add_argument("--e-star", dest="e_star", type=rational_arg, default=Rational(0))


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="ek", description=__doc__.strip().splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    evaluate = commands.add_parser("eval", help="evaluate one function")
    functions = evaluate.add_subparsers(dest="function", required=True)
    k = functions.add_parser("kstar", parents=[common])
    k.add_argument("--a", type=int, default=0)
    k.add_argument("--z0", type=complex_arg, default=0j)
    k.add_argument("--w0", type=complex_arg, default=0j)
    k.add_argument("--s", type=complex_arg, required=True)
    for name in EVAL_FUNCTIONS:
        f = functions.add_parser(name, parents=[common])
        f.add_argument("--z", type=complex_arg, required=True)
    _model_options(functions.add_parser("log-theta-hat", parents=[common]))

    verify = commands.add_parser("verify", help="run identity checks")
    checks = verify.add_subparsers(dest="check", required=True)
    checks.add_parser("first-limit", parents=[common])
    for name in ("second-limit", "theta-dist-2"):
        c = checks.add_parser(name, parents=[common])
        c.add_argument("--z", type=complex_arg, help="single point (default: seeded random points)")
        c.add_argument("--count", type=positive_int, default=10)
    c = checks.add_parser("kronecker", parents=[common])
    c.add_argument("--z", type=complex_arg)
    c.add_argument("--w", type=complex_arg)
    c.add_argument("--count", type=positive_int, default=20)
    c = checks.add_parser("distribution", parents=[common])
    c.add_argument("--n", type=torsion_order, nargs="+", default=[2, 3, 5])
    checks.add_parser("prop-c", parents=[common])
    c = checks.add_parser("padic-dist", parents=[common])
    _model_options(c)
    c.add_argument("--perturb", type=rational_arg, default=Rational(0),
                   help="added to Δ² (negative control)")
    c = checks.add_parser("all", parents=[common])
    c.add_argument("--count", type=positive_int, default=10)
    c.add_argument("--jobs", type=positive_int, default=1, help="worker processes")

    t = commands.add_parser("table", parents=[common], help="CSV of K*_0(0,0,s) on a real grid")
    t.add_argument("--start", type=float, default=1.1)
    t.add_argument("--stop", type=float, default=3.0)
    t.add_argument("--step", type=float, default=0.1)
    return parser


def _print_record(record: Dict[str, object], output: str, out: TextIO) -> None:
    if output == "json":
        print(json.dumps(record), file=out)
        return
    for key, value in record.items():
        print(f"{key}\t{value}", file=out)


def cmd_eval(args: argparse.Namespace, config: CliConfig, out: TextIO) -> int:
    L, cfg = config.lattice, config.precision
    if args.function == "log-theta-hat":
        model = CMCurveModel(args.g2, args.g3, args.p)
        series = log_theta_hat(model, args.e_star, args.M, args.N)
        print(dump_series(series, model, args.N), file=out)
        return EXIT_OK

    if args.function == "kstar":
        q = EKQuery(args.a, args.z0, args.w0, args.s, L)
        result = kstar(q, cfg)
        record = {"function": "kstar", "a": q.a, "z0": list(to_pair(q.z0)),
                  "w0": list(to_pair(q.w0)), "s": list(to_pair(q.s)),
                  "lattice": L.as_floats(), **result.to_dict()}
        _print_record(record, config.output, out)
        if result.is_pole:
            print(f"ek: K*_0 has a simple pole at s = 1 for w0 in the lattice, residue 1/A = "
                  f"{result.pole_residue.real!r}; the value shown is the Laurent constant term "
                  "(kstar_regularized)", file=sys.stderr)
            return EXIT_DOMAIN
        return EXIT_OK

    ctx = cached_context(L, cfg)
    value = EVAL_FUNCTIONS[args.function](args.z, ctx)
    record = {"function": args.function, "z": list(to_pair(args.z)), "lattice": L.as_floats(),
              "value": list(to_pair(value))}
    _print_record(record, config.output, out)
    return EXIT_OK


def _points(args: argparse.Namespace, config: CliConfig, offset: int = 0) -> List[complex]:
    return random_points(config.lattice, args.count, config.seed + offset)


def select_checks(args: argparse.Namespace, config: CliConfig) -> List[Check]:
    """The zero-argument checks named on the command line, in reporting order"""
    L, cfg = config.lattice, config.precision
    name = args.check
    if name == "first-limit":
        return [partial(verify_first_limit, L, cfg), partial(verify_first_limit_extrapolation, L, cfg)]
    if name == "second-limit":
        points = [args.z] if args.z is not None else _points(args, config)
        return [partial(verify_second_limit, z, L, cfg) for z in points]
    if name == "theta-dist-2":
        points = [args.z] if args.z is not None else _points(args, config)
        return ([partial(verify_theta_distribution_2, z, L, cfg) for z in points]
                + [partial(verify_theta_constant_term, L, cfg)])
    if name == "kronecker":
        if (args.z is None) != (args.w is None):
            raise ConfigError("kronecker needs both --z and --w, or neither")
        if args.z is not None:
            pairs = [(args.z, args.w)]
        else:
            pairs = list(zip(_points(args, config), _points(args, config, 1)))
        return [partial(verify_kronecker_theorem, z, w, L, cfg) for z, w in pairs]
    if name == "distribution":
        return [partial(verify_distribution, n, L, cfg) for n in args.n]
    if name == "prop-c":
        return [partial(verify_prop_c, L, cfg), partial(verify_delta_consistency, L, cfg)]
    if name == "padic-dist":
        model = CMCurveModel(args.g2, args.g3, args.p)
        return [partial(verify_padic_distribution, model, args.N, args.M, args.e_star, args.perturb)]
    checks = standard_checks(L, cfg, config.seed, args.count)
    checks += [partial(verify_padic_distribution, CMCurveModel(g2, g3, p), 8, 16)
               for g2, g3, p in PADIC_SUITE]
    return checks


def _run_check(check: Check):
    # exceptions cross the process boundary as values and are re-raised in order
    try:
        return check()
    except EKError as e:
        return e


def run_checks(checks: Sequence[Check], jobs: int = 1, progress: bool = True) -> List[VerificationReport]:
    """
    Run the checks, on `jobs` worker processes when jobs > 1. The reports come back
    in the order of `checks`.
    """
    if jobs < 1:
        raise ConfigError(f"--jobs must be >= 1, got {jobs}")
    pbar = tqdm(total=len(checks), desc="verify", disable=not progress, file=sys.stderr)
    outcomes = []
    if jobs == 1:
        for check in checks:
            outcomes.append(_run_check(check))
            pbar.update()
    else:
        stage = mpipe.OrderedStage(_run_check, jobs)
        pipe = mpipe.Pipeline(stage)
        for check in checks:
            pipe.put(check)
        pipe.put(None)
        for outcome in pipe.results():
            outcomes.append(outcome)
            pbar.update()
    pbar.close()
    for outcome in outcomes:
        if isinstance(outcome, Exception):
            raise outcome
    return outcomes


def cmd_verify(args: argparse.Namespace, config: CliConfig, out: TextIO) -> int:
    checks = select_checks(args, config)
    jobs = getattr(args, "jobs", 1)
    reports = run_checks(checks, jobs, progress=len(checks) > 1)
    if config.output == "json":
        print(reports_to_json(reports), file=out)
    else:
        for r in reports:
            status = "pass" if r.passed else "FAIL"
            print(f"{r.check_name}\t{status}\t{r.abs_error!r}\t{r.tolerance!r}", file=out)
    failed = [r for r in reports if not r.passed]
    for r in failed:
        logger.warning("%s failed: |lhs - rhs| = %r > %r", r.check_name, r.abs_error, r.tolerance)
    return EXIT_FAILED if failed else EXIT_OK


def s_grid(start: float, stop: float, step: float) -> np.ndarray:
    """
    Inclusive grid, rounded so that decimal steps land on their decimal values.

    >>> len(s_grid(1.1, 3.0, 0.1)), s_grid(0.8, 1.2, 0.1)[2]
    (20, 1.0)
    """
    if step <= 0 or stop < start:
        raise ConfigError(f"need step > 0 and stop >= start, got {start}:{stop}:{step}")
    count = int(round((stop - start) / step)) + 1
    return np.round(start + step * np.arange(count), 12)


def cmd_table(args: argparse.Namespace, config: CliConfig, out: TextIO) -> int:
    L, cfg = config.lattice, config.precision
    A = L.area_param
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["s", "re", "im", "regularized"])
    for s in tqdm(s_grid(args.start, args.stop, args.step), desc="table", file=sys.stderr):
        s = float(s)
        result = kstar(EKQuery(0, 0, 0, s, L), cfg)
        if result.is_pole:
            # A K*_0 - 1/(s-1) tends to A times the Laurent constant term
            writer.writerow([repr(s), "pole", "pole", repr(A * result.value.real)])
            continue
        regularized = A * result.value.real - 1 / (s - 1)
        writer.writerow([repr(s), repr(result.value.real), repr(result.value.imag),
                         repr(regularized)])
    return EXIT_OK


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "table": cmd_table}


def main(argv: Optional[Sequence[str]] = None, out: TextIO = sys.stdout) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = resolve_config(args)
        return COMMANDS[args.command](args, config, out)
    except ConfigError as e:
        print(f"ek: {e}", file=sys.stderr)
        return EXIT_USAGE
    except EKError as e:
        print(f"ek: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
