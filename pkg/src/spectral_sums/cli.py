"""Command-line front end.

Every run is described by a flat parameter set: built-in defaults, then an
optional ``key = value`` config file, then command-line flags (flags win).
Reports go to ``--out`` as JSON; the wall-clock metadata of the run goes to a
``.meta.json`` sidecar so the report itself is reproducible byte for byte.

Exit codes: 0 success, 1 a check failed under ``--strict``, 2 configuration
error, 3 numerical error.
"""

import argparse
import json
import math
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .checks import (
    blocking_constant_check,
    eigencount_condition_check,
    hardy_check,
    intrablock_maximal_check,
    make_dyadic_blocking,
    maximal_inequality_check,
    phase_space_check,
    plancherel_check,
    rm_check,
    scattering_condition_check,
    weyl_check,
)
from .config import DEFAULT_TOLERANCES
from .errors import ConfigurationError, DomainError, NumericalError, StructuralError
from .grid import GridFunction, Window
from .operators import (
    ball_potential,
    build_dirichlet_1d,
    build_hermite_1d,
    build_schrodinger_fd,
    constant_potential,
    export_model,
    harmonic_potential,
    inverse_square_potential,
    power_potential,
    validate_growth_conditions,
    zero_potential,
)
from .spectral import (
    analyze,
    coefficients_csv,
    maximal_function,
    partial_sum,
    random_coefficients,
    synthesis_csv,
)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

# -- value parsers -------------------------------------------------------------

_PI_EXPR = re.compile(r"^([0-9.eE+-]*)\s*\*?\s*pi\s*(?:/\s*([0-9.eE+]+))?$")


def parse_real(text):
    """A float, or a multiple of pi such as ``pi``, ``2pi``, ``2*pi``, ``pi/2``."""
    s = str(text).strip().lower()
    try:
        return float(s)
    except ValueError:
        pass
    m = _PI_EXPR.match(s)
    if not m:
        raise ConfigurationError(f"not a number: {text!r}")
    head, den = m.groups()
    factor = 1.0 if head in ("", "+") else -1.0 if head == "-" else float(head)
    return factor * math.pi / (float(den) if den else 1.0)


def parse_int(text):
    try:
        value = float(str(text).strip())
    except ValueError:
        raise ConfigurationError(f"not an integer: {text!r}") from None
    if not value.is_integer():
        raise ConfigurationError(f"not an integer: {text!r}")
    return int(value)


def parse_reals(text):
    items = [t for t in str(text).split(",") if t.strip()]
    if not items:
        raise ConfigurationError("empty list")
    return [parse_real(t) for t in items]


def parse_pair(text):
    values = parse_reals(text)
    if len(values) != 2:
        raise ConfigurationError(f"expected 'lo,hi', got {text!r}")
    return values


def parse_window(text):
    return "full" if str(text).strip().lower() == "full" else parse_pair(text)


def _choice(*options):
    def parse(text):
        s = str(text).strip()
        if s not in options:
            raise ConfigurationError(f"{s!r} is not one of {', '.join(options)}")
        return s

    return parse


MODELS = ("dirichlet", "hermite", "schrodinger")
POTENTIALS = ("zero", "constant", "harmonic", "quartic", "inverse-square", "ball")
FUNCTIONS = ("square", "parabola", "gaussian", "random")


@dataclass(frozen=True)
class Param:
    parse: object
    default: object
    help: str


PARAMS = {
    "model": Param(_choice(*MODELS), "dirichlet", "operator class"),
    "length": Param(parse_real, math.pi, "Dirichlet interval length (accepts pi, 2pi, pi/2)"),
    "modes": Param(parse_int, 64, "number of eigenfunctions"),
    "points": Param(parse_int, None, "grid points (default chosen from modes)"),
    "potential": Param(_choice(*POTENTIALS), "harmonic", "potential V"),
    "c": Param(parse_real, 1.0, "potential strength"),
    "radius": Param(parse_real, 1.0, "support radius of the ball potential"),
    "domain": Param(parse_pair, None, "interval lo,hi for finite differences or sampling"),
    "eps": Param(parse_real, 1e-3, "inner cut-off for inverse-square potentials"),
    "function": Param(_choice(*FUNCTIONS), "square", "function to expand"),
    "R": Param(parse_real, None, "partial-sum cut-off (default: top eigenvalue)"),
    "rmax": Param(parse_real, None, "largest R in the maximal function (default: top eigenvalue)"),
    "seed": Param(parse_int, 0, "root seed"),
    "decay": Param(parse_real, 1.0, "random coefficients decay like k^-decay"),
    "trials": Param(parse_int, 100, "number of random trials"),
    "n_funcs": Param(parse_int, 64, "orthogonal family size"),
    "dim": Param(parse_int, 256, "ambient dimension of the orthogonal family"),
    "a": Param(parse_real, 0.5, "blocking exponent, lambda_k = k^(1/(2a))"),
    "kmax": Param(parse_int, None, "number of blocks (default: enough to cover the model)"),
    "window": Param(parse_window, "full", "window K: 'full' or lo,hi"),
    "compare_modes": Param(parse_int, None, "eigenvalues in the comparison model (default modes/2)"),
    "M": Param(parse_reals, [4, 8, 16, 32, 64, 128, 256, 512], "comma-separated M values"),
    "m": Param(parse_int, 1, "root order, F(L^(1/m))"),
    "mode": Param(_choice("band", "ball"), "band", "plancherel variant"),
    "center": Param(parse_real, None, "ball centre for plancherel mode 'ball'"),
    "n": Param(parse_int, 3, "space dimension"),
    "k": Param(parse_real, None, "growth exponent to test (default: the one declared for V)"),
    "lam": Param(parse_reals, [1.0, 4.0, 16.0], "comma-separated lambda values"),
    "samples": Param(parse_int, 1000000, "Monte Carlo or sampling size"),
    "workers": Param(parse_int, 1, "worker threads (does not change results)"),
    "out": Param(str, None, "output path (default: stdout)"),
    "csv": Param(str, None, "path for the per-row CSV of a check"),
    "manifest": Param(str, None, "file listing one config path per line"),
}

# keys that shape how a run executes but not what it computes
_EXECUTION_KEYS = {"workers", "out", "csv", "manifest"}

MODEL_KEYS = ("model", "length", "modes", "points", "potential", "c", "domain", "eps")
FUNCTION_KEYS = MODEL_KEYS + ("function", "seed", "decay")

COMMANDS = {
    "model build": MODEL_KEYS + ("out",),
    "model export": MODEL_KEYS + ("out",),
    "expand": FUNCTION_KEYS + ("out",),
    "partial-sum": FUNCTION_KEYS + ("R", "out"),
    "maximal": FUNCTION_KEYS + ("rmax", "out"),
    "check rm": ("n_funcs", "dim", "trials", "seed", "workers", "out", "csv"),
    "check blocking": ("a", "kmax", "out", "csv"),
    "check maximal-ineq": MODEL_KEYS
    + ("window", "trials", "seed", "decay", "compare_modes", "workers", "out", "csv"),
    "check intrablock": MODEL_KEYS + ("a", "kmax", "window", "trials", "seed", "decay", "workers", "out", "csv"),
    "check plancherel": MODEL_KEYS + ("window", "M", "m", "mode", "center", "out", "csv"),
    "check eigencount": MODEL_KEYS + ("out", "csv"),
    "check weyl": MODEL_KEYS + ("out", "csv"),
    "check phasespace": ("potential", "n", "lam", "samples", "seed", "out", "csv"),
    "check hardy": ("n", "trials", "seed", "workers", "out", "csv"),
    "check scattering": ("potential", "c", "radius", "samples", "seed", "out", "csv"),
    "check growth": ("potential", "c", "k", "n", "domain", "samples", "out", "csv"),
    "suite": ("manifest", "workers"),
}

# per-command defaults that differ from the global table
COMMAND_DEFAULTS = {
    "check rm": {"trials": 200},
    "check blocking": {"kmax": 1000000},
    "check intrablock": {"a": 0.25, "trials": 50},
    "check phasespace": {"potential": "harmonic", "n": 1},
    "check scattering": {"potential": "ball"},
    "check growth": {"n": 1, "samples": 1000},
}

# -- configuration ---------------------------------------------------------------


def read_config(path):
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key in entries:
            raise ConfigurationError(f"{path}:{lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def resolve(command, config=None, cli=None, tol_items=()):
    """Merge defaults, config entries and CLI values into (params, tolerances, overrides).

    Config entries may also carry ``command`` (checked for agreement) and
    ``tol.<name>`` tolerance overrides.  Unknown keys are rejected.
    """
    allowed = COMMANDS[command]
    config = dict(config or {})
    cli = dict(cli or {})
    declared = config.pop("command", None)
    if declared is not None and " ".join(declared.split()) != command:
        raise ConfigurationError(f"config is for {declared!r}, not {command!r}")
    tol_raw = {}
    for key in [k for k in config if k.startswith("tol.")]:
        tol_raw[key[4:]] = config.pop(key)
    for item in tol_items:
        if "=" not in item:
            raise ConfigurationError(f"tolerance override must be NAME=VALUE, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        tol_raw[key] = value
    unknown = sorted(set(config) - set(allowed))
    if unknown:
        raise ConfigurationError(f"unknown keys for {command!r}: {', '.join(unknown)}")
    params = {}
    for key in allowed:
        param = PARAMS[key]
        if key in cli:
            params[key] = param.parse(cli[key])
        elif key in config:
            params[key] = param.parse(config[key])
        else:
            params[key] = COMMAND_DEFAULTS.get(command, {}).get(key, param.default)
    try:
        overrides = {k: float(v) for k, v in tol_raw.items()}
    except ValueError as exc:
        raise ConfigurationError(f"bad tolerance value: {exc}") from None
    tol = DEFAULT_TOLERANCES.override(**overrides)
    return params, tol, overrides


# -- builders --------------------------------------------------------------------


def make_potential(name, c=1.0, dimension=1, radius=1.0):
    if name == "zero":
        return zero_potential(dimension)
    if name == "constant":
        return constant_potential(c, dimension)
    if name == "harmonic":
        return harmonic_potential(dimension)
    if name == "quartic":
        return power_potential(4, dimension)
    if name == "inverse-square":
        return inverse_square_potential(c, dimension)
    if name == "ball":
        return ball_potential(c, radius, dimension)
    raise ConfigurationError(f"unknown potential {name!r}")


def _fd_domain(p):
    if p["domain"] is not None:
        return p["domain"]
    if p["potential"] == "inverse-square":
        return [p["eps"], 1.0]
    if p["potential"] == "zero":
        return [0.0, math.pi]
    return [-12.0, 12.0]


def build_model(p, tol):
    if p["model"] == "dirichlet":
        return build_dirichlet_1d(p["length"], p["modes"], p["points"], tol)
    if p["model"] == "hermite":
        return build_hermite_1d(p["modes"], p["points"], tol)
    V = make_potential(p["potential"], p["c"], 1)
    points = p["points"] or max(4096, 8 * p["modes"])
    return build_schrodinger_fd(V, _fd_domain(p), points, p["modes"], tol)


def make_window(model, param):
    if param == "full":
        return Window.full(model.grid)
    return Window.interval(model.grid, *param)


def _test_function(model, p):
    x = model.grid.points
    lo, hi = float(x[0]), float(x[-1])
    mid = 0.5 * (lo + hi)
    kind = p["function"]
    if kind == "random":
        return random_coefficients(model, p["seed"], p["decay"])
    if kind == "square":
        values = np.sign(x - mid)
    elif kind == "parabola":
        values = (x - lo) * (hi - x)
    else:
        values = np.exp(-((x - mid) ** 2))
    return analyze(model, GridFunction(model.grid, values))


def eigenvalues_csv(model):
    lines = ["k,lambda,multiplicity"]
    for k, (lam, mult) in enumerate(zip(model.eigenvalues, model.multiplicities), start=1):
        lines.append(f"{k},{float(lam)!r},{int(mult)}")
    return "\n".join(lines) + "\n"


# -- execution -------------------------------------------------------------------


@dataclass
class Outcome:
    code: int
    stdout: str = ""
    stderr: str = ""


def _emit(text, path, stdout):
    if path is None:
        stdout.append(text)
    else:
        Path(path).write_text(text)


def _sidecar_path(out):
    out = Path(out)
    if out.suffix == ".json":
        return out.with_suffix(".meta.json")
    return out.with_name(out.name + ".meta.json")


def _run_check(name, p, tol):
    workers = p.get("workers", 1)
    if name == "rm":
        return rm_check(p["n_funcs"], p["dim"], p["trials"], p["seed"], tol, workers)
    if name == "blocking":
        return blocking_constant_check(p["a"], p["kmax"], tol)
    if name == "hardy":
        return hardy_check(p["n"], p["trials"], p["seed"], tol, workers)
    if name == "scattering":
        V = make_potential(p["potential"], p["c"], 3, p["radius"])
        return scattering_condition_check(V, p["samples"], p["seed"], tol=tol)
    if name == "phasespace":
        V = make_potential(p["potential"], 1.0, p["n"])
        return phase_space_check(V, p["lam"], p["n"], p["samples"], p["seed"], tol)
    if name == "growth":
        V = make_potential(p["potential"], p["c"], p["n"])
        return validate_growth_conditions(
            V, p["domain"] or [-10.0, 10.0], p["samples"], growth_exponent=p["k"], tol=tol
        )
    model = build_model(p, tol)
    if name == "eigencount":
        return eigencount_condition_check(model, tol)
    if name == "weyl":
        return weyl_check(model, tol)
    K = make_window(model, p["window"])
    if name == "maximal-ineq":
        compare = None
        if p["compare_modes"] is not None:
            compare = model.truncate(p["compare_modes"])
        return maximal_inequality_check(
            model, K, p["trials"], p["seed"], p["decay"], compare, tol=tol, workers=workers
        )
    if name == "intrablock":
        kmax = p["kmax"]
        if kmax is None:
            kmax = max(1, math.ceil(float(model.eigenvalues[-1]) ** (2 * p["a"])))
        blocking = make_dyadic_blocking(p["a"], kmax)
        return intrablock_maximal_check(
            model, blocking, K, p["trials"], p["seed"], p["decay"], tol, workers
        )
    if name == "plancherel":
        return plancherel_check(model, K, p["M"], p["m"], p["mode"], center=p["center"], tol=tol)
    raise ConfigurationError(f"unknown check {name!r}")


def _report_config(p):
    return {k: v for k, v in p.items() if k not in _EXECUTION_KEYS}


def execute(command, p, tol, overrides, strict=False, argv=()):
    """Run one resolved command; returns an Outcome instead of printing."""
    out = []
    started = time.perf_counter()
    if command.startswith("check "):
        report = _run_check(command.split(" ", 1)[1], p, tol)
        report.metadata["config"] = _report_config(p)
        if overrides:
            report.metadata["tolerance_overrides"] = dict(sorted(overrides.items()))
        _emit(report.to_json(), p["out"], out)
        if p["csv"] and report.rows:
            Path(p["csv"]).write_text(report.rows_csv())
        if p["out"]:
            meta = {
                "timestamp": datetime.now(timezone.utc).isoformat(),
                "elapsed_seconds": time.perf_counter() - started,
                "argv": list(argv),
                "command": command,
                "workers": p.get("workers", 1),
                "tool_version": __version__,
            }
            _sidecar_path(p["out"]).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        code = EXIT_FAILED if strict and not report.passed else EXIT_OK
        verdict = "pass" if report.passed else "fail"
        return Outcome(code, "".join(out), f"{report.name}: {verdict} (lhs={report.lhs:.6g}, rhs={report.rhs:.6g})\n")
    model = build_model(p, tol)
    if command == "model build":
        _emit(eigenvalues_csv(model), p["out"], out)
    elif command == "model export":
        _emit(export_model(model), p["out"], out)
    else:
        c = _test_function(model, p)
        top = float(model.eigenvalues[-1])
        if command == "expand":
            _emit(coefficients_csv(c), p["out"], out)
        elif command == "partial-sum":
            _emit(synthesis_csv(partial_sum(c, top if p["R"] is None else p["R"])), p["out"], out)
        elif command == "maximal":
            _emit(synthesis_csv(maximal_function(c, top if p["rmax"] is None else p["rmax"])), p["out"], out)
    return Outcome(EXIT_OK, "".join(out))


def _guarded(fn):
    try:
        return fn()
    except (ConfigurationError, StructuralError, DomainError) as exc:
        return Outcome(EXIT_CONFIG, stderr=f"configuration error: {exc}\n")
    except NumericalError as exc:
        return Outcome(EXIT_NUMERICAL, stderr=f"numerical error: {exc}\n")
    except FloatingPointError as exc:
        return Outcome(EXIT_NUMERICAL, stderr=f"numerical error: {exc}\n")
    except OSError as exc:
        return Outcome(EXIT_CONFIG, stderr=f"i/o error: {exc}\n")


def _dry_run_text(command, p, overrides):
    body = {"command": command, "params": p, "tolerance_overrides": overrides}
    return json.dumps(body, indent=2, sort_keys=True, default=str) + "\n"


def run_entry(config_path, strict=False):
    """Execute one manifest entry; its config must name the command."""

    def go():
        entries = read_config(config_path)
        if "command" not in entries:
            raise ConfigurationError(f"{config_path}: manifest entries need a 'command' key")
        command = " ".join(entries["command"].split())
        if command not in COMMANDS or command == "suite":
            raise ConfigurationError(f"{config_path}: unknown command {command!r}")
        base = Path(config_path).parent
        for key in ("out", "csv"):
            if key in entries and not Path(entries[key]).is_absolute():
                entries[key] = str(base / entries[key])
        p, tol, overrides = resolve(command, entries)
        p.setdefault("workers", 1)
        return execute(command, p, tol, overrides, strict, argv=[str(config_path)])

    return _guarded(go)


def run_suite(manifest, workers=1, strict=False):
    try:
        text = Path(manifest).read_text()
    except OSError as exc:
        return [Outcome(EXIT_CONFIG, stderr=f"cannot read manifest {manifest}: {exc}\n")]
    base = Path(manifest).parent
    paths = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            paths.append(Path(line) if Path(line).is_absolute() else base / line)
    if not paths:
        return [Outcome(EXIT_CONFIG, stderr=f"manifest {manifest} lists no configs\n")]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(lambda q: run_entry(q, strict), paths))


# -- argument parsing --------------------------------------------------------------


def _flag(key):
    return "--" + key.replace("_", "-")


def _add_leaf(subparsers, name, command, help_text):
    sp = subparsers.add_parser(name, help=help_text, argument_default=argparse.SUPPRESS)
    for key in COMMANDS[command]:
        param = PARAMS[key]
        default = COMMAND_DEFAULTS.get(command, {}).get(key, param.default)
        sp.add_argument(_flag(key), dest=key, metavar=key.upper(), help=f"{param.help} [default: {default}]")
    sp.add_argument("--config", help="key = value file; command-line flags take precedence")
    sp.add_argument("--tol", action="append", metavar="NAME=VALUE", help="tolerance override (repeatable)")
    sp.add_argument("--dry-run", action="store_true", help="validate and print the resolved parameters")
    if command.startswith("check ") or command == "suite":
        sp.add_argument("--strict", action="store_true", help="exit 1 when a check does not pass")
    sp.set_defaults(command=command)
    return sp


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spectral-sums", description="Spectral partial sums, maximal functions and inequality checks."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    top = parser.add_subparsers(dest="group", required=True)

    model = top.add_parser("model", help="build or export a spectral model")
    model_sub = model.add_subparsers(dest="action", required=True)
    _add_leaf(model_sub, "build", "model build", "eigenvalue table (k, lambda, multiplicity)")
    _add_leaf(model_sub, "export", "model export", "full text export of grid, eigenvalues and eigenfunctions")

    _add_leaf(top, "expand", "expand", "eigenfunction coefficients of a test function")
    _add_leaf(top, "partial-sum", "partial-sum", "S_R(L)f on the grid (x, value)")
    _add_leaf(top, "maximal", "maximal", "sup_R |S_R(L)f| on the grid (x, value)")

    check = top.add_parser("check", help="run one inequality check")
    check_sub = check.add_subparsers(dest="check", required=True)
    for command in COMMANDS:
        if command.startswith("check "):
            name = command.split(" ", 1)[1]
            _add_leaf(check_sub, name, command, f"{name} check")

    _add_leaf(top, "suite", "suite", "run every config listed in a manifest")
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    for key in ("group", "action", "check"):
        args.pop(key, None)
    config_path = args.pop("config", None)
    tol_items = args.pop("tol", None) or []
    dry_run = args.pop("dry_run", False)
    strict = args.pop("strict", False)

    def go():
        config = read_config(config_path) if config_path else {}
        p, tol, overrides = resolve(command, config, args, tol_items)
        if dry_run:
            return Outcome(EXIT_OK, _dry_run_text(command, p, overrides))
        if command == "suite":
            if not p["manifest"]:
                raise ConfigurationError("suite needs --manifest")
            results = run_suite(p["manifest"], p["workers"], strict)
            return Outcome(
                max(r.code for r in results),
                "".join(r.stdout for r in results),
                "".join(r.stderr for r in results),
            )
        return execute(command, p, tol, overrides, strict, argv)

    outcome = _guarded(go)
    sys.stdout.write(outcome.stdout)
    sys.stderr.write(outcome.stderr)
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
