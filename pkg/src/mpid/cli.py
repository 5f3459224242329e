"""
``mpid`` command line: ``sweep-rank``, ``sweep-cols``, ``rom`` and ``gen``.

Settings come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines (``#`` starts a comment), then command-line flags.
``MPID_SEED`` supplies the seed when neither file nor flag does.

Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 every cell
of the run failed.
"""

import argparse
import os
import sys

from . import __version__
from .errors import ConfigError, ParseError
from .harness import ExperimentConfig, emit_csv, emit_svg, format_csv, run
from .io import save_matrix
from .synth import dataset_summary, gen_decay_matrix, profile, singular_values

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_ALL_FAILED = 0, 1, 2, 3

COMMANDS = {"sweep-rank": "rank_sweep", "sweep-cols": "coldim_sweep", "rom": "rom"}

# flag name -> (ExperimentConfig field, parser)
_INT_LIST = lambda s: tuple(int(v) for v in str(s).replace(" ", "").split(",") if v)  # noqa: E731
_STR_LIST = lambda s: tuple(v for v in str(s).replace(" ", "").split(",") if v)  # noqa: E731
_BOOL = lambda s: s if isinstance(s, bool) else str(s).strip().lower() in ("1", "true", "yes", "on")  # noqa: E731

KEYS = {
    "dataset": ("dataset", str),
    "variants": ("variants", _STR_LIST),
    "k": ("k_list", _INT_LIST),
    "n": ("n_list", _INT_LIST),
    "baseline": ("baseline", lambda s: {"truth": "truth", "ground_truth": "truth",
                                        "double": "double", "double_id": "double"}.get(s, s)),
    "seed": ("seed", int),
    "seeds": ("seeds", int),
    "pinv-precision": ("pinv_precision", str),
    "summation": ("summation", str),
    "m": ("m", int),
    "cols": ("cols", int),
    "holdout": ("holdout", _INT_LIST),
    "header": ("header", _BOOL),
    "out": ("out", str),
    "svg": ("svg", str),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    parser = _Parser(prog="mpid", description="Mixed-precision interpolative decomposition experiments.")
    parser.add_argument("--version", action="version", version=f"mpid {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "sweep-rank": "relative spectral error versus target rank",
        "sweep-cols": "relative spectral error versus column dimension",
        "rom": "reduced-order model: held-out column mean squared errors",
        "gen": "generate a synthetic decay matrix and print its characteristics",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--config", help="file of 'key = value' settings")
        p.add_argument("--dataset", help="slow, medium, fast or file:PATH")
        p.add_argument("--seed", help="base random seed (default: $MPID_SEED or 0)")
        p.add_argument("--m", help="rows of a synthetic matrix (default 1000)")
        p.add_argument("--cols", help="columns of a synthetic matrix (default 1000)")
        p.add_argument("--out", help="output path (CSV for experiments; .csv or raw matrix for gen)")
        if name == "gen":
            continue
        p.add_argument("--variants", help="comma list of double,single,half,mixed_single,mixed_half")
        p.add_argument("--k", help="comma list of target ranks")
        p.add_argument("--n", help="comma list of column dimensions (sweep-cols)")
        p.add_argument("--baseline", help="double or truth")
        p.add_argument("--seeds", help="number of consecutive seeds (default 1)")
        p.add_argument("--pinv-precision", dest="pinv_precision", help="double or ctx")
        p.add_argument("--summation", help="compensated or plain sums in the low precision kernels")
        p.add_argument("--holdout", help="comma list of 0-based held-out columns (rom)")
        p.add_argument("--header", action="store_const", const="true",
                       help="skip the first line of a CSV data file")
        p.add_argument("--svg", help="also write a log-scale line chart")
    return parser


def read_config(path):
    """Parse a flat ``key = value`` file into a dict of raw strings."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("_", "-")
            if key not in KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def make_config(command, args, environ=None):
    """Merge defaults, config file, environment seed and flags."""
    environ = os.environ if environ is None else environ
    raw = {}
    if "MPID_SEED" in environ:
        raw["seed"] = environ["MPID_SEED"]
    if getattr(args, "config", None):
        try:
            raw.update(read_config(args.config))
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    for key in KEYS:
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            raw[key] = value
    fields = {}
    for key, value in raw.items():
        name, convert = KEYS[key]
        try:
            fields[name] = convert(value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r}") from exc
    experiment = COMMANDS.get(command, "rank_sweep")
    if experiment == "coldim_sweep" and "k_list" not in fields:
        fields["k_list"] = (20,)
    if experiment == "rom":
        fields.setdefault("k_list", (10, 20, 40))
    return ExperimentConfig(experiment=experiment, **fields)


def _gen(cfg, out):
    prof = profile(cfg.dataset, m=cfg.m, n=cfg.cols, seed=cfg.seed)
    A = gen_decay_matrix(prof)
    summary = dataset_summary(A, singular_values(prof))
    out.write(f"dataset {prof.name}  {summary['m']} x {summary['n']}  seed {prof.seed}\n")
    out.write(f"sigma_50/sigma_1  {summary['sigma50_over_sigma1']:.2e}\n")
    out.write(f"sigma_n/sigma_1   {summary['sigman_over_sigma1']:.2e}\n")
    out.write(f"value range       {summary['value_range']:.2e}\n")
    if cfg.out:
        save_matrix(cfg.out, A)


def main(argv=None, out=None, environ=None):
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        cfg = make_config(args.command, args, environ)
        if args.command == "gen":
            if cfg.dataset.startswith("file:"):
                raise ConfigError("gen needs a synthetic dataset")
            cfg.experiment = "rank_sweep"
            cfg.validate()
            _gen(cfg, out)
            return EXIT_OK
        rows = run(cfg)
        if cfg.out:
            emit_csv(rows, cfg.out)
        else:
            out.write(format_csv(rows))
        if cfg.svg:
            emit_svg(rows, cfg.svg, title=f"{cfg.experiment} {cfg.dataset}")
    except ConfigError as exc:
        print(f"mpid: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ParseError) as exc:
        print(f"mpid: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if rows and all(r.status != "ok" for r in rows):
        return EXIT_ALL_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
