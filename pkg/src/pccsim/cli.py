"""Command-line front end: ``pccsim simulate | bounds | plot``.

``simulate`` writes a CSV plus a ``<out>.manifest`` key=value file. Passing
that manifest back through ``--config`` replays the run and reproduces the
CSV byte for byte.
"""

import argparse
import csv
import datetime
import math
import os
import sys

from . import __version__, bounds
from .channel import SnrPoint
from .code import CodeParams
from .decoders import decoder_name
from .errors import CapacityError
from .montecarlo import ERROR, SimulationConfig, run_sweep

WORKERS_ENV = "PCCSIM_WORKERS"

SIM_COLUMNS = [
    "n", "decoder", "gamma_b_db", "gamma_c_linear", "blocks", "bits", "bit_errors",
    "block_errors", "ber_data", "ber_all", "bler", "ci95",
]
BOUND_COLUMNS = ["hard_bound", "soft_bound", "fd_bound_eq12", "fd_bound_components"]
BOUNDS_CSV_COLUMNS = ["n", "gamma_b_db"] + BOUND_COLUMNS + ["p2_bar", "pn_bar"] + [c + "_clamped" for c in BOUND_COLUMNS]

DECODER_LABELS = {"hard": "hard", "flip": "FD", "soft_ml": "soft"}


# --- flag parsing -----------------------------------------------------------

def parse_int_list(text):
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        bad = next(tok for tok in text.split(",") if not tok.strip().lstrip("-").isdigit())
        raise argparse.ArgumentTypeError(f"not an integer: {bad!r}") from None
    if not values:
        raise argparse.ArgumentTypeError(f"empty list: {text!r}")
    return values


def _float(tok):
    try:
        return float(tok)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {tok!r}") from None


def parse_snr_range(text):
    """``start:step:stop`` (inclusive), or a comma list of dB values."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"expected start:step:stop, got {text!r}")
        start, step, stop = (_float(p) for p in parts)
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError(f"empty or reversed range: {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(count)]
    values = [_float(tok) for tok in text.split(",") if tok.strip()]
    if not values:
        raise argparse.ArgumentTypeError(f"empty SNR list: {text!r}")
    return values


def parse_decoders(text):
    out = []
    for tok in text.split(","):
        try:
            out.append(decoder_name(tok.strip()))
        except ValueError:
            raise argparse.ArgumentTypeError(f"unknown decoder: {tok!r}") from None
    return out


def parse_bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _positive_int(text):
    try:
        v = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _seed(text):
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer seed: {text!r}") from None


# key in config file / manifest -> (argparse dest, parser)
CONFIG_KEYS = {
    "n": ("n", parse_int_list),
    "snr_db": ("snr_db", parse_snr_range),
    "decoders": ("decoders", parse_decoders),
    "seed": ("seed", _seed),
    "min_errors": ("min_errors", _positive_int),
    "max_blocks": ("max_blocks", _positive_int),
    "chunk_blocks": ("chunk_blocks", _positive_int),
    "early_stop": ("early_stop", parse_bool),
    "workers": ("workers", _positive_int),
}


def read_config(path):
    """Read a flat key=value file. Blank lines and ``#`` comments are ignored,
    as are keys this tool does not know (manifest metadata)."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, val = (part.strip() for part in line.split("=", 1))
            if key in CONFIG_KEYS:
                dest, parse = CONFIG_KEYS[key]
                try:
                    values[dest] = parse(val)
                except argparse.ArgumentTypeError as exc:
                    raise ValueError(f"{path}:{lineno}: {exc}") from None
    return values


def build_config(args) -> SimulationConfig:
    merged = {}
    if args.config:
        merged.update(read_config(args.config))
    for dest, _ in CONFIG_KEYS.values():
        value = getattr(args, dest, None)
        if value is not None:
            merged[dest] = value
    if "workers" not in merged and os.environ.get(WORKERS_ENV):
        merged["workers"] = _positive_int(os.environ[WORKERS_ENV])
    kwargs = {
        "code_lengths": merged.get("n"),
        "snr_grid_db": merged.get("snr_db"),
        "decoders": merged.get("decoders"),
        "seed": merged.get("seed"),
        "min_bit_errors": merged.get("min_errors"),
        "max_blocks": merged.get("max_blocks"),
        "chunk_blocks": merged.get("chunk_blocks"),
        "early_stop": merged.get("early_stop"),
        "workers": merged.get("workers"),
    }
    return SimulationConfig(**{k: v for k, v in kwargs.items() if v is not None})


# --- output -----------------------------------------------------------------

def fmt(x):
    """Locale-independent shortest round-trip text for a number."""
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_sim_csv(path, result):
    with open(path, "w", encoding="ascii", newline="") as fh:
        w = _writer(fh)
        w.writerow(SIM_COLUMNS)
        for c in result.cells:
            w.writerow([
                c.n, c.decoder, fmt(c.gamma_b_db), fmt(c.gamma_c), c.blocks, c.bits, c.bit_errors,
                c.block_errors, fmt(c.ber), fmt(c.ber_all), fmt(c.bler), fmt(c.ci95_halfwidth),
            ])


def _stamp():
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def write_manifest(path, config, started, finished, result):
    lines = [
        "# pccsim run manifest; replay with: pccsim simulate --config <this file> --out <csv>",
        "tool=pccsim",
        f"version={__version__}",
        "n=" + ",".join(str(n) for n in config.code_lengths),
        "snr_db=" + ",".join(fmt(s) for s in config.snr_grid_db),
        "decoders=" + ",".join(config.decoders),
        f"seed={config.seed}",
        f"min_errors={config.min_bit_errors}",
        f"max_blocks={config.max_blocks}",
        f"chunk_blocks={config.chunk_blocks}",
        f"early_stop={str(config.early_stop).lower()}",
        f"workers={config.workers}",
        f"started={started}",
        f"finished={finished}",
    ]
    for c in result.cells:
        lines.append(f"cell.{c.n}.{c.decoder}.{fmt(c.gamma_b_db)}={c.status}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def bound_row(n, gamma_b_db):
    params = CodeParams(n)
    gc = SnrPoint.for_code(gamma_b_db, params).gamma_c
    vals = {
        "hard_bound": bounds.hard_bound(params, gc),
        "soft_bound": bounds.soft_bound(params, gc),
        "fd_bound_eq12": bounds.fd_bound(params, gc),
        "fd_bound_components": bounds.fd_bound_components(params, gc),
    }
    row = [n, fmt(gamma_b_db)] + [fmt(vals[c]) for c in BOUND_COLUMNS]
    row += [fmt(bounds.p2_bar(params, gc)), fmt(bounds.pn_bar(params, gc))]
    row += [fmt(min(vals[c], 1.0)) for c in BOUND_COLUMNS]
    return row


def write_bounds_csv(path, code_lengths, snr_grid_db):
    rows = [bound_row(n, db) for n in code_lengths for db in snr_grid_db]
    with open(path, "w", encoding="ascii", newline="") as fh:
        w = _writer(fh)
        w.writerow(BOUNDS_CSV_COLUMNS)
        w.writerows(rows)


def plot_script(sim_csv, bounds_csv=None, png=None, ber_min=1e-6):
    """A gnuplot script drawing BER curves from ``sim_csv`` and dashed bounds."""
    with open(sim_csv, encoding="ascii") as fh:
        rows = list(csv.DictReader(fh))
    curves = []
    for r in rows:
        key = (int(r["n"]), r["decoder"])
        if key not in curves:
            curves.append(key)
    png = png or os.path.splitext(sim_csv)[0] + ".png"
    col = SIM_COLUMNS.index("ber_data") + 1
    out = [
        "# gnuplot script generated by pccsim",
        "set terminal pngcairo size 900,900",
        f"set output {_q(png)}",
        'set datafile separator ","',
        "set logscale y",
        "set format y '10^{%L}'",
        f"set yrange [{ber_min:g}:1]",
        "set xlabel 'average SNR per bit (dB)'",
        "set ylabel 'BER'",
        "set grid",
        "set key bottom left",
        "plot \\",
    ]
    items = []
    for i, (n, dec) in enumerate(curves):
        items.append(
            f"  {_q(sim_csv)} skip 1 using 3:(($1=={n} && strcol(2) eq \"{dec}\") ? ${col} : 1/0) "
            f"with linespoints lt {i + 1} dt 1 title '{DECODER_LABELS.get(dec, dec)} n={n}'"
        )
    if bounds_csv is not None:
        if not os.path.exists(bounds_csv):
            raise FileNotFoundError(bounds_csv)
        for n in sorted({n for n, _ in curves}):
            for j, name in enumerate(("hard_bound", "soft_bound", "fd_bound_eq12")):
                c = BOUNDS_CSV_COLUMNS.index(name + "_clamped") + 1
                items.append(
                    f"  {_q(bounds_csv)} skip 1 using 2:(($1=={n}) ? ${c} : 1/0) "
                    f"with lines lt {j + 1} dt 2 title '{name} n={n}'"
                )
    out.append(", \\\n".join(items))
    return "\n".join(out) + "\n"


def _q(path):
    return "'" + path.replace("'", "''") + "'"


# --- commands ---------------------------------------------------------------

def cmd_simulate(args):
    try:
        config = build_config(args)
    except (ValueError, OSError) as exc:
        print(f"pccsim simulate: {exc}", file=sys.stderr)
        return 2
    if not args.out:
        print("pccsim simulate: --out is required", file=sys.stderr)
        return 2
    manifest = args.out + ".manifest"
    for path in (args.out, manifest):
        d = os.path.dirname(os.path.abspath(path))
        if not os.access(d, os.W_OK):
            print(f"pccsim simulate: cannot write {path}", file=sys.stderr)
            return 3

    def progress(cell):
        if not args.quiet:
            print(f"n={cell.n} {cell.decoder} {cell.gamma_b_db:g} dB: {cell.status} "
                  f"blocks={cell.blocks} bit_errors={cell.bit_errors}", file=sys.stderr)

    started = _stamp()
    result = run_sweep(config, progress)
    finished = _stamp()
    write_sim_csv(args.out, result)
    write_manifest(manifest, config, started, finished, result)
    failed = [c for c in result.cells if c.status == ERROR]
    for c in failed:
        print(f"pccsim simulate: n={c.n} {c.decoder} {c.gamma_b_db:g} dB failed: {c.message}", file=sys.stderr)
    return 1 if failed else 0


def cmd_bounds(args):
    try:
        write_bounds_csv(args.out, args.n, args.snr_db)
    except CapacityError as exc:
        print(f"pccsim bounds: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"pccsim bounds: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"pccsim bounds: {exc}", file=sys.stderr)
        return 3
    return 0


def cmd_plot(args):
    try:
        text = plot_script(args.sim, args.bounds, args.png, args.ber_min)
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except FileNotFoundError as exc:
        print(f"pccsim plot: missing file {exc.filename or exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"pccsim plot: {exc}", file=sys.stderr)
        return 3
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="pccsim", description="Parity check codes over Rayleigh fading.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte Carlo BER/BLER sweep")
    sim.add_argument("--config", help="key=value file (a manifest works); flags override it")
    sim.add_argument("--n", type=parse_int_list, help="code lengths, e.g. 2,4,8")
    sim.add_argument("--snr-db", dest="snr_db", type=parse_snr_range, help="start:step:stop in dB of SNR per bit")
    sim.add_argument("--decoders", type=parse_decoders, help="subset of hard,flip,soft")
    sim.add_argument("--seed", type=_seed)
    sim.add_argument("--min-errors", dest="min_errors", type=_positive_int, help="bit errors per cell before stopping")
    sim.add_argument("--max-blocks", dest="max_blocks", type=_positive_int, help="block cap per cell")
    sim.add_argument("--chunk-blocks", dest="chunk_blocks", type=_positive_int, help=argparse.SUPPRESS)
    sim.add_argument("--early-stop", dest="early_stop", type=parse_bool, help="skip cells that cannot reach --min-errors")
    sim.add_argument("--workers", type=_positive_int, help=f"worker threads (default ${WORKERS_ENV} or 1)")
    sim.add_argument("--out", required=True)
    sim.add_argument("--quiet", action="store_true")
    sim.set_defaults(func=cmd_simulate)

    bnd = sub.add_parser("bounds", help="evaluate the analytic bounds")
    bnd.add_argument("--n", type=parse_int_list, default=[2, 4, 8])
    bnd.add_argument("--snr-db", dest="snr_db", type=parse_snr_range, default=parse_snr_range("0:2:40"))
    bnd.add_argument("--out", required=True)
    bnd.set_defaults(func=cmd_bounds)

    plt = sub.add_parser("plot", help="write a gnuplot script for simulation and bound CSVs")
    plt.add_argument("--sim", required=True, help="CSV from 'simulate'")
    plt.add_argument("--bounds", help="CSV from 'bounds'")
    plt.add_argument("--png", help="image the script renders (default: next to the sim CSV)")
    plt.add_argument("--ber-min", dest="ber_min", type=float, default=1e-6)
    plt.add_argument("--out", required=True)
    plt.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
