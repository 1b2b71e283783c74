"""Command-line front end: ``d2dsim {sweep,compare,sinr-stats,trial}``.

Every command writes CSV (or JSON for ``trial``) plus a ``manifest.json``
into ``--out``.  Errors are reported as one line on stderr::

    d2dsim: error: <kind>: <message>
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
import tempfile
from datetime import datetime, timezone

from . import __version__
from .allocators import RicaParams, make_instance
from .config import ScenarioConfig
from .errors import ConfigError, D2DSimError, UsageError
from .harness import run_allocator, run_grid
from .metrics import aggregate_curve, paired_differences, sinr_pdf, skewness
from .netmodel import sinr_cellular, sinr_d2d, sum_rate

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


# -- configuration ------------------------------------------------------------


def _coerce(key: str, raw: str, kind):
    text = raw.strip()
    try:
        if kind in (bool, "bool"):
            if text.lower() in _TRUE:
                return True
            if text.lower() in _FALSE:
                return False
            raise ValueError
        if kind in (int, "int"):
            return int(text)
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}={raw!r} is not a valid {getattr(kind, '__name__', kind)}") from None


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` lines, ``#`` comments.  A ``.json`` path is read as
    a run manifest and its embedded config is used."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json"):
        try:
            data = json.loads(text)["config"]
        except (ValueError, KeyError, TypeError):
            raise ConfigError(f"{path}: not a run manifest with a 'config' object") from None
        return {k: str(v) for k, v in data.items()}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return values


def parse_config(path=None, overrides=None) -> ScenarioConfig:
    """Defaults, then file values, then ``overrides`` (flags win)."""
    types = ScenarioConfig.field_types()
    raw = read_config_file(path) if path else {}
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    values = {}
    for key, value in raw.items():
        if key not in types:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = value if not isinstance(value, str) else _coerce(key, value, types[key])
    return ScenarioConfig(**values)


def format_config(config: ScenarioConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in config.as_dict().items())


def parse_int_list(text: str) -> list:
    """``"3"``, ``"3,4"`` or the inclusive range ``"1..10"``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        try:
            if ".." in part:
                a, b = part.split("..", 1)
                lo, hi = int(a), int(b)
                if hi < lo:
                    raise ValueError
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise UsageError(f"bad integer list or range {text!r}") from None
    if any(v < 0 for v in out):
        raise UsageError(f"negative value in {text!r}")
    return out


# -- output -------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: list, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    write_atomic(path, buf.getvalue())


def write_manifest(out_dir, config, subcommand, arguments, outputs) -> str:
    path = os.path.join(out_dir, "manifest.json")
    manifest = {
        "tool": "d2dsim",
        "version": __version__,
        "subcommand": subcommand,
        "config": config.as_dict(),
        "arguments": arguments,
        "outputs": sorted(os.path.basename(p) for p in outputs),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    write_atomic(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


# -- commands -----------------------------------------------------------------


def _setup(args):
    overrides = {"seed": args.seed}
    cellular = parse_int_list(args.cellular) if args.cellular else None
    d2d = parse_int_list(args.d2d) if args.d2d else None
    if cellular:
        overrides["num_cellular"] = cellular[0]
    if d2d:
        overrides["num_d2d"] = d2d[0]
    config = parse_config(args.config, overrides)
    params = RicaParams(price_step=args.price_step, package_cap=args.package_cap)
    allocators = [a.strip() for a in args.allocators.split(",") if a.strip()]
    os.makedirs(args.out, exist_ok=True)
    return (
        config,
        params,
        allocators,
        cellular or [config.num_cellular],
        d2d or [config.num_d2d],
    )


def _arguments(args, allocators, cellular, d2d) -> dict:
    return {
        "allocators": allocators,
        "cellular": cellular,
        "d2d": d2d,
        "trials": args.trials,
        "price_step": args.price_step,
        "package_cap": args.package_cap,
    }


def _curve_rows(result, allocators, cellular):
    for i, name in enumerate(allocators):
        for c in cellular:
            for p in aggregate_curve(result.series(i), name, num_cellular=c):
                yield [name, c, p.x, p.mean_sum_rate, p.std_err, p.n_trials]


CURVE_HEADER = ["allocator", "num_cellular", "num_d2d", "mean_sum_rate", "std_err", "n_trials"]


def cmd_sweep(args) -> int:
    config, params, allocators, cellular, d2d = _setup(args)
    result = run_grid(config, allocators, cellular, d2d, args.trials, config.seed, params)
    path = os.path.join(args.out, "sweep.csv")
    write_csv(path, CURVE_HEADER, _curve_rows(result, allocators, cellular))
    write_manifest(args.out, config, "sweep", _arguments(args, allocators, cellular, d2d), [path])
    return 0


def cmd_compare(args) -> int:
    config, params, allocators, cellular, d2d = _setup(args)
    result = run_grid(config, allocators, cellular, d2d, args.trials, config.seed, params)
    curves = os.path.join(args.out, "compare.csv")
    write_csv(curves, CURVE_HEADER, _curve_rows(result, allocators, cellular))
    rows = []
    for i, first in enumerate(allocators):
        for second in allocators[i + 1 :]:
            for p in paired_differences(result, first, second):
                rows.append(
                    [first, second, p.num_cellular, p.num_d2d, p.mean_diff, p.std_err, p.n_trials]
                )
    summary = os.path.join(args.out, "compare_summary.csv")
    header = ["allocator_a", "allocator_b", "num_cellular", "num_d2d", "mean_diff", "std_err",
              "n_trials"]
    write_csv(summary, header, rows)
    write_manifest(
        args.out, config, "compare", _arguments(args, allocators, cellular, d2d),
        [curves, summary],
    )
    return 0


def cmd_sinr_stats(args) -> int:
    config, params, allocators, cellular, d2d = _setup(args)
    if args.trials < 2:
        raise UsageError(f"trials={args.trials} violates trials >= 2")
    if len(allocators) != 1 or len(cellular) != 1 or len(d2d) != 1:
        raise UsageError("sinr-stats takes exactly one allocator, one --cellular and one --d2d")
    result = run_grid(config, allocators, cellular, d2d, args.trials, config.seed, params)
    samples = [t.ue1_sinr_db for t in result.trials]
    pdf = sinr_pdf(samples, args.bins)
    outputs = [os.path.join(args.out, "ue1_sinr_pdf.csv"),
               os.path.join(args.out, "ue1_sinr_summary.csv")]
    write_csv(
        outputs[0],
        ["bin_left_db", "bin_right_db", "density"],
        (
            [float(a), float(b), float(p)]
            for a, b, p in zip(pdf.bin_edges[:-1], pdf.bin_edges[1:], pdf.densities)
        ),
    )
    x = [float(v) for v in samples]
    mean = math.fsum(x) / len(x)
    std = math.sqrt(math.fsum((v - mean) ** 2 for v in x) / (len(x) - 1))
    try:
        skew = skewness(x)
    except D2DSimError:
        skew = float("nan")
    write_csv(outputs[1], ["n", "mean_db", "std_db", "skewness"], [[len(x), mean, std, skew]])
    if args.dump_raw:
        outputs.append(os.path.join(args.out, "ue1_sinr_raw.csv"))
        write_csv(outputs[-1], ["seed", "ue1_sinr_db"], ([t.seed, t.ue1_sinr_db] for t in result.trials))
    arguments = _arguments(args, allocators, cellular, d2d)
    arguments["bins"] = args.bins
    write_manifest(args.out, config, "sinr-stats", arguments, outputs)
    return 0


def cmd_trial(args) -> int:
    """Dump one drop: positions, gain matrix, and each allocator's result and trace."""
    config, params, allocators, _, _ = _setup(args)
    inst = make_instance(config, config.seed)
    g, pw = inst.gains, inst.powers
    runs = {}
    for name in allocators:
        alloc, revenue, outcome = run_allocator(name, inst, config.seed, params)
        runs[name] = {
            "allocation": list(alloc.resources),
            "revenue": revenue,
            "sum_rate": sum_rate(alloc, g, pw),
            "sinr_cellular": [sinr_cellular(i, alloc, g, pw) for i in range(g.num_cellular)],
            "sinr_d2d": [sinr_d2d(d, alloc, g, pw) for d in range(g.num_d2d)],
            "rounds": [dataclasses.asdict(r) for r in outcome.rounds] if outcome else [],
        }
    topo = inst.topology
    dump = {
        "config": config.as_dict(),
        "topology": {
            "bs": topo.bs_pos.tolist(),
            "cellular": topo.cellular_pos.tolist(),
            "d2d_tx": topo.d2d_tx_pos.tolist(),
            "d2d_rx": topo.d2d_rx_pos.tolist(),
        },
        "gains": g.matrix.tolist(),
        "powers": dataclasses.asdict(pw),
        "allocators": runs,
    }
    path = os.path.join(args.out, "trial.json")
    write_atomic(path, json.dumps(dump, indent=1) + "\n")
    write_manifest(args.out, config, "trial", {"allocators": allocators,
                                               "price_step": args.price_step,
                                               "package_cap": args.package_cap}, [path])
    return 0


# -- parser -------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(p: argparse.ArgumentParser, allocators: str, trials: int) -> None:
    p.add_argument("--config", help="key = value config file, or a run manifest (.json)")
    p.add_argument("--seed", type=int, help="base seed; trial k uses seed + k")
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--cellular", help="number of cellular UEs: N or list")
    p.add_argument("--d2d", help="number of D2D pairs: N, list, or range a..b")
    p.add_argument("--allocators", default=allocators)
    p.add_argument("--out", default=".")
    p.add_argument("--price-step", type=float, default=RicaParams.price_step)
    p.add_argument("--package-cap", type=int, default=RicaParams.package_cap)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="d2dsim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"d2dsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sweep", help="mean sum rate vs. D2D count")
    _add_common(p, "new-auction", 50)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="paired allocator comparison")
    _add_common(p, "new-auction,rica", 50)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sinr-stats", help="UE1 SINR distribution")
    _add_common(p, "new-auction", 500)
    p.add_argument("--bins", type=int, default=30)
    p.add_argument("--dump-raw", action="store_true")
    p.set_defaults(func=cmd_sinr_stats)

    p = sub.add_parser("trial", help="single-drop debug dump")
    _add_common(p, "random,rica,new-auction", 1)
    p.set_defaults(func=cmd_trial)
    return parser


def _one_line(exc) -> str:
    return " ".join(str(exc).split())


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except D2DSimError as exc:
        print(f"d2dsim: error: {exc.kind}: {_one_line(exc)}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"d2dsim: error: io: {_one_line(exc)}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
