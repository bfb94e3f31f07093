"""Command-line interface.

Exit codes
----------
0  success
2  malformed input: bad JSON, unknown channel, invalid Kraus data, bad flags
3  a dense object would exceed the dimension cap
4  a checked identity or inequality failed
5  a numerical domain error (e.g. a matrix that should be PSD is not)

Every command writes CSV or JSON to ``--out`` (atomically) or to stdout.
With ``--out`` a sidecar ``<out>.meta.json`` records the command, its
arguments, the seed and the channel descriptions.
"""

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .channel import ChannelSpec, make_builtin, random_channel, stinespring
from .cqsynth import amplitude_channel, environment_channel, holevo, phase_channel
from .errors import NumericDomainError, ResourceLimitError, ValidationError, VerificationError
from .multilevel import LevelRates, MultiQubitChannel, level_rates, multilevel_net_rate, superactivation_check
from .polar import (
    CSV_HEADER,
    FORWARD,
    TRANSPOSED,
    ChannelPartition,
    RateReport,
    UncertaintyReport,
    _direction,
    classify,
    fraction_good,
    rate_report,
    synthesize_all,
    uncertainty_report,
)
from .protosim import ProtocolConfig, run_protocol

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_RESOURCE = 3
EXIT_VERIFY = 4
EXIT_NUMERIC = 5

COMMANDS = ("synth", "classify", "rates", "uncertainty", "simulate", "multilevel", "plot-data")
CLASSIFY_HEADER = ("N", "beta", "i", "role", "good_amp", "good_phase")
PLOT_HEADER = ("N", "basis", "fraction_good", "holevo_W")
SPEC_KEYS = {"name", "params", "kraus", "shape", "in_dim", "out_dim"}


class SpecError(ValidationError):
    """A channel spec file could not be parsed; carries a file position."""

    def __init__(self, path, message, line=None, col=None):
        self.path, self.line, self.col = path, line, col
        where = f"{path}"
        if line is not None:
            where += f":{line}:{col or 1}"
        super().__init__(f"{where}: {message}")


def _line_of(text, key):
    """1-based (line, column) of the first occurrence of ``"key"`` in ``text``."""
    pos = text.find(f'"{key}"')
    if pos < 0:
        return 1, 1
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


def _complex_entry(x):
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    raise ValueError(f"matrix entry {x!r} is neither a number nor a [re, im] pair")


def _parse_matrix(obj, shape):
    if shape is not None:
        flat = [_complex_entry(x) for x in obj]
        rows, cols = shape
        if len(flat) != rows * cols:
            raise ValueError(f"flat Kraus operator has {len(flat)} entries, shape needs {rows * cols}")
        return np.array(flat, dtype=complex).reshape(rows, cols)
    if not obj or not all(isinstance(r, list) for r in obj):
        raise ValueError("Kraus operator must be a list of rows")
    mat = [[_complex_entry(x) for x in row] for row in obj]
    if len({len(r) for r in mat}) != 1:
        raise ValueError("Kraus operator rows differ in length")
    return np.array(mat, dtype=complex)


def parse_channel_spec(path):
    """Read a channel spec JSON file.

    Accepted forms::

        {"name": "amplitude_damping", "params": {"gamma": 0.25}}
        {"kraus": [[[1, 0], [0, 0.8]], [[0, 0.6], [0, 0]]]}
        {"kraus": [[[1,0],[0,0],[0,0],[0.8,0]], ...], "in_dim": 2, "out_dim": 2}

    Entries are real numbers or ``[re, im]`` pairs. When ``in_dim`` and
    ``out_dim`` (or ``shape`` = ``[out_dim, in_dim]``) are present, each
    operator is a flat row-major list; otherwise it is a list of rows.
    A ``random`` channel (``params`` ``in_dim``, ``out_dim``, ``env_dim``)
    is drawn from the command's seed.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(path, f"cannot read file: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(path, exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise SpecError(path, "top level must be a JSON object", 1, 1)
    extra = set(data) - SPEC_KEYS
    if extra:
        key = sorted(extra)[0]
        raise SpecError(path, f"unknown key {key!r}", *_line_of(text, key))
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise SpecError(path, "params must be an object", *_line_of(text, "params"))

    if "kraus" in data:
        shape = data.get("shape")
        if shape is None and ("in_dim" in data or "out_dim" in data):
            shape = [data.get("out_dim"), data.get("in_dim")]
        try:
            if shape is not None and (not isinstance(shape, list) or len(shape) != 2):
                raise ValueError("shape must be [rows, cols]")
            if shape is not None and not all(
                    isinstance(v, int) and not isinstance(v, bool) and v > 0 for v in shape):
                raise ValueError("in_dim and out_dim must both be positive integers")
            if not isinstance(data["kraus"], list) or not data["kraus"]:
                raise ValueError("kraus must be a non-empty list")
            kraus = tuple(_parse_matrix(k, shape) for k in data["kraus"])
            stinespring(kraus)
        except (ValueError, TypeError) as exc:
            raise SpecError(path, str(exc), *_line_of(text, "kraus")) from None
        return ChannelSpec(name=data.get("name", "custom"), params=params, kraus=kraus)

    if "name" not in data:
        raise SpecError(path, "spec needs either 'name' or 'kraus'", 1, 1)
    spec = ChannelSpec(name=data["name"], params=params)
    if spec.name != "random":
        try:
            make_builtin(spec)
        except (ValueError, TypeError) as exc:
            raise SpecError(path, str(exc), *_line_of(text, "name")) from None
    return spec


def build_channel(spec, rng):
    if spec.kraus is None and spec.name == "random":
        p = spec.params
        return random_channel(int(p.get("in_dim", 2)), int(p.get("out_dim", 2)),
                              int(p.get("env_dim", 2)), rng)
    return make_builtin(spec)


@dataclass
class ExperimentConfig:
    command: str
    channels: list
    n_values: list = field(default_factory=lambda: [2])
    beta: float = 0.3
    direction: str = None
    basis: str = "amplitude"
    seed: int = 0
    out: str = None
    average_frozen: bool = False
    cap_dim: int = None
    povm: str = "helstrom"
    partition: dict = None

    def __post_init__(self):
        if not 0.0 < self.beta < 0.5:
            raise ValueError(f"beta must lie in (0, 0.5), got {self.beta}")
        for n in self.n_values:
            if n < 1 or n & (n - 1):
                raise ValueError(f"N={n} is not a power of two")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def _n_list(values):
    out = []
    for v in values or ["2"]:
        for tok in str(v).split(","):
            tok = tok.strip()
            if tok:
                out.append(int(tok))
    return out


def _partition_arg(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"partition is not JSON: {exc.msg}") from None
    if not isinstance(data, dict) or set(data) - set("AXZB"):
        raise argparse.ArgumentTypeError('partition must look like {"A": [0], "Z": [1]}')
    return data


def build_parser():
    parser = argparse.ArgumentParser(
        prog="eapolar",
        description="Synthesize, classify and simulate entanglement-assisted quantum polar codes.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--channel", action="append", required=True, metavar="PATH",
                        help="channel spec JSON (repeat for joint multilevel runs)")
    common.add_argument("--n", action="append", metavar="LIST",
                        help="block lengths, comma separated or repeated (default 2)")
    common.add_argument("--beta", type=float, default=0.3, help="goodness exponent in (0, 0.5)")
    common.add_argument("--direction", choices=("fwd", "transposed"),
                        help="synthesis direction (default: transposed for phase, fwd otherwise)")
    common.add_argument("--basis", choices=("amplitude", "phase", "environment"),
                        default="amplitude", help="which cq channel to synthesize")
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    common.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    common.add_argument("--average-frozen", action="store_true",
                        help="average the protocol over all frozen-bit values")
    common.add_argument("--cap-dim", type=int, metavar="N", help="dense dimension cap")
    common.add_argument("--povm", choices=("helstrom", "pgm"), default="helstrom",
                        help="decoder construction for simulate")
    common.add_argument("--partition", type=_partition_arg, metavar="JSON",
                        help="explicit A/X/Z/B sets for simulate instead of classifying")
    helps = {
        "synth": "table of sqrt F and Holevo information per synthesized channel",
        "classify": "A/X/Z/B role of every index",
        "rates": "net and ebit rates against coherent information",
        "uncertainty": "per-index complementarity inequalities (exit 4 on failure)",
        "simulate": "full protocol simulation report (JSON)",
        "multilevel": "level rates of a 2^m-input channel, or a joint superactivation check",
        "plot-data": "fraction of good indices versus N",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _config_from_args(args):
    return ExperimentConfig(
        command=args.command,
        channels=args.channel,
        n_values=_n_list(args.n),
        beta=args.beta,
        direction=args.direction,
        basis=args.basis,
        seed=args.seed,
        out=args.out,
        average_frozen=args.average_frozen,
        cap_dim=args.cap_dim,
        povm=args.povm,
        partition=args.partition,
    )


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def atomic_write(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".eapolar-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cq(ch, basis):
    return {"amplitude": amplitude_channel, "phase": phase_channel,
            "environment": environment_channel}[basis](ch)


def _synth_direction(cfg):
    if cfg.direction is not None:
        return _direction(cfg.direction)
    return TRANSPOSED if cfg.basis == "phase" else FORWARD


def _tables(ch, N):
    return (synthesize_all(amplitude_channel(ch), N, FORWARD),
            synthesize_all(phase_channel(ch), N, TRANSPOSED))


def _cmd_synth(cfg, channels):
    ch = channels[0]
    rows = []
    for N in cfg.n_values:
        rows += synthesize_all(_cq(ch, cfg.basis), N, _synth_direction(cfg)).csv_rows()
    return _csv_text(CSV_HEADER, rows), 0


def _cmd_classify(cfg, channels):
    ch = channels[0]
    rows = []
    for N in cfg.n_values:
        part = classify(*_tables(ch, N), cfg.beta)
        for i in range(N):
            rows.append((N, repr(cfg.beta), i, part.role(i),
                         int(i in part.good_amp), int(i in part.good_phase)))
    return _csv_text(CLASSIFY_HEADER, rows), 0


def _cmd_rates(cfg, channels):
    ch = channels[0]
    rows = [rate_report(classify(*_tables(ch, N), cfg.beta), ch).csv_row() for N in cfg.n_values]
    return _csv_text(RateReport.CSV_HEADER, rows), 0


def _cmd_uncertainty(cfg, channels):
    ch = channels[0]
    rows, ok = [], True
    for N in cfg.n_values:
        rep = uncertainty_report(ch, N, cfg.beta)
        rows += rep.csv_rows()
        ok = ok and rep.all_pass()
    return _csv_text(UncertaintyReport.CSV_HEADER, rows), 0 if ok else EXIT_VERIFY


def _cmd_simulate(cfg, channels):
    ch = channels[0]
    reports = []
    for N in cfg.n_values:
        if cfg.partition is not None:
            part = ChannelPartition.from_sets(N, beta=cfg.beta, **cfg.partition)
        else:
            part = classify(*_tables(ch, N), cfg.beta)
        pc = ProtocolConfig(ch, N, part, average_frozen=cfg.average_frozen,
                            seed=cfg.seed, povm_kind=cfg.povm)
        reports.append(run_protocol(pc).to_dict())
    out = reports[0] if len(reports) == 1 else reports
    return _json_text(out), 0


def _cmd_multilevel(cfg, channels):
    if len(channels) == 1:
        mc = MultiQubitChannel.wrap(channels[0])
        rates = level_rates(mc)
        multilevel_net_rate(mc)
        return _csv_text(LevelRates.CSV_HEADER, rates.csv_rows()), 0
    if len(channels) == 2:
        return _json_text(superactivation_check(*channels).to_dict()), 0
    raise ValueError("multilevel takes one channel, or two for a joint run")


def _cmd_plot_data(cfg, channels):
    ch = channels[0]
    w = _cq(ch, cfg.basis)
    cap = holevo(w)
    rows = []
    for N in cfg.n_values:
        table = synthesize_all(w, N, _synth_direction(cfg))
        rows.append((N, cfg.basis, repr(fraction_good(table, cfg.beta)), repr(cap)))
    return _csv_text(PLOT_HEADER, rows), 0


HANDLERS = {
    "synth": _cmd_synth,
    "classify": _cmd_classify,
    "rates": _cmd_rates,
    "uncertainty": _cmd_uncertainty,
    "simulate": _cmd_simulate,
    "multilevel": _cmd_multilevel,
    "plot-data": _cmd_plot_data,
}


def run_command(cfg):
    """Run one command; returns ``(exit status, output text)``.

    Exceptions propagate so that :func:`main` can map them to exit codes.
    """
    specs = [parse_channel_spec(p) for p in cfg.channels]
    rng = np.random.default_rng(cfg.seed)
    old_cap = linalg.get_dim_cap()
    if cfg.cap_dim is not None:
        linalg.set_dim_cap(cfg.cap_dim)
    try:
        channels = [build_channel(s, rng) for s in specs]
        text, status = HANDLERS[cfg.command](cfg, channels)
    finally:
        linalg.set_dim_cap(old_cap)
    if cfg.out:
        atomic_write(cfg.out, text)
        meta = {
            "command": cfg.command,
            "channels": [c.describe() for c in channels],
            "n": cfg.n_values,
            "beta": cfg.beta,
            "basis": cfg.basis,
            "direction": cfg.direction,
            "seed": cfg.seed,
            "average_frozen": cfg.average_frozen,
            "cap_dim": cfg.cap_dim,
        }
        atomic_write(cfg.out + ".meta.json", _json_text(meta))
    return status, text


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        status, text = run_command(cfg)
    except ResourceLimitError as exc:
        print(f"eapolar: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except VerificationError as exc:
        print(f"eapolar: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except NumericDomainError as exc:
        print(f"eapolar: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError) as exc:
        print(f"eapolar: invalid input: {exc}", file=sys.stderr)
        return EXIT_SPEC
    if not cfg.out:
        sys.stdout.write(text)
    if status == EXIT_VERIFY:
        print("eapolar: one or more checks failed", file=sys.stderr)
    return status
