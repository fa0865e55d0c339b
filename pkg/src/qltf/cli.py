"""Command-line interface.

Exit codes: 0 ok, 1 oracle disagreement, 2 usage or input error,
3 numerical failure (blow-up, pole), 4 comparison threshold exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .discrete import dqltf, load_kernel, load_signal
from .freq_range import (
    Band,
    band_endpoints,
    band_output_range,
    band_output_range_nonneg,
    brute_force_multitone_freqs,
    extremal_tuple,
    multitone_output_freqs,
)
from .gfrf import DuffingParams, PoleError, duffing_kernel
from .multitone import compare_fingerprints, qltf
from .simulator import (
    BlowUpError,
    SimConfig,
    export_phase_portrait,
    phase_portrait_to_csv,
    simulate_duffing,
    trajectory_to_csv,
)
from .spectral_core import DEFAULT_REL_TOL, MultitoneSignal, Tone
from .tables import compare_to_csv, compare_to_json, dqltf_to_csv, dqltf_to_json, qltf_to_csv, qltf_to_json, read_qltf_table

EXIT_OK, EXIT_ORACLE, EXIT_USAGE, EXIT_NUMERIC, EXIT_THRESHOLD = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def warn(msg: str) -> None:
    print(f"warn: {msg}", file=sys.stderr)


def parse_tones(spec, rel_tol: float = DEFAULT_REL_TOL) -> MultitoneSignal | None:
    """Parse ``mag@freq[:phase_deg]`` items (comma separated) or a list of dicts.

    Returns None for an empty tone list.
    """
    if spec is None:
        raise UsageError("--tones is required")
    items = []
    if isinstance(spec, str):
        for part in (p.strip() for p in spec.split(",")):
            if not part:
                continue
            try:
                mag, rest = part.split("@", 1)
                freq, _, ph = rest.partition(":")
                items.append((float(mag), float(freq), float(ph) if ph else 0.0))
            except ValueError:
                raise UsageError(f"cannot parse tone {part!r}; expected mag@freq:phase_deg") from None
    else:
        try:
            for d in spec:
                items.append((float(d["mag"]), float(d["freq"]), float(d.get("phase_deg", 0.0))))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad tone entry in config: {exc}") from None
    if not items:
        return None
    items.sort(key=lambda t: t[1])
    try:
        return MultitoneSignal(tuple(Tone(m, math.radians(p), f) for m, f, p in items), rel_tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse_float_list(spec: str) -> list[float]:
    try:
        return [float(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse number list {spec!r}") from None


def rel_tol_from_env() -> float:
    raw = os.environ.get("QLTF_FREQ_TOL")
    if raw is None:
        return DEFAULT_REL_TOL
    try:
        val = float(raw)
    except ValueError:
        raise UsageError(f"QLTF_FREQ_TOL={raw!r} is not a number") from None
    if not val > 0:
        raise UsageError("QLTF_FREQ_TOL must be positive")
    return val


def _apply_config(args) -> None:
    path = getattr(args, "config", None)
    if not path:
        return
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError("config must be a JSON object")
    for key, val in doc.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise UsageError(f"unknown config field {key!r}")
        if getattr(args, attr) is None:
            setattr(args, attr, val)


def _duffing_params(args) -> DuffingParams:
    missing = [k for k in ("wn", "zeta") if getattr(args, k) is None]
    if missing:
        raise UsageError("duffing model needs " + ", ".join(f"--{k}" for k in missing))
    try:
        return DuffingParams(float(args.wn), float(args.zeta), float(args.eps2 or 0.0), float(args.eps3 or 0.0))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _add_duffing(p) -> None:
    p.add_argument("--wn", type=float, help="natural frequency (rad/s)")
    p.add_argument("--zeta", type=float, help="damping ratio")
    p.add_argument("--eps2", type=float, help="quadratic stiffness ratio")
    p.add_argument("--eps3", type=float, help="cubic stiffness ratio")


def _add_output(p) -> None:
    p.add_argument("--output", "-o", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--precision", type=int, default=6, help="significant digits")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qltf", description="Quasi-linear transfer functions of Volterra systems.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qltf", help="multitone QLTF table")
    p.add_argument("--model", choices=("duffing", "kernel-file"), default=None)
    _add_duffing(p)
    p.add_argument("--kernel", help="kernel document for --model kernel-file")
    p.add_argument("--sample-interval", type=float, default=None, help="kernel sample interval T (default 1)")
    p.add_argument("--tones", help="comma list of mag@freq:phase_deg")
    p.add_argument("--order", type=int)
    p.add_argument("--tau", type=float, default=None, help="cancellation threshold relative to max|U_n|")
    p.add_argument("--config", help="JSON file supplying any of the above fields")
    _add_output(p)
    p.set_defaults(func=cmd_qltf)

    p = sub.add_parser("range", help="output frequency ranges")
    rsub = p.add_subparsers(dest="kind", required=True)
    b = rsub.add_parser("band", help="band-limited input a <= |w| <= b")
    b.add_argument("--a", type=float, required=True)
    b.add_argument("--b", type=float, required=True)
    b.add_argument("--order", type=int, required=True)
    b.add_argument("--nonneg", action="store_true", help="non-negative range only")
    b.add_argument("--paper-literal-62", action="store_true", help="non-negative range with the k=0..n-1 index range as printed")
    b.add_argument("--oracle", action="store_true", help="check by random sampling and extremal tuples")
    b.add_argument("--samples", type=int, default=10_000)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_range)
    t = rsub.add_parser("tones", help="multitone input")
    t.add_argument("--freqs", required=True, help="comma list of positive tone frequencies")
    t.add_argument("--order", type=int, required=True)
    t.add_argument("--full", action="store_true", help="include negative frequencies")
    t.add_argument("--oracle", action="store_true", help="cross-check against brute-force enumeration")
    t.set_defaults(func=cmd_range)

    p = sub.add_parser("simulate", help="RK4 simulation of the oscillator")
    p.add_argument("--model", choices=("duffing",), default="duffing")
    _add_duffing(p)
    p.add_argument("--tones", help="comma list of mag@freq:phase_deg (empty for no forcing)")
    p.add_argument("--t0", type=float)
    p.add_argument("--t1", type=float)
    p.add_argument("--h", type=float)
    p.add_argument("--y0", type=float)
    p.add_argument("--v0", type=float)
    p.add_argument("--phase-portrait", help="also write (y, v) pairs to this file")
    p.add_argument("--skip", type=float, default=0.0, help="fraction of leading rows dropped from the phase portrait")
    p.add_argument("--config", help="JSON file supplying any of the above fields")
    p.add_argument("--output", "-o")
    p.add_argument("--precision", type=int, default=10)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("discrete", help="discrete-time QLTF from a sampled input")
    p.add_argument("--input", help="single-column CSV with a sample_interval=T header")
    p.add_argument("--order", type=int)
    p.add_argument("--kernel", help="kernel document")
    p.add_argument("--model", choices=("duffing",), default=None)
    _add_duffing(p)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--analysis-freqs", help="tone frequencies (rad/s) to check for bin alignment")
    p.add_argument("--config", help="JSON file supplying any of the above fields")
    _add_output(p)
    p.set_defaults(func=cmd_discrete)

    p = sub.add_parser("compare", help="compare two QLTF tables")
    p.add_argument("baseline")
    p.add_argument("probe")
    p.add_argument("--threshold", type=float, help="max allowed |mag_ratio - 1|")
    p.add_argument("--phase-threshold", type=float, help="max allowed |phase delta| in degrees")
    _add_output(p)
    p.set_defaults(func=cmd_compare)
    return parser


def cmd_qltf(args) -> int:
    _apply_config(args)
    rel_tol = rel_tol_from_env()
    if args.order is None:
        raise UsageError("--order is required")
    if args.order < 1:
        raise UsageError("--order must be >= 1")
    signal = parse_tones(args.tones, rel_tol)
    if signal is None:
        raise UsageError("at least one tone is required")
    model = args.model or ("kernel-file" if args.kernel else "duffing")
    if model == "duffing":
        if args.order > 3:
            raise UsageError("closed-form oscillator GFRFs exist for orders 1-3")
        h = duffing_kernel(_duffing_params(args), args.order)
    else:
        if not args.kernel:
            raise UsageError("--model kernel-file needs --kernel")
        kern = load_kernel(args.kernel)
        if kern.order != args.order:
            raise UsageError(f"kernel file has order {kern.order}, --order is {args.order}")
        h = kern.transfer_function(args.sample_interval or 1.0)
    table = qltf(signal, h) if args.tau is None else qltf(signal, h, args.tau)
    for d in table.diagnostics:
        warn(d)
    text = qltf_to_csv(table, args.precision) if args.format == "csv" else qltf_to_json(table, args.precision)
    _emit(text, args.output)
    return EXIT_OK


def _fmt_num(x: float) -> str:
    s = f"{x:.10g}"
    return "0" if s == "-0" else s


def cmd_range(args) -> int:
    rel_tol = rel_tol_from_env()
    if args.order < 1:
        raise UsageError("--order must be >= 1")
    if args.kind == "band":
        band = Band(args.a, args.b)
        if args.paper_literal_62:
            result = band_output_range_nonneg(band, args.order, paper_literal=True)
        elif args.nonneg:
            result = band_output_range_nonneg(band, args.order)
        else:
            result = band_output_range(band, args.order)
        for lo, hi in result:
            print(f"{_fmt_num(lo)},{_fmt_num(hi)}")
        if args.oracle:
            return _band_oracle(band, args.order, result, args.nonneg or args.paper_literal_62, args.samples, args.seed)
        return EXIT_OK

    W = sorted(parse_float_list(args.freqs))
    fs = multitone_output_freqs(W, args.order, rel_tol)
    if args.full:
        fs = fs.mirrored()
    for v in fs:
        print(_fmt_num(v))
    if args.oracle:
        bf = brute_force_multitone_freqs(W, args.order, rel_tol)
        if args.full:
            bf = bf.mirrored()
        if bf == fs:
            print(f"oracle: agree ({len(fs)} frequencies)", file=sys.stderr)
            return EXIT_OK
        print(f"error: oracle disagreement: recursion {list(fs)} vs brute force {list(bf)}", file=sys.stderr)
        return EXIT_ORACLE
    return EXIT_OK


def _band_oracle(band: Band, n: int, result, nonneg: bool, samples: int, seed: int) -> int:
    rng = np.random.default_rng(seed)
    mags = rng.uniform(band.a, band.b, size=(samples, n))
    signs = rng.choice([-1.0, 1.0], size=(samples, n))
    sums = (mags * signs).sum(axis=1)
    if nonneg:
        sums = sums[sums >= 0]
    atol = 1e-9 * max(1.0, n * band.b)
    inside = result.contains_all(sums, atol)
    endpoints_ok = True
    full = band_output_range(band, n)
    for k, (lo, hi) in enumerate(band_endpoints(band, n)):
        for upper, target in ((False, lo), (True, hi)):
            s = sum(extremal_tuple(band, n, k, upper))
            if abs(s - target) > atol or not full.contains(s, atol):
                endpoints_ok = False
    ok = bool(inside.all()) and endpoints_ok
    status = "agree" if ok else "disagree"
    print(f"oracle: {status} ({int(inside.sum())}/{len(sums)} sampled sums inside; extremal endpoints {'ok' if endpoints_ok else 'FAILED'})", file=sys.stderr)
    return EXIT_OK if ok else EXIT_ORACLE


def cmd_simulate(args) -> int:
    _apply_config(args)
    rel_tol = rel_tol_from_env()
    dp = _duffing_params(args)
    forcing = parse_tones(args.tones if args.tones is not None else "", rel_tol)
    try:
        cfg = SimConfig(
            float(0.0 if args.t0 is None else args.t0),
            float(10.0 if args.t1 is None else args.t1),
            float(0.005 if args.h is None else args.h),
            float(args.y0 or 0.0),
            float(args.v0 or 0.0),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    tr = simulate_duffing(dp, forcing, cfg)
    _emit(trajectory_to_csv(tr, args.precision), args.output)
    if args.phase_portrait:
        pp = export_phase_portrait(tr, args.skip)
        Path(args.phase_portrait).write_text(phase_portrait_to_csv(pp, args.precision))
    return EXIT_OK


def cmd_discrete(args) -> int:
    _apply_config(args)
    if not args.input:
        raise UsageError("--input is required")
    if args.order is None:
        raise UsageError("--order is required")
    u = load_signal(args.input)
    if args.kernel:
        h = load_kernel(args.kernel)
        if h.order != args.order:
            raise UsageError(f"kernel file has order {h.order}, --order is {args.order}")
    elif (args.model or "duffing") == "duffing" and args.wn is not None:
        if not 1 <= args.order <= 3:
            raise UsageError("closed-form oscillator GFRFs exist for orders 1-3")
        h = duffing_kernel(_duffing_params(args), args.order)
    else:
        raise UsageError("need --kernel FILE or --model duffing with parameters")
    freqs = parse_float_list(args.analysis_freqs) if args.analysis_freqs else []
    kw = {} if args.tau is None else {"tau": args.tau}
    table = dqltf(h, u, analysis_freqs=freqs, **kw)
    for d in table.diagnostics:
        warn(d)
    text = dqltf_to_csv(table, args.precision) if args.format == "csv" else dqltf_to_json(table, args.precision)
    _emit(text, args.output)
    return EXIT_OK


def cmd_compare(args) -> int:
    base = read_qltf_table(args.baseline)
    probe = read_qltf_table(args.probe)
    rep = compare_fingerprints(base, probe)
    for w in rep.unmatched:
        warn(f"frequency {w:g} present in only one table")
    text = compare_to_csv(rep, args.precision) if args.format == "csv" else compare_to_json(rep, args.precision)
    _emit(text, args.output)
    exceeded = []
    if args.threshold is not None and rep.max_mag_deviation > args.threshold:
        exceeded.append(f"magnitude deviation {rep.max_mag_deviation:.6g} > {args.threshold:g}")
    if args.phase_threshold is not None and rep.max_phase_deviation_deg > args.phase_threshold:
        exceeded.append(f"phase deviation {rep.max_phase_deviation_deg:.6g} deg > {args.phase_threshold:g} deg")
    if exceeded:
        warn("threshold exceeded: " + "; ".join(exceeded))
        return EXIT_THRESHOLD
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BlowUpError, PoleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
