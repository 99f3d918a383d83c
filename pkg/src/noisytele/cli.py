"""Command-line front end: sweeps, figure data, thresholds and spot checks.

Exit codes: 0 success, 1 invalid arguments, 2 internal consistency failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import warnings
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterator

import numpy as np

from .channels import (
    DIFFERENT_AXIS,
    W_CHANNEL,
    IntegrationWarning,
    NoiseSpec,
    analytic_channel,
    initial_state,
    lindblad_evolve,
    normalize_kind,
)
from .decomp import OutOfDomainError, optimal_ensemble, separable_ensemble, verify_ensemble, wootters_decomposition
from .entanglement import (
    concurrence_mixed,
    entanglement_report,
    eof_from_concurrence,
    groverian_from_concurrence,
    pmax_numeric,
    ppt_min_eigenvalue,
    separability_threshold_kt,
)
from .qstate import matrix_to_json
from .teleport import average_fidelity, average_fidelity_closed_form, classical_threshold_kt

log = logging.getLogger(__name__)


class _StderrHandler(logging.StreamHandler):
    """Writes to whatever ``sys.stderr`` is at emit time."""

    def emit(self, record):
        self.stream = sys.stderr
        super().emit(record)


def _setup_logging():
    pkg = logging.getLogger("noisytele")
    if not any(isinstance(h, _StderrHandler) for h in pkg.handlers):
        h = _StderrHandler()
        h.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
        pkg.addHandler(h)
        pkg.propagate = False
    pkg.setLevel(logging.WARNING)

OUTPUT_FLAGS = ("avg_fidelity", "concurrence", "eof", "groverian", "ppt")
FIDELITY_TOL = 1e-8
RESIDUAL_TOL = 1e-10
CONCURRENCE_TOL = 1e-8


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return format(float(x), ".12g")


def _json_value(x):
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf"
    return float(format(x, ".12g"))


@dataclass(frozen=True)
class SweepConfig:
    noise_kind: str
    kt_min: float = 0.0
    kt_max: float = 1.0
    kt_step: float = 0.01
    outputs: frozenset = field(default_factory=lambda: frozenset(OUTPUT_FLAGS))
    format: str = "csv"
    n_theta: int = 64
    n_phi: int = 64

    def __post_init__(self):
        object.__setattr__(self, "noise_kind", normalize_kind(self.noise_kind))
        if not (self.kt_min >= 0 and self.kt_step > 0 and self.kt_max > self.kt_min):
            raise ValueError("need kt_min >= 0, kt_step > 0 and kt_max > kt_min")
        unknown = set(self.outputs) - set(OUTPUT_FLAGS)
        if unknown:
            raise ValueError(f"unknown outputs: {', '.join(sorted(unknown))}")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        object.__setattr__(self, "outputs", frozenset(self.outputs))

    def kappa_ts(self) -> list[float]:
        n = int(math.floor((self.kt_max - self.kt_min) / self.kt_step + 1e-9)) + 1
        return [round(self.kt_min + i * self.kt_step, 12) for i in range(n)]


@dataclass(frozen=True)
class SweepRow:
    kappa_t: float
    avg_fidelity_quadrature: float | None
    avg_fidelity_closed: float | None
    concurrence: float | None
    eof: float | None
    groverian: float | None
    ppt_min_eig: float | None

    @property
    def consistent(self) -> bool:
        if self.avg_fidelity_quadrature is None:
            return True
        return abs(self.avg_fidelity_quadrature - self.avg_fidelity_closed) <= FIDELITY_TOL


_COLUMN_FLAG = {
    "avg_fidelity_quadrature": "avg_fidelity",
    "avg_fidelity_closed": "avg_fidelity",
    "concurrence": "concurrence",
    "eof": "eof",
    "groverian": "groverian",
    "ppt_min_eig": "ppt",
}


def sweep_columns(outputs) -> list[str]:
    return ["kappa_t"] + [f.name for f in fields(SweepRow)[1:] if _COLUMN_FLAG[f.name] in outputs]


def compute_row(kind: str, kappa_t: float, n_theta: int = 64, n_phi: int = 64) -> SweepRow:
    spec = NoiseSpec(kind, kappa_t)
    closed = average_fidelity_closed_form(spec)
    if spec.kind == W_CHANNEL:
        return SweepRow(spec.kappa_t, None, closed, None, None, None, None)
    rho = analytic_channel(spec)
    c = concurrence_mixed(rho)
    return SweepRow(
        kappa_t=spec.kappa_t,
        avg_fidelity_quadrature=average_fidelity(rho, n_theta, n_phi),
        avg_fidelity_closed=closed,
        concurrence=c,
        eof=eof_from_concurrence(c),
        groverian=groverian_from_concurrence(c),
        ppt_min_eig=ppt_min_eigenvalue(rho),
    )


def run_sweep(config: SweepConfig) -> Iterator[SweepRow]:
    """Rows in ascending ``kappa_t``; deterministic for a given config."""
    if config.noise_kind == W_CHANNEL and config.outputs - {"avg_fidelity"}:
        log.warning(
            "W channel: only avg_fidelity_closed is defined; other columns are null"
        )
    for kt in config.kappa_ts():
        yield compute_row(config.noise_kind, kt, config.n_theta, config.n_phi)


def render_rows(rows, outputs, format: str = "csv") -> str:
    cols = sweep_columns(outputs)
    if format == "json":
        data = [{c: _json_value(getattr(r, c)) for c in cols} for r in rows]
        return json.dumps(data, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([fmt(getattr(r, c)) for c in cols])
    return buf.getvalue()


def _write_curve(path: Path, quantity: str, rows) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kappa_t", quantity])
    for kt, val in rows:
        w.writerow([fmt(kt), fmt(val)])
    try:
        path.write_text(buf.getvalue(), newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def emit_figure_data(
    figure: int,
    directory,
    kt_max: float = 1.0,
    kt_step: float = 0.01,
    n_theta: int = 64,
    n_phi: int = 64,
) -> list[Path]:
    """Write one ``kappa_t,<quantity>`` CSV per plotted curve and return the paths.

    Figure 2: EoF and Groverian for same-axis (x) and isotropic noise.
    Figure 3: average fidelity, concurrence, EoF and Groverian for xz noise.
    Figure 4: closed-form average fidelity of the W channel plus a
    thresholds file holding the classical-fidelity crossing.
    """
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {directory}: {exc}") from exc
    written = []

    if figure == 2:
        for label, kind in (("same_axis", "x"), ("isotropic", "iso")):
            rows = list(run_sweep(SweepConfig(kind, 0.0, kt_max, kt_step, n_theta=n_theta, n_phi=n_phi)))
            for q in ("eof", "groverian"):
                path = directory / f"fig2_{label}_{q}.csv"
                written.append(_write_curve(path, q, [(r.kappa_t, getattr(r, q)) for r in rows]))
    elif figure == 3:
        rows = list(run_sweep(SweepConfig("xz", 0.0, kt_max, kt_step, n_theta=n_theta, n_phi=n_phi)))
        for q, col in (
            ("avg_fidelity", "avg_fidelity_quadrature"),
            ("concurrence", "concurrence"),
            ("eof", "eof"),
            ("groverian", "groverian"),
        ):
            path = directory / f"fig3_different_axis_{q}.csv"
            written.append(_write_curve(path, q, [(r.kappa_t, getattr(r, col)) for r in rows]))
    elif figure == 4:
        cfg = SweepConfig(W_CHANNEL, 0.0, kt_max, kt_step, outputs=frozenset({"avg_fidelity"}))
        rows = [(kt, average_fidelity_closed_form(NoiseSpec(W_CHANNEL, kt))) for kt in cfg.kappa_ts()]
        written.append(_write_curve(directory / "fig4_w_avg_fidelity.csv", "avg_fidelity", rows))
        path = directory / "fig4_thresholds.csv"
        try:
            path.write_text(f"quantity,kappa_t\nxi_star,{fmt(classical_threshold_kt(W_CHANNEL))}\n", newline="")
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        written.append(path)
    else:
        raise ValueError("figure must be 2, 3 or 4")
    return written


# ---------------------------------------------------------------------------
# argument parsing


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _grid(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 64x64, got {text!r}")


def _outputs(text: str) -> frozenset:
    return frozenset(s.strip() for s in text.split(",") if s.strip())


def load_config_file(path) -> dict:
    """Flat ``key=value`` file; blank lines and ``#`` comments ignored."""
    cfg = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _UsageError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


def build_parser() -> tuple[_Parser, dict]:
    def common(top: bool) -> _Parser:
        # subcommand copies must not clobber values given before the subcommand
        dflt = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
        p = _Parser(add_help=False)
        p.add_argument("--format", choices=("csv", "json"), default=dflt(None))
        p.add_argument("--out", default=dflt(None), help="write output to this path instead of stdout")
        p.add_argument("--grid", type=_grid, default=dflt((64, 64)), help="quadrature grid NxM")
        p.add_argument("--seed", type=int, default=dflt(0), help="seed for pmax restarts")
        p.add_argument("--config", default=dflt(None), help="key=value file; flags override it")
        return p

    parser = _Parser(prog="noisytele", description=__doc__.splitlines()[0], parents=[common(True)])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs = {}

    def add(name, help):
        p = sub.add_parser(name, help=help, parents=[common(False)])
        subs[name] = p
        return p

    p = add("sweep", "tabulate fidelity and entanglement over a kappa_t grid")
    p.add_argument("--noise", required=True)
    p.add_argument("--kt-min", type=float, default=0.0)
    p.add_argument("--kt-max", type=float, default=1.0)
    p.add_argument("--kt-step", type=float, default=0.01)
    p.add_argument("--outputs", type=_outputs, default=frozenset(OUTPUT_FLAGS))

    p = add("emit-figure", "write per-curve CSV files for a figure")
    p.add_argument("--figure", type=int, choices=(2, 3, 4), required=True)
    p.add_argument("--dir", default=".")
    p.add_argument("--kt-max", type=float, default=1.0)
    p.add_argument("--kt-step", type=float, default=0.01)

    p = add("channel-matrix", "print a noisy resource as matrix JSON")
    p.add_argument("--noise", required=True)
    p.add_argument("--kt", type=float, required=True)
    p.add_argument("--integrate", action="store_true")
    p.add_argument("--steps", type=int, default=None)

    p = add("entangle", "entanglement report for a noisy resource")
    p.add_argument("--noise", required=True)
    p.add_argument("--kt", type=float, required=True)

    p = add("fidelity", "quadrature and closed-form average fidelity")
    p.add_argument("--noise", required=True)
    p.add_argument("--kt", type=float, required=True)

    p = add("threshold", "kappa_t where the average fidelity reaches 2/3")
    p.add_argument("--noise", required=True)

    p = add("verify-decomposition", "check an ensemble against its resource")
    p.add_argument("--noise", required=True)
    p.add_argument("--kt", type=float, required=True)
    p.add_argument(
        "--method",
        choices=("printed", "wootters", "separable"),
        default="printed",
        help="printed: closed-form optimal ensemble; separable: product-state ensemble; wootters: general construction",
    )

    return parser, subs


def _emit(text: str, out):
    if out:
        try:
            Path(out).write_text(text, newline="")
        except OSError as exc:
            raise OSError(f"cannot write {out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _record(d: dict, format: str | None) -> str:
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(d))
        w.writerow([v if isinstance(v, str) else fmt(v) for v in d.values()])
        return buf.getvalue()
    return json.dumps({k: v if isinstance(v, (str, list)) else _json_value(v) for k, v in d.items()}) + "\n"


def _run(args) -> int:
    cmd = args.command
    n_theta, n_phi = args.grid

    if cmd == "sweep":
        cfg = SweepConfig(
            args.noise, args.kt_min, args.kt_max, args.kt_step, args.outputs,
            args.format or "csv", n_theta, n_phi,
        )
        rows = list(run_sweep(cfg))
        _emit(render_rows(rows, cfg.outputs, cfg.format), args.out)
        bad = [r.kappa_t for r in rows if not r.consistent]
        if bad:
            print(f"quadrature and closed-form fidelity disagree at kappa_t = {bad}", file=sys.stderr)
            return 2
        return 0

    if cmd == "emit-figure":
        paths = emit_figure_data(args.figure, args.dir, args.kt_max, args.kt_step, n_theta, n_phi)
        for p in paths:
            print(p)
        return 0

    if cmd == "threshold":
        kind = normalize_kind(args.noise)
        d = {"noise": kind, "kappa_t": classical_threshold_kt(kind)}
        if kind != W_CHANNEL:
            d["concurrence_vanishes_at"] = separability_threshold_kt(kind)
        _emit(_record(d, args.format), args.out)
        return 0

    spec = NoiseSpec(args.noise, args.kt)

    if cmd == "channel-matrix":
        if args.integrate:
            with warnings.catch_warnings():
                # the estimate is reported below and drives the exit code
                warnings.simplefilter("ignore", IntegrationWarning)
                rho, err = lindblad_evolve(
                    initial_state(spec.kind), spec.kind, spec.kappa_t, args.steps, return_error=True
                )
            print(f"estimated integration error {err:.3e}", file=sys.stderr)
            _emit(matrix_to_json(rho) + "\n", args.out)
            return 2 if err > 1e-8 else 0
        _emit(matrix_to_json(analytic_channel(spec)) + "\n", args.out)
        return 0

    if cmd == "fidelity":
        closed = average_fidelity_closed_form(spec)
        quad = None
        if spec.kind == W_CHANNEL:
            log.warning("W channel: no teleportation circuit is simulated; quadrature value is null")
        else:
            quad = average_fidelity(analytic_channel(spec), n_theta, n_phi)
        d = {"noise": spec.kind, "kappa_t": spec.kappa_t, "quadrature": quad, "closed_form": closed}
        _emit(_record(d, args.format), args.out)
        return 2 if quad is not None and abs(quad - closed) > FIDELITY_TOL else 0

    if cmd == "entangle":
        if spec.kind == W_CHANNEL:
            log.warning("W channel: mixed three-qubit measures are undefined; reporting Pmax of the pure W state")
            from .channels import W_STATE

            pmax = pmax_numeric(W_STATE, seed=args.seed)
            d = {"concurrence": None, "eof": None, "groverian": None, "ppt_min_eig": None,
                 "pmax_pure_w": pmax, "groverian_pure_w": math.sqrt(max(0.0, 1 - pmax))}
        else:
            d = entanglement_report(analytic_channel(spec)).as_dict()
        _emit(_record(d, args.format), args.out)
        return 0

    if cmd == "verify-decomposition":
        rho = analytic_channel(spec)
        if spec.kind == W_CHANNEL:
            raise _UsageError("no decomposition is available for the W channel")
        if args.method == "printed":
            ens = optimal_ensemble(spec)
        elif args.method == "separable":
            ens = separable_ensemble(spec)
        else:
            ens = wootters_decomposition(rho)
        residual, concs = verify_ensemble(ens, rho)
        c = concurrence_mixed(rho)
        mean_c = float(np.dot(ens.weights, concs))
        d = {
            "noise": spec.kind,
            "kappa_t": spec.kappa_t,
            "method": args.method,
            "residual": residual,
            "concurrence": c,
            "mean_member_concurrence": mean_c,
            "weights": [_json_value(w) for w in ens.weights],
            "member_concurrences": [_json_value(x) for x in concs],
        }
        if args.format == "csv":
            d = {k: v for k, v in d.items() if not isinstance(v, list)}
        _emit(_record(d, args.format), args.out)
        ok = residual <= RESIDUAL_TOL and abs(mean_c - c) <= CONCURRENCE_TOL
        return 0 if ok else 2

    raise _UsageError(f"unknown command {cmd!r}")


def _apply_config(argv, parser, subs):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    cfg = load_config_file(known.config)
    for p in [parser, *subs.values()]:
        dests = {a.dest: a for a in p._actions}
        values = {}
        for k, v in cfg.items():
            if k not in dests or dests[k].default is argparse.SUPPRESS:
                continue
            action = dests[k]
            if isinstance(action, argparse._StoreTrueAction):
                values[k] = v.lower() in ("1", "true", "yes", "on")
            elif action.type is not None:
                values[k] = action.type(v)
            else:
                values[k] = v
            if action.choices is not None and values[k] not in action.choices:
                raise _UsageError(f"config {k}={v!r}: expected one of {list(action.choices)}")
            action.required = False
        p.set_defaults(**values)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    _setup_logging()
    parser, subs = build_parser()
    try:
        _apply_config(argv, parser, subs)
        args = parser.parse_args(argv)
        return _run(args)
    except (_UsageError, argparse.ArgumentTypeError) as exc:
        print(f"noisytele: error: {exc}", file=sys.stderr)
        return 1
    except OutOfDomainError as exc:
        print(f"noisytele: out of domain: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"noisytele: invalid argument: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"noisytele: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
