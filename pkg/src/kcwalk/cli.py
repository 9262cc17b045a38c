"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 numerical-contract violation,
4 I/O error. Output goes to the ``[output] directory`` of the config, else
``$KCWALK_OUTPUT_DIR``, else ``./kcwalk-out``.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from kcwalk import __version__
from kcwalk._backend import BACKEND, LatticeBoundaryError
from kcwalk.config import ConfigError, ExperimentConfig, load_config
from kcwalk.hilbert import Coin
from kcwalk.quantifiers import (
    IDENTITY_TOL,
    TABLE1_ANGLES,
    TABLE1_M,
    TABLE1_N,
    IdentityViolation,
    kolmogorov_K,
    randomizing_K,
    verify_identity,
    visualize_difference,
)
from kcwalk.walk import WalkConfig, one_time_distribution

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
LINDBLAD_WALK_TOL = 1e-9
SUM_TOL = 1e-10


class NumericalContractError(ArithmeticError):
    pass


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value) + 0.0, ".12g")
    return str(value)


class RunWriter:
    """Writes output files and the run manifest listing them with checksums."""

    def __init__(self, cfg: ExperimentConfig, command: str, seed=None):
        self.cfg = cfg
        self.command = command
        self.seed = seed
        self.out_dir = Path(cfg.output_dir)
        self.started = datetime.now(timezone.utc).isoformat()
        self.files: list[dict] = []
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def _record(self, path: Path, data: bytes):
        path.write_bytes(data)
        self.files.append({"path": path.name, "sha256": hashlib.sha256(data).hexdigest()})
        print(path)

    def csv(self, name: str, header, rows) -> Path | None:
        if "csv" not in self.cfg.formats:
            return None
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
        path = self.out_dir / name
        self._record(path, buf.getvalue().encode("utf-8"))
        return path

    def svg(self, name: str, draw, *args) -> Path | None:
        if "svg" not in self.cfg.formats:
            return None
        path = self.out_dir / name
        draw(*args, path)
        self._record(path, path.read_bytes())
        return path

    def finish(self) -> Path:
        manifest = {
            "command": self.command,
            "config": self.cfg.source,
            "config_sha256": self.cfg.sha256,
            "tool_version": __version__,
            "backend": BACKEND,
            "seed": self.seed,
            "started": self.started,
            "finished": datetime.now(timezone.utc).isoformat(),
            "files": self.files,
        }
        path = self.out_dir / f"{self.command}.manifest.json"
        path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
        return path


def _coin_rows(probs: np.ndarray, bounds, keep) -> list:
    rows = []
    for i, x in enumerate(bounds.positions()):
        for coin in (Coin.H, Coin.V):
            value = float(probs[i, int(coin)])
            if keep(x, value):
                rows.append((x, coin.name, value))
    return rows


def _grid_filter(dense: bool, x0: int, steps: int):
    if dense:
        return lambda x, v: abs(x - x0) <= steps and (x - x0 + steps) % 2 == 0
    return lambda x, v: v != 0.0


def cmd_simulate(cfg: ExperimentConfig, args) -> int:
    walk = cfg.require_walk()
    steps = walk.N if args.steps is None else args.steps
    if steps < 0 or steps > walk.N:
        raise ConfigError(f"--steps must lie in [0, N={walk.N}], got {steps}")
    dist = one_time_distribution(walk, steps)
    if abs(dist.total() - 1.0) > SUM_TOL:
        raise NumericalContractError(f"probabilities sum to {dist.total()!r}")
    rows = _coin_rows(dist.probs, walk.bounds, _grid_filter(args.dense, walk.x0, steps))
    out = RunWriter(cfg, "simulate")
    out.csv(f"simulate_steps{steps}.csv", ("position", "coin", "probability"), rows)
    out.finish()
    return EXIT_OK


def _report_row(r):
    return (r.theta_deg, r.initial, r.N, r.M, r.K, r.C_superop, r.C_prob)


def cmd_quantify(cfg: ExperimentConfig, args) -> int:
    from kcwalk.figures import kc_scatter

    walk = cfg.require_walk()
    if args.sweep:
        configs = [WalkConfig.pure(t, c, walk.N, walk.M, walk.x0) for t in TABLE1_ANGLES for c in ("V", "H")]
    else:
        configs = [walk]
    reports = [verify_identity(c) for c in configs]
    out = RunWriter(cfg, "quantify")
    out.csv("quantify.csv", ("theta_deg", "initial", "N", "M", "K", "C_superop", "C_prob"),
            [_report_row(r) for r in reports])
    points = [(r.C_prob, r.K, f"{r.theta_deg:g}", r.initial) for r in reports]
    out.svg("quantify.svg", kc_scatter, points)
    out.finish()
    for r in reports:
        print(f"theta={r.theta_deg:g} init={r.initial} K={r.K:.6f} C={r.C_prob:.6f}")
    return EXIT_OK


def cmd_table1(cfg: ExperimentConfig, args) -> int:
    from kcwalk.figures import quantifier_vs_angle

    if cfg.walk is not None and (cfg.walk.N, cfg.walk.M) != (TABLE1_N, TABLE1_M):
        raise ConfigError(
            f"table1 is defined for N={TABLE1_N}, M={TABLE1_M}; config has N={cfg.walk.N}, M={cfg.walk.M}"
        )
    x0 = cfg.walk.x0 if cfg.walk is not None else 0
    rows = []
    for theta in TABLE1_ANGLES:
        for coin in ("V", "H"):
            wc = WalkConfig.pure(theta, coin, TABLE1_N, TABLE1_M, x0)
            rows.append((theta, coin, kolmogorov_K(wc), randomizing_K(wc)))
    out = RunWriter(cfg, "table1")
    out.csv("table1.csv", ("theta_deg", "initial", "theory_K", "randomizing_K"), rows)
    v_rows = [r for r in rows if r[1] == "V"]
    out.svg("table1.svg", quantifier_vs_angle, [r[0] for r in v_rows], [r[2] for r in v_rows], [r[3] for r in v_rows])
    out.finish()
    for r in rows:
        print(f"{r[0]:>3} {r[1]}  theory={r[2]:.3f}  randomizing={r[3]:.3f}")
    return EXIT_OK


def cmd_visualize(cfg: ExperimentConfig, args) -> int:
    from kcwalk.figures import difference_panels

    walk = cfg.require_walk()
    if walk.N % 2:
        raise ConfigError(f"visualize requires an even N because the measurement sits at N/2; got N={walk.N}")
    tables = visualize_difference(walk)
    keep = _grid_filter(args.dense, walk.x0, walk.N)
    out = RunWriter(cfg, "visualize")
    for name, table in (("a", tables.a), ("b", tables.b), ("c", tables.c)):
        out.csv(f"visualize_{name}.csv", ("position", "coin", "value"), _coin_rows(table, tables.bounds, keep))
    title = f"theta = {walk.theta_deg:g} deg, initial {walk.initial_label}, N = {walk.N}"
    out.svg("visualize.svg", difference_panels, list(tables.bounds.positions()), tables.a, tables.b, tables.c, title)
    out.finish()
    print(f"sum |c| = {tables.l1():.12g}")
    return EXIT_OK


def cmd_montecarlo(cfg: ExperimentConfig, args) -> int:
    from kcwalk.montecarlo import LossModel, PerturbationSpec, sample_quantifiers

    walk = cfg.require_walk()
    spec = cfg.montecarlo or PerturbationSpec()
    if args.samples is not None:
        spec = PerturbationSpec(spec.theta_jitter, spec.coupling_jitter, spec.extinction_jitter,
                                args.samples, spec.seed, spec.distribution)
    loss = cfg.loss or LossModel()
    bars = sample_quantifiers(walk, spec, loss)
    out = RunWriter(cfg, "montecarlo", seed=spec.seed)
    out.csv(
        "montecarlo_summary.csv",
        ("theta_deg", "initial", "N", "M", "samples", "seed", "mean_K", "std_K", "mean_C", "std_C"),
        [(walk.theta_deg, walk.initial_label, walk.N, walk.M, spec.samples, spec.seed,
          bars.mean_K, bars.std_K, bars.mean_C, bars.std_C)],
    )
    out.csv(
        "montecarlo_samples.csv",
        ("sample", "theta_deg", "eta_h", "eta_v", "residual_transmission", "K", "C"),
        [(r.index, r.theta_deg, r.eta_h, r.eta_v, r.residual_transmission, r.K, r.C) for r in bars.records],
    )
    out.finish()
    print(f"K = {bars.mean_K:.4f} +- {bars.std_K:.4f}   C = {bars.mean_C:.4f} +- {bars.std_C:.4f}")
    return EXIT_OK


def cmd_lindblad_check(cfg: ExperimentConfig, args) -> int:
    from kcwalk.lindblad import ObservableBasis, generalized_C, generalized_C_prob, generalized_K

    if cfg.lindblad is None:
        raise ConfigError(f"{cfg.source}: missing [lindblad] section")
    gen, rho0, s, t, labels = cfg.lindblad.build(cfg.walk)
    basis = ObservableBasis(labels)
    K = generalized_K(gen, basis, rho0, s, t)
    C = generalized_C(gen, basis, rho0, s, t)
    C_prob = generalized_C_prob(gen, basis, rho0, s, t)
    header = ["generator", "dim", "s", "t", "K", "C_superop", "C_prob", "abs_K_minus_C"]
    row = [cfg.lindblad.kind, gen.dim, s, t, K, C, C_prob, abs(K - C)]
    walk_report = None
    if cfg.lindblad.kind == "walk":
        walk = cfg.require_walk()
        if (s, t) == (walk.M, walk.N):
            walk_report = verify_identity(walk)
            header += ["walk_K", "walk_C"]
            row += [walk_report.K, walk_report.C_prob]
    out = RunWriter(cfg, "lindblad-check")
    out.csv("lindblad_check.csv", header, [row])
    out.finish()
    print(f"K = {K:.12g}  C = {C:.12g}  |K - C| = {abs(K - C):.3e}")
    if abs(K - C) > IDENTITY_TOL or abs(C - C_prob) > IDENTITY_TOL:
        raise NumericalContractError(f"generalized K={K!r} and C={C!r} differ beyond {IDENTITY_TOL:g}")
    if walk_report is not None and abs(K - walk_report.K) > LINDBLAD_WALK_TOL:
        raise NumericalContractError(
            f"walk embedding K={K!r} differs from walk-module K={walk_report.K!r}"
        )
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "quantify": cmd_quantify,
    "table1": cmd_table1,
    "visualize": cmd_visualize,
    "montecarlo": cmd_montecarlo,
    "lindblad-check": cmd_lindblad_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kcwalk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernel)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="experiment config file (INI)")
        p.add_argument("--output-dir", help="override the output directory")
        return p

    p = add("simulate", "one-time distribution P(x, c, n) as CSV")
    p.add_argument("--steps", type=int, help="number of steps n (default: N)")
    p.add_argument("--dense", action="store_true", help="emit the full parity-allowed grid, zeros included")
    p = add("quantify", "K, C (both forms) and the identity check")
    p.add_argument("--sweep", action="store_true", help="sweep the reference angles for both initial coins")
    add("table1", "theory and randomizing-measurement K for the reference grid (N=20, M=10)")
    p = add("visualize", "tables (a), (b), (c) of the difference decomposition")
    p.add_argument("--dense", action="store_true", help="emit the full parity-allowed grid, zeros included")
    p = add("montecarlo", "Monte-Carlo error bars for K and C")
    p.add_argument("--samples", type=int, help="override the number of samples")
    add("lindblad-check", "generalized K and C for a Lindblad generator")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.output_dir:
            cfg = ExperimentConfig(**{**cfg.__dict__, "output_dir": Path(args.output_dir)})
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IdentityViolation, NumericalContractError, LatticeBoundaryError) as exc:
        print(f"numerical contract violation: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
