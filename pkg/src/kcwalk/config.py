"""INI-style experiment configuration.

Example::

    [walk]
    theta_deg = 23
    N = 20
    M = 10
    x0 = 0
    initial = V          ; H, V, or the H-probability p as a number

    [loss]
    eta_h = 1.0
    eta_v = 0.98
    residual_transmission = 0.0

    [montecarlo]
    samples = 1000
    seed = 7

    [lindblad]
    generator = walk     ; walk | matrices | random | dephasing

    [output]
    directory = out
    formats = csv, svg

Matrices in the ``[lindblad]`` section are JSON nested arrays of ``[re, im]``
pairs.
"""
from __future__ import annotations

import configparser
import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from kcwalk.hilbert import Coin
from kcwalk.lindblad import (
    DiagonalInitialState,
    LindbladGenerator,
    pure_dephasing,
    random_diagonal_state,
    random_generator,
)
from kcwalk.montecarlo import LossModel, PerturbationSpec
from kcwalk.walk import WalkConfig

OUTPUT_ENV = "KCWALK_OUTPUT_DIR"
DEFAULT_OUTPUT = "kcwalk-out"
FORMATS = ("csv", "svg")
GENERATOR_KINDS = ("walk", "matrices", "random", "dephasing")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class LindbladSection:
    kind: str
    s: float | None = None
    t: float | None = None
    hamiltonian: np.ndarray | None = None
    jump_ops: tuple = ()
    rates: tuple = ()
    populations: np.ndarray | None = None
    dim: int = 0
    jumps: int = 0
    seed: int = 0

    def build(self, walk: WalkConfig | None):
        """Return (generator, initial state as matrix, s, t, outcome labels)."""
        from kcwalk.lindblad import walk_generator
        from kcwalk.walk import initial_density

        if self.kind == "walk":
            if walk is None:
                raise ConfigError("[lindblad] generator = walk requires a [walk] section")
            gen = walk_generator(walk.theta_deg, walk.bounds)
            rho0 = initial_density(walk).matrix
            labels = tuple(walk.bounds.modes())
            s = walk.M if self.s is None else self.s
            t = walk.N if self.t is None else self.t
            return gen, rho0, s, t, labels
        if self.kind == "random":
            rng = np.random.default_rng(self.seed)
            gen = random_generator(self.dim, self.jumps, rng)
            rho0 = random_diagonal_state(self.dim, rng)
        elif self.kind == "dephasing":
            gen = pure_dephasing(np.diag(self.hamiltonian).real, self.rates)
            rho0 = DiagonalInitialState(self.populations)
        else:
            gen = LindbladGenerator(self.hamiltonian, self.jump_ops, self.rates)
            rho0 = DiagonalInitialState(self.populations)
        s = 0.5 if self.s is None else self.s
        t = 1.0 if self.t is None else self.t
        return gen, rho0.matrix(), s, t, tuple(range(gen.dim))


@dataclass(frozen=True)
class ExperimentConfig:
    source: str
    sha256: str
    walk: WalkConfig | None = None
    loss: LossModel | None = None
    montecarlo: PerturbationSpec | None = None
    lindblad: LindbladSection | None = None
    output_dir: Path = Path(DEFAULT_OUTPUT)
    formats: tuple = FORMATS
    sections: tuple = field(default=())

    def require_walk(self) -> WalkConfig:
        if self.walk is None:
            raise ConfigError(f"{self.source}: missing [walk] section")
        return self.walk


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip().lower()
            if key is None and current == section:
                return lineno
            continue
        if current == section and key is not None:
            m = re.match(r"\s*([^=:;#\s]+)\s*[=:]", line)
            if m and m.group(1).lower() == key.lower():
                return lineno
    return None


class _Reader:
    def __init__(self, parser: configparser.ConfigParser, text: str, source: str):
        self.parser = parser
        self.text = text
        self.source = source

    def error(self, section: str, key: str | None, message: str) -> ConfigError:
        line = _line_of(self.text, section, key)
        where = f"{self.source}:{line}" if line else self.source
        field_name = f"[{section}] {key}" if key else f"[{section}]"
        return ConfigError(f"{where}: {field_name}: {message}")

    def has(self, section: str, key: str) -> bool:
        return self.parser.has_option(section, key)

    def raw(self, section: str, key: str) -> str:
        return self.parser.get(section, key).strip()

    def get(self, section: str, key: str, kind, default=None, required=False):
        if not self.parser.has_option(section, key):
            if required:
                raise self.error(section, None, f"missing required field '{key}'")
            return default
        value = self.raw(section, key)
        try:
            if kind is int:
                f = float(value)
                if f != int(f):
                    raise ValueError
                return int(f)
            return kind(value)
        except ValueError:
            raise self.error(section, key, f"cannot parse {value!r} as {kind.__name__}") from None

    def json(self, section: str, key: str, required=True):
        if not self.parser.has_option(section, key):
            if required:
                raise self.error(section, None, f"missing required field '{key}'")
            return None
        try:
            return json.loads(self.raw(section, key))
        except json.JSONDecodeError as exc:
            raise self.error(section, key, f"invalid JSON ({exc.msg})") from None

    def matrix(self, section: str, key: str, value=None) -> np.ndarray:
        value = self.json(section, key) if value is None else value
        try:
            arr = np.asarray(value, dtype=float)
            if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
                raise ValueError
        except (TypeError, ValueError):
            raise self.error(section, key, "expected a square nested array of [re, im] pairs") from None
        return arr[..., 0] + 1j * arr[..., 1]


def _wrap(reader: _Reader, section: str, fn, *args):
    try:
        return fn(*args)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise reader.error(section, None, str(exc)) from None


def _walk(r: _Reader) -> WalkConfig:
    sec = "walk"
    theta = r.get(sec, "theta_deg", float, required=True)
    N = r.get(sec, "N", int, required=True)
    M = r.get(sec, "M", int, default=N // 2)
    x0 = r.get(sec, "x0", int, default=0)
    has_initial, has_p = r.has(sec, "initial"), r.has(sec, "p")
    if has_initial == has_p:
        raise r.error(sec, None, "exactly one initial-coin field ('initial' or 'p') is required")
    if has_p:
        p = r.get(sec, "p", float)
    else:
        raw = r.raw(sec, "initial")
        try:
            p = 1.0 if Coin.parse(raw) is Coin.H else 0.0
        except ValueError:
            try:
                p = float(raw)
            except ValueError:
                raise r.error(sec, "initial", f"expected H, V or a probability, got {raw!r}") from None
    return _wrap(r, sec, WalkConfig, theta, N, M, x0, p)


def _loss(r: _Reader) -> LossModel:
    sec = "loss"
    return _wrap(
        r, sec, LossModel,
        r.get(sec, "eta_h", float, 1.0),
        r.get(sec, "eta_v", float, 1.0),
        r.get(sec, "residual_transmission", float, 0.0),
    )


def _montecarlo(r: _Reader) -> PerturbationSpec:
    sec = "montecarlo"
    d = PerturbationSpec()
    return _wrap(
        r, sec, PerturbationSpec,
        r.get(sec, "theta_jitter", float, d.theta_jitter),
        r.get(sec, "coupling_jitter", float, d.coupling_jitter),
        r.get(sec, "extinction_jitter", float, d.extinction_jitter),
        r.get(sec, "samples", int, d.samples),
        r.get(sec, "seed", int, d.seed),
        r.get(sec, "distribution", str, d.distribution),
    )


def _lindblad(r: _Reader) -> LindbladSection:
    sec = "lindblad"
    kind = r.get(sec, "generator", str, "walk").lower()
    if kind not in GENERATOR_KINDS:
        raise r.error(sec, "generator", f"expected one of {', '.join(GENERATOR_KINDS)}, got {kind!r}")
    s = r.get(sec, "s", float)
    t = r.get(sec, "t", float)
    if kind == "walk":
        return LindbladSection(kind, s, t)
    if kind == "random":
        return LindbladSection(kind, s, t, dim=r.get(sec, "dim", int, 4), jumps=r.get(sec, "jumps", int, 2),
                               seed=r.get(sec, "seed", int, 0))
    populations = np.asarray(r.json(sec, "initial_populations"), dtype=float)
    if kind == "dephasing":
        energies = np.asarray(r.json(sec, "energies"), dtype=float)
        rates = tuple(r.json(sec, "rates"))
        return LindbladSection(kind, s, t, hamiltonian=np.diag(energies), rates=rates, populations=populations)
    H = r.matrix(sec, "hamiltonian")
    jumps_raw = r.json(sec, "jump_ops", required=False) or []
    jumps = tuple(r.matrix(sec, "jump_ops", m) for m in jumps_raw)
    rates = tuple(r.json(sec, "rates", required=False) or [])
    section = LindbladSection(kind, s, t, hamiltonian=H, jump_ops=jumps, rates=rates, populations=populations)
    _wrap(r, sec, LindbladGenerator, H, jumps, rates)
    _wrap(r, sec, DiagonalInitialState, populations)
    return section


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    import hashlib

    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str.lower
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    r = _Reader(parser, text, source)
    if any(s != s.lower() for s in parser.sections()):
        raise ConfigError(f"{source}: section names must be lower case")
    sections = tuple(parser.sections())
    known = {"walk", "loss", "montecarlo", "lindblad", "output"}
    for s in sections:
        if s not in known:
            raise r.error(s, None, f"unknown section (expected one of {', '.join(sorted(known))})")
    out_dir = Path(os.environ.get(OUTPUT_ENV, DEFAULT_OUTPUT))
    formats = FORMATS
    if "output" in sections:
        if r.has("output", "directory"):
            out_dir = Path(r.raw("output", "directory"))
        if r.has("output", "formats"):
            formats = tuple(f.strip().lower() for f in r.raw("output", "formats").split(",") if f.strip())
            bad = [f for f in formats if f not in FORMATS]
            if bad:
                raise r.error("output", "formats", f"unknown format(s) {bad}; expected csv and/or svg")
    if not Path(out_dir).is_absolute() and source not in ("<config>", "<string>"):
        base = Path(source).resolve().parent
        if "output" in sections and r.has("output", "directory"):
            out_dir = base / out_dir

    return ExperimentConfig(
        source=source,
        sha256=hashlib.sha256(text.encode("utf-8")).hexdigest(),
        walk=_walk(r) if "walk" in sections else None,
        loss=_loss(r) if "loss" in sections else None,
        montecarlo=_montecarlo(r) if "montecarlo" in sections else None,
        lindblad=_lindblad(r) if "lindblad" in sections else None,
        output_dir=Path(out_dir),
        formats=formats,
        sections=sections,
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_config(text, str(path))
