"""INI experiment configuration.

Schema (all keys optional; CLI flags override file values)::

    [experiment]
    command = poisson          # poisson | heat | wave | helmholtz | qoi | spdcheck | eig
    problem = glass
    N = 50, 100, 200
    strategy = mixed           # mixed | rbf
    cycle = W                  # V | W
    output_dir = results
    seed = 0
    require_certified = no
    timings = yes

    [time]
    theta = 0
    cfl = 0.7                  # dt / h (defaults: 0.7 wave, 1.0 heat)
    periods = 10.2             # wave run length in periods of the standing mode
    T = 0.5                    # heat final time

    [qoi]
    family = ellipse           # ellipse | rotated_ellipse
    params = 0.5, 1.0, 2.0

    [eig]
    method = lanczos           # lanczos | power

The environment variable ``EBM_OUTPUT_DIR`` overrides ``output_dir`` from the
file; an explicit ``--out`` flag overrides both.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields

from ..assembly import STRATEGIES
from .problems import PROBLEM_NAMES

COMMANDS = ("poisson", "heat", "wave", "helmholtz", "qoi", "spdcheck", "eig")
OUTPUT_ENV = "EBM_OUTPUT_DIR"


class ConfigError(ValueError):
    pass


def parse_list(text, kind=float):
    if isinstance(text, (list, tuple)):
        return [kind(v) for v in text]
    try:
        return [kind(v) for v in str(text).replace(";", ",").split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse list {text!r}") from exc


def _bool(text):
    if isinstance(text, bool):
        return text
    v = str(text).strip().lower()
    if v in ("1", "yes", "true", "on"):
        return True
    if v in ("0", "no", "false", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


@dataclass
class ExperimentConfig:
    command: str = "poisson"
    problem: str = "glass"
    ns: list = field(default_factory=lambda: [50, 100, 200])
    strategy: str = "mixed"
    cycle: str = "W"
    output_dir: str = "results"
    seed: int = 0
    require_certified: bool = False
    timings: bool = True
    theta: float = 0.0
    cfl: float | None = None  # dt / h; 0.7 for wave, 1.0 for heat when unset
    periods: float = 10.2
    T: float = 0.5
    family: str = "ellipse"
    params: list = field(default_factory=lambda: [0.5, 0.7071067811865476, 1.0, 1.4142135623730951, 2.0])
    eig_method: str = "lanczos"

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.problem not in PROBLEM_NAMES:
            raise ConfigError(f"unknown problem {self.problem!r}; choose from {PROBLEM_NAMES}")
        if not self.ns or any(int(n) != n or n < 8 for n in self.ns):
            raise ConfigError("N values must be integers >= 8")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"strategy must be one of {STRATEGIES}")
        if self.cycle not in ("V", "W"):
            raise ConfigError("cycle must be V or W")
        if self.cfl is not None and not self.cfl > 0:
            raise ConfigError("dt/h ratio must be positive")
        if self.theta < 0:
            raise ConfigError("theta must be non-negative")
        if not self.periods > 0 or not self.T > 0:
            raise ConfigError("run length must be positive")
        if self.family not in ("ellipse", "rotated_ellipse"):
            raise ConfigError("qoi family must be ellipse or rotated_ellipse")
        if self.family == "ellipse" and any(p <= 0 for p in self.params):
            raise ConfigError("ellipse parameters must be positive")
        if self.eig_method not in ("lanczos", "power"):
            raise ConfigError("eig method must be lanczos or power")
        return self

    def update(self, **kw):
        names = {f.name for f in fields(self)}
        for k, v in kw.items():
            if v is None:
                continue
            if k not in names:
                raise ConfigError(f"unknown option {k!r}")
            setattr(self, k, v)
        return self


def load_config(path=None, env=None) -> ExperimentConfig:
    """Defaults, then the INI file, then the output-directory environment override."""
    cfg = ExperimentConfig()
    if path is not None:
        cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            with open(path) as fh:
                cp.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        known = {"experiment", "time", "qoi", "eig"}
        extra = set(cp.sections()) - known
        if extra:
            raise ConfigError(f"unknown config sections: {sorted(extra)}")
        try:
            if cp.has_section("experiment"):
                s = cp["experiment"]
                cfg.command = s.get("command", cfg.command)
                cfg.problem = s.get("problem", cfg.problem)
                if "N" in s:
                    cfg.ns = parse_list(s["N"], int)
                cfg.strategy = s.get("strategy", cfg.strategy)
                cfg.cycle = s.get("cycle", cfg.cycle).upper()
                cfg.output_dir = s.get("output_dir", cfg.output_dir)
                cfg.seed = s.getint("seed", cfg.seed)
                cfg.require_certified = _bool(s.get("require_certified", cfg.require_certified))
                cfg.timings = _bool(s.get("timings", cfg.timings))
            if cp.has_section("time"):
                s = cp["time"]
                cfg.theta = s.getfloat("theta", cfg.theta)
                cfg.cfl = s.getfloat("cfl", cfg.cfl)
                cfg.periods = s.getfloat("periods", cfg.periods)
                cfg.T = s.getfloat("T", cfg.T)
            if cp.has_section("qoi"):
                s = cp["qoi"]
                cfg.family = s.get("family", cfg.family)
                if "params" in s:
                    cfg.params = parse_list(s["params"], float)
            if cp.has_section("eig"):
                cfg.eig_method = cp["eig"].get("method", cfg.eig_method)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    env = os.environ if env is None else env
    if env.get(OUTPUT_ENV):
        cfg.output_dir = env[OUTPUT_ENV]
    return cfg
