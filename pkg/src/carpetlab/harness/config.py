"""Run configuration: one JSON document, lengths in units of L, times in
units of T, wave numbers in units of 1/L.

Example::

    {
      "box": {"M": 1, "L": 1, "hbar": 1},
      "packet": {"xbar_over_L": 0.25, "dx_over_L": 0.05, "kbar_times_L": 0},
      "grid": {"nx": 128, "nt": 128, "t_max_over_T": 0.5},
      "truncations": {"M_max": "auto", "n_max": "auto", "l_max": "auto"},
      "evaluator": "gaussian-lines",
      "output": {"format": "pgm16", "path": "carpet.pgm"}
    }

A pure eigenmode is requested with ``"packet": {"kind": "eigenmode", "mode": 1}``.
"""
from dataclasses import dataclass, field, replace
import json

from ..boxmodel import BoxConfig, DomainError
from ..carpet import EVALUATORS
from ..wavepacket import GaussianPacket, eigenmode_state, expand

FORMATS = ("pgm16", "csv", "json")
PACKET_KINDS = ("gaussian", "eigenmode")


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


def _truncation(value, name):
    if value is None or value == "auto":
        return None
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"truncations.{name} must be a positive integer or 'auto'")
    return value


def _number(section, key, default=None, positive=False):
    value = section.get(key, default)
    if value is None:
        raise ConfigError(f"missing field {key!r}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field {key!r} must be a number")
    if positive and not value > 0:
        raise ConfigError(f"field {key!r} must be positive")
    return float(value)


@dataclass(frozen=True)
class RunConfig:
    box: BoxConfig = field(default_factory=BoxConfig)
    packet_kind: str = "gaussian"
    xbar_over_L: float = 0.25
    dx_over_L: float = 0.05
    kbar_times_L: float = 0.0
    mode: int = 1
    nx: int = 128
    nt: int = 128
    t_max_over_T: float = 0.5
    M_max: int = None
    n_max: int = None
    l_max: int = None
    evaluator: str = "gaussian-lines"
    output_format: str = "pgm16"
    output_path: str = None
    seed: int = 0

    def __post_init__(self):
        if self.nx < 2 or self.nt < 2:
            raise ConfigError("grid.nx and grid.nt must be >= 2")
        if not self.t_max_over_T > 0:
            raise ConfigError("grid.t_max_over_T must be positive")
        if self.evaluator not in EVALUATORS:
            raise ConfigError(f"evaluator must be one of {EVALUATORS}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"output.format must be one of {FORMATS}")
        if self.packet_kind not in PACKET_KINDS:
            raise ConfigError(f"packet.kind must be one of {PACKET_KINDS}")
        if self.packet_kind == "eigenmode":
            if self.mode < 1:
                raise ConfigError("packet.mode must be >= 1")
            if self.evaluator != "direct":
                raise ConfigError("eigenmode packets only support the direct evaluator")
        else:
            try:
                self.packet()
            except DomainError as exc:
                raise ConfigError(str(exc)) from None

    @property
    def t_max(self):
        return self.t_max_over_T * self.box.revival_time

    @property
    def is_gaussian(self):
        return self.packet_kind == "gaussian"

    def packet(self):
        if not self.is_gaussian:
            return None
        return GaussianPacket.from_box_units(self.box, self.xbar_over_L,
                                             self.dx_over_L, self.kbar_times_L)

    def state(self, m_max=None):
        """Eigenmode expansion of the initial state."""
        m_max = m_max or self.M_max
        if self.is_gaussian:
            return expand(self.packet(), self.box, m_max)
        return eigenmode_state(self.mode, m_max)

    def with_(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        packet = ({"xbar_over_L": self.xbar_over_L, "dx_over_L": self.dx_over_L,
                   "kbar_times_L": self.kbar_times_L} if self.is_gaussian
                  else {"kind": "eigenmode", "mode": self.mode})
        return {
            "box": {"M": self.box.mass, "L": self.box.length, "hbar": self.box.hbar},
            "packet": packet,
            "grid": {"nx": self.nx, "nt": self.nt, "t_max_over_T": self.t_max_over_T},
            "truncations": {k: getattr(self, k) or "auto" for k in ("M_max", "n_max", "l_max")},
            "evaluator": self.evaluator,
            "output": {"format": self.output_format, "path": self.output_path},
        }


def parse_config(doc):
    """Build a :class:`RunConfig` from a decoded JSON document."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    try:
        box_doc = doc.get("box", {})
        box = BoxConfig(_number(box_doc, "M", 1.0, True), _number(box_doc, "L", 1.0, True),
                        _number(box_doc, "hbar", 1.0, True))
        pk = doc.get("packet", {})
        kind = pk.get("kind", "gaussian")
        kwargs = {"box": box, "packet_kind": kind}
        if kind == "gaussian":
            kwargs.update(xbar_over_L=_number(pk, "xbar_over_L"),
                          dx_over_L=_number(pk, "dx_over_L", positive=True),
                          kbar_times_L=_number(pk, "kbar_times_L", 0.0))
        elif kind == "eigenmode":
            mode = pk.get("mode", 1)
            if isinstance(mode, bool) or not isinstance(mode, int):
                raise ConfigError("packet.mode must be an integer")
            kwargs["mode"] = mode
        grid = doc.get("grid", {})
        for key in ("nx", "nt"):
            v = grid.get(key, 128)
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(f"grid.{key} must be an integer")
            kwargs[key] = v
        kwargs["t_max_over_T"] = _number(grid, "t_max_over_T", 0.5)
        tr = doc.get("truncations", {})
        for key in ("M_max", "n_max", "l_max"):
            kwargs[key] = _truncation(tr.get(key), key)
        out = doc.get("output", {})
        kwargs["evaluator"] = doc.get("evaluator", "gaussian-lines" if kind == "gaussian" else "direct")
        kwargs["output_format"] = out.get("format", "pgm16")
        kwargs["output_path"] = out.get("path")
        seed = doc.get("validation", {}).get("seed", 0)
        kwargs["seed"] = int(seed)
        return RunConfig(**kwargs)
    except ConfigError:
        raise
    except (AttributeError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from None


def load_config(path):
    """Read and validate a JSON config file.

    Raises :class:`ConfigError` on malformed content and ``OSError`` when
    the file cannot be read.
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return parse_config(doc)
