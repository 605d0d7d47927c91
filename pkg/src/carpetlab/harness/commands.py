"""The four harness commands.  Each takes a :class:`RunConfig` and returns
plain data; the CLI layer decides where it is written.
"""
import math
import os

import numpy as np

from ..carpet import CUTOFF, carpet_gaussian, carpet_grid, default_truncations, trace_catalog
from ..propagator import probability_direct
from ..wavepacket import EXPAND_TOL, LEAKAGE_LIMIT
from . import output
from .config import ConfigError

THREADS_ENV = "CARPETLAB_THREADS"


def thread_count(env=None):
    """Worker count for grid filling.

    ``CARPETLAB_THREADS`` sets it explicitly (it may exceed the CPU count);
    otherwise the CPU count is used.  Results never depend on it.
    """
    env = os.environ if env is None else env
    cpus = os.cpu_count() or 1
    raw = env.get(THREADS_ENV)
    if raw is None or raw == "":
        return cpus
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if cap < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return cap


def tolerances():
    """Numerical settings recorded next to every raster."""
    return {"expand_quadrature_abs": EXPAND_TOL,
            "line_cutoff_exponent": CUTOFF,
            "leakage_limit": LEAKAGE_LIMIT,
            "negative_clamp": -1e-15}


def compute_carpet(run, threads=1):
    """Fill the :class:`~carpetlab.carpet.CarpetGrid` described by ``run``."""
    state = run.state() if run.evaluator == "direct" else None
    packet = run.packet() if run.is_gaussian else state
    return carpet_grid(packet, run.box, run.nx, run.nt, t_max=run.t_max,
                       evaluator=run.evaluator, n_max=run.n_max, l_max=run.l_max,
                       m_max=run.M_max, threads=threads, state=state)


def cmd_carpet(run, path=None, threads=1):
    """Render the carpet to ``path`` (or the configured output path).

    Returns ``(path, metadata)``.  PGM output gets a ``path + '.json'``
    sidecar; CSV and JSON carry the same metadata inline or alongside.
    """
    path = path or run.output_path
    if not path:
        raise ConfigError("no output path: set output.path or pass --out")
    grid = compute_carpet(run, threads)
    meta = grid.metadata()
    meta.update(config=run.to_dict(), tolerances=tolerances(),
                W_min=float(np.min(grid.values)), W_max=float(np.max(grid.values)))
    if run.output_format == "pgm16":
        output.write_pgm(path, grid, meta)
    elif run.output_format == "csv":
        output.write_text(path, output.grid_csv(grid, run.box))
        output.write_json(path + ".json", meta)
    else:
        output.write_json(path, output.grid_json(grid, run.box, meta))
    return path, meta


def cmd_validate(run):
    """Run the validation suite; see :mod:`carpetlab.harness.validation`."""
    from .validation import run_validation
    return run_validation(run)


def cmd_traces(run, threshold):
    """Trace catalog as a list of JSON-ready dicts, heaviest first."""
    if not run.is_gaussian:
        raise ConfigError("the trace catalog needs a Gaussian packet")
    if not (isinstance(threshold, (int, float)) and 0.0 < threshold <= 1.0):
        raise ConfigError("threshold must lie in (0, 1]")
    events = trace_catalog(run.packet(), run.box, float(threshold), t_max=run.t_max,
                           n_max=run.n_max)
    return [e.to_dict() for e in events]


AXES = ("fixed-t", "fixed-x")


def cmd_slice(run, axis, value):
    """W along a 1-D cut from both the direct and the line evaluator.

    ``axis='fixed-t'`` takes ``value = t/T`` in ``[0, t_max/T]`` and
    samples ``nx`` positions; ``axis='fixed-x'`` takes ``value = x/L`` in
    ``[0, 1]`` and samples ``nt`` times.  Returns the CSV text with columns
    ``coordinate, W_direct, W_lines, abs_diff``.
    """
    if axis not in AXES:
        raise ConfigError(f"axis must be one of {AXES}")
    if not run.is_gaussian:
        raise ConfigError("slices compare against the line sum and need a Gaussian packet")
    if not (isinstance(value, (int, float)) and math.isfinite(value)):
        raise ConfigError("slice value must be a finite number")
    cfg = run.box
    if axis == "fixed-t":
        if not 0.0 <= value <= run.t_max_over_T:
            raise ConfigError(f"t/T = {value} outside [0, {run.t_max_over_T}]")
        coord = np.linspace(0.0, 1.0, run.nx)
        x, t = coord * cfg.length, value * cfg.revival_time
        t_span = t
    else:
        if not 0.0 <= value <= 1.0:
            raise ConfigError(f"x/L = {value} outside [0, 1]")
        coord = np.linspace(0.0, run.t_max_over_T, run.nt)
        x, t = value * cfg.length, coord * cfg.revival_time
        t_span = run.t_max
    packet = run.packet()
    auto_n, auto_l = default_truncations(packet, t_span)
    direct = probability_direct(run.state(), cfg, x, t)
    lines = carpet_gaussian(packet, cfg, x, t, run.n_max or auto_n, run.l_max or auto_l)
    return output.csv_text(["coordinate", "W_direct", "W_lines", "abs_diff"],
                           [coord, direct, lines, np.abs(direct - lines)])
