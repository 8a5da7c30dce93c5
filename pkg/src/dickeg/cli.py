"""Command-line interface: every pipeline behind one ``dickeg`` executable.

Subcommands
-----------
``gcurve``
    Both parity G-functions on an energy grid, with pole flags (CSV).
``spectrum``
    Certified stable zeros plus rejected candidates, with reference
    eigenvalues from the dense oracle and eigenstate summaries (JSON).
``exceptional``
    Pole-lifting couplings ``g`` for requested ``(m, n)`` families (JSON).
``convergence``
    Eigenvalue error versus basis cutoff, displaced frames against the
    ordinary Fock product basis (CSV).
``gme``
    Quench time series from GHZ x vacuum: genuine multipartite
    entanglement, purity, energy (CSV).

Configuration
-------------
Every subcommand accepts ``--config FILE`` where FILE holds flat
``key = value`` lines (``#`` comments allowed); keys are the long flag
names with underscores.  Explicit flags override file values.  One file
may hold keys for several subcommands; each command reads only its own.

Every output embeds the fully resolved configuration (as ``# key = value``
header lines in CSV, as a ``"config"`` object in JSON), so a result file
documents how to regenerate itself.  Outputs are deterministic: the same
resolved configuration produces byte-identical files.  Floating-point
values are printed with 17 significant digits, which round-trips float64
exactly.

Exit codes
----------
0 success; 2 convergence/completeness failure; 3 numerical solver
failure; 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import (
    default_t_grid,
    eigen_basis,
    energy_expectation,
    evolve,
    expand_in_eigenbasis,
    initial_state,
    purity,
    reduce_to_qubits,
)
from .entanglement import gme_monotone
from .errors import (
    CompletenessError,
    ConvergenceError,
    DegenerateNullSpaceError,
    DickegError,
    PoleError,
)
from .gfunction import _shift, g_values, pole_set
from .model import ModelParams
from .oracle import (
    build_hamiltonian,
    default_m_fock,
    diagonalize_fock,
    ecs_eigenvalues,
)
from .recurrence import POLE_EPSILON
from .spectrum import (
    SpectrumRecord,
    find_exceptional,
    reconstruct_eigenstate,
    scan_report,
    suggested_n_c,
)

__all__ = ["main"]


class UsageError(Exception):
    """A bad flag/config combination detected after parsing."""


# ---------------------------------------------------------------------------
# configuration plumbing
# ---------------------------------------------------------------------------

_REQUIRED = object()


@dataclass(frozen=True)
class _Field:
    """One RunConfig entry: a flag, its config-file key, and its type."""

    name: str  # config key and long flag name (underscores)
    kind: str  # int | float | str | bool | floats
    default: object = None
    help: str = ""
    choices: tuple = ()
    embed: bool = True  # include in the resolved-config header

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")

    @property
    def dest(self) -> str:
        return "opt_" + self.name


def _convert(f: _Field, raw: str):
    """Coerce a config-file string to the field's type."""
    raw = raw.strip()
    try:
        if f.kind == "int":
            val = int(raw)
        elif f.kind == "float":
            val = float(raw)
        elif f.kind == "bool":
            low = raw.lower()
            if low in ("true", "yes", "on", "1"):
                val = True
            elif low in ("false", "no", "off", "0"):
                val = False
            else:
                raise ValueError(raw)
        elif f.kind == "floats":
            val = tuple(float(p) for p in raw.split(",") if p.strip())
        else:
            val = raw
    except ValueError:
        raise UsageError(
            f"config value {f.name} = {raw!r} is not a valid {f.kind}"
        ) from None
    if f.choices and val not in f.choices:
        raise UsageError(
            f"config value {f.name} = {raw!r} not in {'/'.join(f.choices)}"
        )
    return val


def _model_fields() -> list[_Field]:
    # g stays optional at this layer; _model enforces "exactly one of
    # g/lambda" after merging, which a per-field required marker cannot say
    return [
        _Field("n", "int", _REQUIRED, "number of qubits N >= 1"),
        _Field("delta", "float", _REQUIRED, "qubit splitting (>= 0)"),
        _Field("omega", "float", 1.0, "field frequency (> 0)"),
        _Field("g", "float", None,
               "single-qubit coupling (exclusive with --lambda)"),
        _Field("lambda", "float", None,
               "collective coupling g*sqrt(N) (exclusive with --g)",
               embed=False),
    ]


def _output_fields(formats: tuple, default_format: str) -> list[_Field]:
    return [
        _Field("output", "str", "-", "output path ('-' = stdout)",
               embed=False),
        _Field("format", "str", default_format,
               f"output format ({'/'.join(formats)})", choices=formats),
    ]


_PARITY = _Field("parity", "str", "both", "sector: +1, -1, or both",
                 choices=("both", "+1", "-1", "1"))

_FIELDS: dict[str, list[_Field]] = {
    "gcurve": _model_fields() + [
        _Field("e_min", "float", _REQUIRED, "grid start energy"),
        _Field("e_max", "float", _REQUIRED, "grid end energy"),
        _Field("points", "int", 2001, "number of grid points"),
        _Field("n_c", "int", None, "recurrence depth (default: auto)"),
    ] + _output_fields(("csv", "json"), "csv"),
    "spectrum": _model_fields() + [
        _PARITY,
        _Field("e_min", "float", _REQUIRED, "window start energy"),
        _Field("e_max", "float", _REQUIRED, "window end energy"),
        _Field("n_c", "int", None, "base recurrence depth (default: auto)"),
        _Field("grid", "int", None,
               "scan points per pole-free subinterval (default: auto)"),
        _Field("m_fock", "int", None,
               "oracle photon cutoff (default: 200/400 by size)"),
        _Field("oracle", "bool", True,
               "attach reference eigenvalues from dense diagonalization"),
        _Field("states", "bool", True,
               "attach reconstructed-eigenstate summaries"),
    ] + _output_fields(("json",), "json"),
    "exceptional": [
        _Field("n", "int", _REQUIRED, "number of qubits N >= 1"),
        _Field("delta", "float", _REQUIRED, "qubit splitting (>= 0)"),
        _Field("omega", "float", 1.0, "field frequency (> 0)"),
        _PARITY,
        _Field("m", "floats", None,
               "projections m as comma list, e.g. 0.5,1.5 "
               "(default: every positive projection)"),
        _Field("n_max", "int", 3, "largest photon level n of the families"),
        _Field("g_min", "float", _REQUIRED, "coupling sweep start (> 0)"),
        _Field("g_max", "float", _REQUIRED, "coupling sweep end"),
        _Field("g_step", "float", 1e-3, "coupling sweep grid step"),
        _Field("m_fock", "int", None,
               "verification photon cutoff (default: 200/400 by size)"),
    ] + _output_fields(("json",), "json"),
    "convergence": _model_fields() + [
        _PARITY,
        _Field("basis", "str", "both", "which basis families to tabulate",
               choices=("ecs", "fock", "both")),
        _Field("states", "int", 5, "states per sector, ascending"),
        _Field("n_c", "int", 25, "largest displaced-frame cutoff"),
        _Field("m_fock", "int", 100, "largest Fock product-basis cutoff"),
    ] + _output_fields(("csv", "json"), "csv"),
    "gme": _model_fields() + [
        _Field("t_max", "float", 50.0, "final time"),
        _Field("dt", "float", 0.05, "time step"),
        _Field("m_fock", "int", None,
               "eigenbasis photon cutoff (default: 200/400 by size)"),
        _Field("source", "str", "oracle",
               "eigenbasis construction route", choices=("oracle", "gfunction")),
        _Field("e_max", "float", None,
               "eigenbasis energy ceiling (default: grown until complete)"),
    ] + _output_fields(("csv", "json"), "csv"),
}


def _read_config(path: str) -> dict[str, str]:
    """Parse a flat ``key = value`` file; keys must belong to some command."""
    known = {f.name for fields in _FIELDS.values() for f in fields}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise UsageError(
                f"{path}:{lineno}: expected 'key = value', got {line!r}"
            )
        if key not in known:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        out[key] = val.strip()
    return out


def _resolve(args: argparse.Namespace, fields: list[_Field]) -> dict:
    """Merge flag values over config-file values over defaults."""
    file_cfg = _read_config(args.config) if args.config else {}
    cfg: dict[str, object] = {}
    for f in fields:
        val = getattr(args, f.dest)
        if val is None and f.name in file_cfg:
            val = _convert(f, file_cfg[f.name])
        if val is None:
            val = f.default
        if val is _REQUIRED:
            raise UsageError(f"missing required option {f.flag}")
        cfg[f.name] = val
    return cfg


def _model(cfg: dict) -> ModelParams:
    """Build ModelParams from the resolved config (g xor lambda)."""
    g, lam = cfg.get("g"), cfg.get("lambda")
    if (g is None) == (lam is None):
        raise UsageError("exactly one of --g / --lambda is required")
    if g is None:
        return ModelParams.from_lambda(cfg["n"], cfg["delta"], lam,
                                       cfg["omega"])
    return ModelParams(cfg["n"], cfg["delta"], g, cfg["omega"])


def _parities(spec: str) -> list[int]:
    if spec == "both":
        return [1, -1]
    return [1] if spec in ("+1", "1") else [-1]


def _resolved_config(command: str, cfg: dict, fields: list[_Field],
                     **overrides) -> dict:
    """The embedded header: every science field with its final value."""
    out: dict[str, object] = {"command": command}
    for f in fields:
        if not f.embed:
            continue
        out[f.name] = overrides.get(f.name, cfg[f.name])
    return out


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    """One CSV cell / config-header value, 17 significant digits."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    if isinstance(v, (tuple, list)):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def _render_csv(config: dict, columns: tuple, rows: list, notes: tuple = ()) -> str:
    lines = [f"# dickeg {config['command']}"]
    lines.extend(f"# {note}" for note in notes)
    lines.extend(
        f"# {key} = {_fmt(val)}" for key, val in config.items()
        if key != "command"
    )
    lines.append(",".join(columns))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _json_render(obj, indent: int = 0) -> str:
    pad, pad1 = "  " * indent, "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return f"{x:.17g}" if math.isfinite(x) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        items = list(obj)
        if not items:
            return "[]"
        if all(isinstance(x, (int, float, np.integer, np.floating))
               and not isinstance(x, (bool, np.bool_)) for x in items):
            return "[" + ", ".join(_json_render(x) for x in items) + "]"
        body = ",\n".join(pad1 + _json_render(x, indent + 1) for x in items)
        return "[\n" + body + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(
            f"{pad1}{json.dumps(str(k))}: {_json_render(v, indent + 1)}"
            for k, v in obj.items()
        )
        return "{\n" + body + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _render_rows_json(config: dict, columns: tuple, rows: list) -> str:
    payload = {
        "command": config["command"],
        "config": {k: v for k, v in config.items() if k != "command"},
        "rows": [dict(zip(columns, row)) for row in rows],
    }
    return _json_render(payload) + "\n"


def _emit(cfg: dict, text: str) -> None:
    path = cfg.get("output", "-")
    if path in (None, "-", ""):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _emit_table(cfg: dict, config: dict, columns: tuple, rows: list,
                notes: tuple = ()) -> None:
    if cfg["format"] == "json":
        _emit(cfg, _render_rows_json(config, columns, rows))
    else:
        _emit(cfg, _render_csv(config, columns, rows, notes))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_gcurve(args: argparse.Namespace) -> int:
    fields = _FIELDS["gcurve"]
    cfg = _resolve(args, fields)
    params = _model(cfg)
    e_min, e_max, points = cfg["e_min"], cfg["e_max"], cfg["points"]
    if points < 1:
        raise UsageError("points must be >= 1")

    rows: list[tuple] = []
    n_c = cfg["n_c"]
    if e_max >= e_min:
        if n_c is None:
            n_c = suggested_n_c(params, e_max)
        grid = np.linspace(e_min, e_max, points)
        spacing = (e_max - e_min) / (points - 1) if points > 1 else 0.0
        guard = 2.0 * POLE_EPSILON * params.omega
        flag_radius = max(0.5 * spacing, guard)
        shift = _shift(params)
        per_parity = {}
        for parity in (1, -1):
            poles = pole_set(params, parity,
                             max(e_max, n_c * params.omega) + params.omega)
            dist = poles.nearest_distance(grid)
            masked = dist < guard
            vals = np.full(grid.shape, np.nan)
            logs = np.full(grid.shape, np.nan)
            if np.any(~masked):
                v, ls = g_values(params, grid[~masked], parity, n_c=n_c)
                vals[~masked] = v
                logs[~masked] = ls
            per_parity[parity] = (vals, logs, dist < flag_radius)
        vp, lp, fp = per_parity[1]
        vm, lm, fm = per_parity[-1]
        rows = [
            (float(grid[i]), float(grid[i]) + shift,
             float(vp[i]), float(lp[i]), int(fp[i]),
             float(vm[i]), float(lm[i]), int(fm[i]))
            for i in range(grid.size)
        ]

    config = _resolved_config("gcurve", cfg, fields, g=params.g, n_c=n_c)
    columns = ("energy", "shifted_energy", "g_plus", "log_scale_plus",
               "pole_plus", "g_minus", "log_scale_minus", "pole_minus")
    notes = (
        "g_* are row-rescaled determinants (sign-true; zero iff G is); "
        "the unscaled value is g_* * exp(log_scale_*)",
        "pole_* = 1 marks grid points nearest to a sector pole "
        "(within max(grid_step/2, 2*pole_epsilon)); G is not evaluated "
        "inside the pole guard",
    )
    _emit_table(cfg, config, columns, rows, notes)
    return 0


def _eigenstate_summary(params: ModelParams, record: SpectrumRecord):
    """Small JSON-ready digest of the reconstructed eigenstate."""
    if record.kind != "regular" or record.n_c_used == 0:
        return None
    try:
        state = reconstruct_eigenstate(params, record)
    except (DegenerateNullSpaceError, PoleError):
        return None
    amp = state.dicke_fock_amplitudes
    weights = np.sum(amp * amp, axis=1)
    photons = float(np.sum(amp * amp * np.arange(amp.shape[1])))
    return {
        "truncation": state.truncation,
        "mean_photons": photons,
        "row_weights": [float(w) for w in weights],
    }


def _cmd_spectrum(args: argparse.Namespace) -> int:
    fields = _FIELDS["spectrum"]
    cfg = _resolve(args, fields)
    params = _model(cfg)
    parities = _parities(cfg["parity"])
    e_range = (cfg["e_min"], cfg["e_max"])

    records: list[SpectrumRecord] = []
    rejected = []
    for parity in parities:
        report = scan_report(params, parity, e_range, n_c=cfg["n_c"],
                             grid_per_subinterval=cfg["grid"])
        records.extend(report.records)
        rejected.extend(report.rejected)
    records.sort(key=lambda r: (r.energy, -r.parity))
    rejected.sort(key=lambda r: (r.energy, -r.parity))

    m_fock = cfg["m_fock"]
    sectors = None
    if cfg["oracle"]:
        if m_fock is None:
            m_fock = default_m_fock(params)
        oracle = diagonalize_fock(params, m_fock=m_fock, need_vectors=False)
        sectors = {p: oracle.sector(p) for p in (1, -1)}

    rec_objs = []
    for rec in records:
        obj = {
            "energy": rec.energy,
            "parity": rec.parity,
            "kind": rec.kind,
            "stability_residual": rec.stability_residual,
            "n_c_used": rec.n_c_used,
        }
        if sectors is not None:
            sec = sectors[rec.parity]
            if sec.size:
                j = int(np.argmin(np.abs(sec - rec.energy)))
                obj["oracle_energy"] = float(sec[j])
                obj["oracle_difference"] = float(abs(sec[j] - rec.energy))
            else:
                obj["oracle_energy"] = None
                obj["oracle_difference"] = None
        if cfg["states"]:
            obj["eigenstate"] = _eigenstate_summary(params, rec)
        rec_objs.append(obj)

    rej_objs = [
        {
            "energy": rej.energy,
            "parity": rej.parity,
            "reason": rej.reason,
            "residual": rej.residual,
            "shifted_up": rej.shifted_up,
            "n_c_used": rej.n_c_used,
        }
        for rej in rejected
    ]

    config = _resolved_config("spectrum", cfg, fields, g=params.g,
                              m_fock=m_fock)
    payload = {
        "command": "spectrum",
        "config": {k: v for k, v in config.items() if k != "command"},
        "records": rec_objs,
        "rejected": rej_objs,
    }
    _emit(cfg, _json_render(payload) + "\n")
    return 0


def _cmd_exceptional(args: argparse.Namespace) -> int:
    fields = _FIELDS["exceptional"]
    cfg = _resolve(args, fields)
    params = ModelParams(cfg["n"], cfg["delta"], cfg["g_min"], cfg["omega"])
    parities = _parities(cfg["parity"])

    if cfg["m"] is None:
        two_ms = [tm for tm in range(2 - (cfg["n"] % 2), cfg["n"] + 1, 2)
                  if tm > 0]
    else:
        two_ms = []
        for m_val in cfg["m"]:
            two_m = int(round(2.0 * float(m_val)))
            if abs(2.0 * float(m_val) - two_m) > 1e-9 or two_m <= 0:
                raise UsageError(
                    f"m = {m_val} is not a positive (half-)integer projection"
                )
            two_ms.append(params.check_two_m(two_m))
    if cfg["n_max"] < 0:
        raise UsageError("n_max must be >= 0")

    couplings = []
    for two_m in two_ms:
        for level in range(cfg["n_max"] + 1):
            for parity in parities:
                roots = find_exceptional(
                    params, parity, two_m, level,
                    (cfg["g_min"], cfg["g_max"]), cfg["g_step"],
                    m_fock=cfg["m_fock"],
                )
                gr_sq = (two_m / params.omega) ** 2
                couplings.extend(
                    {
                        "two_m": two_m,
                        "m": two_m / 2.0,
                        "level": level,
                        "parity": parity,
                        "g": g,
                        "energy": (level - gr_sq * g * g) * params.omega,
                    }
                    for g in roots
                )

    config = _resolved_config("exceptional", cfg, fields,
                              m=[tm / 2.0 for tm in two_ms])
    payload = {
        "command": "exceptional",
        "config": {k: v for k, v in config.items() if k != "command"},
        "couplings": couplings,
    }
    _emit(cfg, _json_render(payload) + "\n")
    return 0


def _cmd_convergence(args: argparse.Namespace) -> int:
    fields = _FIELDS["convergence"]
    cfg = _resolve(args, fields)
    params = _model(cfg)
    parities = _parities(cfg["parity"])
    bases = ("ecs", "fock") if cfg["basis"] == "both" else (cfg["basis"],)
    if cfg["states"] < 1:
        raise UsageError("states must be >= 1")
    if "ecs" in bases and cfg["n_c"] < 2:
        raise UsageError("n_c must be >= 2 for the displaced-frame curve")
    if "fock" in bases and cfg["m_fock"] < 5:
        raise UsageError("m_fock must be >= 5 for the Fock curve")

    rows = []
    for basis in bases:
        cutoffs = (range(2, cfg["n_c"] + 1) if basis == "ecs"
                   else range(5, cfg["m_fock"] + 1, 5))
        for parity in parities:
            prev: dict[int, float] = {}
            for cutoff in cutoffs:
                if basis == "ecs":
                    energies = ecs_eigenvalues(params, cutoff, parity)
                else:
                    energies = diagonalize_fock(
                        params, m_fock=cutoff, need_vectors=False
                    ).sector(parity)
                for s in range(min(cfg["states"], energies.size)):
                    val = float(energies[s])
                    if s in prev:
                        eta = (abs((val - prev[s]) / val) if val != 0.0
                               else abs(val - prev[s]))
                    else:
                        eta = math.nan
                    rows.append((basis, parity, s, cutoff, val, eta))
                    prev[s] = val

    config = _resolved_config("convergence", cfg, fields, g=params.g)
    columns = ("basis", "parity", "state_index", "cutoff", "energy", "eta")
    notes = ("eta is the relative energy change against the previous "
             "cutoff of the same curve (empty/nan on the first point)",)
    _emit_table(cfg, config, columns, rows, notes)
    return 0


def _cmd_gme(args: argparse.Namespace) -> int:
    fields = _FIELDS["gme"]
    cfg = _resolve(args, fields)
    params = _model(cfg)
    if params.n_qubits > 4:
        raise UsageError(
            "gme supports up to 4 qubits (the witness program size grows "
            "as 4^N)"
        )
    if cfg["dt"] <= 0.0:
        raise UsageError("dt must be > 0")
    if cfg["t_max"] < 0.0:
        raise UsageError("t_max must be >= 0")

    basis = eigen_basis(params, source=cfg["source"], m_fock=cfg["m_fock"],
                        e_max=cfg["e_max"])
    psi0 = initial_state(params, m_fock=basis.m_fock)
    coeffs = expand_in_eigenbasis(basis, psi0)
    t_grid = default_t_grid(cfg["t_max"], cfg["dt"])
    states = evolve(basis, coeffs, t_grid)
    ham = build_hamiltonian(params, basis.m_fock)

    rows = []
    for i, t in enumerate(t_grid):
        psi = states[i]
        rho = reduce_to_qubits(params, psi, float(t)).rho
        result = gme_monotone(rho)
        rows.append((
            float(t),
            result.value,
            purity(rho),
            energy_expectation(params, psi, ham),
        ))

    config = _resolved_config("gme", cfg, fields, g=params.g,
                              m_fock=basis.m_fock)
    columns = ("t", "gme", "purity", "energy")
    _emit_table(cfg, config, columns, rows)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """argparse with the conventional 64 exit code for usage errors."""

    def error(self, message):  # noqa: D102 - argparse contract
        self.print_usage(sys.stderr)
        self.exit(64, f"{self.prog}: error: {message}\n")


_HANDLERS = {
    "gcurve": _cmd_gcurve,
    "spectrum": _cmd_spectrum,
    "exceptional": _cmd_exceptional,
    "convergence": _cmd_convergence,
    "gme": _cmd_gme,
}

_SUMMARIES = {
    "gcurve": "tabulate both parity G-functions on an energy grid",
    "spectrum": "locate certified stable zeros and compare to the oracle",
    "exceptional": "sweep couplings for pole-lifting (m, n) families",
    "convergence": "tabulate eigenvalue convergence versus basis cutoff",
    "gme": "evolve GHZ x vacuum and tabulate entanglement/purity/energy",
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="dickeg", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    for command, fields in _FIELDS.items():
        p = sub.add_parser(command, help=_SUMMARIES[command])
        p.add_argument("--config", metavar="FILE", default=None,
                       help="flat key=value file; flags override it")
        for f in fields:
            kwargs: dict = {"dest": f.dest, "default": None, "help": f.help}
            if f.kind == "int":
                kwargs["type"] = int
            elif f.kind == "float":
                kwargs["type"] = float
            elif f.kind == "floats":
                kwargs["type"] = lambda s: tuple(
                    float(part) for part in s.split(",") if part.strip()
                )
                kwargs["metavar"] = "M1,M2,..."
            elif f.kind == "bool":
                kwargs["action"] = argparse.BooleanOptionalAction
            if f.choices and f.kind == "str":
                kwargs["choices"] = list(f.choices)
            p.add_argument(f.flag, **kwargs)
        p.set_defaults(handler=_HANDLERS[command])
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"dickeg {args.command}: error: {exc}", file=sys.stderr)
        return 64
    except (ValueError, TypeError) as exc:
        print(f"dickeg {args.command}: error: {exc}", file=sys.stderr)
        return 64
    except (ConvergenceError, CompletenessError) as exc:
        print(f"dickeg {args.command}: convergence failure: {exc}",
              file=sys.stderr)
        return 2
    except DickegError as exc:
        print(f"dickeg {args.command}: solver failure: {exc}",
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
