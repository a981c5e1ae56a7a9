"""Parameter sweeps: presets, execution, diversity fits and file output."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import analytic, montecarlo, timeline
from .config import ConfigError, PROCEDURES, Scheme, SystemParams, db2lin, from_db, validate

SWEEP_VARIABLES = ("rate", "var_sd", "var_sr_rd", "power")
BACKENDS = ("analytic", "montecarlo", "both")
KINDS = ("outage", "latency")
ANALYTIC_SCHEMES = (Scheme.S2D1, Scheme.S2D2, Scheme.AF, Scheme.CONVENTIONAL, Scheme.ENHANCED)

COLUMNS = (
    "x", "scheme", "p_out", "p_hat", "stderr", "failures", "n_trials", "low_confidence",
    "z", "relay_pct", "source_pct", "mc_relay_pct", "mc_source_pct", "rounds",
    "latency_ms", "error",
)


@dataclass(frozen=True)
class Experiment:
    name: str
    sweep_variable: str
    grid: tuple
    schemes: tuple
    base_params: SystemParams = SystemParams()
    kind: str = "outage"
    backend: str = "analytic"
    n_trials: int = 10**7
    seed: int = 0
    redraw: str = "reuse"
    coupling: str = "joint"
    exact_mi: bool = False
    target_outage: float = 1e-5
    budget_ms: float = 1.5
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(x) for x in self.grid))
        object.__setattr__(self, "schemes", tuple(Scheme(s) for s in self.schemes))

    def with_(self, **changes) -> "Experiment":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schemes"] = [s.value for s in self.schemes]
        d["grid"] = list(self.grid)
        d["base_params"] = self.base_params.to_dict()
        return d


def check_experiment(exp: Experiment) -> Experiment:
    if not exp.grid:
        raise ConfigError("sweep grid is empty")
    if not exp.schemes:
        raise ConfigError("scheme list is empty")
    if exp.sweep_variable not in SWEEP_VARIABLES:
        raise ConfigError(f"unknown sweep variable {exp.sweep_variable!r}")
    if exp.backend not in BACKENDS:
        raise ConfigError(f"unknown backend {exp.backend!r}")
    if exp.kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {exp.kind!r}")
    if exp.kind == "latency" and exp.sweep_variable != "power":
        raise ConfigError("latency experiments sweep the transmit power")
    if exp.n_trials < 1:
        raise ConfigError("n_trials must be at least 1")
    if exp.redraw not in ("reuse", "fresh", "mixed"):
        raise ConfigError(f"unknown redraw policy {exp.redraw!r}")
    if exp.coupling not in montecarlo.COUPLINGS:
        raise ConfigError(f"unknown coupling {exp.coupling!r}")
    if not 0.0 < exp.target_outage < 1.0:
        raise ConfigError("target_outage must be in (0, 1)")
    validate(exp.base_params)
    for x in exp.grid:
        validate(point_params(exp, x))
    return exp


def point_params(exp: Experiment, x: float) -> SystemParams:
    p = exp.base_params
    if exp.sweep_variable == "rate":
        return p.with_(rate=x)
    if exp.sweep_variable == "var_sd":
        return p.with_(var_sd=db2lin(x))
    if exp.sweep_variable == "var_sr_rd":
        return p.with_(var_sr=db2lin(x), var_rd=db2lin(x))
    return p.with_(p_s=db2lin(x), p_r=db2lin(x))


# --- Presets ---------------------------------------------------------------------

def _grid(start, stop, step):
    n = int(round((stop - start) / step))
    return tuple(round(start + i * step, 10) for i in range(n + 1))


RATE_GRID = _grid(0.25, 4.0, 0.25)
POWER_GRID = _grid(0.0, 30.0, 2.5)
GAIN_GRID = _grid(-10.0, 20.0, 2.5)


def builtin_figures() -> dict:
    """Named presets reproducing each figure of the evaluation."""
    every = tuple(Scheme)
    strong_relay = dict(var_sr_rd_db=10.0)
    presets = [
        Experiment("fig5", "power", _grid(0.0, 30.0, 1.0),
                   (Scheme.ENHANCED, Scheme.CONVENTIONAL, Scheme.S2D2),
                   from_db(var_sd_db=0.0, **strong_relay), kind="latency",
                   redraw="fresh", target_outage=1e-5, budget_ms=1.5,
                   description="latency at a reliability target versus transmit SNR"),
        Experiment("fig6", "rate", RATE_GRID, every,
                   from_db(p_db=5.0, var_sd_db=-10.0, var_rr_db=-10.0, **strong_relay),
                   description="outage versus rate, weak direct link"),
        Experiment("fig7", "rate", RATE_GRID, every,
                   from_db(p_db=5.0, var_sd_db=5.0, var_rr_db=-10.0, **strong_relay),
                   description="outage versus rate, moderate direct link"),
        Experiment("fig8", "var_sd", GAIN_GRID, every,
                   from_db(p_db=5.0, var_rr_db=-10.0, rate=1.0, **strong_relay),
                   description="outage versus direct-link gain"),
        Experiment("fig9", "var_sr_rd", GAIN_GRID, every,
                   from_db(p_db=5.0, var_sd_db=0.0, var_rr_db=-10.0, rate=1.0),
                   description="outage versus relaying-link gain"),
        Experiment("fig10", "power", POWER_GRID, every,
                   from_db(var_sd_db=0.0, var_rr_db=None, **strong_relay),
                   description="outage versus transmit power, negligible self-interference"),
        Experiment("fig11", "power", POWER_GRID, every,
                   from_db(var_sd_db=0.0, var_rr_db=0.0, **strong_relay),
                   description="outage versus transmit power, strong self-interference"),
        Experiment("fig12", "power", POWER_GRID, every,
                   from_db(var_sd_db=0.0, var_rr_db=-10.0, **strong_relay),
                   description="outage versus transmit power, moderate self-interference"),
    ]
    return {e.name: e for e in presets}


def load_experiment(source: str | Path) -> Experiment:
    """A preset name, or a JSON file describing an experiment.

    The file may name a ``preset`` to start from and override any field;
    ``params`` accepts the keys of :func:`fdharq.config.from_db` and replaces
    the preset's parameters entirely, while ``grid`` is a list or a
    ``{"start", "stop", "step"}`` object.
    """
    presets = builtin_figures()
    if str(source) in presets:
        return presets[str(source)]
    path = Path(source)
    if not path.is_file():
        raise ConfigError(f"{source!r} is neither a preset ({', '.join(presets)}) nor a file")
    try:
        cfg = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be an object")
    base = cfg.pop("preset", None)
    if base is not None and base not in presets:
        raise ConfigError(f"unknown preset {base!r}")
    changes = {}
    if "params" in cfg:
        params = cfg.pop("params")
        if not isinstance(params, dict):
            raise ConfigError("params must be an object")
        changes["base_params"] = from_db(**params)
    if "grid" in cfg:
        g = cfg.pop("grid")
        if isinstance(g, dict):
            try:
                g = _grid(float(g["start"]), float(g["stop"]), float(g["step"]))
            except (KeyError, ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"bad grid specification: {exc}") from None
        changes["grid"] = g
    allowed = {f for f in Experiment.__dataclass_fields__} - {"base_params"}
    for key, value in cfg.items():
        if key not in allowed:
            raise ConfigError(f"unknown experiment field {key!r}")
        changes[key] = value
    try:
        if base is not None:
            exp = presets[base].with_(**changes)
        else:
            changes.setdefault("name", path.stem)
            exp = Experiment(**changes)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return check_experiment(exp)


# --- Execution ---------------------------------------------------------------------

def _blank_row(x, scheme) -> dict:
    row = dict.fromkeys(COLUMNS)
    row.update(x=x, scheme=scheme.value, error="")
    return row


def _analytic_point(p: SystemParams, exp: Experiment, rows: dict) -> None:
    breakdown = None
    for scheme in exp.schemes:
        row = rows[scheme]
        if scheme not in ANALYTIC_SCHEMES:
            continue
        try:
            if scheme is Scheme.S2D1:
                row["p_out"] = analytic.baseline_s2d(p, 1)
            elif scheme is Scheme.S2D2:
                row["p_out"] = analytic.baseline_s2d(p, 2)
                row["source_pct"] = analytic.cooperation_percentages(p, procedure=scheme)["source_pct"]
                row["relay_pct"] = 0.0
            elif scheme is Scheme.AF:
                row["p_out"] = analytic.outage_phase1(p)
            else:
                if breakdown is None:
                    breakdown = analytic.system_outage(p, procedure=scheme, redraw=exp.redraw)
                b = analytic.assemble(breakdown, scheme)
                row["p_out"] = b.p_out_system
                row.update(analytic.cooperation_percentages(p, procedure=scheme, breakdown=b))
        except (ArithmeticError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            row["error"] = f"analytic: {exc}"


def _mc_point(p: SystemParams, exp: Experiment, rows: dict) -> None:
    try:
        res = montecarlo.simulate(p, exp.schemes, exp.n_trials, exp.seed, redraw=exp.redraw,
                                  coupling=exp.coupling, exact_mi=exp.exact_mi)
    except (ArithmeticError, ValueError, MemoryError) as exc:
        if isinstance(exc, ConfigError):
            raise
        for row in rows.values():
            row["error"] = (row["error"] + "; " if row["error"] else "") + f"montecarlo: {exc}"
        return
    for scheme, est in res.estimates.items():
        row = rows[scheme]
        row.update(p_hat=est.p_hat, stderr=est.stderr, failures=est.failures,
                   n_trials=est.n_trials, low_confidence=est.low_confidence)
        if scheme in PROCEDURES or scheme is Scheme.S2D2:
            coop = res.cooperation(scheme)
            row["mc_relay_pct"] = coop["relay_pct"]
            row["mc_source_pct"] = coop["source_pct"]
        if row["p_out"] is not None:
            row["z"] = z_score(row["p_out"], est.p_hat, est.n_trials)


def z_score(p_out: float, p_hat: float, n_trials: int) -> float | None:
    """Disagreement in units of the binomial standard error at the analytic
    probability (defined even when no failure was observed)."""
    sd = math.sqrt(max(p_out * (1.0 - p_out), 0.0) / n_trials)
    if sd == 0.0:
        return 0.0 if p_hat == p_out else math.copysign(math.inf, p_hat - p_out)
    return (p_hat - p_out) / sd


def _outage_rows(exp: Experiment, x: float) -> list[dict]:
    p = point_params(exp, x)
    rows = {s: _blank_row(x, s) for s in exp.schemes}
    if exp.backend in ("analytic", "both"):
        _analytic_point(p, exp, rows)
    if exp.backend in ("montecarlo", "both"):
        _mc_point(p, exp, rows)
    return list(rows.values())


def _latency_rows(exp: Experiment, x: float) -> list[dict]:
    out = []
    for scheme in exp.schemes:
        row = _blank_row(x, scheme)
        try:
            (pt,) = timeline.latency_at_reliability(exp.base_params, scheme, exp.target_outage,
                                                   exp.budget_ms, [x], redraw=exp.redraw)
            row.update(rounds=pt.rounds, latency_ms=pt.latency_ms, p_out=pt.outage)
        except (ArithmeticError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            row["error"] = f"analytic: {exc}"
        out.append(row)
    return out


def _run_point(args):
    exp, x = args
    return _latency_rows(exp, x) if exp.kind == "latency" else _outage_rows(exp, x)


def run_experiment(exp: Experiment, workers: int = 1) -> list[dict]:
    """One row per (grid point, scheme), ordered by grid index."""
    check_experiment(exp)
    jobs = [(exp, x) for x in exp.grid]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_point, jobs))
    else:
        chunks = [_run_point(j) for j in jobs]
    return [row for chunk in chunks for row in chunk]


# --- Analysis -----------------------------------------------------------------------

def diversity_slope(rows, scheme: Scheme, fit_range_db, value: str = "p_out") -> float:
    """Minus the slope of log10(outage) against P_dB / 10 over ``fit_range_db``."""
    scheme = Scheme(scheme)
    lo, hi = fit_range_db
    pts = [(r["x"], r[value]) for r in rows
           if r["scheme"] == scheme.value and lo <= r["x"] <= hi
           and r.get(value) is not None and r[value] > 0]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 positive points in {fit_range_db}, got {len(pts)}")
    x = np.array([p[0] for p in pts]) / 10.0
    y = np.log10([p[1] for p in pts])
    slope = np.polyfit(x, y, 1)[0]
    return float(-slope)


def agreement_fraction(rows, min_p_out: float = 1e-5, max_abs_z: float = 3.0):
    """(fraction of rows with |z| <= max_abs_z, number of rows considered)."""
    rel = [r for r in rows if r.get("z") is not None and r["p_out"] is not None
           and r["p_out"] >= min_p_out]
    if not rel:
        return math.nan, 0
    ok = sum(abs(r["z"]) <= max_abs_z for r in rel)
    return ok / len(rel), len(rel)


# --- Output ---------------------------------------------------------------------------

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in COLUMNS])
    return buf.getvalue().encode()


def content_hash(data: bytes) -> str:
    """Hash of ``data`` as git would store it as a blob."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def write_outputs(exp: Experiment, rows, out_dir: str | Path) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    data = rows_to_csv(rows)
    csv_path = out / f"{exp.name}.csv"
    csv_path.write_bytes(data)
    sidecar = {
        "experiment": exp.to_dict(),
        "columns": list(COLUMNS),
        "rows": len(rows),
        "csv": csv_path.name,
        "content_hash": content_hash(data),
    }
    json_path = out / f"{exp.name}.json"
    json_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return csv_path, json_path
