"""Experiment configs, power sweeps and the CSV result table.

A config is a flat ``key = value`` file.  ``#`` and ``;`` start comments and
a single ``[section]`` header line is accepted and ignored, so the files
also read as plain INI.  Example::

    users = 10
    power_db = 0:12:1        # start:stop:step, inclusive; or 0, 2, 4
    per_model = rcb          # rcb | ldpc | fixed
    metric = bounded         # average | bounded
    renewals = 200000
    seed = 7
"""

from __future__ import annotations

import csv
import io
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .analytics import SystemConfig, scheme_aoi
from .channel import effective_snr, per_estimate
from .errors import DivergentAoIError, InvalidArgumentError
from .optimizer import SweepSpec, db_to_linear, evaluate_grid
from .per_model import PerCache, PerModel
from .scheme import Scheme
from .simulator import SchemeTiming, draw_renewals, empirical_average_aoi, empirical_bounded_aoi

COLUMNS = (
    "scheme",
    "N",
    "power_db",
    "K",
    "best_l",
    "per",
    "avg_aoi_analytic",
    "avg_aoi_sim",
    "bounded_aoi_sim",
    "bounded_aoi_chebyshev",
    "gamma",
    "seed",
)


class ConfigError(ValueError):
    """Config validation failed; ``messages`` holds one line per problem."""

    def __init__(self, messages):
        self.messages = list(messages)
        super().__init__("\n".join(self.messages))


@dataclass(frozen=True)
class ExperimentConfig:
    users: int
    powers_db: tuple[float, ...]
    gamma: float = 0.99
    source_bits: int = 100
    bandwidth: float = 1.0
    schemes: tuple[Scheme, ...] = (Scheme.TDMA, Scheme.FDMA)
    per_model: PerModel = field(default_factory=PerModel)
    analytic_per: str = "model"
    metric: str = "average"
    l_min: int = 100
    l_max: int = 400
    l_step: int = 10
    renewals: int = 100_000
    seed: int = 0
    workers: int = 1
    csv_path: Path | None = None
    svg_dir: Path | None = None

    def system(self) -> SystemConfig:
        return SystemConfig(
            users=self.users,
            bandwidth=self.bandwidth,
            source_bits=self.source_bits,
            gamma=self.gamma,
        )

    def sweep(self) -> SweepSpec:
        return SweepSpec(
            l_min=self.l_min,
            l_max=self.l_max,
            l_step=self.l_step,
            metric=self.metric,
            per_model=self.per_model,
            powers_db=self.powers_db,
        )


@dataclass(frozen=True)
class ResultRow:
    scheme: Scheme
    N: int
    power_db: float
    K: int
    best_l: int
    per: float
    avg_aoi_analytic: float
    avg_aoi_sim: float
    bounded_aoi_sim: float
    bounded_aoi_chebyshev: float
    gamma: float
    seed: int

    def sort_key(self):
        return (self.scheme.value, self.power_db)

    def cells(self) -> list[str]:
        out = []
        for name in COLUMNS:
            v = getattr(self, name)
            if isinstance(v, Scheme):
                out.append(v.value)
            elif isinstance(v, (int, np.integer)):
                out.append(str(int(v)))
            else:
                out.append(f"{float(v):.9g}")
        return out


# -- config parsing ---------------------------------------------------------


def _parse_powers(text: str) -> tuple[float, ...]:
    text = text.strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
            raise ValueError("range must be start:stop:step with step > 0 and stop >= start")
        start, stop, step = parts
        count = int(round((stop - start) / step)) + 1
        return tuple(round(start + i * step, 10) for i in range(count))
    values = tuple(float(p) for p in text.split(",") if p.strip())
    if not values:
        raise ValueError("empty power list")
    return values


def _parse_schemes(text: str) -> tuple[Scheme, ...]:
    out = tuple(Scheme.parse(s) for s in text.split(",") if s.strip())
    if not out or len(set(out)) != len(out):
        raise ValueError("schemes must be a non-empty list without repeats")
    return out


def _choice(*options):
    def parse(text):
        text = text.strip().lower()
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return parse


def _uint(text):
    v = int(text)
    if v < 0:
        raise ValueError("must be >= 0")
    return v


_KEYS = {
    "users": int,
    "power_db": _parse_powers,
    "gamma": float,
    "source_bits": int,
    "bandwidth": float,
    "schemes": _parse_schemes,
    "per_model": _choice("rcb", "ldpc", "fixed"),
    "fixed_per": float,
    "analytic_per": _choice("model", "rcb"),
    "metric": _choice("average", "bounded"),
    "l_min": int,
    "l_max": int,
    "l_step": int,
    "renewals": int,
    "seed": _uint,
    "workers": int,
    "ldpc_min_errors": int,
    "ldpc_max_trials": int,
    "ldpc_max_iter": int,
    "csv": str,
    "svg_dir": str,
}
_REQUIRED = ("users", "power_db")


def read_config_text(text: str, origin: str = "<config>") -> tuple[dict, dict]:
    """Parse into ``(values, line_numbers)``, reporting every bad line at once."""
    values, lines, errors = {}, {}, []
    present = set()
    seen_section = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            if seen_section:
                errors.append(f"{origin}:{lineno}: only one [section] header is allowed")
            seen_section = True
            continue
        if "=" not in line:
            errors.append(f"{origin}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        present.add(key)
        if key not in _KEYS:
            errors.append(f"{origin}:{lineno}: unknown key {key!r}")
            continue
        if key in lines:
            errors.append(f"{origin}:{lineno}: duplicate key {key!r} (first on line {lines[key]})")
            continue
        lines[key] = lineno
        try:
            values[key] = _KEYS[key](value)
        except (ValueError, InvalidArgumentError) as exc:
            errors.append(f"{origin}:{lineno}: bad value for {key!r}: {exc}")
    for key in _REQUIRED:
        if key not in present:
            errors.append(f"{origin}: missing required key {key!r}")
    if errors:
        raise ConfigError(errors)
    return values, lines


def build_config(values: dict, lines: dict, origin: str, base_dir: Path) -> ExperimentConfig:
    errors = []

    def where(*keys):
        for k in keys:
            if k in lines:
                return f"{origin}:{lines[k]}"
        return origin

    def check(cond, keys, message):
        if not cond:
            errors.append(f"{where(*keys)}: {message}")

    v = dict(values)
    check(v["users"] >= 1, ["users"], "users must be >= 1")
    check(0.0 < v.get("gamma", 0.99) < 1.0, ["gamma"], "gamma must lie in (0, 1)")
    k = v.get("source_bits", 100)
    check(k >= 1, ["source_bits"], "source_bits must be >= 1")
    check(v.get("bandwidth", 1.0) > 0, ["bandwidth"], "bandwidth must be > 0")
    l_min, l_max, l_step = v.get("l_min", 100), v.get("l_max", 400), v.get("l_step", 10)
    check(l_min >= k, ["l_min", "source_bits"], f"l_min ({l_min}) must be >= source_bits ({k})")
    check(l_min <= l_max, ["l_max", "l_min"], f"l_max ({l_max}) must be >= l_min ({l_min})")
    check(l_step >= 1, ["l_step"], "l_step must be >= 1")
    check(v.get("renewals", 100_000) >= 1, ["renewals"], "renewals must be >= 1")
    check(v.get("workers", 1) >= 1, ["workers"], "workers must be >= 1")
    kind = v.get("per_model", "rcb")
    if kind == "fixed":
        check("fixed_per" in v, ["per_model"], "per_model = fixed needs fixed_per")
        check(0.0 <= v.get("fixed_per", 0.0) < 1.0, ["fixed_per"], "fixed_per must lie in [0, 1)")
    if kind == "ldpc":
        check(k >= 4, ["source_bits"], "the ldpc model needs source_bits >= 4")
    for key in ("ldpc_min_errors", "ldpc_max_trials", "ldpc_max_iter"):
        check(v.get(key, 1) >= 1, [key], f"{key} must be >= 1")
    if errors:
        raise ConfigError(errors)

    seed = v.get("seed", 0)
    model = PerModel(
        kind=kind,
        fixed_per=v.get("fixed_per", 0.0),
        min_errors=v.get("ldpc_min_errors", 100),
        max_trials=v.get("ldpc_max_trials", 10**6),
        max_iter=v.get("ldpc_max_iter", 50),
        seed=seed,
    )
    csv_path = Path(v["csv"]) if "csv" in v else None
    if csv_path is not None and not csv_path.is_absolute():
        csv_path = base_dir / csv_path
    svg_dir = Path(v["svg_dir"]) if "svg_dir" in v else None
    if svg_dir is not None and not svg_dir.is_absolute():
        svg_dir = base_dir / svg_dir
    return ExperimentConfig(
        users=v["users"],
        powers_db=v["power_db"],
        gamma=v.get("gamma", 0.99),
        source_bits=k,
        bandwidth=v.get("bandwidth", 1.0),
        schemes=v.get("schemes", (Scheme.TDMA, Scheme.FDMA)),
        per_model=model,
        analytic_per=v.get("analytic_per", "model"),
        metric=v.get("metric", "average"),
        l_min=l_min,
        l_max=l_max,
        l_step=l_step,
        renewals=v.get("renewals", 100_000),
        seed=seed,
        workers=v.get("workers", 1),
        csv_path=csv_path,
        svg_dir=svg_dir,
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    values, lines = read_config_text(text, origin=str(path))
    return build_config(values, lines, str(path), path.parent)


def with_seed(cfg: ExperimentConfig, seed: int) -> ExperimentConfig:
    return replace(cfg, seed=seed, per_model=replace(cfg.per_model, seed=seed))


# -- sweep ------------------------------------------------------------------


def _row_seed(seed: int, scheme: Scheme, power_index: int) -> np.random.SeedSequence:
    scheme_index = 0 if scheme is Scheme.TDMA else 1
    return np.random.SeedSequence(seed, spawn_key=(scheme_index, power_index))


def compute_row(cfg: ExperimentConfig, scheme: Scheme, power_index: int) -> ResultRow:
    system = cfg.system()
    spec = cfg.sweep()
    power_db = cfg.powers_db[power_index]
    points = evaluate_grid(system, spec, scheme, power_db, PerCache())
    best = min(points, key=lambda g: g.value)
    if not np.isfinite(best.value):
        raise DivergentAoIError(
            f"{scheme} at {power_db} dB: PER is 1 at every block length in the grid"
        )
    per = best.per
    if cfg.analytic_per == "rcb" and cfg.per_model.kind != "rcb":
        snr = effective_snr(scheme, cfg.users, cfg.bandwidth, db_to_linear(power_db))
        per = per_estimate(cfg.source_bits, best.block_len, snr).per
    analytic = scheme_aoi(scheme, system, best.block_len, per)
    timing = SchemeTiming.for_scheme(scheme, cfg.users, best.block_len, cfg.bandwidth)
    batch = draw_renewals(best.per, cfg.renewals, _row_seed(cfg.seed, scheme, power_index), timing)
    mean_sim, _ = empirical_average_aoi(batch)
    return ResultRow(
        scheme=scheme,
        N=cfg.users,
        power_db=power_db,
        K=cfg.source_bits,
        best_l=best.block_len,
        per=per,
        avg_aoi_analytic=analytic.mean,
        avg_aoi_sim=mean_sim,
        bounded_aoi_sim=empirical_bounded_aoi(batch, cfg.gamma),
        bounded_aoi_chebyshev=analytic.bounded_upper,
        gamma=cfg.gamma,
        seed=cfg.seed,
    )


def _compute_task(args):
    return compute_row(*args)


def run_sweep(cfg: ExperimentConfig, workers: int | None = None) -> list[ResultRow]:
    """One row per (scheme, power), sorted so output is independent of scheduling."""
    workers = workers or cfg.workers
    tasks = [(cfg, s, i) for s in cfg.schemes for i in range(len(cfg.powers_db))]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_compute_task, tasks))
    else:
        rows = [_compute_task(t) for t in tasks]
    return sorted(rows, key=ResultRow.sort_key)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow(row.cells())
    return buf.getvalue()


def write_csv_atomic(rows, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(rows_to_csv(rows))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
