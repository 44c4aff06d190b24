"""Monte Carlo experiment driver.

Runs every scheme on the same drops over a grid of user and BS counts and
writes ``results.csv`` (one row per drop and scheme), ``summary.csv``
(mean/median/std per grid point and scheme), ``timing.csv`` (wall clock and
iteration counts, kept apart so that ``results.csv`` stays byte-identical
across runs) and ``manifest.json``.

Config files are INI-style ``key = value`` text with a ``[scenario]``
section (fields of :class:`ScenarioConfig`) and an optional ``[experiment]``
section (``drops``, ``schemes``, ``n_users``, ``num_bs``, ``parallel``,
``emit_per_user``). Command-line flags override the file.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import json
import logging
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from . import __version__
from .bargain import InfeasibleError
from .baseline import max_sum_rate
from .exhaustive import MAX_USERS, brute_force
from .radio import served_rates
from .metrics import NUMERIC_FIELDS, MetricsReport, report, summarize
from .scenario import ConfigError, ScenarioConfig, make_scenario
from .scga import scga_nbs

log = logging.getLogger(__name__)

SCHEMES = ("scga-nbs", "max-sum-rate", "brute-force")
EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

RESULT_COLUMNS = ["n_users", "num_bs", "scheme", "drop", "nash_product", "sum_rate_bps",
                  "avg_rate_bps", "jain_bs", "jain_user", "srr_raw", "srr_clamped", "qos_frac"]
_REPORT_FIELD = {"nash_product": "nash_product", "sum_rate_bps": "sum_rate",
                 "avg_rate_bps": "avg_user_rate", "jain_bs": "jain_bs_utility",
                 "jain_user": "jain_user_rate", "srr_raw": "srr_raw",
                 "srr_clamped": "srr_clamped", "qos_frac": "qos_satisfaction"}

_SCENARIO_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
_INT_FIELDS = {"num_users", "num_bs", "seed"}


class PlanError(ConfigError):
    pass


def _collect(errors: list) -> None:
    if errors:
        exc = ConfigError(errors[0][0], "; ".join(f"{k}: {m}" for k, m in errors))
        exc.errors = errors
        raise exc


def validate_config(raw: str | Mapping | None = None) -> ScenarioConfig:
    """Build a :class:`ScenarioConfig` from ``key = value`` text or a mapping.

    Missing keys take the reference defaults; unknown keys are rejected.
    Text input may carry a ``[scenario]`` header; without one the whole text
    is read as scenario keys. All problems are reported together in one
    :class:`ConfigError` whose ``errors`` lists ``(field path, message)``.
    """
    if raw is None:
        raw = {}
    prefix = "scenario."
    if isinstance(raw, str):
        cp = configparser.ConfigParser(interpolation=None)
        text = raw if raw.lstrip().startswith("[") else "[scenario]\n" + raw
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError("config", str(exc)) from exc
        extra = [s for s in cp.sections() if s not in ("scenario", "experiment")]
        if extra:
            raise ConfigError(extra[0], f"unknown section(s) {extra}")
        raw = dict(cp["scenario"]) if cp.has_section("scenario") else {}
    errors = []
    values = {}
    for key, value in raw.items():
        if key not in _SCENARIO_FIELDS:
            errors.append((prefix + key, "unknown key"))
            continue
        try:
            if key in _INT_FIELDS:
                f = float(value)
                if not f.is_integer():
                    raise ValueError
                values[key] = int(f)
            else:
                values[key] = float(value)
        except (TypeError, ValueError):
            errors.append((prefix + key, f"cannot parse {value!r} as "
                           f"{'an integer' if key in _INT_FIELDS else 'a number'}"))
    _collect(errors)
    # check fields one at a time against the defaults so every violation is reported
    defaults = ScenarioConfig()
    for key, value in values.items():
        try:
            dataclasses.replace(defaults, **{key: value})
        except ConfigError as exc:
            errors.append((prefix + exc.field, exc.message))
    _collect(errors)
    try:
        return ScenarioConfig(**values)
    except ConfigError as exc:
        raise ConfigError(prefix + exc.field, exc.message) from exc


@dataclass
class ExperimentPlan:
    base: ScenarioConfig = field(default_factory=ScenarioConfig)
    n_users_sweep: list = field(default_factory=lambda: [40])
    b_sweep: list = field(default_factory=lambda: [5])
    schemes: list = field(default_factory=lambda: ["scga-nbs", "max-sum-rate"])
    drops: int = 100
    out_dir: Path = Path("results")
    emit_per_user: bool = False
    parallel: int = 1

    def __post_init__(self):
        self.out_dir = Path(self.out_dir)
        if self.drops < 1:
            raise PlanError("experiment.drops", f"must be >= 1, got {self.drops}")
        if not self.schemes:
            raise PlanError("experiment.schemes", "at least one scheme required")
        bad = [s for s in self.schemes if s not in SCHEMES]
        if bad:
            raise PlanError("experiment.schemes", f"unknown scheme(s) {bad}; choose from {SCHEMES}")
        if len(set(self.schemes)) != len(self.schemes):
            raise PlanError("experiment.schemes", "duplicate scheme")
        if "brute-force" in self.schemes and max(self.n_users_sweep) > MAX_USERS:
            raise PlanError("experiment.schemes",
                            f"brute-force only allowed for n_users <= {MAX_USERS}")
        if self.parallel < 1:
            raise PlanError("experiment.parallel", "must be >= 1")
        for n in self.n_users_sweep:
            for b in self.b_sweep:
                try:
                    self.config_for(n, b)
                except ConfigError as exc:
                    raise PlanError(f"experiment.{exc.field}", str(exc)) from exc

    def config_for(self, n_users: int, num_bs: int) -> ScenarioConfig:
        return dataclasses.replace(self.base, num_users=int(n_users), num_bs=int(num_bs))

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["out_dir"] = str(self.out_dir)
        return d


def _int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in str(text).replace(",", " ").split()]


def _str_list(text) -> list[str]:
    if isinstance(text, (list, tuple)):
        return list(text)
    return [v for v in str(text).replace(",", " ").split()]


_EXPERIMENT_KEYS = {"drops": int, "schemes": _str_list, "n_users": _int_list,
                    "num_bs": _int_list, "parallel": int,
                    "emit_per_user": lambda v: str(v).strip().lower() in ("1", "true", "yes", "on")}


def load_experiment_section(text: str) -> dict:
    cp = configparser.ConfigParser(interpolation=None)
    cp.read_string(text if text.lstrip().startswith("[") else "[scenario]\n" + text)
    if not cp.has_section("experiment"):
        return {}
    out, errors = {}, []
    for key, value in cp["experiment"].items():
        if key not in _EXPERIMENT_KEYS:
            errors.append(("experiment." + key, "unknown key"))
            continue
        try:
            out[key] = _EXPERIMENT_KEYS[key](value)
        except ValueError:
            errors.append(("experiment." + key, f"cannot parse {value!r}"))
    _collect(errors)
    return out


def run_scheme(scn, scheme: str):
    """Run one scheme; returns ``(association, iteration count)``."""
    if scheme == "scga-nbs":
        out = scga_nbs(scn)
        return out.assoc, out.info["iterations"]
    if scheme == "max-sum-rate":
        out = max_sum_rate(scn)
        return out.assoc, out.info["iterations"]
    if scheme == "brute-force":
        res = brute_force(scn, "nash")
        return res.assoc, res.evaluated
    raise ValueError(f"unknown scheme {scheme!r}")


def _nan_report(scheme, drop, n, b) -> MetricsReport:
    nan = float("nan")
    return MetricsReport(scheme, drop, n, b, nan, nan, nan, nan, nan, nan, nan, nan, [])


def run_drop(config: ScenarioConfig, drop: int, schemes) -> list[dict]:
    """Evaluate every scheme on drop ``drop`` of ``config``; one record per scheme."""
    scn = make_scenario(config, drop)
    records = []
    for scheme in schemes:
        t0 = time.perf_counter()
        try:
            assoc, iterations = run_scheme(scn, scheme)
            rep = report(scn, assoc, scheme, drop)
            per_user = list(zip(assoc.labels.tolist(), served_rates(scn, assoc).tolist()))
            error = ""
        except (InfeasibleError, ValueError, RuntimeError) as exc:
            log.warning("%s failed on N=%d B=%d drop %d: %s", scheme, config.num_users,
                        config.num_bs, drop, exc)
            rep, iterations, per_user, error = (
                _nan_report(scheme, drop, config.num_users, config.num_bs), 0, [], str(exc))
        records.append({"report": rep, "wall_s": time.perf_counter() - t0,
                        "iterations": iterations, "per_user": per_user, "error": error})
    return records


def _task(args):
    return run_drop(*args)


def result_row(rep: MetricsReport, max_bs: int) -> list:
    row = [rep.n_users, rep.num_bs, rep.scheme, rep.drop_id]
    row += [repr(float(getattr(rep, _REPORT_FIELD[c]))) for c in RESULT_COLUMNS[4:]]
    loads = list(rep.loads) + [""] * (max_bs - len(rep.loads))
    return row + loads


def run_experiment(plan: ExperimentPlan) -> dict:
    """Execute ``plan`` and write its output files; returns the manifest dict.

    Drops may run in worker processes (``plan.parallel``) but results are
    always written in (n_users, num_bs, scheme, drop) order.
    """
    plan.out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [(plan.config_for(n, b), d, tuple(plan.schemes))
             for n in plan.n_users_sweep for b in plan.b_sweep for d in range(plan.drops)]
    t0 = time.perf_counter()
    if plan.parallel > 1:
        with ProcessPoolExecutor(max_workers=plan.parallel) as pool:
            per_task = list(pool.map(_task, tasks))
    else:
        per_task = [_task(t) for t in tasks]
    elapsed = time.perf_counter() - t0

    records = [rec for recs in per_task for rec in recs]
    order = {s: i for i, s in enumerate(plan.schemes)}
    records.sort(key=lambda r: (plan.n_users_sweep.index(r["report"].n_users),
                                plan.b_sweep.index(r["report"].num_bs),
                                order[r["report"].scheme], r["report"].drop_id))
    max_bs = max(plan.b_sweep)

    with open(plan.out_dir / "results.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS + [f"load_b{i}" for i in range(max_bs)])
        for rec in records:
            w.writerow(result_row(rec["report"], max_bs))

    with open(plan.out_dir / "timing.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n_users", "num_bs", "scheme", "drop", "wall_s", "iterations", "error"])
        for rec in records:
            r = rec["report"]
            w.writerow([r.n_users, r.num_bs, r.scheme, r.drop_id, f"{rec['wall_s']:.6f}",
                        rec["iterations"], rec["error"]])

    if plan.emit_per_user:
        with open(plan.out_dir / "per_user.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n_users", "num_bs", "scheme", "drop", "user", "bs", "rate_bps"])
            for rec in records:
                r = rec["report"]
                for user, (bs, rate) in enumerate(rec["per_user"]):
                    w.writerow([r.n_users, r.num_bs, r.scheme, r.drop_id, user, bs, repr(rate)])

    summary_rows = []
    groups = {}
    for rec in records:
        r = rec["report"]
        groups.setdefault((r.n_users, r.num_bs, r.scheme), []).append(rec)
    with open(plan.out_dir / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        stats = ("mean", "median", "std")
        w.writerow(["n_users", "num_bs", "scheme", "count", "failures"]
                   + [f"{name}_{s}" for name in NUMERIC_FIELDS for s in stats])
        for (n, b, scheme), recs in groups.items():
            ok = [rec["report"] for rec in recs if not rec["error"]]
            if ok:
                agg = summarize(ok)
                vals = [repr(agg[name][s]) for name in NUMERIC_FIELDS for s in stats]
            else:
                vals = ["nan"] * (len(NUMERIC_FIELDS) * len(stats))
            w.writerow([n, b, scheme, len(recs), len(recs) - len(ok)] + vals)
            summary_rows.append((n, b, scheme))

    timing = {}
    for (n, b, scheme), recs in groups.items():
        timing[f"{scheme}/N={n}/B={b}"] = {
            "wall_s_total": float(sum(r["wall_s"] for r in recs)),
            "wall_s_mean": float(np.mean([r["wall_s"] for r in recs])),
            "iterations_mean": float(np.mean([r["iterations"] for r in recs])),
        }
    failures = [{"n_users": r["report"].n_users, "num_bs": r["report"].num_bs,
                 "scheme": r["report"].scheme, "drop": r["report"].drop_id, "error": r["error"]}
                for r in records if r["error"]]
    manifest = {
        "package": "hetnet_nbs", "version": __version__,
        "python": platform.python_version(), "numpy": np.__version__,
        "seed": plan.base.seed, "rng": "numpy PCG64, SeedSequence(seed, spawn_key=(drop,))",
        "plan": plan.as_dict(), "rows": len(records), "elapsed_s": elapsed,
        "timing": timing, "failures": failures,
    }
    with open(plan.out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, default=str)
    return manifest


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hetnet-nbs", description=__doc__.split("\n\n")[0])
    p.add_argument("--config", type=Path, help="INI-style key = value config file")
    p.add_argument("--out-dir", type=Path, default=None, help="output directory (default: results)")
    p.add_argument("--drops", type=int, help="Monte Carlo drops per grid point")
    p.add_argument("--seed", type=int, help="base seed (overrides scenario.seed)")
    p.add_argument("--scheme", action="append", choices=SCHEMES,
                   help="scheme to run; repeat for several (default: scga-nbs and max-sum-rate)")
    p.add_argument("--n-users", help="comma-separated user counts, e.g. 20,30,40")
    p.add_argument("--num-bs", help="comma-separated total BS counts, e.g. 5,7")
    p.add_argument("--emit-per-user", action="store_true", help="also write per_user.csv")
    p.add_argument("--parallel", type=int, help="worker processes for drops")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def plan_from_args(args) -> ExperimentPlan:
    text = args.config.read_text() if args.config else ""
    base = validate_config(text)
    exp = load_experiment_section(text) if text else {}
    if args.seed is not None:
        base = validate_config({**{k: getattr(base, k) for k in _SCENARIO_FIELDS}, "seed": args.seed})
    kw = {"base": base}
    for key, attr in (("n_users", "n_users_sweep"), ("num_bs", "b_sweep"), ("schemes", "schemes"),
                      ("drops", "drops"), ("parallel", "parallel"),
                      ("emit_per_user", "emit_per_user")):
        if key in exp:
            kw[attr] = exp[key]
    try:
        if args.n_users:
            kw["n_users_sweep"] = _int_list(args.n_users)
        if args.num_bs:
            kw["b_sweep"] = _int_list(args.num_bs)
    except ValueError as exc:
        raise ConfigError("cli", f"bad integer list: {exc}") from exc
    if args.scheme:
        kw["schemes"] = args.scheme
    if args.drops is not None:
        kw["drops"] = args.drops
    if args.parallel is not None:
        kw["parallel"] = args.parallel
    if args.emit_per_user:
        kw["emit_per_user"] = True
    kw["out_dir"] = args.out_dir or Path("results")
    return ExperimentPlan(**kw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        plan = plan_from_args(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        manifest = run_experiment(plan)
    except OSError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if manifest["failures"]:
        print(f"{len(manifest['failures'])} scheme run(s) failed; see manifest.json",
              file=sys.stderr)
        return EXIT_RUNTIME
    print(f"wrote {manifest['rows']} rows to {plan.out_dir}")
    return EXIT_OK
