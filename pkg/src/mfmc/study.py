"""Replicated pilot -> allocation -> estimation studies with file reports.

One *replicate* re-runs the whole analysis end to end: draw a fresh pilot,
estimate the allocation statistics, solve the allocation at the requested
budget (or derive the budget from a tolerance), draw fresh estimation
samples, and combine. A *study* repeats that R times with independent seed
streams and reports replicate tables, allocation summaries, and empirical
errors against reference values. A *sweep* runs one study per budget and
tabulates error versus budget.

Everything is deterministic given (config, seed): replicate r derives all
of its sample streams from (seed, purpose, r), so the worker count never
changes any output byte.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .allocation import (
    CostModel,
    budget_for_tolerance,
    optimal_allocation,
)
from .errors import MFMCError, UnknownNameError
from .estimators import (
    STATISTICS,
    evaluate_for_plan,
    evaluate_sobol_for_plan,
    mfmc_nonlinear,
    mfmc_statistic,
    sobol_indices_single_level,
)
from .hierarchy import (
    HIERARCHY_NAMES,
    get_hierarchy,
    ishigami_mean,
    ishigami_sobol_indices,
    ishigami_variance,
    quintic_mean,
    quintic_variance,
    synthetic_field_grid,
)
from .pilot import PilotStats, estimate_g_stats, estimate_moment_stats, estimate_q_stats
from .regression import fit_regressor
from .sampling import (
    build_sobol_block,
    draw_inputs,
    evaluate_nested,
    evaluate_sobol_nested,
    sobol_cost_factor,
)

STAT_ORDER = {"expectation": 0, "variance": 1, "sobol-main": 2, "sobol-total": 3}
MODES = ("linear", "nonlinear")

# Seed-stream purposes; replicate r of a study uses (seed, purpose, r).
_PILOT = 101
_TRAIN = 211
_ESTIMATE = 307  # plus the statistic's index
_REFERENCE = 977


@dataclass
class StudyConfig:
    """Everything a study run depends on, with JSON round-tripping.

    Budgets are in high-fidelity-equivalent units p (total cost divided by
    the high-fidelity cost) unless ``budget_unit`` is "absolute". Exactly
    one of ``budgets``/``tolerance`` must be set. ``pilot_budget``, when
    given, is split evenly into the correlation-pilot size and the bridge
    training size. Pilot cost is reported separately and only subtracted
    from the estimation budget when ``include_pilot_cost`` is set.
    """

    hierarchy: str = "ishigami"
    costs: tuple | None = None
    n_points: int = 17
    statistics: tuple = ("expectation",)
    mode: str = "linear"
    pilot_size: int = 100
    regression_train_size: int = 100
    pilot_budget: int | None = None
    budgets: tuple | None = (40.0,)
    tolerance: float | None = None
    budget_unit: str = "hf-equivalent"
    replicates: int = 100
    seed: int = 0
    out_dir: str = "results"
    output_weights: tuple | None = None
    sobol_cost_convention: str = "per-evaluation"
    include_pilot_cost: bool = False
    jobs: int = 1
    reference_file: str | None = None
    reference_samples: int = 1_000_000

    def __post_init__(self):
        if isinstance(self.statistics, str):
            self.statistics = (self.statistics,)
        self.statistics = tuple(self.statistics)
        if self.budgets is not None:
            self.budgets = tuple(float(b) for b in np.atleast_1d(self.budgets))
        if self.costs is not None:
            self.costs = tuple(float(c) for c in self.costs)
        if self.output_weights is not None:
            self.output_weights = tuple(float(v) for v in self.output_weights)
        if self.pilot_budget is not None:
            half = int(self.pilot_budget) // 2
            self.pilot_size = int(self.pilot_budget) - half
            self.regression_train_size = half

    def validate(self):
        if self.hierarchy not in HIERARCHY_NAMES:
            raise UnknownNameError(
                f"unknown hierarchy {self.hierarchy!r}; available: {', '.join(HIERARCHY_NAMES)}"
            )
        for name in self.statistics:
            if name not in STATISTICS:
                raise UnknownNameError(
                    f"unknown statistic {name!r}; available: {', '.join(STATISTICS)}"
                )
        if self.mode not in MODES:
            raise UnknownNameError(f"unknown mode {self.mode!r}; available: {MODES}")
        if (self.budgets is None) == (self.tolerance is None):
            raise ValueError("exactly one of budgets/tolerance must be set")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.budget_unit not in ("hf-equivalent", "absolute"):
            raise ValueError("budget_unit must be 'hf-equivalent' or 'absolute'")
        if self.mode == "nonlinear" and any(
            STATISTICS[s].needs_sobol_block for s in self.statistics
        ):
            raise ValueError("nonlinear mode does not support Sobol statistics")
        return self

    def to_dict(self):
        d = dataclasses.asdict(self)
        for key in ("statistics", "budgets", "costs", "output_weights"):
            if d[key] is not None:
                d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, d) -> "StudyConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise UnknownNameError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_file(cls, path) -> "StudyConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def build_hierarchy(self):
        return get_hierarchy(self.hierarchy, costs=self.costs, n_points=self.n_points)


def reference_values(config: StudyConfig, stat_label: str, hierarchy) -> np.ndarray | None:
    """Reference statistic values: a user oracle file, else analytic built-ins.

    Sobol references are returned on the raw (variance-scaled) scale the
    estimators work on.
    """
    if config.reference_file:
        table = json.loads(Path(config.reference_file).read_text())
        if stat_label in table:
            return np.asarray(table[stat_label], dtype=float)
    name = hierarchy.label
    if name == "ishigami":
        if stat_label == "expectation":
            return np.array([ishigami_mean()])
        if stat_label == "variance":
            return np.array([ishigami_variance()])
        main, total = ishigami_sobol_indices()
        v = ishigami_variance()
        if stat_label == "sobol-main":
            return main * v
        if stat_label == "sobol-total":
            return total * v
    if name == "quintic":
        if stat_label == "expectation":
            return np.array([quintic_mean()])
        if stat_label == "variance":
            return np.array([quintic_variance()])
    if name == "synthetic-field":
        x = synthetic_field_grid(hierarchy.output_length)
        if stat_label == "expectation":
            return np.zeros_like(x)
        if stat_label == "variance":
            return 1.0 + 0.01 * x**2
    return None


def _component_weights(config: StudyConfig, hierarchy, stat) -> np.ndarray:
    if stat.needs_sobol_block:
        p = hierarchy.input_dimension
        default = np.ones(p)
    else:
        p = hierarchy.output_length
        default = np.asarray(hierarchy.output_weights, dtype=float)
    if config.output_weights is None:
        return default
    w = np.asarray(config.output_weights, dtype=float)
    if w.shape != (p,):
        raise ValueError(f"output_weights must have {p} entries for {stat.label}")
    return w


def run_replicate(config: StudyConfig, stat_label: str, budget, rep: int) -> dict:
    """One full pilot -> allocation -> estimation pass.

    ``budget`` is in the configured unit, or None in tolerance mode. The
    pilot streams are shared across statistics (the same pilot samples are
    reused for every statistic of a replicate); estimation streams are
    statistic-specific.
    """
    hierarchy = config.build_hierarchy()
    stat = STATISTICS[stat_label]
    stat_idx = STAT_ORDER[stat_label]
    w = hierarchy.costs
    k = hierarchy.n_models
    n_pilot = config.pilot_size
    seed = config.seed
    sobol = stat.needs_sobol_block
    factor = (
        sobol_cost_factor(hierarchy.input_dimension, config.sobol_cost_convention)
        if sobol
        else 1.0
    )
    eff_costs = CostModel(w * factor)

    if sobol:
        pilot_block = build_sobol_block(hierarchy, n_pilot, (seed, _PILOT, rep))
        pilot_evals = evaluate_sobol_nested(
            hierarchy, pilot_block, [n_pilot] * k, config.sobol_cost_convention
        )
    else:
        pilot_samples = draw_inputs(hierarchy, n_pilot, (seed, _PILOT, rep))
        pilot_evals = evaluate_nested(hierarchy, pilot_samples, [n_pilot] * k)
    pilot_cost = pilot_evals.cost

    bridges = None
    if config.mode == "nonlinear":
        n_train = config.regression_train_size
        train_samples = draw_inputs(hierarchy, n_train, (seed, _TRAIN, rep))
        train_evals = evaluate_nested(hierarchy, train_samples, [n_train] * k)
        hf = train_evals.outputs[0][:, 0]
        bridges = [
            fit_regressor(np.column_stack([train_evals.outputs[i][:, 0], hf]))
            for i in range(1, k)
        ]
        pilot_cost += train_evals.cost
        stats = estimate_g_stats(pilot_evals, bridges, statistic=stat)
    elif stat_label == "expectation":
        stats = estimate_moment_stats(pilot_evals)
    else:
        stats = estimate_q_stats(pilot_evals, stat)

    weights = _component_weights(config, hierarchy, stat)
    if config.tolerance is not None:
        budget_abs = budget_for_tolerance(stats, eff_costs, config.tolerance, weights)
        budget_abs = max(budget_abs, eff_costs.w[0] * stat.min_samples)
    elif config.budget_unit == "hf-equivalent":
        budget_abs = float(budget) * w[0]
    else:
        budget_abs = float(budget)
    if config.include_pilot_cost:
        budget_abs = budget_abs - pilot_cost
    plan = optimal_allocation(stats, eff_costs, budget_abs, weights, stat.min_samples)

    est_seed = (seed, _ESTIMATE + stat_idx, rep)
    m_max = int(plan.m.max())
    if sobol:
        est_block = build_sobol_block(hierarchy, m_max, est_seed)
        est_evals = evaluate_sobol_for_plan(
            hierarchy, plan, est_block, config.sobol_cost_convention
        )
    else:
        est_samples = draw_inputs(hierarchy, m_max, est_seed)
        est_evals = evaluate_for_plan(hierarchy, plan, est_samples)
    if bridges is not None:
        report = mfmc_nonlinear(est_evals, plan, bridges, stat)
    else:
        report = mfmc_statistic(est_evals, plan, stat)

    return {
        "replicate": rep,
        "statistic": stat_label,
        "mode": config.mode,
        "budget_p": budget_abs / w[0],
        "budget_abs": budget_abs,
        "values": np.atleast_1d(report.value),
        "predicted_mse": float(plan.predicted_mse),
        "realized_cost": float(est_evals.cost),
        "pilot_cost": float(pilot_cost),
        "m": plan.m.copy(),
        "m_real": plan.m_real.copy(),
        "retained": plan.retained.copy(),
        "alpha": None if plan.alpha is None else plan.alpha.copy(),
        "rho": stats.rho.copy(),
        "weights": weights,
    }


def _replicate_task(payload):
    config = StudyConfig.from_dict(payload["config"])
    return run_replicate(config, payload["statistic"], payload["budget"], payload["replicate"])


def _run_batch(config: StudyConfig, stat_label: str, budget) -> list:
    payloads = [
        {
            "config": config.to_dict(),
            "statistic": stat_label,
            "budget": budget,
            "replicate": r,
        }
        for r in range(config.replicates)
    ]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            records = list(pool.map(_replicate_task, payloads))
    else:
        records = [_replicate_task(p) for p in payloads]
    records.sort(key=lambda rec: rec["replicate"])
    return records


# ---------------------------------------------------------------------------
# Report files
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _write_replicates_csv(path, records):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["replicate", "budget", "statistic", "component", "value", "predicted_mse", "realized_cost"]
        )
        for rec in records:
            for comp, value in enumerate(rec["values"]):
                writer.writerow(
                    [
                        rec["replicate"],
                        _fmt(rec["budget_p"]),
                        rec["statistic"],
                        comp,
                        _fmt(value),
                        _fmt(rec["predicted_mse"]),
                        _fmt(rec["realized_cost"]),
                    ]
                )


def _nanmean(stack, axis=0):
    with np.errstate(invalid="ignore"):
        out = np.nanmean(stack, axis=axis)
    return out


def _allocation_summary(records, labels):
    k = len(labels)
    m = np.array([rec["m"] for rec in records], dtype=float)
    retained = np.array([rec["retained"] for rec in records], dtype=float)
    rho = _nanmean(np.array([rec["rho"] for rec in records]), axis=0)
    alpha_rows = [rec["alpha"] for rec in records if rec["alpha"] is not None]
    alpha_mean = None
    if alpha_rows:
        # Average coefficients only over replicates that kept the model.
        stack = np.array(alpha_rows)
        kept = np.array([rec["retained"] for rec in records if rec["alpha"] is not None])
        alpha_mean = np.full(stack.shape[1:], np.nan)
        for i in range(k):
            rows = stack[kept[:, i], i, :]
            if rows.size:
                alpha_mean[i] = rows.mean(axis=0)
    return {
        "labels": list(labels),
        "m_mean": m.mean(axis=0),
        "retained_fraction": retained.mean(axis=0),
        "rho_mean": rho,
        "alpha_mean": alpha_mean,
    }


def _write_allocation_csv(path, summary):
    p = summary["rho_mean"].shape[1]
    alpha_cols = ["alpha"] if p == 1 else [f"alpha_{j}" for j in range(p)]
    rho_cols = ["rho"] if p == 1 else [f"rho_{j}" for j in range(p)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "m", "retained_fraction", *alpha_cols, *rho_cols])
        for i, label in enumerate(summary["labels"]):
            alpha = summary["alpha_mean"]
            alpha_vals = (
                [""] * p
                if alpha is None or not np.any(np.isfinite(alpha[i]))
                else [_fmt(v) for v in alpha[i]]
            )
            rho_vals = [
                _fmt(v) if np.isfinite(v) else "" for v in summary["rho_mean"][i]
            ]
            writer.writerow(
                [
                    label,
                    _fmt(summary["m_mean"][i]),
                    _fmt(summary["retained_fraction"][i]),
                    *alpha_vals,
                    *rho_vals,
                ]
            )


def _empirical_errors(records, reference, weights):
    if reference is None:
        return None, None, None
    values = np.array([rec["values"] for rec in records])
    err_sq = (values - reference[None, :]) ** 2
    per_component = err_sq.mean(axis=0)
    total = float(np.sum(per_component * weights))
    ref_scale = float(np.sum(reference**2 * weights))
    relative = total / ref_scale if ref_scale > 0 else None
    return per_component, total, relative


def _stat_summary(config, records, reference, weights):
    values = np.array([rec["values"] for rec in records])
    per_comp, total, relative = _empirical_errors(records, reference, weights)
    realized = float(sum(rec["realized_cost"] for rec in records))
    pilot = float(sum(rec["pilot_cost"] for rec in records))
    total_cost = realized + pilot if config.include_pilot_cost else realized
    out = {
        "mode": config.mode,
        "replicates": len(records),
        "budget_p_mean": float(np.mean([rec["budget_p"] for rec in records])),
        "value_mean": [float(v) for v in values.mean(axis=0)],
        "reference": None if reference is None else [float(v) for v in reference],
        "empirical_mse": None if total is None else float(total),
        "empirical_mse_per_component": None
        if per_comp is None
        else [float(v) for v in per_comp],
        "relative_mse": None if relative is None else float(relative),
        "predicted_mse_mean": float(np.mean([rec["predicted_mse"] for rec in records])),
        "realized_cost_total": realized,
        "pilot_cost_total": pilot,
        "total_cost": total_cost,
        "m_mean": [float(v) for v in np.mean([rec["m"] for rec in records], axis=0)],
        "retained_fraction": [
            float(v) for v in np.mean([rec["retained"] for rec in records], axis=0)
        ],
    }
    return out


def run_study(config: StudyConfig, out_dir=None) -> dict:
    """Run all configured statistics at one budget (or tolerance); write reports.

    Produces, in the output directory: ``allocation_<stat>.csv`` with the
    averaged sample counts, coefficients, and correlations per model;
    ``replicates_<stat>.csv`` with one row per replicate and component; and
    ``summary.json`` with empirical errors against the reference values.
    """
    config.validate()
    if config.budgets is not None and len(config.budgets) != 1:
        raise ValueError("run_study handles a single budget; use replicate_sweep for lists")
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    hierarchy = config.build_hierarchy()
    budget = None if config.budgets is None else config.budgets[0]
    summary = {"config": config.to_dict(), "statistics": {}}
    for stat_label in config.statistics:
        records = _run_batch(config, stat_label, budget)
        reference = reference_values(config, stat_label, hierarchy)
        weights = _component_weights(config, hierarchy, STATISTICS[stat_label])
        _write_replicates_csv(out / f"replicates_{stat_label}.csv", records)
        alloc = _allocation_summary(records, [m.label for m in hierarchy.models])
        _write_allocation_csv(out / f"allocation_{stat_label}.csv", alloc)
        summary["statistics"][stat_label] = _stat_summary(config, records, reference, weights)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    return summary


def replicate_sweep(config: StudyConfig, out_dir=None) -> list:
    """Empirical-vs-predicted error across a list of budgets.

    Every budget gets a full study; the cross-budget table lands in
    ``sweep.csv``. References must exist for every statistic (analytic
    built-ins or a reference file), since the empirical error needs them.
    """
    config.validate()
    if config.budgets is None:
        raise ValueError("replicate_sweep needs an explicit budgets list")
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    hierarchy = config.build_hierarchy()
    for stat_label in config.statistics:
        if reference_values(config, stat_label, hierarchy) is None:
            raise MFMCError(
                f"no reference values for {stat_label!r} on {config.hierarchy!r}; "
                "run make-reference first and pass reference_file"
            )
    rows = []
    single = len(config.budgets) == 1
    for budget in config.budgets:
        sub_dir = out if single else out / f"p{budget:g}"
        sub_config = dataclasses.replace(config, budgets=(budget,))
        summary = run_study(sub_config, out_dir=sub_dir)
        for stat_label, entry in summary["statistics"].items():
            rows.append(
                {
                    "budget": budget,
                    "statistic": stat_label,
                    "mode": entry["mode"],
                    "empirical_mse": entry["empirical_mse"],
                    "relative_mse": entry["relative_mse"],
                    "predicted_mse": entry["predicted_mse_mean"],
                    "replicates": entry["replicates"],
                }
            )
    with open(out / "sweep.csv", "w", newline="") as fh:
        fh.write("# empirical_mse: weighted squared error vs reference, averaged over replicates\n")
        fh.write("# relative_mse: empirical_mse divided by the weighted squared reference\n")
        writer = csv.writer(fh)
        writer.writerow(
            ["budget", "statistic", "mode", "empirical_mse", "relative_mse", "predicted_mse", "replicates"]
        )
        for row in rows:
            writer.writerow(
                [
                    _fmt(row["budget"]),
                    row["statistic"],
                    row["mode"],
                    _fmt(row["empirical_mse"]),
                    "" if row["relative_mse"] is None else _fmt(row["relative_mse"]),
                    _fmt(row["predicted_mse"]),
                    row["replicates"],
                ]
            )
    return rows


def make_reference(config: StudyConfig, out_path=None) -> dict:
    """Large plain-sampling reference values from the high-fidelity model.

    Writes a JSON table mapping each configured statistic to its reference
    vector, computed at ``reference_samples`` draws.
    """
    config.validate()
    hierarchy = config.build_hierarchy()
    hf = hierarchy.models[0]
    n = int(config.reference_samples)
    table = {"_meta": {"hierarchy": config.hierarchy, "n_samples": n, "seed": config.seed}}
    needs_block = any(STATISTICS[s].needs_sobol_block for s in config.statistics)
    plain_stats = [s for s in config.statistics if not STATISTICS[s].needs_sobol_block]
    if plain_stats:
        samples = draw_inputs(hierarchy, n, (config.seed, _REFERENCE))
        outputs = hf.evaluate_batch(samples.inputs)
        if "expectation" in plain_stats:
            table["expectation"] = [float(v) for v in outputs.mean(axis=0)]
        if "variance" in plain_stats:
            table["variance"] = [float(v) for v in np.var(outputs, axis=0, ddof=1)]
    if needs_block:
        block = build_sobol_block(hierarchy, n, (config.seed, _REFERENCE))
        base = hf.evaluate_batch(block.base.inputs)[:, 0]
        second = hf.evaluate_batch(block.second.inputs)[:, 0]
        mixed = [hf.evaluate_batch(yj)[:, 0] for yj in block.mixed]
        indices = sobol_indices_single_level(base, second, mixed)
        if "sobol-main" in config.statistics:
            table["sobol-main"] = [float(v) for v in indices["main"]]
        if "sobol-total" in config.statistics:
            table["sobol-total"] = [float(v) for v in indices["total"]]
    if out_path is None:
        out = Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        out_path = out / "reference.json"
    Path(out_path).write_text(json.dumps(table, indent=2, sort_keys=True))
    return table


def run_pilot(config: StudyConfig, out_dir=None) -> dict:
    """Estimate and save the pilot statistics for each configured statistic."""
    config.validate()
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    hierarchy = config.build_hierarchy()
    k = hierarchy.n_models
    n = config.pilot_size
    results = {}
    for stat_label in config.statistics:
        stat = STATISTICS[stat_label]
        if stat.needs_sobol_block:
            block = build_sobol_block(hierarchy, n, (config.seed, _PILOT, 0))
            evals = evaluate_sobol_nested(
                hierarchy, block, [n] * k, config.sobol_cost_convention
            )
        else:
            samples = draw_inputs(hierarchy, n, (config.seed, _PILOT, 0))
            evals = evaluate_nested(hierarchy, samples, [n] * k)
        if config.mode == "nonlinear":
            n_train = config.regression_train_size
            ts = draw_inputs(hierarchy, n_train, (config.seed, _TRAIN, 0))
            tevals = evaluate_nested(hierarchy, ts, [n_train] * k)
            hf = tevals.outputs[0][:, 0]
            bridges = [
                fit_regressor(np.column_stack([tevals.outputs[i][:, 0], hf]))
                for i in range(1, k)
            ]
            stats = estimate_g_stats(evals, bridges, statistic=stat)
        elif stat_label == "expectation":
            stats = estimate_moment_stats(evals)
        else:
            stats = estimate_q_stats(evals, stat)
        path = out / f"pilot_{stat_label}.json"
        stats.save(path)
        results[stat_label] = stats
    return results


def run_allocate(config: StudyConfig, out_dir=None) -> dict:
    """Allocate from previously saved pilot statistics, without new model runs."""
    config.validate()
    if config.budgets is None or len(config.budgets) != 1:
        raise ValueError("allocate needs exactly one budget")
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    hierarchy = config.build_hierarchy()
    w = hierarchy.costs
    plans = {}
    for stat_label in config.statistics:
        stat = STATISTICS[stat_label]
        pilot_path = out / f"pilot_{stat_label}.json"
        if not pilot_path.exists():
            raise MFMCError(f"missing pilot file {pilot_path}; run the pilot subcommand first")
        stats = PilotStats.load(pilot_path)
        factor = (
            sobol_cost_factor(hierarchy.input_dimension, config.sobol_cost_convention)
            if stat.needs_sobol_block
            else 1.0
        )
        eff_costs = CostModel(w * factor)
        weights = _component_weights(config, hierarchy, stat)
        budget_abs = (
            config.budgets[0] * w[0]
            if config.budget_unit == "hf-equivalent"
            else config.budgets[0]
        )
        plan = optimal_allocation(stats, eff_costs, budget_abs, weights, stat.min_samples)
        plan.save(out / f"allocation_{stat_label}.json")
        plans[stat_label] = plan
    return plans
