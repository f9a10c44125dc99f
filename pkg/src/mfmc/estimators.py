"""Statistic plugins and the telescoping multifidelity combiners.

A statistic plugin bundles two things:

* ``single_level`` -- the plain estimator of the statistic from one model's
  samples (a mean, an unbiased variance, a Sobol index vector, ...);
* ``pilot_contributions`` -- a per-sample scalarization of the same
  statistic, used only to estimate the variances/correlations that drive
  the sample allocation.

The multifidelity estimate of any statistic is the high-fidelity
single-level estimate plus, for each cheaper model, a weighted difference
of that model's single-level estimates at its own sample count and at the
previous model's count. Because all models see prefixes of one shared
input sequence, those differences are zero-mean corrections and the
combination stays unbiased whenever the single-level estimator is.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotFittedError
from .hierarchy import ModelHierarchy
from .sampling import (
    NestedEvaluations,
    SobolEvaluations,
    SobolSampleBlock,
    SampleSet,
    evaluate_nested,
    evaluate_sobol_nested,
)


def single_level_variance(samples) -> float:
    """Unbiased sample variance of a 1-D sample vector."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape[0] < 2:
        raise ValueError("variance needs at least 2 samples")
    return float(np.var(samples, ddof=1))


def sobol_single_level(base, second, mixed, j: int):
    """Main- and total-effect estimates for coordinate j from one model.

    ``base``, ``second`` and ``mixed[j]`` are the model's outputs on the
    corresponding Sobol input sets, all of the same length m >= 2. Returns
    the variance-scaled (unnormalized) pair (V_j, T_j).
    """
    b = np.asarray(base, dtype=float)
    s2 = np.asarray(second, dtype=float)
    yj = np.asarray(mixed[j], dtype=float)
    m = b.shape[0]
    if m < 2 or s2.shape[0] != m or yj.shape[0] != m:
        raise ValueError("Sobol estimation needs matching blocks with m >= 2")
    mu_half = 0.5 * (b.mean() + s2.mean())
    v_half = 0.25 * (np.var(b, ddof=1) + np.var(s2, ddof=1))
    vj = 2.0 / (2.0 * m - 1.0) * (b @ yj - m * mu_half**2 + v_half)
    tj = float(np.sum((s2 - yj) ** 2) / (2.0 * m))
    return float(vj), tj


def sobol_indices_single_level(base, second, mixed):
    """All main/total estimates plus normalized versions for one model.

    Normalization divides by the unbiased variance of the base block. The
    raw values are the quantities the multifidelity machinery combines; the
    normalized ones are what gets compared against textbook index values.
    """
    d = len(mixed)
    main = np.empty(d)
    total = np.empty(d)
    for j in range(d):
        main[j], total[j] = sobol_single_level(base, second, mixed, j)
    v = single_level_variance(base)
    return {
        "main": main,
        "total": total,
        "variance": v,
        "main_normalized": main / v,
        "total_normalized": total / v,
    }


# ---------------------------------------------------------------------------
# Statistic plugins
# ---------------------------------------------------------------------------


class ExpectationStatistic:
    label = "expectation"
    min_samples = 1
    needs_sobol_block = False

    def components(self, evals) -> int:
        return evals.outputs[0].shape[1]

    def single_level(self, evals, model_index: int, m: int) -> np.ndarray:
        return evals.outputs[model_index][:m].mean(axis=0)

    def pilot_contributions(self, evals, model_index: int, n: int) -> np.ndarray:
        return np.array(evals.outputs[model_index][:n], dtype=float)


class VarianceStatistic:
    label = "variance"
    min_samples = 2
    needs_sobol_block = False

    def components(self, evals) -> int:
        return evals.outputs[0].shape[1]

    def single_level(self, evals, model_index: int, m: int) -> np.ndarray:
        if m < 2:
            raise ValueError("variance needs at least 2 samples")
        return np.var(evals.outputs[model_index][:m], axis=0, ddof=1)

    def pilot_contributions(self, evals, model_index: int, n: int) -> np.ndarray:
        # Squared deviation from the model's own pilot mean: a per-sample
        # proxy whose fluctuations track the variance estimator's.
        values = evals.outputs[model_index][:n]
        return (values - values.mean(axis=0)) ** 2


class SobolMainStatistic:
    """All d main-effect indices, treated as one vector-valued statistic."""

    label = "sobol-main"
    min_samples = 2
    needs_sobol_block = True

    def components(self, evals) -> int:
        return evals.block.dimension

    def single_level(self, evals, model_index: int, m: int) -> np.ndarray:
        base = evals.base[model_index][:m]
        second = evals.second[model_index][:m]
        mixed = [yj[:m] for yj in evals.mixed[model_index]]
        return np.array(
            [sobol_single_level(base, second, mixed, j)[0] for j in range(len(mixed))]
        )

    def pilot_contributions(self, evals, model_index: int, n: int) -> np.ndarray:
        base = evals.base[model_index][:n]
        out = np.empty((n, len(evals.mixed[model_index])))
        bc = base - base.mean()
        for j, yj in enumerate(evals.mixed[model_index]):
            yjc = yj[:n] - yj[:n].mean()
            out[:, j] = bc * yjc
        return out


class SobolTotalStatistic:
    """All d total-effect indices as one vector-valued statistic."""

    label = "sobol-total"
    min_samples = 2
    needs_sobol_block = True

    def components(self, evals) -> int:
        return evals.block.dimension

    def single_level(self, evals, model_index: int, m: int) -> np.ndarray:
        second = evals.second[model_index][:m]
        mixed = [yj[:m] for yj in evals.mixed[model_index]]
        return np.array([np.sum((second - yj) ** 2) / (2.0 * m) for yj in mixed])

    def pilot_contributions(self, evals, model_index: int, n: int) -> np.ndarray:
        second = evals.second[model_index][:n]
        out = np.empty((n, len(evals.mixed[model_index])))
        for j, yj in enumerate(evals.mixed[model_index]):
            out[:, j] = 0.5 * (second - yj[:n]) ** 2
        return out


STATISTICS = {
    "expectation": ExpectationStatistic(),
    "variance": VarianceStatistic(),
    "sobol-main": SobolMainStatistic(),
    "sobol-total": SobolTotalStatistic(),
}


# ---------------------------------------------------------------------------
# Multifidelity combiners
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class EstimateReport:
    """One multifidelity estimate with the bookkeeping needed to reproduce it."""

    statistic: str
    value: np.ndarray
    predicted_mse: float
    realized_cost: float
    plan: object
    mode: str = "linear"
    pilot: dict | None = None
    seed: tuple | None = None
    hierarchy: str = ""

    def to_dict(self):
        return {
            "statistic": self.statistic,
            "value": [float(v) for v in np.atleast_1d(self.value)],
            "predicted_mse": float(self.predicted_mse),
            "realized_cost": float(self.realized_cost),
            "mode": self.mode,
            "pilot": self.pilot,
            "seed": list(self.seed) if self.seed is not None else None,
            "hierarchy": self.hierarchy,
            "plan": self.plan.to_dict() if hasattr(self.plan, "to_dict") else None,
        }


def _retained_chain(plan):
    chain = [i for i in range(len(plan.m)) if plan.retained[i] and plan.m[i] > 0]
    if not chain or chain[0] != 0:
        raise ValueError("plan must retain the high-fidelity model with m >= 1")
    return chain


def _check_alignment(evals, plan, chain):
    for i in chain:
        have = evals.m[i]
        if have < plan.m[i]:
            raise ValueError(
                f"evaluations for model {i} cover {have} samples, plan needs {plan.m[i]}"
            )


def _telescope(evals, plan, level_estimate):
    chain = _retained_chain(plan)
    _check_alignment(evals, plan, chain)
    est = np.atleast_1d(np.asarray(level_estimate(chain[0], int(plan.m[0])), dtype=float))
    for prev, i in zip(chain, chain[1:]):
        if plan.m[i] == plan.m[prev]:
            continue  # identical prefixes: the correction is exactly zero
        hi = np.atleast_1d(level_estimate(i, int(plan.m[i])))
        lo = np.atleast_1d(level_estimate(i, int(plan.m[prev])))
        est = est + plan.alpha[i] * (hi - lo)
    return est


def mfmc_expectation(evals: NestedEvaluations, plan) -> EstimateReport:
    """Telescoping multifidelity mean, per output component."""

    def level(i, m):
        return evals.outputs[i][:m].mean(axis=0)

    value = _telescope(evals, plan, level)
    return EstimateReport(
        statistic="expectation",
        value=value,
        predicted_mse=plan.predicted_mse,
        realized_cost=evals.cost,
        plan=plan,
        seed=getattr(evals.samples, "seed", None),
    )


def mfmc_statistic(evals, plan, statistic) -> EstimateReport:
    """Telescoping multifidelity estimate of an arbitrary plug-in statistic.

    ``evals`` is a NestedEvaluations, or a SobolEvaluations for statistics
    that need the paired sample blocks. The plan should have been computed
    from pilot statistics transformed for this same statistic.
    """
    if plan.m[0] < statistic.min_samples:
        raise ValueError(
            f"{statistic.label} needs at least {statistic.min_samples} samples per level"
        )

    def level(i, m):
        return statistic.single_level(evals, i, m)

    value = _telescope(evals, plan, level)
    seed = getattr(getattr(evals, "samples", None), "seed", None)
    if seed is None and hasattr(evals, "block"):
        seed = evals.block.base.seed
    return EstimateReport(
        statistic=statistic.label,
        value=value,
        predicted_mse=plan.predicted_mse,
        realized_cost=evals.cost,
        plan=plan,
        seed=seed,
    )


def apply_bridges(evals: NestedEvaluations, bridges) -> NestedEvaluations:
    """Map each low-fidelity model's outputs through its fitted bridge.

    ``bridges[i-1]`` handles model i. The high-fidelity outputs pass through
    untouched. Only scalar-output hierarchies are supported.
    """
    outputs = [np.array(evals.outputs[0])]
    for i in range(1, len(evals.outputs)):
        raw = evals.outputs[i]
        if raw.shape[0] == 0:
            outputs.append(np.array(raw))
            continue
        if raw.shape[1] != 1:
            raise ValueError("bridged estimation supports scalar outputs only")
        bridge = bridges[i - 1]
        if bridge is None or not bridge.fitted:
            raise NotFittedError(f"no fitted bridge for model index {i}")
        outputs.append(bridge.predict_mean(raw[:, 0])[:, None])
    return NestedEvaluations(outputs, evals.m, evals.samples, evals.cost)


def mfmc_nonlinear(evals: NestedEvaluations, plan, bridges, statistic=None) -> EstimateReport:
    """Multifidelity estimate with bridged low-fidelity terms.

    The high-fidelity level enters raw; every cheaper level enters through
    its fitted 1-D bridge. With ``statistic`` unset this is the expectation
    estimator; otherwise the statistic's single-level estimator is applied
    to the raw high-fidelity outputs and to the bridged low-fidelity ones.
    The correction terms still telescope, so the estimate stays unbiased no
    matter how rough the bridges are.
    """
    if statistic is None:
        statistic = STATISTICS["expectation"]
    if statistic.needs_sobol_block:
        raise ValueError("bridged estimation is not supported for Sobol statistics")
    bridged = apply_bridges(evals, bridges)

    def level(i, m):
        source = evals if i == 0 else bridged
        return statistic.single_level(source, i, m)

    value = _telescope(evals, plan, level)
    report = EstimateReport(
        statistic=statistic.label,
        value=value,
        predicted_mse=plan.predicted_mse,
        realized_cost=evals.cost,
        plan=plan,
        mode="nonlinear",
        seed=getattr(evals.samples, "seed", None),
    )
    return report


# ---------------------------------------------------------------------------
# Plan-aware evaluation helpers
# ---------------------------------------------------------------------------


def evaluate_for_plan(
    hierarchy: ModelHierarchy, plan, samples: SampleSet, cache=None
) -> NestedEvaluations:
    """Evaluate exactly the models and sample counts an allocation plan asks for.

    Models the plan dropped are skipped entirely (they may sit anywhere in
    the hierarchy); the returned object is indexed like the full hierarchy
    with empty arrays at dropped positions.
    """
    chain = _retained_chain(plan)
    sub = hierarchy.subset(chain)
    sub_evals = evaluate_nested(sub, samples, plan.m[chain], cache=cache)
    outputs = [np.empty((0, hierarchy.output_length))] * hierarchy.n_models
    for pos, i in enumerate(chain):
        outputs[i] = sub_evals.outputs[pos]
    m_full = np.zeros(hierarchy.n_models, dtype=int)
    m_full[chain] = plan.m[chain]
    return NestedEvaluations(outputs, m_full, samples, sub_evals.cost)


def evaluate_sobol_for_plan(
    hierarchy: ModelHierarchy,
    plan,
    block: SobolSampleBlock,
    cost_convention: str = "per-evaluation",
) -> SobolEvaluations:
    """Sobol-block analogue of :func:`evaluate_for_plan`."""
    chain = _retained_chain(plan)
    sub = hierarchy.subset(chain)
    sub_evals = evaluate_sobol_nested(sub, block, plan.m[chain], cost_convention)
    k = hierarchy.n_models
    base = [np.empty(0)] * k
    second = [np.empty(0)] * k
    mixed = [[np.empty(0)] * block.dimension for _ in range(k)]
    for pos, i in enumerate(chain):
        base[i] = sub_evals.base[pos]
        second[i] = sub_evals.second[pos]
        mixed[i] = sub_evals.mixed[pos]
    m_full = np.zeros(k, dtype=int)
    m_full[chain] = plan.m[chain]
    return SobolEvaluations(
        base, second, mixed, m_full, block, sub_evals.cost, cost_convention
    )
