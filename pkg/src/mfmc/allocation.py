"""Budget-constrained sample allocation across a model hierarchy.

Given per-model deviations sigma_i and correlations rho_i against the
high-fidelity model, the mean squared error of the telescoping estimator
with coefficients alpha and nondecreasing sample counts m is

    E(alpha, m) = sigma_1^2 / m_1
                  + sum_i (1/m_{i-1} - 1/m_i) (alpha_i^2 sigma_i^2
                                               - 2 alpha_i rho_i sigma_1 sigma_i).

Minimizing over alpha gives alpha_i = rho_i sigma_1 / sigma_i per
component; minimizing over m under a cost budget sum_i w_i m_i = B gives
sample-count ratios

    r_i = sqrt( w_1 (rho_i^2 - rho_{i+1}^2) / (w_i (1 - rho_2^2)) ),

with rho_1 = 1 and rho_{K+1} = 0, and m_1 = B / sum_i w_i r_i. The closed
form only exists when the squared correlations decrease strictly along the
hierarchy and each cost drop outpaces the correlation drop (equivalently,
the r_i increase strictly). Models breaking those conditions are dropped:
this module picks, among all admissible subsets containing the
high-fidelity model, the one minimizing the achievable error, which also
resolves ties by retaining the cheaper model.

Vector-valued outputs reduce to the scalar problem through weighted
aggregates: sigma-bar^2 sums the per-component high-fidelity variances and
rho-bar_i^2 is the variance-weighted average of the squared correlations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateStatsError, InfeasibleBudgetError
from .pilot import PilotStats


@dataclass(frozen=True)
class CostModel:
    """Per-evaluation costs, one entry per model; model 0 is the cost unit."""

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 1 or np.any(w <= 0):
            raise ValueError("costs must be a 1-D vector of positive values")
        object.__setattr__(self, "w", w)

    @property
    def n_models(self) -> int:
        return self.w.shape[0]


@dataclass(eq=False)
class AggregatedStats:
    """Scalar reduction of vector-valued pilot statistics.

    ``rho_bar_sq[i]`` is the weighted average of model i's squared
    correlations, weighted by the high-fidelity per-component variance and
    the integration weights; entry 0 is exactly 1.
    """

    sigma_bar_sq: float
    rho_bar_sq: np.ndarray
    weights: np.ndarray
    source: PilotStats | None = None

    @property
    def n_models(self) -> int:
        return self.rho_bar_sq.shape[0]


@dataclass(eq=False)
class AllocationPlan:
    """Integer sample counts and combination coefficients for one budget.

    ``m[i]`` is 0 exactly when model i was dropped; over retained models the
    counts are nondecreasing and their total cost never exceeds the budget.
    ``alpha`` has one row per model and one column per output component
    (row 0 is all ones). ``m_real`` keeps the pre-rounding counts.
    """

    m: np.ndarray
    alpha: np.ndarray | None
    retained: np.ndarray
    predicted_mse: float
    budget: float
    budget_used: float
    r: np.ndarray
    m_real: np.ndarray

    def to_dict(self):
        return {
            "m": [int(v) for v in self.m],
            "alpha": None if self.alpha is None else [list(map(float, row)) for row in self.alpha],
            "retained": [bool(b) for b in self.retained],
            "predicted_mse": float(self.predicted_mse),
            "budget": float(self.budget),
            "budget_used": float(self.budget_used),
            "r": [float(v) if np.isfinite(v) else None for v in self.r],
            "m_real": [float(v) for v in self.m_real],
        }

    @classmethod
    def from_dict(cls, d) -> "AllocationPlan":
        return cls(
            m=np.array(d["m"], dtype=int),
            alpha=None if d["alpha"] is None else np.array(d["alpha"], dtype=float),
            retained=np.array(d["retained"], dtype=bool),
            predicted_mse=float(d["predicted_mse"]),
            budget=float(d["budget"]),
            budget_used=float(d["budget_used"]),
            r=np.array([np.nan if v is None else v for v in d["r"]], dtype=float),
            m_real=np.array(d["m_real"], dtype=float),
        )

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @classmethod
    def load(cls, path) -> "AllocationPlan":
        return cls.from_dict(json.loads(Path(path).read_text()))


def aggregate_vector_stats(stats: PilotStats, weights=None) -> AggregatedStats:
    """Collapse per-component statistics into the scalar aggregates.

    Degenerate components (zero high-fidelity variance) are excluded; it is
    an error for every component to be degenerate.
    """
    p = stats.n_components
    weights = np.ones(p) if weights is None else np.asarray(weights, dtype=float)
    if weights.shape != (p,) or np.any(weights <= 0):
        raise ValueError("weights must be strictly positive, one per component")
    valid = ~stats.degenerate
    if not np.any(valid):
        raise DegenerateStatsError("all output components have zero variance")
    var1 = stats.sigma[0, valid] ** 2
    w = weights[valid]
    sigma_bar_sq = float(np.sum(var1 * w))
    rho_bar_sq = np.empty(stats.n_models)
    rho_bar_sq[0] = 1.0
    for i in range(1, stats.n_models):
        rho_bar_sq[i] = float(np.sum(stats.rho[i, valid] ** 2 * var1 * w)) / sigma_bar_sq
    return AggregatedStats(sigma_bar_sq, rho_bar_sq, weights, source=stats)


def _as_aggregated(stats, weights=None) -> AggregatedStats:
    if isinstance(stats, AggregatedStats):
        return stats
    return aggregate_vector_stats(stats, weights)


def _chain_ratios(rho_sq_chain, w_chain):
    """Sample-count ratios r for one candidate chain, or None if inadmissible."""
    v = np.asarray(rho_sq_chain, dtype=float)
    gaps = v - np.append(v[1:], 0.0)
    if np.any(gaps <= 0.0):
        return None
    denom = w_chain * (1.0 - v[1]) if v.size > 1 else w_chain * gaps[0]
    r = np.sqrt(w_chain[0] * gaps / denom)
    if np.any(np.diff(r) <= 0.0):
        return None
    return r


def _admissible_chains(rho_bar_sq, w):
    """All admissible chains (model 0 plus a subset of companions) with ratios.

    A chain whose closed form breaks (non-decreasing squared correlations or
    non-increasing count ratios) is omitted: its constrained optimum sits on
    a boundary where some model is effectively unused, which a smaller chain
    realizes at lower cost. The bare high-fidelity chain is always included.
    """
    k = len(rho_bar_sq)
    candidates = [
        i
        for i in range(1, k)
        if np.isfinite(rho_bar_sq[i]) and 0.0 < rho_bar_sq[i] < 1.0
    ]
    if len(candidates) > 16:
        raise ValueError("model selection supports at most 17 models")
    chains = [([0], np.array([1.0]))]
    for mask in range(1, 1 << len(candidates)):
        subset = [candidates[j] for j in range(len(candidates)) if mask >> j & 1]
        chain = [0] + subset
        v = np.array([1.0] + [rho_bar_sq[i] for i in subset])
        r = _chain_ratios(v, w[chain])
        if r is not None:
            chains.append((chain, r))
    return chains


def _alpha_matrix(stats, retained):
    """Per-component coefficients rho_i sigma_1 / sigma_i for retained models."""
    if isinstance(stats, AggregatedStats):
        stats = stats.source
    if stats is None:
        return None
    k, p = stats.n_models, stats.n_components
    alpha = np.zeros((k, p))
    alpha[0] = 1.0
    s1 = stats.sigma[0]
    for i in range(1, k):
        if not retained[i]:
            continue
        si = stats.sigma[i]
        with np.errstate(invalid="ignore", divide="ignore"):
            a = stats.rho[i] * s1 / si
        a[~np.isfinite(a)] = 0.0
        alpha[i] = a
    return alpha


def _spend_leftover(m, w_chain, budget):
    """Spend remaining budget cheapest-model-first without breaking the
    nondecreasing ordering; mutates and returns m."""
    leftover = budget - float(np.dot(w_chain, m))
    order = np.argsort(w_chain, kind="stable")  # cheapest first
    changed = True
    while changed:
        changed = False
        for i in order:
            headroom = (m[i + 1] - m[i]) if i + 1 < m.size else None
            extra = int(leftover // w_chain[i])
            if headroom is not None:
                extra = min(extra, headroom)
            if extra > 0:
                m[i] += extra
                leftover -= extra * w_chain[i]
                changed = True
    return m


def _repair_monotone(m, min_samples):
    m[0] = max(m[0], min_samples)
    for i in range(1, m.size):
        m[i] = max(m[i], m[i - 1])
    return m


def _round_counts(m_real, w_chain, budget, min_samples, mse_coeffs):
    """Integer counts near the real-valued optimum of one chain.

    Builds a candidate set around the continuous solution: the floored
    counts, plus a small window of trial counts for the first level (and
    the second, when present) with the deeper tail re-optimized for the
    remaining budget each time. Leftover budget is spent cheapest-model-
    first under the ordering constraint; the candidate with the smallest
    predicted error wins (cost breaks ties). Returns None when even the
    minimum counts exceed the budget.
    """
    n = m_real.size
    tol = budget * (1.0 + 1e-12) + 1e-12
    candidates = []

    def finish(m):
        m = _repair_monotone(np.asarray(m, dtype=int), min_samples)
        if float(np.dot(w_chain, m)) <= tol:
            candidates.append(_spend_leftover(m, w_chain, budget))

    def reflow(rem, level):
        # continuous re-optimization of levels >= level for budget rem
        shape = np.sqrt(mse_coeffs[level:] / w_chain[level:])
        denom = float(np.dot(w_chain[level:], shape))
        if denom <= 0.0 or rem <= 0.0:
            return None
        return rem / denom * shape

    finish(np.floor(m_real))
    if n == 1:
        finish([int(budget // w_chain[0])])
    m1_floor = int(np.floor(m_real[0]))
    for m1 in range(max(min_samples, m1_floor - 2), m1_floor + 3):
        if w_chain[0] * m1 > tol:
            break
        if n == 1:
            continue
        tail = reflow(budget - w_chain[0] * m1, 1)
        if tail is None:
            continue
        if n == 2:
            finish([m1, int(tail[0])])
            continue
        m2_floor = int(tail[0])
        for m2 in range(max(m1, m2_floor - 2), m2_floor + 3):
            deep = reflow(budget - w_chain[0] * m1 - w_chain[1] * m2, 2)
            if deep is None:
                continue
            finish([m1, m2, *np.floor(deep).astype(int)])

    best = None
    for m in candidates:
        if m[0] < min_samples or np.any(m <= 0) or np.any(np.diff(m) < 0):
            continue
        key = (float(np.sum(mse_coeffs / m)), float(np.dot(w_chain, m)))
        if best is None or key < best[0]:
            best = (key, m)
    return None if best is None else best[1]


def optimal_allocation(
    stats, costs: CostModel, budget: float, weights=None, min_samples: int = 1
) -> AllocationPlan:
    """Solve the budget-constrained error minimization and round to integers.

    Parameters
    ----------
    stats : PilotStats or AggregatedStats
        Per-component or pre-aggregated deviations/correlations.
    costs : CostModel
        Per-evaluation costs aligned with the models behind ``stats``.
    budget : float
        Total cost allowance, in the same units as the costs.
    weights : array, optional
        Component integration weights (vector-valued statistics only).
    min_samples : int
        Floor for the high-fidelity count (statistics such as the variance
        need at least two samples per level).
    """
    agg = _as_aggregated(stats, weights)
    w = costs.w
    if agg.n_models != costs.n_models:
        raise ValueError("stats and costs disagree on the number of models")
    if budget < w[0] * min_samples:
        raise InfeasibleBudgetError(
            f"budget {budget} cannot pay for {min_samples} high-fidelity sample(s) "
            f"at cost {w[0]}"
        )
    # Solve and round every admissible chain; keep the best integer plan.
    # The continuous objective alone cannot rank chains here: at small
    # budgets a cheap companion can soak up fractional budget that plain
    # sampling would waste.
    best = None
    for chain, r_chain in _admissible_chains(agg.rho_bar_sq, w):
        w_chain = w[chain]
        v = np.concatenate([[1.0], agg.rho_bar_sq[chain[1:]]])
        mse_coeffs = agg.sigma_bar_sq * (v - np.append(v[1:], 0.0))
        m1 = budget / float(np.dot(w_chain, r_chain))
        m_real_chain = m1 * r_chain
        m_chain = _round_counts(m_real_chain, w_chain, budget, min_samples, mse_coeffs)
        if m_chain is None:
            continue
        mse = float(np.sum(mse_coeffs / m_chain))
        cost = float(np.dot(w_chain, m_chain))
        key = (mse, cost, len(chain))
        if best is None or key < best[0]:
            best = (key, chain, r_chain, m_chain, m_real_chain)
    if best is None:
        # even the bare high-fidelity chain failed, which the budget
        # precondition rules out for any sane min_samples
        raise InfeasibleBudgetError(
            f"budget {budget} cannot pay for {min_samples} high-fidelity sample(s)"
        )
    _, chain, r_chain, m_chain, m_real_chain = best

    k = costs.n_models
    retained = np.zeros(k, dtype=bool)
    retained[chain] = True
    m = np.zeros(k, dtype=int)
    m[chain] = m_chain
    m_real = np.zeros(k)
    m_real[chain] = m_real_chain
    r = np.full(k, np.nan)
    r[chain] = r_chain
    alpha = _alpha_matrix(stats, retained)
    plan = AllocationPlan(
        m=m,
        alpha=alpha,
        retained=retained,
        predicted_mse=np.nan,
        budget=float(budget),
        budget_used=float(np.dot(w, m)),
        r=r,
        m_real=m_real,
    )
    plan.predicted_mse = predicted_mse(plan, stats, weights)
    return plan


def predicted_mse(plan: AllocationPlan, stats, weights=None) -> float:
    """Error formula for the plan's counts, at the plan's coefficients.

    With full per-component statistics the quadratic form is evaluated with
    the plan's (possibly non-optimal) alpha; with pre-aggregated statistics
    the optimal-coefficient form is used. Vector outputs are combined with
    the integration weights.
    """
    chain = [i for i in range(len(plan.m)) if plan.retained[i] and plan.m[i] > 0]
    if not chain or chain[0] != 0 or plan.m[0] < 1:
        raise ValueError("plan must allocate at least one high-fidelity sample")
    m = plan.m
    if isinstance(stats, AggregatedStats) or plan.alpha is None:
        agg = _as_aggregated(stats, weights)
        total = agg.sigma_bar_sq / m[0]
        for prev, i in zip(chain, chain[1:]):
            total -= (1.0 / m[prev] - 1.0 / m[i]) * agg.rho_bar_sq[i] * agg.sigma_bar_sq
        return float(total)
    p = stats.n_components
    weights = np.ones(p) if weights is None else np.asarray(weights, dtype=float)
    valid = ~stats.degenerate
    s1 = stats.sigma[0]
    per_comp = s1**2 / m[0]
    for prev, i in zip(chain, chain[1:]):
        a = plan.alpha[i]
        term = a**2 * stats.sigma[i] ** 2 - 2.0 * a * np.where(
            np.isfinite(stats.rho[i]), stats.rho[i], 0.0
        ) * s1 * stats.sigma[i]
        per_comp = per_comp + (1.0 / m[prev] - 1.0 / m[i]) * term
    return float(np.sum(per_comp[valid] * weights[valid]))


def variance_reduction_ratio(stats, costs: CostModel, weights=None) -> float:
    """Best-case error of the combined estimator relative to plain sampling.

    Evaluates the closed-form ratio on the models as given, without any
    admissibility filtering; values above 1 signal that some model must be
    dropped rather than included.
    """
    agg = _as_aggregated(stats, weights)
    v = np.clip(agg.rho_bar_sq, 0.0, 1.0)
    gaps = v - np.append(v[1:], 0.0)
    gaps = np.maximum(gaps, 0.0)
    return float(np.sum(np.sqrt(costs.w / costs.w[0] * gaps)) ** 2)


def budget_for_tolerance(stats, costs: CostModel, epsilon: float, weights=None) -> float:
    """Smallest budget whose optimally-allocated error meets epsilon^2.

    The leading w_1 factor makes the single-model case reduce to the exact
    plain-sampling cost w_1 sigma^2 / epsilon^2.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    agg = _as_aggregated(stats, weights)
    v = np.clip(agg.rho_bar_sq, 0.0, 1.0)
    gaps = np.maximum(v - np.append(v[1:], 0.0), 0.0)
    s = float(np.sum(np.sqrt(costs.w / costs.w[0] * gaps)))
    return float(costs.w[0] * (np.sqrt(agg.sigma_bar_sq) / epsilon * s) ** 2)
