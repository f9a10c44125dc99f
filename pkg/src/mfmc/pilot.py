"""Pilot estimation of the variances and correlations that drive allocation.

A small number N of shared samples is pushed through every model; the
per-component standard deviations and correlations against the
high-fidelity model are what the allocation solver consumes. Three flavors
exist, differing only in what gets correlated:

* raw moments -- the model outputs themselves (drives the expectation
  estimator);
* statistic-transformed -- per-sample contribution values of an arbitrary
  statistic (variance, Sobol indices, ...);
* bridge-transformed -- low-fidelity outputs mapped through a fitted 1-D
  regression onto the high-fidelity scale, correlated against the *raw*
  high-fidelity values.

Components whose high-fidelity variance is exactly zero are flagged
degenerate; their correlations are undefined and they are excluded from
any downstream aggregation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .estimators import STATISTICS, apply_bridges
from .sampling import NestedEvaluations


@dataclass(eq=False)
class PilotStats:
    """Per-model, per-component (sigma, rho) estimates from N pilot samples.

    ``sigma[i, j]`` is the standard deviation of model i at component j;
    ``rho[i, j]`` its correlation with model 0 there (row 0 is all ones, and
    every entry is clamped to [-1, 1] against floating-point roundoff).
    ``kind`` records which transform produced the values: "raw", "q"
    (statistic contributions) or "g" (bridged).
    """

    kind: str
    sigma: np.ndarray
    rho: np.ndarray
    n_samples: int
    statistic: str = "expectation"
    degenerate: np.ndarray | None = None

    def __post_init__(self):
        self.sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        self.rho = np.atleast_2d(np.asarray(self.rho, dtype=float))
        if self.degenerate is None:
            self.degenerate = np.zeros(self.sigma.shape[1], dtype=bool)
        else:
            self.degenerate = np.asarray(self.degenerate, dtype=bool)

    @property
    def n_models(self) -> int:
        return self.sigma.shape[0]

    @property
    def n_components(self) -> int:
        return self.sigma.shape[1]

    def to_dict(self):
        def _clean(a):
            return [[None if not np.isfinite(v) else float(v) for v in row] for row in a]

        return {
            "kind": self.kind,
            "statistic": self.statistic,
            "n_samples": int(self.n_samples),
            "sigma": _clean(self.sigma),
            "rho": _clean(self.rho),
            "degenerate": [bool(b) for b in self.degenerate],
        }

    @classmethod
    def from_dict(cls, d) -> "PilotStats":
        def _arr(rows):
            return np.array(
                [[np.nan if v is None else float(v) for v in row] for row in rows]
            )

        return cls(
            kind=d["kind"],
            sigma=_arr(d["sigma"]),
            rho=_arr(d["rho"]),
            n_samples=int(d["n_samples"]),
            statistic=d.get("statistic", "expectation"),
            degenerate=np.array(d["degenerate"], dtype=bool),
        )

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @classmethod
    def load(cls, path) -> "PilotStats":
        return cls.from_dict(json.loads(Path(path).read_text()))


def pilot_stats_from_exact(sigma, rho, kind="raw", statistic="expectation") -> PilotStats:
    """Wrap exactly-known moments so they can feed allocation directly.

    1-D inputs are treated as one scalar component per model.
    """
    sigma = np.asarray(sigma, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if sigma.ndim == 1:
        sigma = sigma[:, None]
    if rho.ndim == 1:
        rho = rho[:, None]
    return PilotStats(kind=kind, sigma=sigma, rho=rho, n_samples=0, statistic=statistic)


def _resolve_n(evals, n) -> int:
    counts = np.asarray(evals.m)
    if np.any(counts <= 0):
        raise ValueError("pilot estimation needs every model evaluated")
    n = int(counts.min()) if n is None else int(n)
    if n < 3:
        raise ValueError("pilot estimation needs at least 3 samples")
    if n > counts.min():
        raise ValueError(f"pilot evaluations cover only {counts.min()} shared samples")
    return n


def _stats_from_contributions(contribs, kind, n, statistic,
                              hf_override=None) -> PilotStats:
    """Sample deviations/correlations of per-sample contribution arrays.

    ``contribs[i]`` has shape (n, P). When ``hf_override`` is given it
    replaces the model-0 contributions on the correlation's high-fidelity
    side (used by the bridged flavor, where model 0 stays raw).
    """
    hf = contribs[0] if hf_override is None else hf_override
    k = len(contribs)
    p = hf.shape[1]
    sigma = np.empty((k, p))
    rho = np.empty((k, p))
    hf_c = hf - hf.mean(axis=0)
    s1 = np.sqrt((hf_c**2).sum(axis=0) / (n - 1))
    sigma[0] = s1
    rho[0] = 1.0
    degenerate = s1 == 0.0
    for i in range(1, k):
        vi = contribs[i]
        vi_c = vi - vi.mean(axis=0)
        si = np.sqrt((vi_c**2).sum(axis=0) / (n - 1))
        sigma[i] = si
        cov = (hf_c * vi_c).sum(axis=0) / (n - 1)
        with np.errstate(invalid="ignore", divide="ignore"):
            r = cov / (s1 * si)
        # A flat low-fidelity component carries no linear information.
        r[(si == 0.0) & ~degenerate] = 0.0
        rho[i] = np.clip(r, -1.0, 1.0)
    if np.any(degenerate):
        rho[1:, degenerate] = np.nan
    return PilotStats(kind, sigma, rho, n, statistic, degenerate)


def estimate_moment_stats(evals: NestedEvaluations, n: int | None = None) -> PilotStats:
    """Raw per-component deviations and correlations against model 0."""
    n = _resolve_n(evals, n)
    contribs = [np.asarray(out[:n], dtype=float) for out in evals.outputs]
    return _stats_from_contributions(contribs, "raw", n, "expectation")


def estimate_q_stats(evals, statistic, n: int | None = None) -> PilotStats:
    """Deviations/correlations of a statistic's per-sample contributions.

    With the expectation statistic (identity contributions) this reproduces
    :func:`estimate_moment_stats` exactly.
    """
    if isinstance(statistic, str):
        statistic = STATISTICS[statistic]
    n = _resolve_n(evals, n)
    contribs = [
        statistic.pilot_contributions(evals, i, n) for i in range(len(evals.m))
    ]
    return _stats_from_contributions(contribs, "q", n, statistic.label)


def estimate_g_stats(
    evals: NestedEvaluations, bridges, n: int | None = None, statistic=None
) -> PilotStats:
    """Bridged deviations/correlations: raw model 0 against bridged companions.

    ``bridges[i-1]`` must already be fitted for every low-fidelity model i,
    on samples disjoint from the ones in ``evals`` (the caller owns that
    split). Model 0's deviation stays the raw one; each companion's comes
    from its bridged values, and the correlation pairs the two.
    """
    if statistic is None:
        statistic = STATISTICS["expectation"]
    elif isinstance(statistic, str):
        statistic = STATISTICS[statistic]
    if statistic.needs_sobol_block:
        raise ValueError("bridged pilot statistics are not defined for Sobol statistics")
    n = _resolve_n(evals, n)
    bridged = apply_bridges(evals, bridges)
    contribs = [
        statistic.pilot_contributions(bridged, i, n) for i in range(len(evals.m))
    ]
    hf_raw = statistic.pilot_contributions(evals, 0, n)
    stats = _stats_from_contributions(
        contribs, "g", n, statistic.label, hf_override=hf_raw
    )
    return stats


def split_pilot_budget(total: int) -> tuple[int, int]:
    """Even split of a combined pilot budget into (correlation, training) sizes."""
    half = total // 2
    return total - half, half
