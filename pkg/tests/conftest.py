"""Shared oracle helpers for the test suite.

The brute-force routines here are written independently of the library
internals on purpose: they enumerate or integrate directly from the error
formula so that the analytic solver has something honest to be checked
against.
"""

import numpy as np
import pytest


def telescoping_mse(sigma, rho, m, alpha=None):
    """Direct evaluation of the telescoping estimator's error formula.

    ``sigma`` and ``rho`` are per-model scalars (rho[0] == 1), ``m`` the
    per-model counts (all > 0, nondecreasing), ``alpha`` the coefficients
    (defaults to the per-model optimum rho_i sigma_1 / sigma_i).
    """
    sigma = np.asarray(sigma, dtype=float)
    rho = np.asarray(rho, dtype=float)
    m = np.asarray(m, dtype=float)
    if alpha is None:
        alpha = rho * sigma[0] / sigma
    total = sigma[0] ** 2 / m[0]
    for i in range(1, len(sigma)):
        total += (1.0 / m[i - 1] - 1.0 / m[i]) * (
            alpha[i] ** 2 * sigma[i] ** 2
            - 2.0 * alpha[i] * rho[i] * sigma[0] * sigma[i]
        )
    return float(total)


def brute_force_best_two(sigma, rho, w, budget, m1_max=None):
    """Exhaustively enumerate integer plans within the budget.

    Considers every subset of low-fidelity models (the high-fidelity model
    is always in) and, for each, all integer nondecreasing counts with
    total cost <= budget at the optimal coefficients. Returns the two
    smallest error values overall. Supports K in {1, 2, 3}.
    """
    sigma = np.asarray(sigma, dtype=float)
    rho = np.asarray(rho, dtype=float)
    w = np.asarray(w, dtype=float)
    k = len(sigma)
    best = []

    def push(values):
        for val in np.sort(np.ravel(values))[:2]:
            best.append(float(val))
        best.sort()
        del best[2:]

    def enumerate_chain(s, r, wc):
        alpha = r * s[0] / s
        m1_cap = int(budget // wc[0]) if m1_max is None else min(m1_max, int(budget // wc[0]))
        if len(s) == 1:
            push([s[0] ** 2 / m1 for m1 in range(1, m1_cap + 1)])
            return
        for m1 in range(1, m1_cap + 1):
            rem1 = budget - wc[0] * m1
            if rem1 < wc[1] * m1:
                continue
            m2_hi = int(rem1 // wc[1])
            m2 = np.arange(m1, m2_hi + 1)
            if len(s) == 2:
                push(telescoping_mse_vec(s, r, alpha, m1, m2, None))
                continue
            for m2v in m2:
                rem2 = rem1 - wc[1] * m2v
                if rem2 < wc[2] * m2v:
                    continue
                m3_hi = int(rem2 // wc[2])
                m3 = np.arange(m2v, m3_hi + 1, dtype=float)
                push(telescoping_mse_vec(s, r, alpha, m1, m2v, m3))

    import itertools

    for size in range(0, k):
        for subset in itertools.combinations(range(1, k), size):
            chain = [0, *subset]
            enumerate_chain(sigma[chain], rho[chain], w[chain])
    return best[0], (best[1] if len(best) > 1 else best[0])


def telescoping_mse_vec(sigma, rho, alpha, m1, m2, m3):
    """Vectorized error formula over grids of m2 (and m3)."""
    term1 = sigma[0] ** 2 / m1
    c2 = alpha[1] ** 2 * sigma[1] ** 2 - 2 * alpha[1] * rho[1] * sigma[0] * sigma[1]
    out = term1 + (1.0 / m1 - 1.0 / np.asarray(m2, dtype=float)) * c2
    if m3 is not None:
        c3 = alpha[2] ** 2 * sigma[2] ** 2 - 2 * alpha[2] * rho[2] * sigma[0] * sigma[2]
        out = out + (1.0 / np.asarray(m2, dtype=float) - 1.0 / np.asarray(m3, dtype=float)) * c3
    return out


def random_admissible_instance(rng, k=3, m1_range=(3, 18)):
    """Random (sigma, rho, w, budget) obeying the closed-form conditions.

    Rejection-samples until the squared correlations decrease strictly and
    every cost drop outpaces the correlation drop, then sets the budget so
    the real-valued high-fidelity count lands in ``m1_range`` and no count
    exceeds 200.
    """
    while True:
        rho_sq = np.sort(rng.uniform(0.3, 0.995, size=k - 1))[::-1]
        rho_sq = np.concatenate([[1.0], rho_sq])
        w = np.concatenate([[1.0], np.sort(rng.uniform(0.02, 0.6, size=k - 1))[::-1]])
        gaps = rho_sq - np.append(rho_sq[1:], 0.0)
        if np.any(gaps <= 1e-4):
            continue
        r = np.sqrt(w[0] * gaps / (w * (1.0 - rho_sq[1])))
        if np.any(np.diff(r) <= 1e-3) or r[1] <= 1.0 + 1e-3:
            continue
        m1_target = rng.uniform(*m1_range)
        budget = m1_target * float(np.dot(w, r))
        m_real = m1_target * r
        if m_real[-1] > 200:
            continue
        sigma = rng.uniform(0.5, 3.0, size=k)
        rho = np.sqrt(rho_sq)
        return sigma, rho, w, budget


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
