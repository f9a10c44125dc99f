"""Reproducible input sampling and nested model evaluation.

Sampling is counter-based: every (seed, stream, coordinate) triple maps to
its own Philox stream, and row r of a sample matrix always sits at the same
position of that stream. Consequences we rely on everywhere:

* prefix stability -- ``draw_inputs(h, m, seed)`` is row-for-row a prefix of
  ``draw_inputs(h, m2, seed)`` for any m2 > m;
* worker independence -- inputs are drawn up front, model evaluations are
  pure functions assembled by row index, so parallelism cannot change any
  result.

All models are evaluated on prefixes of one shared input sequence
(nested sampling); the statistics machinery depends on that sharing.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EvaluationError
from .hierarchy import Model, ModelHierarchy

# Stream ids: 0 is a hierarchy's base input stream, 1 the independent second
# stream used by the Sobol block construction.
BASE_STREAM = 0
SECOND_STREAM = 1


def _seed_tuple(seed) -> tuple[int, ...]:
    if isinstance(seed, (tuple, list)):
        return tuple(int(s) & 0xFFFFFFFFFFFFFFFF for s in seed)
    return (int(seed) & 0xFFFFFFFFFFFFFFFF,)


def _column_generator(seed, stream: int, column: int) -> np.random.Generator:
    key = _seed_tuple(seed) + (int(stream), int(column))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


@dataclass(frozen=True, eq=False)
class SampleSet:
    """An (m, d) matrix of i.i.d. input samples plus the seed that made it."""

    inputs: np.ndarray
    seed: tuple
    stream: int
    distributions: tuple

    @property
    def n(self) -> int:
        return self.inputs.shape[0]


@dataclass(eq=False)
class NestedEvaluations:
    """Per-model outputs on nested prefixes of one shared input sequence.

    ``outputs[i]`` has shape (m[i], n_out) and was produced by model i on
    the first m[i] rows of ``samples``. The sample means needed by the
    telescoping estimators at any prefix length come from slicing these
    arrays; no re-evaluation is ever required.
    """

    outputs: list
    m: np.ndarray
    samples: SampleSet
    cost: float


@dataclass(frozen=True, eq=False)
class SobolSampleBlock:
    """Base set s, independent second set s2, and the d mixed sets.

    Mixed set j equals s2 in every coordinate except coordinate j, which is
    taken from s. Evaluating one model on all blocks therefore costs
    (d + 2) evaluations per sample.
    """

    base: SampleSet
    second: SampleSet
    mixed: tuple

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def dimension(self) -> int:
        return len(self.mixed)


@dataclass(eq=False)
class SobolEvaluations:
    """Per-model outputs on nested prefixes of a Sobol sample block.

    ``base[i]``, ``second[i]`` are (m[i],) arrays; ``mixed[i][j]`` is the
    (m[i],) output of model i on mixed set j. Only scalar-output models are
    supported here.
    """

    base: list
    second: list
    mixed: list
    m: np.ndarray
    block: SobolSampleBlock
    cost: float
    cost_convention: str


def draw_inputs(hierarchy: ModelHierarchy, m: int, seed, stream: int = BASE_STREAM) -> SampleSet:
    """Draw m rows from the hierarchy's input distribution.

    Rows are generated column-by-column from per-coordinate Philox streams,
    so the result for a given (seed, stream) is a prefix of any longer draw.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    cols = []
    for j, dist in enumerate(hierarchy.input_distributions):
        gen = _column_generator(seed, stream, j)
        cols.append(dist.sample(gen, m))
    inputs = np.column_stack(cols)
    return SampleSet(inputs, _seed_tuple(seed), stream, hierarchy.input_distributions)


def _validate_m_vec(m_vec, n_models, n_rows):
    m = np.asarray(m_vec, dtype=int)
    if m.shape != (n_models,):
        raise ValueError(f"m_vec must have one entry per model ({n_models}), got {m.shape}")
    if np.any(m < 0):
        raise ValueError("m_vec entries must be >= 0")
    nonzero = np.flatnonzero(m)
    if nonzero.size == 0 or m[0] < 1:
        raise ValueError("the high-fidelity model needs at least one sample")
    live = m[: nonzero[-1] + 1]
    if np.any(live == 0):
        raise ValueError("m_vec may only be zero for a trailing set of dropped models")
    if np.any(np.diff(live) < 0):
        raise ValueError("m_vec must be nondecreasing over evaluated models")
    if live.max() > n_rows:
        raise ValueError(f"sample set has {n_rows} rows, need {live.max()}")
    return m


def _evaluate_prefix(model: Model, inputs: np.ndarray, model_index: int) -> np.ndarray:
    out = model.evaluate_batch(inputs)
    bad = ~np.all(np.isfinite(out), axis=1)
    if np.any(bad):
        row = int(np.flatnonzero(bad)[0])
        raise EvaluationError(
            f"model {model.label!r} (index {model_index}) produced a non-finite "
            f"output at sample {row}",
            model_index=model_index,
            model_label=model.label,
            sample_index=row,
        )
    return out


def evaluate_nested(
    hierarchy: ModelHierarchy,
    samples: SampleSet,
    m_vec,
    cache: "EvaluationCache | None" = None,
) -> NestedEvaluations:
    """Evaluate model i on the first m_vec[i] rows of ``samples``.

    m_vec must be nondecreasing over evaluated models; zeros are allowed
    only for a trailing run of dropped models. Equal consecutive entries are
    fine (the corresponding telescoping term is exactly zero downstream).
    """
    m = _validate_m_vec(m_vec, hierarchy.n_models, samples.n)
    outputs = []
    for i, model in enumerate(hierarchy.models):
        if m[i] == 0:
            outputs.append(np.empty((0, hierarchy.output_length)))
            continue
        if cache is not None:
            out = cache.fetch_or_evaluate(hierarchy.label, samples, i, model, m[i])
        else:
            out = _evaluate_prefix(model, samples.inputs[: m[i]], i)
        outputs.append(out)
    cost = float(np.dot(hierarchy.costs, m))
    return NestedEvaluations(outputs, m, samples, cost)


def build_sobol_block(hierarchy: ModelHierarchy, m: int, seed) -> SobolSampleBlock:
    """Draw the base/second/mixed input sets used by Sobol index estimators."""
    if m < 2:
        raise ValueError("Sobol blocks need m >= 2")
    s = draw_inputs(hierarchy, m, seed, stream=BASE_STREAM)
    s2 = draw_inputs(hierarchy, m, seed, stream=SECOND_STREAM)
    mixed = []
    for j in range(hierarchy.input_dimension):
        yj = s2.inputs.copy()
        yj[:, j] = s.inputs[:, j]
        mixed.append(yj)
    return SobolSampleBlock(s, s2, tuple(mixed))


def sobol_cost_factor(dimension: int, convention: str) -> float:
    """Cost units charged per Sobol sample of one model.

    ``per-evaluation`` charges all d + 2 model runs behind each sample;
    ``per-sample`` charges a flat single evaluation per sample.
    """
    if convention == "per-evaluation":
        return float(dimension + 2)
    if convention == "per-sample":
        return 1.0
    raise ValueError(f"unknown Sobol cost convention {convention!r}")


def evaluate_sobol_nested(
    hierarchy: ModelHierarchy,
    block: SobolSampleBlock,
    m_vec,
    cost_convention: str = "per-evaluation",
) -> SobolEvaluations:
    """Evaluate every model on nested prefixes of all Sobol input sets."""
    if hierarchy.output_length != 1:
        raise ValueError("Sobol evaluation requires scalar-output models")
    m = _validate_m_vec(m_vec, hierarchy.n_models, block.n)
    base, second, mixed = [], [], []
    for i, model in enumerate(hierarchy.models):
        if m[i] == 0:
            base.append(np.empty(0))
            second.append(np.empty(0))
            mixed.append([np.empty(0)] * block.dimension)
            continue
        base.append(_evaluate_prefix(model, block.base.inputs[: m[i]], i)[:, 0])
        second.append(_evaluate_prefix(model, block.second.inputs[: m[i]], i)[:, 0])
        mixed.append(
            [_evaluate_prefix(model, yj[: m[i]], i)[:, 0] for yj in block.mixed]
        )
    factor = sobol_cost_factor(block.dimension, cost_convention)
    cost = float(np.dot(hierarchy.costs, m) * factor)
    return SobolEvaluations(base, second, mixed, m, block, cost, cost_convention)


class EvaluationCache:
    """On-disk cache of model outputs keyed by (label, seed, model, row).

    Stores one float64 ``.npy`` file per (hierarchy label, sample seed,
    stream, model index); a fetch returns the first m rows, evaluating and
    appending only the missing tail. Round-trips are bit-exact.
    """

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, label: str, samples: SampleSet, model_index: int) -> Path:
        key = f"{label}|{samples.seed}|{samples.stream}|{model_index}"
        digest = hashlib.sha256(key.encode()).hexdigest()[:24]
        return self.directory / f"{digest}.npy"

    def fetch_or_evaluate(
        self, label: str, samples: SampleSet, model_index: int, model: Model, m: int
    ) -> np.ndarray:
        path = self._path(label, samples, model_index)
        cached = None
        if path.exists():
            cached = np.load(path)
            if cached.shape[0] >= m:
                return np.array(cached[:m])
        start = 0 if cached is None else cached.shape[0]
        tail = _evaluate_prefix(model, samples.inputs[start:m], model_index)
        full = tail if cached is None else np.vstack([cached, tail])
        np.save(path, full)
        return np.array(full[:m])
