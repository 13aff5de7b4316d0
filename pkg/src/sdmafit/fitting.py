"""Fitting pipeline: partition-based seeds refined by multi-restart LM.

All classes are fit in log space to minimize the sum of squared residuals
over the stacked parameter vector. The pipeline builds on itself: a
max-affine seed comes from nearest-anchor partitions plus alternating
refits, the difference model adds a near-zero concave block to a polished
convex fit, and the soft difference model starts from the difference fit
with both softness parameters at 10. Restarts rebuild the seed from an
independent random stream and, past the first, jitter it before the final
polish; the best restart by final cost wins, ties to the lowest index.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .dataset import DataSet
from .errors import DegenerateData, NumericalError
from .functions import (MaBlock, MaParams, SmaParams, DmaParams, SdmaParams,
                        SoftParam, ModelParams, predict, value_jacobian,
                        to_gamma, from_gamma, gamma_size)
from .lm_solver import LmConfig, LmReport, lm_minimize

FUNCTION_CLASSES = ("ma", "sma", "dma", "sdma")

# initial softness for both blocks: the soft seed then tracks its hard
# seed within log(K)/10 while keeping usable curvature gradients
_INITIAL_SOFTNESS = 10.0
# half-width of the uniform jitter that breaks exact argmax ties in the
# near-zero concave seed
_CONCAVE_SEED_NOISE = 1e-3
# restart jitter variances: offsets scale with var(y), slopes are absolute
_PERTURB_VAR = 0.1
_MAX_ALTERNATION_ROUNDS = 50


@dataclass(frozen=True)
class FitSpec:
    """What to fit: class, order, restart budget, and solver settings.

    m_terms is the concave-block order and is ignored for the ma and sma
    classes. rng_seed fixes every random draw, so equal (data, spec) pairs
    give bitwise-identical results.
    """

    function_class: str
    k_terms: int
    m_terms: int = 1
    restarts: int = 30
    rng_seed: int = 0
    lm: LmConfig = field(default_factory=LmConfig)

    def __post_init__(self):
        if self.function_class not in FUNCTION_CLASSES:
            raise ValueError(f"unknown function class "
                             f"{self.function_class!r}; expected one of "
                             f"{FUNCTION_CLASSES}")
        if self.k_terms < 1:
            raise ValueError("k_terms must be at least 1")
        if self.m_terms < 1:
            raise ValueError("m_terms must be at least 1")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be a nonnegative integer")


@dataclass(frozen=True)
class FitResult:
    """Best-of-restarts model with its error and per-restart history.

    rms_error is the log-space root-mean-square residual as a fraction
    (0.00149 corresponds to 0.149%). restart_costs holds every restart's
    final sum-of-squares cost, with failed restarts recorded as +inf so
    indices stay aligned; best_restart_index points at the minimum.
    """

    params: ModelParams
    rms_error: float
    restart_costs: tuple
    best_restart_index: int
    lm_report: LmReport


def rms_error(params: ModelParams, data: DataSet) -> float:
    """Root-mean-square residual of the model on the data, in log space."""
    res = predict(params, data.x) - data.y
    return float(np.sqrt(np.mean(res * res)))


def _plane_lstsq(X: np.ndarray, y: np.ndarray):
    """Minimum-norm least-squares affine plane through (X, y)."""
    A = np.hstack([np.ones((X.shape[0], 1)), X])
    sol = np.linalg.lstsq(A, y, rcond=None)[0]
    return float(sol[0]), sol[1:].copy()


def init_ma(data: DataSet, k_terms: int, rng) -> MaBlock:
    """Seed k planes from nearest-anchor partitions of the data.

    Samples k distinct anchor rows (with replacement only when the data
    has fewer rows than planes), assigns every point to its nearest
    anchor, and least-squares fits one plane per cell. Empty cells get
    the global plane plus a small jitter so no two planes coincide.
    """
    X, y = data.x, data.y
    m, n = X.shape
    anchors = rng.choice(m, size=k_terms, replace=k_terms > m)
    d2 = ((X[:, None, :] - X[anchors][None, :, :]) ** 2).sum(axis=2)
    cell = d2.argmin(axis=1)
    global_b, global_a = _plane_lstsq(X, y)
    b = np.empty(k_terms)
    a = np.empty((k_terms, n))
    for j in range(k_terms):
        mask = cell == j
        if mask.any():
            b[j], a[j] = _plane_lstsq(X[mask], y[mask])
        else:
            b[j] = global_b + rng.normal(0.0, 1e-3)
            a[j] = global_a + rng.normal(0.0, 1e-3, n)
    return MaBlock(b=b, a=a)


def _ma_cost(b: np.ndarray, a: np.ndarray, X: np.ndarray,
             y: np.ndarray) -> float:
    res = (X @ a.T + b).max(axis=1) - y
    return float(res @ res)


def _alternate_partitions(data: DataSet, block: MaBlock) -> MaBlock:
    """Alternate active-plane reassignment with per-plane refits.

    Reassignment can raise the true max-affine cost, so the best visited
    block (the input included) is tracked and returned.
    """
    X, y = data.x, data.y
    b, a = block.b.copy(), block.a.copy()
    best_b, best_a = b.copy(), a.copy()
    best_cost = _ma_cost(b, a, X, y)
    prev = None
    for _ in range(_MAX_ALTERNATION_ROUNDS):
        active = (X @ a.T + b).argmax(axis=1)
        if prev is not None and np.array_equal(active, prev):
            break
        prev = active
        for j in range(b.size):
            mask = active == j
            if mask.any():
                b[j], a[j] = _plane_lstsq(X[mask], y[mask])
        cost = _ma_cost(b, a, X, y)
        if cost < best_cost:
            best_cost = cost
            best_b, best_a = b.copy(), a.copy()
    return MaBlock(b=best_b, a=best_a)


def _problem(data: DataSet, function_class: str, k_terms: int, m_terms: int):
    """Residual and Jacobian callables over the stacked vector."""
    X, y, n = data.x, data.y, data.n_dims

    def residual(gamma):
        params = from_gamma(function_class, gamma, n, k_terms, m_terms)
        return predict(params, X) - y

    def jacobian(gamma):
        params = from_gamma(function_class, gamma, n, k_terms, m_terms)
        return value_jacobian(params, X)[1]

    return residual, jacobian


def _polish(data: DataSet, params0: ModelParams, k_terms: int, m_terms: int,
            lm: LmConfig):
    residual, jacobian = _problem(data, params0.function_class, k_terms,
                                  m_terms)
    gamma, report = lm_minimize(residual, jacobian, to_gamma(params0), lm)
    params = from_gamma(params0.function_class, gamma, data.n_dims, k_terms,
                        m_terms)
    return params, report


def _fit_ma(data: DataSet, k_terms: int, rng, lm: LmConfig, perturb=None):
    block = _alternate_partitions(data, init_ma(data, k_terms, rng))
    if perturb is not None:
        block = perturb(block)
    return _polish(data, MaParams(block=block), k_terms, 0, lm)


def _fit_sma(data: DataSet, k_terms: int, rng, lm: LmConfig, perturb=None):
    ma_params, _ = _fit_ma(data, k_terms, rng, lm)
    block = ma_params.block
    if perturb is not None:
        block = perturb(block)
    soft = SoftParam(log_alpha=math.log(_INITIAL_SOFTNESS))
    return _polish(data, SmaParams(block=block, soft=soft), k_terms, 0, lm)


def _fit_dma(data: DataSet, k_terms: int, m_terms: int, rng, lm: LmConfig,
             perturb=None):
    convex = _fit_ma(data, k_terms, rng, lm)[0].block
    h = rng.uniform(-_CONCAVE_SEED_NOISE, _CONCAVE_SEED_NOISE, m_terms)
    g = rng.uniform(-_CONCAVE_SEED_NOISE, _CONCAVE_SEED_NOISE,
                    (m_terms, data.n_dims))
    concave = MaBlock(b=h, a=g)
    if perturb is not None:
        convex, concave = perturb(convex), perturb(concave)
    return _polish(data, DmaParams(convex=convex, concave=concave), k_terms,
                   m_terms, lm)


def _fit_sdma(data: DataSet, k_terms: int, m_terms: int, rng, lm: LmConfig,
              perturb=None):
    dma_params, _ = _fit_dma(data, k_terms, m_terms, rng, lm)
    convex, concave = dma_params.convex, dma_params.concave
    if perturb is not None:
        convex, concave = perturb(convex), perturb(concave)
    soft = SoftParam(log_alpha=math.log(_INITIAL_SOFTNESS))
    params0 = SdmaParams(convex=convex, soft_convex=soft,
                         concave=concave, soft_concave=soft)
    return _polish(data, params0, k_terms, m_terms, lm)


def fit_ma(data: DataSet, k_terms: int, rng,
           lm: LmConfig | None = None) -> MaBlock:
    """Fit a max-affine block; final cost never exceeds the seed's."""
    return _fit_ma(data, k_terms, rng, lm or LmConfig())[0].block


def fit_dma(data: DataSet, k_terms: int, m_terms: int, rng,
            lm: LmConfig | None = None) -> DmaParams:
    """Fit a difference model: polished convex block, near-zero concave."""
    return _fit_dma(data, k_terms, m_terms, rng, lm or LmConfig())[0]


def fit_sdma(data: DataSet, k_terms: int, m_terms: int, rng,
             lm: LmConfig | None = None) -> SdmaParams:
    """Fit a soft difference model seeded by the hard difference fit."""
    return _fit_sdma(data, k_terms, m_terms, rng, lm or LmConfig())[0]


def _make_perturber(rng, sigma_y: float):
    """Entrywise Gaussian jitter applied to a seed block before the polish.

    Offsets move on the scale of the data (std sigma_y * sqrt(0.1)),
    slopes on a fixed scale (std sqrt(0.1)).
    """
    offset_std = sigma_y * math.sqrt(_PERTURB_VAR)
    slope_std = math.sqrt(_PERTURB_VAR)

    def perturb(block: MaBlock) -> MaBlock:
        b = block.b + rng.normal(0.0, offset_std, block.b.shape)
        a = block.a + rng.normal(0.0, slope_std, block.a.shape)
        return MaBlock(b=b, a=a)

    return perturb


def _restart_stream(rng_seed: int, restart: int):
    key = np.array([rng_seed, restart + 1], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _run_restart(data: DataSet, spec: FitSpec, restart: int):
    rng = _restart_stream(spec.rng_seed, restart)
    perturb = None if restart == 0 \
        else _make_perturber(rng, float(np.std(data.y)))
    if spec.function_class == "ma":
        return _fit_ma(data, spec.k_terms, rng, spec.lm, perturb)
    if spec.function_class == "sma":
        return _fit_sma(data, spec.k_terms, rng, spec.lm, perturb)
    if spec.function_class == "dma":
        return _fit_dma(data, spec.k_terms, spec.m_terms, rng, spec.lm,
                        perturb)
    return _fit_sdma(data, spec.k_terms, spec.m_terms, rng, spec.lm, perturb)


def fit(data: DataSet, spec: FitSpec) -> FitResult:
    """Fit the requested class with multi-restart LM; return the best.

    Restarts draw from independent counter-based streams keyed by
    (rng_seed, restart), so results are deterministic and independent of
    execution order. A restart that fails numerically is recorded with
    +inf cost; the error propagates only if every restart fails.
    """
    if data.n_points == 0:
        raise DegenerateData("cannot fit a dataset with no points")
    m_terms = spec.m_terms if spec.function_class in ("dma", "sdma") else 0
    n_params = gamma_size(spec.function_class, spec.k_terms, m_terms,
                          data.n_dims)
    if data.n_points <= n_params:
        warnings.warn(
            f"{data.n_points} points for {n_params} parameters: the fit "
            f"is underdetermined", stacklevel=2)
    elif data.n_points < 3 * n_params:
        warnings.warn(
            f"{data.n_points} points for {n_params} parameters: fewer "
            f"than 3 points per parameter", stacklevel=2)

    costs = []
    outcomes = []
    failure = None
    for r in range(spec.restarts):
        try:
            params, report = _run_restart(data, spec, r)
        except NumericalError as exc:
            failure = exc
            costs.append(math.inf)
            outcomes.append(None)
            continue
        costs.append(report.final_cost)
        outcomes.append((params, report))
    if failure is not None and all(o is None for o in outcomes):
        raise failure
    best = int(np.argmin(costs))
    params, report = outcomes[best]
    return FitResult(params=params,
                     rms_error=math.sqrt(costs[best] / data.n_points),
                     restart_costs=tuple(costs),
                     best_restart_index=best,
                     lm_report=report)
