"""Model parameter containers, evaluators, and analytic gradients.

Four function classes are supported, all acting on log-space inputs x:

* max-affine:        f(x) = max_k [ b_k + a_k . x ]
* soft max-affine:   f(x) = (1/alpha) log sum_k exp(alpha (b_k + a_k . x))
* difference:        max-affine(convex) - max-affine(concave)
* soft difference:   soft(convex, alpha) - soft(concave, beta)

Softening parameters are stored and optimized as natural logs, which keeps
them structurally positive. Log-sum-exp is always evaluated with max-shift
stabilization, so large softness never overflows for finite inputs.

Stacked parameter vector layout (fixed, shared with serialization and every
Jacobian): ``[b (K), a (K*N, row-major), log alpha, h (M), g (M*N), log beta]``
with the soft/concave segments present only for the variants that have them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import kernels
from .errors import DimensionMismatch, NonFiniteGradient


@dataclass(frozen=True)
class MaBlock:
    """One bundle of affine planes: offsets ``b`` (k,) and slopes ``a`` (k, n)."""

    b: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float).ravel().copy()
        a = np.atleast_2d(np.asarray(self.a, dtype=float)).copy()
        if a.shape[0] != b.shape[0]:
            raise DimensionMismatch(
                f"{b.shape[0]} offsets but {a.shape[0]} slope rows")
        if b.shape[0] < 1:
            raise DimensionMismatch("a block needs at least one plane")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(a))):
            raise DimensionMismatch("non-finite plane parameters")
        b.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a", a)

    @property
    def k_terms(self) -> int:
        return self.b.shape[0]

    @property
    def n_dims(self) -> int:
        return self.a.shape[1]


@dataclass(frozen=True)
class SoftParam:
    """Softening parameter stored as its natural log."""

    log_alpha: float

    def __post_init__(self):
        if not math.isfinite(self.log_alpha):
            raise DimensionMismatch("log_alpha must be finite")
        object.__setattr__(self, "log_alpha", float(self.log_alpha))

    @property
    def alpha(self) -> float:
        try:
            return math.exp(self.log_alpha)
        except OverflowError:
            # callers treat non-finite softness as a typed export error
            return math.inf


@dataclass(frozen=True)
class MaParams:
    block: MaBlock

    function_class = "ma"

    @property
    def n_dims(self) -> int:
        return self.block.n_dims


@dataclass(frozen=True)
class SmaParams:
    block: MaBlock
    soft: SoftParam

    function_class = "sma"

    @property
    def n_dims(self) -> int:
        return self.block.n_dims


@dataclass(frozen=True)
class DmaParams:
    convex: MaBlock
    concave: MaBlock

    function_class = "dma"

    def __post_init__(self):
        if self.convex.n_dims != self.concave.n_dims:
            raise DimensionMismatch("convex and concave blocks disagree on n")

    @property
    def n_dims(self) -> int:
        return self.convex.n_dims


@dataclass(frozen=True)
class SdmaParams:
    convex: MaBlock
    soft_convex: SoftParam
    concave: MaBlock
    soft_concave: SoftParam

    function_class = "sdma"

    def __post_init__(self):
        if self.convex.n_dims != self.concave.n_dims:
            raise DimensionMismatch("convex and concave blocks disagree on n")

    @property
    def n_dims(self) -> int:
        return self.convex.n_dims


ModelParams = Union[MaParams, SmaParams, DmaParams, SdmaParams]


def _as_point(x, n_dims: int) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != n_dims:
        raise DimensionMismatch(f"point has {x.shape[0]} entries, model has "
                                f"{n_dims} dimensions")
    if not np.all(np.isfinite(x)):
        raise DimensionMismatch("point must be finite")
    return x


def _as_matrix(X, n_dims: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        # one-dimensional models take a vector of samples; otherwise a
        # flat array is a single point
        X = X.reshape(-1, 1) if n_dims == 1 else X.reshape(1, -1)
    X = np.ascontiguousarray(X)
    if X.ndim != 2 or X.shape[1] != n_dims:
        raise DimensionMismatch(f"inputs have shape {X.shape}, model "
                                f"has {n_dims} dimensions")
    return X


def eval_ma(block: MaBlock, x) -> float:
    """Pointwise maximum of the block's affine planes at one point."""
    x = _as_point(x, block.n_dims)
    return float(kernels.ma_values(block.b, block.a, x.reshape(1, -1))[0])


def eval_ma_argmax(block: MaBlock, x) -> int:
    """Index of the active plane at ``x``; lowest index wins on a tie."""
    x = _as_point(x, block.n_dims)
    _, idx = kernels.ma_values_argmax(block.b, block.a, x.reshape(1, -1))
    return int(idx[0])


def eval_sma(block: MaBlock, soft: SoftParam, x) -> float:
    """Softened maximum: (1/alpha) log-sum-exp over the planes at one point.

    Always within [max, max + log(k)/alpha] of the hard maximum.
    """
    x = _as_point(x, block.n_dims)
    return float(kernels.sma_values(block.b, block.a, soft.log_alpha,
                                    x.reshape(1, -1))[0])


def eval_dma(params: DmaParams, x) -> float:
    """Difference of the two hard maxima at one point."""
    x = _as_point(x, params.n_dims)
    X = x.reshape(1, -1)
    vc = kernels.ma_values(params.convex.b, params.convex.a, X)
    vh = kernels.ma_values(params.concave.b, params.concave.a, X)
    return float(vc[0] - vh[0])


def eval_sdma(params: SdmaParams, x) -> float:
    """Difference of the two softened maxima at one point."""
    x = _as_point(x, params.n_dims)
    X = x.reshape(1, -1)
    vc = kernels.sma_values(params.convex.b, params.convex.a,
                            params.soft_convex.log_alpha, X)
    vh = kernels.sma_values(params.concave.b, params.concave.a,
                            params.soft_concave.log_alpha, X)
    return float(vc[0] - vh[0])


def predict(params: ModelParams, X) -> np.ndarray:
    """Evaluate any model variant over rows of ``X`` (log-space inputs)."""
    X = _as_matrix(X, params.n_dims)
    if isinstance(params, MaParams):
        return kernels.ma_values(params.block.b, params.block.a, X)
    if isinstance(params, SmaParams):
        return kernels.sma_values(params.block.b, params.block.a,
                                  params.soft.log_alpha, X)
    if isinstance(params, DmaParams):
        vc = kernels.ma_values(params.convex.b, params.convex.a, X)
        vh = kernels.ma_values(params.concave.b, params.concave.a, X)
        return vc - vh
    if isinstance(params, SdmaParams):
        vc = kernels.sma_values(params.convex.b, params.convex.a,
                                params.soft_convex.log_alpha, X)
        vh = kernels.sma_values(params.concave.b, params.concave.a,
                                params.soft_concave.log_alpha, X)
        # mutually infinite blocks happen at rejected solver trials; the
        # non-finite difference is the signal, not a fault
        with np.errstate(invalid="ignore"):
            return vc - vh
    raise TypeError(f"unknown model variant {type(params).__name__}")


def value_jacobian(params: ModelParams, X):
    """Batched values and Jacobian rows over the stacked parameter vector.

    Returns ``(values (m,), J (m, p))`` where p is the stacked vector length
    of the variant. Raises NonFiniteGradient if any entry is non-finite,
    which signals an overflow bug rather than a caller error.
    """
    X = _as_matrix(X, params.n_dims)
    if isinstance(params, MaParams):
        vals, J = kernels.ma_value_jacobian(params.block.b, params.block.a, X)
    elif isinstance(params, SmaParams):
        vals, J = kernels.sma_value_jacobian(
            params.block.b, params.block.a, params.soft.log_alpha, X)
    elif isinstance(params, DmaParams):
        vals, J = kernels.dma_value_jacobian(
            params.convex.b, params.convex.a,
            params.concave.b, params.concave.a, X)
    elif isinstance(params, SdmaParams):
        vals, J = kernels.sdma_value_jacobian(
            params.convex.b, params.convex.a, params.soft_convex.log_alpha,
            params.concave.b, params.concave.a, params.soft_concave.log_alpha,
            X)
    else:
        raise TypeError(f"unknown model variant {type(params).__name__}")
    if not np.all(np.isfinite(J)):
        raise NonFiniteGradient("analytic gradient has non-finite entries")
    return vals, J


def jac_dma(params: DmaParams, x) -> np.ndarray:
    """Gradient of the difference model at one point, over [b, a, h, g].

    Offsets and slopes of the active convex plane get 1 and x; the active
    concave plane gets -1 and -x; everything else is zero. Argmax ties go
    to the lowest index.
    """
    x = _as_point(x, params.n_dims)
    _, J = value_jacobian(params, x.reshape(1, -1))
    return J[0]


def jac_sdma(params: SdmaParams, x) -> np.ndarray:
    """Gradient of the soft difference model at one point.

    Layout [b, a, log alpha, h, g, log beta]. Offset entries are softmax
    weights of their block (so they sum to 1 for the convex block and -1
    for the concave block); the log-softness entries use the weighted mean
    of plane activations minus the block's soft value.
    """
    x = _as_point(x, params.n_dims)
    _, J = value_jacobian(params, x.reshape(1, -1))
    return J[0]


def jac_ma(params: MaParams, x) -> np.ndarray:
    """Gradient of the max-affine model at one point, over [b, a]."""
    x = _as_point(x, params.n_dims)
    _, J = value_jacobian(params, x.reshape(1, -1))
    return J[0]


def jac_sma(params: SmaParams, x) -> np.ndarray:
    """Gradient of the soft max-affine model, over [b, a, log alpha]."""
    x = _as_point(x, params.n_dims)
    _, J = value_jacobian(params, x.reshape(1, -1))
    return J[0]


def gamma_size(function_class: str, k_terms: int, m_terms: int,
               n_dims: int) -> int:
    """Length of the stacked parameter vector for a variant."""
    per = 1 + n_dims
    if function_class == "ma":
        return k_terms * per
    if function_class == "sma":
        return k_terms * per + 1
    if function_class == "dma":
        return (k_terms + m_terms) * per
    if function_class == "sdma":
        return (k_terms + m_terms) * per + 2
    raise ValueError(f"unknown function class {function_class!r}")


def to_gamma(params: ModelParams) -> np.ndarray:
    """Stack a model's parameters into the fixed-layout vector."""
    if isinstance(params, MaParams):
        return np.concatenate([params.block.b, params.block.a.ravel()])
    if isinstance(params, SmaParams):
        return np.concatenate([params.block.b, params.block.a.ravel(),
                               [params.soft.log_alpha]])
    if isinstance(params, DmaParams):
        return np.concatenate([params.convex.b, params.convex.a.ravel(),
                               params.concave.b, params.concave.a.ravel()])
    if isinstance(params, SdmaParams):
        return np.concatenate([params.convex.b, params.convex.a.ravel(),
                               [params.soft_convex.log_alpha],
                               params.concave.b, params.concave.a.ravel(),
                               [params.soft_concave.log_alpha]])
    raise TypeError(f"unknown model variant {type(params).__name__}")


def from_gamma(function_class: str, gamma, n_dims: int, k_terms: int,
               m_terms: int = 0) -> ModelParams:
    """Rebuild a model from its stacked vector; inverse of ``to_gamma``."""
    gamma = np.asarray(gamma, dtype=float).ravel()
    expected = gamma_size(function_class, k_terms, m_terms, n_dims)
    if gamma.shape[0] != expected:
        raise DimensionMismatch(
            f"expected {expected} stacked parameters for "
            f"{function_class} k={k_terms} m={m_terms} n={n_dims}, "
            f"got {gamma.shape[0]}")
    k, n = k_terms, n_dims

    def block(off: int, terms: int) -> MaBlock:
        b = gamma[off:off + terms]
        a = gamma[off + terms:off + terms * (1 + n)].reshape(terms, n)
        return MaBlock(b=b, a=a)

    if function_class == "ma":
        return MaParams(block=block(0, k))
    if function_class == "sma":
        return SmaParams(block=block(0, k),
                         soft=SoftParam(log_alpha=gamma[k * (1 + n)]))
    if function_class == "dma":
        return DmaParams(convex=block(0, k),
                         concave=block(k * (1 + n), m_terms))
    if function_class == "sdma":
        off = k * (1 + n)
        return SdmaParams(
            convex=block(0, k),
            soft_convex=SoftParam(log_alpha=gamma[off]),
            concave=block(off + 1, m_terms),
            soft_concave=SoftParam(log_alpha=gamma[-1]))
    raise ValueError(f"unknown function class {function_class!r}")
