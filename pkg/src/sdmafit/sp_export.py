"""Transform fitted log-space models into original-variable constraints.

A soft difference model in log space is algebraically the log of a ratio
of two posynomial expressions raised to 1/alpha and 1/beta. Exporting
multiplies each block's offsets and slopes by its softness to form
posynomial coefficients exp(alpha*b_k) and exponents alpha*a_ik, keeping
the outer 1/alpha power symbolic. The three resulting relations

    w (op) (p_convex)^(1/alpha) / (p_concave)^(1/beta)
    p_convex (op) sum of monomials
    p_concave (op) sum of monomials

form a signomial-programming-compatible set; the operator of each line
depends on the original constraint sense so that the relaxations stay
consistent (an upper bound on w needs a lower bound on the numerator).
The soft-max class with no concave block reduces to the single
geometric-programming-compatible posynomial constraint against w^alpha.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import CoefficientOverflow, DimensionMismatch, NameArityMismatch
from .functions import SdmaParams, SmaParams


class ConstraintOp(str, enum.Enum):
    EQ = "eq"
    LEQ = "leq"
    GEQ = "geq"

    @property
    def symbol(self) -> str:
        return {"eq": "=", "leq": "<=", "geq": ">="}[self.value]


# rows (w, p_convex, p_concave) keyed by the original constraint sense
_OPERATOR_TABLE = {
    ConstraintOp.EQ: (ConstraintOp.EQ, ConstraintOp.EQ, ConstraintOp.EQ),
    ConstraintOp.LEQ: (ConstraintOp.LEQ, ConstraintOp.GEQ, ConstraintOp.LEQ),
    ConstraintOp.GEQ: (ConstraintOp.GEQ, ConstraintOp.LEQ, ConstraintOp.GEQ),
}

# a posynomial bound flips sense when moved to the w^alpha side
_GP_OPERATOR = {
    ConstraintOp.EQ: ConstraintOp.EQ,
    ConstraintOp.LEQ: ConstraintOp.GEQ,
    ConstraintOp.GEQ: ConstraintOp.LEQ,
}


@dataclass(frozen=True)
class Posynomial:
    """Sum of monomials: terms are (positive coefficient, exponent row)."""

    coefficients: np.ndarray
    exponents: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float)
        e = np.array(self.exponents, dtype=float)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("need at least one coefficient")
        if e.ndim != 2 or e.shape[0] != c.size:
            raise ValueError(f"exponents shape {e.shape} does not match "
                             f"{c.size} coefficients")
        if not np.all(np.isfinite(c)) or np.any(c <= 0):
            raise ValueError("coefficients must be finite and positive")
        if not np.all(np.isfinite(e)):
            raise ValueError("exponents must be finite")
        c.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "exponents", e)

    @property
    def n_terms(self) -> int:
        return self.coefficients.size

    @property
    def n_dims(self) -> int:
        return self.exponents.shape[1]

    def evaluate(self, u):
        """Value at positive original-space points (one row per point)."""
        u = np.asarray(u, dtype=float)
        single = u.ndim == 1
        U = u.reshape(1, -1) if single else u
        if U.ndim != 2 or U.shape[1] != self.n_dims:
            raise DimensionMismatch(f"points have shape {u.shape}, "
                                    f"posynomial has {self.n_dims} variables")
        if np.any(U <= 0):
            raise ValueError("posynomials are defined for positive inputs")
        vals = np.exp(np.log(U) @ self.exponents.T) @ self.coefficients
        return float(vals[0]) if single else vals


@dataclass(frozen=True)
class SpConstraintSet:
    """Three-constraint substitution set for a soft difference model."""

    p_convex: Posynomial
    p_concave: Posynomial
    inv_alpha: float
    inv_beta: float
    operators: tuple

    def __post_init__(self):
        if self.operators not in _OPERATOR_TABLE.values():
            raise ValueError(f"operator triple {self.operators} is not a "
                             f"column of the substitution table")

    def evaluate(self, u):
        """The w bound by the set: ratio of outer-powered posynomials."""
        return (self.p_convex.evaluate(u) ** self.inv_alpha
                / self.p_concave.evaluate(u) ** self.inv_beta)


@dataclass(frozen=True)
class GpConstraint:
    """Single posynomial constraint against w^alpha for soft-max models."""

    posynomial: Posynomial
    inv_alpha: float
    operator: ConstraintOp

    def evaluate(self, u):
        """The w at which the constraint is tight."""
        return self.posynomial.evaluate(u) ** self.inv_alpha


def _as_op(original_op) -> ConstraintOp:
    if isinstance(original_op, ConstraintOp):
        return original_op
    return ConstraintOp(str(original_op).lower())


def _block_posynomial(b, a, alpha: float, what: str) -> Posynomial:
    scaled_b = alpha * np.asarray(b, dtype=float)
    # overflow is detected below and surfaces as the typed error
    with np.errstate(over="ignore"):
        coefs = np.exp(scaled_b)
    expos = alpha * np.asarray(a, dtype=float)
    bad = ~np.isfinite(coefs) | (coefs <= 0) | ~np.isfinite(expos).all(axis=1)
    if bad.any():
        k = int(np.argmax(bad))
        raise CoefficientOverflow(
            f"{what} term {k}: exp({scaled_b[k]:g}) leaves the representable "
            f"range; the fit is ill-scaled and must be re-fit or rescaled")
    return Posynomial(coefficients=coefs, exponents=expos)


def export_sp(params: SdmaParams, original_op="eq") -> SpConstraintSet:
    """Constraint set for a soft difference model in original variables.

    Coefficients are exp(alpha*b_k) and exp(beta*h_m), exponents
    alpha*a_ik and beta*g_im, with the outer 1/alpha and 1/beta kept
    symbolic. Raises CoefficientOverflow rather than clamp anything.
    """
    if not isinstance(params, SdmaParams):
        raise TypeError("export_sp takes the soft difference class; the "
                        "soft-max class exports through export_gp")
    op = _as_op(original_op)
    alpha = params.soft_convex.alpha
    beta = params.soft_concave.alpha
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise CoefficientOverflow("softness exponentiates to a non-finite "
                                  "value; the fit must be re-fit or rescaled")
    return SpConstraintSet(
        p_convex=_block_posynomial(params.convex.b, params.convex.a, alpha,
                                   "convex"),
        p_concave=_block_posynomial(params.concave.b, params.concave.a, beta,
                                    "concave"),
        inv_alpha=1.0 / alpha,
        inv_beta=1.0 / beta,
        operators=_OPERATOR_TABLE[op])


def export_gp(params: SmaParams, original_op="eq") -> GpConstraint:
    """Posynomial constraint for a soft-max model: posynomial (op) w^alpha."""
    if not isinstance(params, SmaParams):
        raise TypeError("export_gp takes the soft-max class; difference "
                        "classes export through export_sp")
    op = _as_op(original_op)
    alpha = params.soft.alpha
    if not math.isfinite(alpha):
        raise CoefficientOverflow("softness exponentiates to a non-finite "
                                  "value; the fit must be re-fit or rescaled")
    return GpConstraint(
        posynomial=_block_posynomial(params.block.b, params.block.a, alpha,
                                     "posynomial"),
        inv_alpha=1.0 / alpha,
        operator=_GP_OPERATOR[op])


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _term_text(coef: float, expo: np.ndarray, var_names) -> str:
    parts = [_fmt(coef)]
    for name, e in zip(var_names, expo):
        if e != 0.0:
            parts.append(f"{name}^{_fmt(e)}")
    return "·".join(parts)


def _posy_text(p: Posynomial, var_names) -> str:
    return " + ".join(_term_text(c, e, var_names)
                      for c, e in zip(p.coefficients, p.exponents))


def _powered(text: str, n_terms: int, power: float,
             force_parens: bool) -> str:
    if power == 1.0:
        return f"({text})" if force_parens or n_terms > 1 else text
    return f"({text})^{_fmt(power)}"


def _check_names(var_names, n_dims: int):
    if len(var_names) != n_dims:
        raise NameArityMismatch(f"{len(var_names)} variable names for "
                                f"{n_dims} variables")


def render_constraints(cs: SpConstraintSet, var_names) -> str:
    """Deterministic algebraic text: the w line, then both posynomials.

    Terms appear in stored order with 17-significant-digit coefficients;
    zero exponents are dropped; the denominator is always parenthesized;
    outer powers are omitted when they equal one.
    """
    _check_names(var_names, cs.p_convex.n_dims)
    num = _posy_text(cs.p_convex, var_names)
    den = _posy_text(cs.p_concave, var_names)
    op_w, op_c, op_h = cs.operators
    lines = [
        f"w {op_w.symbol} "
        f"{_powered(num, cs.p_convex.n_terms, cs.inv_alpha, False)} / "
        f"{_powered(den, cs.p_concave.n_terms, cs.inv_beta, True)}",
        f"p_convex {op_c.symbol} {num}",
        f"p_concave {op_h.symbol} {den}",
    ]
    return "\n".join(lines)


def render_gp_constraint(gc: GpConstraint, var_names) -> str:
    """One-line algebraic text of the posynomial against w^alpha."""
    _check_names(var_names, gc.posynomial.n_dims)
    alpha = 1.0 / gc.inv_alpha
    w = "w" if alpha == 1.0 else f"w^{_fmt(alpha)}"
    return (f"{_posy_text(gc.posynomial, var_names)} "
            f"{gc.operator.symbol} {w}")
