"""Model and constraint files: versioned JSON with round-trip precision.

Both file kinds carry a format_version so future revisions can evolve
without breaking readers. Serialization is deterministic (sorted keys,
fixed separators, shortest-round-trip floats), so identical objects
produce byte-identical files.

Model files hold the log-space parameters keyed by their mathematical
names: offsets b, slopes a for the convex block; h, g for the concave
block; log_alpha and log_beta for the softness of each block. Constraint
files hold the exported posynomials, outer powers, and operator senses.
"""

from __future__ import annotations

import json

from .errors import DimensionMismatch, MalformedModelFile
from .functions import (MaBlock, MaParams, SmaParams, DmaParams, SdmaParams,
                        SoftParam, ModelParams)
from .sp_export import ConstraintOp, GpConstraint, Posynomial, SpConstraintSet

FORMAT_VERSION = 1

_MODEL_KIND = "model"
_SP_KIND = "sp_constraint_set"
_GP_KIND = "gp_constraint"


def model_to_dict(params: ModelParams) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": _MODEL_KIND,
        "function_class": params.function_class,
        "n_dims": params.n_dims,
    }
    if isinstance(params, (MaParams, SmaParams)):
        doc["k_terms"] = params.block.k_terms
        doc["b"] = params.block.b.tolist()
        doc["a"] = params.block.a.tolist()
        if isinstance(params, SmaParams):
            doc["log_alpha"] = params.soft.log_alpha
    elif isinstance(params, (DmaParams, SdmaParams)):
        doc["k_terms"] = params.convex.k_terms
        doc["m_terms"] = params.concave.k_terms
        doc["b"] = params.convex.b.tolist()
        doc["a"] = params.convex.a.tolist()
        doc["h"] = params.concave.b.tolist()
        doc["g"] = params.concave.a.tolist()
        if isinstance(params, SdmaParams):
            doc["log_alpha"] = params.soft_convex.log_alpha
            doc["log_beta"] = params.soft_concave.log_alpha
    else:
        raise TypeError(f"unknown model variant {type(params).__name__}")
    return doc


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise MalformedModelFile(f"{path}: missing field {key!r}")
    return doc[key]


def model_from_dict(doc: dict, path: str = "<memory>") -> ModelParams:
    version = _require(doc, "format_version", path)
    if version != FORMAT_VERSION:
        raise MalformedModelFile(f"{path}: format_version {version} is not "
                                 f"supported (expected {FORMAT_VERSION})")
    if _require(doc, "kind", path) != _MODEL_KIND:
        raise MalformedModelFile(f"{path}: kind {doc['kind']!r} is not a "
                                 f"model file")
    cls = _require(doc, "function_class", path)
    try:
        if cls == "ma":
            return MaParams(block=MaBlock(b=_require(doc, "b", path),
                                          a=_require(doc, "a", path)))
        if cls == "sma":
            return SmaParams(
                block=MaBlock(b=_require(doc, "b", path),
                              a=_require(doc, "a", path)),
                soft=SoftParam(log_alpha=_require(doc, "log_alpha", path)))
        if cls == "dma":
            return DmaParams(
                convex=MaBlock(b=_require(doc, "b", path),
                               a=_require(doc, "a", path)),
                concave=MaBlock(b=_require(doc, "h", path),
                                a=_require(doc, "g", path)))
        if cls == "sdma":
            return SdmaParams(
                convex=MaBlock(b=_require(doc, "b", path),
                               a=_require(doc, "a", path)),
                soft_convex=SoftParam(
                    log_alpha=_require(doc, "log_alpha", path)),
                concave=MaBlock(b=_require(doc, "h", path),
                                a=_require(doc, "g", path)),
                soft_concave=SoftParam(
                    log_alpha=_require(doc, "log_beta", path)))
    except MalformedModelFile:
        raise
    except (TypeError, ValueError, DimensionMismatch) as exc:
        raise MalformedModelFile(f"{path}: invalid parameters: {exc}") \
            from exc
    raise MalformedModelFile(f"{path}: unknown function class {cls!r}")


def constraints_to_dict(cs) -> dict:
    if isinstance(cs, SpConstraintSet):
        op_w, op_c, op_h = cs.operators
        return {
            "format_version": FORMAT_VERSION,
            "kind": _SP_KIND,
            "n_dims": cs.p_convex.n_dims,
            "inv_alpha": cs.inv_alpha,
            "inv_beta": cs.inv_beta,
            "operators": {"w": op_w.value, "p_convex": op_c.value,
                          "p_concave": op_h.value},
            "p_convex": {"coefficients": cs.p_convex.coefficients.tolist(),
                         "exponents": cs.p_convex.exponents.tolist()},
            "p_concave": {"coefficients": cs.p_concave.coefficients.tolist(),
                          "exponents": cs.p_concave.exponents.tolist()},
        }
    if isinstance(cs, GpConstraint):
        return {
            "format_version": FORMAT_VERSION,
            "kind": _GP_KIND,
            "n_dims": cs.posynomial.n_dims,
            "inv_alpha": cs.inv_alpha,
            "operator": cs.operator.value,
            "posynomial": {
                "coefficients": cs.posynomial.coefficients.tolist(),
                "exponents": cs.posynomial.exponents.tolist()},
        }
    raise TypeError(f"unknown constraint object {type(cs).__name__}")


def _posynomial_from(doc: dict, path: str) -> Posynomial:
    return Posynomial(coefficients=_require(doc, "coefficients", path),
                      exponents=_require(doc, "exponents", path))


def constraints_from_dict(doc: dict, path: str = "<memory>"):
    version = _require(doc, "format_version", path)
    if version != FORMAT_VERSION:
        raise MalformedModelFile(f"{path}: format_version {version} is not "
                                 f"supported (expected {FORMAT_VERSION})")
    kind = _require(doc, "kind", path)
    try:
        if kind == _SP_KIND:
            ops = _require(doc, "operators", path)
            return SpConstraintSet(
                p_convex=_posynomial_from(_require(doc, "p_convex", path),
                                          path),
                p_concave=_posynomial_from(_require(doc, "p_concave", path),
                                           path),
                inv_alpha=float(_require(doc, "inv_alpha", path)),
                inv_beta=float(_require(doc, "inv_beta", path)),
                operators=(ConstraintOp(_require(ops, "w", path)),
                           ConstraintOp(_require(ops, "p_convex", path)),
                           ConstraintOp(_require(ops, "p_concave", path))))
        if kind == _GP_KIND:
            return GpConstraint(
                posynomial=_posynomial_from(_require(doc, "posynomial", path),
                                            path),
                inv_alpha=float(_require(doc, "inv_alpha", path)),
                operator=ConstraintOp(_require(doc, "operator", path)))
    except MalformedModelFile:
        raise
    except (TypeError, ValueError) as exc:
        raise MalformedModelFile(f"{path}: invalid constraint data: {exc}") \
            from exc
    raise MalformedModelFile(f"{path}: unknown file kind {kind!r}")


def _dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2,
                      separators=(",", ": ")) + "\n"


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise MalformedModelFile(f"{path}: cannot read: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedModelFile(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedModelFile(f"{path}: top level must be an object")
    return doc


def save_model(params: ModelParams, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dumps(model_to_dict(params)))


def load_model(path: str) -> ModelParams:
    return model_from_dict(_load_json(path), path)


def save_constraints(cs, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dumps(constraints_to_dict(cs)))


def load_constraints(path: str):
    return constraints_from_dict(_load_json(path), path)
