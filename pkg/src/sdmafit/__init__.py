"""Surrogate modeling with max-affine and difference-of-convex classes.

Fits four function classes to log-transformed data with multi-restart
Levenberg-Marquardt: max-affine (convex piecewise linear), soft-max-affine
(its log-sum-exp smoothing), and their hard and soft differences, which
capture nonconvex surfaces. Soft classes transform back out of log space
as posynomial constraint sets for geometric and signomial programs.
"""

from .dataset import DataSet, SpaceOrigin, load_csv, sample_grid_2d, write_csv
from .demo import demo_dataset, demo_target
from .errors import (CoefficientOverflow, DegenerateData, DimensionMismatch,
                     EmptyFile, InputError, LinearSolveFailure,
                     MalformedModelFile, MalformedRow, NameArityMismatch,
                     NonFiniteGradient, NonFiniteResidual, NonFiniteSample,
                     NonPositiveValue, NumericalError, SdmaFitError)
from .fitting import (FUNCTION_CLASSES, FitResult, FitSpec, fit, fit_dma,
                      fit_ma, fit_sdma, init_ma, rms_error)
from .functions import (DmaParams, MaBlock, MaParams, ModelParams,
                        SdmaParams, SmaParams, SoftParam, eval_dma, eval_ma,
                        eval_ma_argmax, eval_sdma, eval_sma, from_gamma,
                        gamma_size, jac_dma, jac_ma, jac_sdma, jac_sma,
                        predict, to_gamma, value_jacobian)
from .kernels import BACKEND, backend_name
from .lm_solver import LmConfig, LmReport, Termination, lm_minimize
from .modelio import (constraints_from_dict, constraints_to_dict,
                      load_constraints, load_model, model_from_dict,
                      model_to_dict, save_constraints, save_model)
from .sp_export import (ConstraintOp, GpConstraint, Posynomial,
                        SpConstraintSet, export_gp, export_sp,
                        render_constraints, render_gp_constraint)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "backend_name", "__version__",
    # dataset
    "DataSet", "SpaceOrigin", "load_csv", "write_csv", "sample_grid_2d",
    # demo
    "demo_dataset", "demo_target",
    # errors
    "SdmaFitError", "InputError", "NumericalError", "MalformedRow",
    "NonPositiveValue", "EmptyFile", "NonFiniteSample", "DimensionMismatch",
    "NameArityMismatch", "DegenerateData", "MalformedModelFile",
    "NonFiniteResidual", "NonFiniteGradient", "LinearSolveFailure",
    "CoefficientOverflow",
    # functions
    "MaBlock", "SoftParam", "MaParams", "SmaParams", "DmaParams",
    "SdmaParams", "ModelParams", "eval_ma", "eval_ma_argmax", "eval_sma",
    "eval_dma", "eval_sdma", "predict", "value_jacobian", "jac_ma",
    "jac_sma", "jac_dma", "jac_sdma", "gamma_size", "to_gamma", "from_gamma",
    # solver
    "LmConfig", "LmReport", "Termination", "lm_minimize",
    # fitting
    "FUNCTION_CLASSES", "FitSpec", "FitResult", "fit", "init_ma", "fit_ma",
    "fit_dma", "fit_sdma", "rms_error",
    # export
    "ConstraintOp", "Posynomial", "SpConstraintSet", "GpConstraint",
    "export_sp", "export_gp", "render_constraints", "render_gp_constraint",
    # model io
    "model_to_dict", "model_from_dict", "constraints_to_dict",
    "constraints_from_dict", "save_model", "load_model", "save_constraints",
    "load_constraints",
]
