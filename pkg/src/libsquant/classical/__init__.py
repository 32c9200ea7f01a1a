from .knn import KnnModel, predict_knn
from .linear import (ConvergenceError, LassoPath, LinearModel,
                     default_lambda_grid, fit_lasso, fit_ols, lambda_max,
                     lasso_path, soft_threshold)
from .svr import SvrModel, dual_objective, fit_svr, kernel_matrix
from .trees import (ForestModel, GbrModel, TreeNode, fit_forest, fit_gbr,
                    fit_tree)

__all__ = [
    "KnnModel", "predict_knn",
    "ConvergenceError", "LassoPath", "LinearModel", "default_lambda_grid",
    "fit_lasso", "fit_ols", "lambda_max", "lasso_path", "soft_threshold",
    "SvrModel", "dual_objective", "fit_svr", "kernel_matrix",
    "ForestModel", "GbrModel", "TreeNode", "fit_forest", "fit_gbr", "fit_tree",
]
