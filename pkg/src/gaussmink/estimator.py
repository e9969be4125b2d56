"""Scikit-learn style front end for the inverse solver.

The solver is fit-shaped: the data are unit directions X with positive
weights y (a discrete measure on the sphere), and the fitted parameters are
the support values of the shape whose reweighted Gaussian surface measure
matches that data.  predict evaluates the fitted shape's radial function on
new directions.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .cones import make_cone, validate_directions
from .gaussian import EstimatorConfig
from .solver import SolverConfig, solve
from .validation import as_float_matrix, as_float_vector


class MinkowskiSolver(BaseEstimator):
    """Fit support values to a prescribed facet measure on a fixed cone.

    Parameters follow the scikit-learn convention of being stored verbatim;
    all validation happens in fit.  After fitting, `support_` holds the
    recovered h vector, `shape_` the Wulff shape itself, and `rel_residual_`
    the relative l1 stationarity residual that certifies the solution.
    """

    def __init__(self, cone_generators=None, p=1.0, residual_tol=1e-6,
                 max_iters=600, path="auto", n_samples=100_000, seed=0,
                 interiority_margin=1e-6):
        self.cone_generators = cone_generators
        self.p = p
        self.residual_tol = residual_tol
        self.max_iters = max_iters
        self.path = path
        self.n_samples = n_samples
        self.seed = seed
        self.interiority_margin = interiority_margin

    def fit(self, X, y):
        if self.cone_generators is None:
            raise ValueError("cone_generators must be provided")
        X = as_float_matrix(X, "X")
        y = as_float_vector(y, "y")
        cone = make_cone(self.cone_generators)
        omega = validate_directions(cone, X, margin=self.interiority_margin)
        cfg = SolverConfig(
            max_iters=self.max_iters,
            residual_tol=self.residual_tol,
            path=self.path,
            estimator=EstimatorConfig(n_samples=self.n_samples, seed=self.seed),
        )
        result = solve(cone, omega, y, self.p, cfg)
        self.cone_ = cone
        self.omega_ = omega
        self.result_ = result
        self.support_ = result.h_star
        self.scale_c_ = result.c
        self.residual_ = result.residual
        self.rel_residual_ = result.rel_residual
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        self.shape_ = result.shape
        return self

    def predict(self, X):
        """Radial distances of the fitted shape for unit directions inside the cone."""
        if not hasattr(self, "shape_"):
            raise AttributeError("this MinkowskiSolver instance is not fitted yet")
        X = as_float_matrix(X, "X")
        return np.array([self.shape_.radial_function(v)[0] for v in X])

    def score(self, X=None, y=None):
        """Negative relative residual; larger is better, 0 is exact."""
        if not hasattr(self, "rel_residual_"):
            raise AttributeError("this MinkowskiSolver instance is not fitted yet")
        return -self.rel_residual_
