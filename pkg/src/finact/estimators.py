"""Estimator-style front end.

``FiniteModelEstimator`` fits a finite isometric model to a window and
transforms window index pairs into model distances; ``SeminormApproximator``
fits a finite normed quotient to a seminorm.  Both follow the scikit-learn
conventions (constructor stores params verbatim, learned state ends in ``_``).
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import groups as gk
from .actions import Action, SampledAction, sample_action, validate_pseudometric
from .model import Caps, build_model, eta, eta_matrix, normalize_mode, verify_model
from .norms import approximate_seminorm, validate_norm


def check_epsilon(epsilon) -> float:
    eps = float(epsilon)
    if not eps > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    return eps


def check_window(X, action: Action | None = None, tol: float = 1e-9) -> SampledAction:
    """Coerce X to a validated window.

    X is a :class:`SampledAction` or, with an action handle, a pair ``(A, X0)``.
    """
    if isinstance(X, SampledAction):
        rep = validate_pseudometric(X.kappa, tol=tol)
        if not rep.ok:
            raise ValueError(f"window is not a pseudometric: {rep.violations[:5]}")
        if set(X.A) != set(gk.symmetrize(X.A)):
            raise ValueError("window A must be symmetric and contain the identity")
        return X
    if action is None:
        raise ValueError("fitting on (A, X0) needs an action handle")
    A, X0 = X
    return sample_action(action, gk.symmetrize(A), X0, tol=tol)


def check_pairs(X, n: int) -> np.ndarray:
    """Integer array of shape (n_pairs, 2) with entries in range(n)."""
    P = check_array(X, dtype=np.int64, ensure_2d=True)
    if P.shape[1] != 2:
        raise ValueError(f"expected pairs of window indices, got shape {P.shape}")
    if P.size and (P.min() < 0 or P.max() >= n):
        raise ValueError(f"window indices must lie in [0, {n})")
    return P


class FiniteModelEstimator(TransformerMixin, BaseEstimator):
    """Finite isometric model of a group action on a window.

    Parameters
    ----------
    group : Group
    action : Action, optional
        Needed when fitting on ``(A, X0)`` instead of a sampled window.
    epsilon : float
    mode : {"materialized", "lazy"}
    caps : Caps, optional
    tol : float
        Tolerance used by :meth:`verify`.
    """

    def __init__(self, group=None, action=None, epsilon=1.0, mode="materialized", caps=None, tol=1e-9):
        self.group = group
        self.action = action
        self.epsilon = epsilon
        self.mode = mode
        self.caps = caps
        self.tol = tol

    def fit(self, X, y=None):
        if self.group is None:
            raise ValueError("group is required")
        eps = check_epsilon(self.epsilon)
        window = check_window(X, self.action, self.tol)
        self.model_ = build_model(self.group, window, epsilon=eps, mode=normalize_mode(self.mode),
                                  caps=self.caps or Caps())
        self.window_ = window
        self.quotient_ = self.model_.quotient
        self.m_ = self.model_.m
        self.k_ = self.model_.k
        self.n_window_ = window.size
        return self

    def transform(self, X):
        """eta on window index pairs; a window input gives the full eta matrix."""
        check_is_fitted(self)
        if isinstance(X, SampledAction) or isinstance(X, tuple):
            return eta_matrix(self.model_)
        P = check_pairs(X, self.n_window_)
        split = self.window_.split
        return np.array([eta(self.model_, *_gh(split(i), split(j))) for i, j in P])

    def verify(self, tol=None):
        check_is_fitted(self)
        return verify_model(self.model_, tol=self.tol if tol is None else tol)


def _gh(a, b):
    (gi, xi), (hi, yi) = a, b
    return gi, hi, xi, yi


class SeminormApproximator(BaseEstimator):
    """Norm on a finite quotient approximating a seminorm on a window A."""

    def __init__(self, group=None, seminorm=None, epsilon=1.0, caps=None):
        self.group = group
        self.seminorm = seminorm
        self.epsilon = epsilon
        self.caps = caps

    def fit(self, X, y=None):
        """X is the finite set A of group elements."""
        if self.group is None or self.seminorm is None:
            raise ValueError("group and seminorm are required")
        eps = check_epsilon(self.epsilon)
        A = list(X)
        if not A:
            raise ValueError("A must be nonempty")
        self.normed_group_, self.model_ = approximate_seminorm(self.group, self.seminorm, A, eps,
                                                               caps=self.caps or Caps())
        self.quotient_ = self.model_.quotient
        self._index = {self.quotient_.key(c): i for i, c in enumerate(self.normed_group_.elements)}
        return self

    def transform(self, X):
        """rho(phi(g)) for each group element g."""
        check_is_fitted(self)
        q = self.quotient_
        out = []
        for g in X:
            try:
                out.append(self.normed_group_.rho[self._index[q.key(q.apply(g))]])
            except KeyError:
                raise ValueError(f"{gk.encode(g)} maps outside the tabulated group") from None
        return np.array(out)

    def validate(self, tol=1e-9):
        check_is_fitted(self)
        return validate_norm(self.normed_group_, tol=tol)
