"""scikit-learn style wrapper around the closed-form Values."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .core import GameConfig
from .value import RegionLabel, phase1_value_array, solve_retreat_points


class ReconnaissanceGame(TransformerMixin, BaseEstimator):
    """Map game states to ``[V_I, V_II]`` and winning-region labels.

    Nothing is learned; ``fit`` only validates the parameters so the object
    can sit in a pipeline or be cloned in a parameter sweep.

    Parameters
    ----------
    alpha : float, default=1.2
        Defender/Intruder speed ratio (> 1).
    l : float, default=1.0
        Target region offset (> 0).
    switch_tol, solver_tol : float
        As in :class:`~recongame.core.GameConfig`.

    Examples
    --------
    >>> import numpy as np
    >>> game = ReconnaissanceGame(alpha=1.2).fit()
    >>> game.transform(np.array([[0.5, 0.1, 0.1, 0.9]])).round(4)
    array([[0.4688, 0.8726]])
    """

    def __init__(self, alpha=1.2, l=1.0, switch_tol=1e-6, solver_tol=1e-12):
        self.alpha = alpha
        self.l = l
        self.switch_tol = switch_tol
        self.solver_tol = solver_tol

    def fit(self, X=None, y=None):
        self.config_ = GameConfig(self.alpha, self.l, self.switch_tol, self.solver_tol)
        if X is not None:
            X = check_array(X)
            self._check_width(X)
            self.n_features_in_ = 4
        return self

    @staticmethod
    def _check_width(X):
        if X.shape[1] != 4:
            raise ValueError(f"expected 4 columns [x_I, y_I, x_D, y_D], got {X.shape[1]}")

    def _validated(self, X):
        check_is_fitted(self, "config_")
        X = check_array(X, dtype=np.float64)
        self._check_width(X)
        return X

    def transform(self, X):
        """Return an ``(n, 2)`` array of ``[V_I, V_II]``."""
        X = self._validated(X)
        cfg = self.config_
        v1 = phase1_value_array(*X.T, cfg.alpha, cfg.l)
        v2, _ = solve_retreat_points(*X.T, cfg.alpha, cfg.solver_tol)
        return np.column_stack([v1, v2])

    def predict(self, X):
        """Region label per state (see :class:`~recongame.value.RegionLabel`)."""
        V = self.transform(X)
        labels = np.full(len(V), int(RegionLabel.NEGATIVE_VALUE))
        labels[(V[:, 1] >= 0) & (V[:, 0] >= 0)] = int(RegionLabel.INTRUDER_WIN)
        labels[V[:, 1] < 0] = int(RegionLabel.DEFENDER_WIN)
        return labels
