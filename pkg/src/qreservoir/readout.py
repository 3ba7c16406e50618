"""Trainable readout layers and evaluation metrics.

The linear readout solves the ridge normal equations on standardized
features with an appended constant column; the optional MLP adds one
hidden ReLU layer trained by seeded full-batch gradient descent on the
mean squared error. Both are deterministic functions of their inputs and
hyperparameters.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .errors import (
    ArgumentError,
    DataError,
    NumericalError,
    ShapeError,
    SingularSystemError,
    UndefinedCorrelationError,
)
from .rng import SplitMix64
from .tolerances import STD_FLOOR

KINDS = ("linear", "mlp")


@dataclass(frozen=True)
class ReadoutParams:
    """Hyperparameters for :class:`Readout`."""

    kind: str = "linear"
    ridge: float = 1e-6
    hidden_width: int = 64
    learning_rate: float = 1e-3
    epochs: int = 2000
    seed: int = 0
    standardize: bool = True

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ArgumentError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.ridge < 0:
            raise ArgumentError("ridge must be >= 0")
        if self.hidden_width < 1 or self.epochs < 0 or self.learning_rate <= 0:
            raise ArgumentError("invalid mlp hyperparameters")


def pearson(a, b) -> float:
    """Sample Pearson correlation coefficient of two equal-length series."""
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if len(a) != len(b):
        raise ShapeError(f"length mismatch: {len(a)} vs {len(b)}")
    if len(a) < 2:
        raise ArgumentError("pearson needs at least two points")
    da = a - a.mean()
    db = b - b.mean()
    denom = np.sqrt((da * da).sum() * (db * db).sum())
    if denom == 0.0:
        raise UndefinedCorrelationError("zero variance input")
    return float(np.clip((da * db).sum() / denom, -1.0, 1.0))


def _as_2d(arr, name: str) -> np.ndarray:
    out = np.asarray(arr, dtype=float)
    if out.ndim == 1:
        out = out[:, None]
    if out.ndim != 2:
        raise ShapeError(f"{name} must be 1-D or 2-D, got ndim={out.ndim}")
    if not np.all(np.isfinite(out)):
        raise DataError(f"{name} contains NaN or Inf")
    return out


class Readout(BaseEstimator, RegressorMixin):
    """Linear (ridge) or one-hidden-layer ReLU readout.

    With ``standardize=True`` (default) features are z-scored using
    training statistics (standard deviations floored at 1e-12) and the
    linear kind appends a constant column before solving
    ``(X^T X + ridge I) W = X^T Y``. ``standardize=False`` is the raw
    path used by diagnostics: no scaling and no constant column.
    """

    def __init__(
        self,
        kind: str = "linear",
        ridge: float = 1e-6,
        hidden_width: int = 64,
        learning_rate: float = 1e-3,
        epochs: int = 2000,
        seed: int = 0,
        standardize: bool = True,
    ) -> None:
        self.kind = kind
        self.ridge = ridge
        self.hidden_width = hidden_width
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.seed = seed
        self.standardize = standardize

    # ------------------------------------------------------------------
    # fitting
    # ------------------------------------------------------------------

    def fit(self, X, y) -> "Readout":
        params = ReadoutParams(
            self.kind,
            self.ridge,
            self.hidden_width,
            self.learning_rate,
            self.epochs,
            self.seed,
            self.standardize,
        )
        X = _as_2d(X, "features")
        y = _as_2d(y, "targets")
        if X.shape[0] != y.shape[0]:
            raise ShapeError(
                f"row mismatch: {X.shape[0]} feature rows vs {y.shape[0]} targets"
            )
        if X.shape[0] < 1:
            raise ArgumentError("need at least one training row")

        self.n_features_in_ = X.shape[1]
        self.output_dim_ = y.shape[1]

        if params.standardize:
            self.mean_ = X.mean(axis=0)
            self.scale_ = np.maximum(X.std(axis=0), STD_FLOOR)
            z = (X - self.mean_) / self.scale_
        else:
            self.mean_ = None
            self.scale_ = None
            z = X

        if params.kind == "linear":
            self._fit_linear(z, y, params)
        else:
            self._fit_mlp(z, y, params)
        return self

    def _fit_linear(self, z: np.ndarray, y: np.ndarray, params: ReadoutParams) -> None:
        if params.standardize:
            z = np.hstack([z, np.ones((z.shape[0], 1))])
        gram = z.T @ z + params.ridge * np.eye(z.shape[1])
        rhs = z.T @ y
        try:
            w = np.linalg.solve(gram, rhs)
            # One refinement step keeps the normal-equation residual at
            # rounding level even for ill-conditioned feature sets.
            w += np.linalg.solve(gram, rhs - gram @ w)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(
                "normal equations are singular; use ridge > 0"
            ) from exc
        residual = float(np.abs(gram @ w - rhs).max())
        if not np.isfinite(residual):
            raise NumericalError("ridge solve produced non-finite weights")
        if params.ridge == 0.0 and residual > 1e-6 * max(1.0, float(np.abs(rhs).max())):
            raise SingularSystemError(
                "normal equations are numerically singular; use ridge > 0"
            )
        self.normal_residual_ = residual
        if params.standardize:
            self.coef_ = w[:-1]
            self.intercept_ = w[-1]
        else:
            self.coef_ = w
            self.intercept_ = np.zeros(self.output_dim_)

    def _fit_mlp(self, z: np.ndarray, y: np.ndarray, params: ReadoutParams) -> None:
        n_in, n_hidden, n_out = z.shape[1], params.hidden_width, y.shape[1]
        rng = SplitMix64(params.seed)
        a1 = np.sqrt(6.0 / (n_in + n_hidden))
        a2 = np.sqrt(6.0 / (n_hidden + n_out))
        w1 = (2.0 * rng.uniforms(n_in * n_hidden) - 1.0).reshape(n_in, n_hidden) * a1
        w2 = (2.0 * rng.uniforms(n_hidden * n_out) - 1.0).reshape(n_hidden, n_out) * a2
        b1 = np.zeros(n_hidden)
        b2 = np.zeros(n_out)
        for _ in range(params.epochs):
            loss, grads = _mlp_loss_and_grads(w1, b1, w2, b2, z, y)
            if not np.isfinite(loss):
                raise NumericalError("mlp training diverged; lower learning_rate")
            w1 -= params.learning_rate * grads[0]
            b1 -= params.learning_rate * grads[1]
            w2 -= params.learning_rate * grads[2]
            b2 -= params.learning_rate * grads[3]
        self.hidden_weights_ = w1
        self.hidden_bias_ = b1
        self.output_weights_ = w2
        self.output_bias_ = b2

    # ------------------------------------------------------------------
    # prediction and persistence
    # ------------------------------------------------------------------

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "n_features_in_"):
            raise ArgumentError("readout is not fitted")
        X = _as_2d(X, "features")
        if X.shape[1] != self.n_features_in_:
            raise ShapeError(
                f"expected {self.n_features_in_} features, got {X.shape[1]}"
            )
        z = (X - self.mean_) / self.scale_ if self.standardize else X
        if self.kind == "linear":
            return z @ self.coef_ + self.intercept_
        hidden = np.maximum(z @ self.hidden_weights_ + self.hidden_bias_, 0.0)
        return hidden @ self.output_weights_ + self.output_bias_

    def to_json_dict(self) -> dict:
        if not hasattr(self, "n_features_in_"):
            raise ArgumentError("readout is not fitted")
        doc = {
            "kind": self.kind,
            "input_dim": int(self.n_features_in_),
            "output_dim": int(self.output_dim_),
            "hyperparameters": asdict(
                ReadoutParams(
                    self.kind,
                    self.ridge,
                    self.hidden_width,
                    self.learning_rate,
                    self.epochs,
                    self.seed,
                    self.standardize,
                )
            ),
            "standardizer": None
            if self.mean_ is None
            else {"mean": self.mean_.tolist(), "scale": self.scale_.tolist()},
        }
        if self.kind == "linear":
            doc["weights"] = {
                "coef": self.coef_.tolist(),
                "intercept": np.asarray(self.intercept_).tolist(),
            }
        else:
            doc["weights"] = {
                "hidden_weights": self.hidden_weights_.tolist(),
                "hidden_bias": self.hidden_bias_.tolist(),
                "output_weights": self.output_weights_.tolist(),
                "output_bias": self.output_bias_.tolist(),
            }
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Readout":
        hyper = dict(doc["hyperparameters"])
        model = cls(**hyper)
        model.n_features_in_ = int(doc["input_dim"])
        model.output_dim_ = int(doc["output_dim"])
        std = doc.get("standardizer")
        model.mean_ = None if std is None else np.asarray(std["mean"], dtype=float)
        model.scale_ = None if std is None else np.asarray(std["scale"], dtype=float)
        w = doc["weights"]
        if model.kind == "linear":
            model.coef_ = np.asarray(w["coef"], dtype=float)
            model.intercept_ = np.asarray(w["intercept"], dtype=float)
        else:
            model.hidden_weights_ = np.asarray(w["hidden_weights"], dtype=float)
            model.hidden_bias_ = np.asarray(w["hidden_bias"], dtype=float)
            model.output_weights_ = np.asarray(w["output_weights"], dtype=float)
            model.output_bias_ = np.asarray(w["output_bias"], dtype=float)
        return model

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Readout":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


def _mlp_loss_and_grads(w1, b1, w2, b2, z, y):
    """MSE loss (mean over all entries) and its analytic gradients."""
    pre = z @ w1 + b1
    act = np.maximum(pre, 0.0)
    out = act @ w2 + b2
    resid = out - y
    loss = float((resid * resid).mean())
    scale = 2.0 / resid.size
    d_out = scale * resid
    d_w2 = act.T @ d_out
    d_b2 = d_out.sum(axis=0)
    d_act = d_out @ w2.T
    d_pre = d_act * (pre > 0.0)
    d_w1 = z.T @ d_pre
    d_b1 = d_pre.sum(axis=0)
    return loss, (d_w1, d_b1, d_w2, d_b2)
