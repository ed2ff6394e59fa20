"""Linear classifiers over feature matrices: regularized least squares,
hinge-loss SVM by stochastic subgradient, logistic regression, and Gaussian
naive Bayes.

Labels are encoded OFF -> +1, NOT -> -1 throughout; predictions map the
score sign back to the label strings.  A LinearModel may carry an embedded
random-feature map, in which case prediction lifts raw inputs through the
map before scoring, so persisted models are self-contained.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .corpus import SIGN_TO_LABEL
from .errors import DataError, NumericError
from .rks import RksMap, transform

__all__ = [
    "FeatureMatrix",
    "LinearModel",
    "GnbModel",
    "train_rlsc",
    "train_linear_svm",
    "train_logreg",
    "train_gnb",
    "predict",
    "svm_objective",
    "logreg_loss_grad",
]

RLSC_DIRECT_MAX_COLS = 4096


@dataclass
class FeatureMatrix:
    """Row-per-sample feature block plus the tweet ids the rows came from."""

    values: np.ndarray
    ids: list[str] = field(default_factory=list)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass
class LinearModel:
    """Weights + bias for score = w . x + bias, sign read out as OFF/NOT."""

    kind: str
    w: np.ndarray
    bias: float
    hyper: dict
    rks: RksMap | None = None


@dataclass
class GnbModel:
    """Per-class diagonal Gaussians; class rows ordered [OFF(+1), NOT(-1)]."""

    means: np.ndarray
    variances: np.ndarray
    priors: np.ndarray
    var_floor: float


def _as_matrix(F) -> np.ndarray:
    values = F.values if isinstance(F, FeatureMatrix) else np.asarray(F)
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise DataError(f"feature matrix must be 2-d, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise DataError("feature matrix contains non-finite entries")
    return values


def _training_pair(F, y) -> tuple[np.ndarray, np.ndarray]:
    X = _as_matrix(F)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] == 0:
        raise DataError("empty training set (zero rows)")
    if y.shape[0] != X.shape[0]:
        raise DataError(f"{X.shape[0]} rows but {y.shape[0]} labels")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise DataError("labels must be +1 or -1")
    return X, y


def _require_two_classes(y: np.ndarray) -> None:
    if np.all(y == y[0]):
        raise NumericError("degenerate training set: only one class present")


def _augment(X: np.ndarray) -> np.ndarray:
    return np.hstack([X, np.ones((X.shape[0], 1))])


def train_rlsc(F, y, lam: float = 1e-3, fit_intercept: bool = True) -> LinearModel:
    """Ridge regression on +-1 targets: solve (X^T X + lam I) w = X^T y.

    The intercept rides along as an appended constant-1 column regularized
    like every other weight.  Uses a Cholesky solve of the normal equations
    up to RLSC_DIRECT_MAX_COLS columns and conjugate gradients beyond that.
    """
    if lam <= 0:
        raise ValueError(f"ridge strength lam must be positive, got {lam}")
    X, y = _training_pair(F, y)
    Xa = _augment(X) if fit_intercept else X
    rhs = Xa.T @ y
    cols = Xa.shape[1]
    if cols <= RLSC_DIRECT_MAX_COLS:
        gram = Xa.T @ Xa + lam * np.eye(cols)
        try:
            w_full = scipy.linalg.cho_solve(scipy.linalg.cho_factor(gram), rhs)
        except scipy.linalg.LinAlgError as exc:
            raise NumericError(f"normal-equation solve failed: {exc}") from exc
    else:
        op = scipy.sparse.linalg.LinearOperator(
            (cols, cols), matvec=lambda v: Xa.T @ (Xa @ v) + lam * v
        )
        w_full, info = scipy.sparse.linalg.cg(op, rhs, rtol=1e-10, atol=0.0, maxiter=20 * cols)
        if info != 0:
            raise NumericError(f"conjugate-gradient solve did not converge (info={info})")
    if fit_intercept:
        w, bias = w_full[:-1], float(w_full[-1])
    else:
        w, bias = w_full, 0.0
    return LinearModel(kind="rlsc", w=w, bias=bias, hyper={"lam": float(lam)})


def svm_objective(w: np.ndarray, bias: float, F, y, C: float) -> float:
    """Primal hinge objective 0.5 ||w||^2 + C * sum_i max(0, 1 - y_i s_i)."""
    X, y = _training_pair(F, y)
    margins = y * (X @ w + bias)
    return float(0.5 * np.dot(w, w) + C * np.sum(np.maximum(0.0, 1.0 - margins)))


def train_linear_svm(F, y, C: float = 1000.0, epochs: int = 200, seed: int = 0) -> LinearModel:
    """Hinge-loss SVM by seeded stochastic subgradient descent.

    Minimizes 0.5 ||w||^2 + C sum_i hinge_i through its per-sample scaling
    (strength lam = 1 / (C n) on the mean hinge).  One uniformly sampled
    row per step, step size 1/sqrt(t): unlike the 1/(lam t) schedule, the
    step scale does not blow up with C, so large control parameters stay
    stable.  The bias is a separate unregularized term moved only by hinge
    subgradients.  The returned weights average the iterates of the second
    half of the run, which is what actually converges.  Deterministic
    given (data, C, epochs, seed).
    """
    if C <= 0:
        raise ValueError(f"control parameter C must be positive, got {C}")
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    X, y = _training_pair(F, y)
    _require_two_classes(y)
    n, dim = X.shape
    lam = 1.0 / (C * n)
    steps = epochs * n
    order = np.random.default_rng(seed).integers(0, n, size=steps)

    w = np.zeros(dim)
    bias = 0.0
    tail_start = steps // 2
    w_sum = np.zeros(dim)
    bias_sum = 0.0
    tail = 0
    for t0 in range(steps):
        eta = 1.0 / np.sqrt(t0 + 1.0)
        i = order[t0]
        active = y[i] * (X[i] @ w + bias) < 1.0
        w *= max(0.0, 1.0 - eta * lam)
        if active:
            w += eta * y[i] * X[i]
            bias += eta * y[i]
        if t0 >= tail_start:
            w_sum += w
            bias_sum += bias
            tail += 1
    w_avg = w_sum / tail
    bias_avg = bias_sum / tail
    hyper = {"C": float(C), "epochs": int(epochs), "seed": int(seed)}
    return LinearModel(kind="svm_linear", w=w_avg, bias=float(bias_avg), hyper=hyper)


def logreg_loss_grad(w_full: np.ndarray, Xa: np.ndarray, y: np.ndarray, l2: float):
    """Mean logistic loss with L2 penalty, and its analytic gradient."""
    z = Xa @ w_full
    margins = y * z
    loss = float(np.mean(np.logaddexp(0.0, -margins)) + 0.5 * l2 * np.dot(w_full, w_full))
    # d/dz log(1 + e^{-yz}) = -y * sigmoid(-yz)
    sig = 0.5 * (1.0 - np.tanh(0.5 * margins))
    grad = Xa.T @ (-y * sig) / Xa.shape[0] + l2 * w_full
    return loss, grad


def train_logreg(
    F,
    y,
    lr: float = 0.1,
    epochs: int = 500,
    l2: float = 1e-3,
    seed: int = 0,
    fit_intercept: bool = True,
) -> LinearModel:
    """L2-regularized logistic regression by full-batch gradient descent.

    The intercept is an appended constant-1 column regularized uniformly.
    The step is the requested rate capped at the loss's curvature bound
    1 / (sigma_max(X)^2 / 4n + l2), so a large regularizer cannot
    destabilize the descent.  Optimization starts from zero weights; the
    seed only tags the run.
    """
    if lr <= 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    if l2 < 0:
        raise ValueError(f"l2 strength must be >= 0, got {l2}")
    X, y = _training_pair(F, y)
    _require_two_classes(y)
    Xa = _augment(X) if fit_intercept else X
    if min(Xa.shape) <= 2000:
        top_sv = np.linalg.svd(Xa, compute_uv=False)[0]
        smoothness = top_sv**2 / (4.0 * Xa.shape[0]) + l2
    else:
        smoothness = np.sum(Xa * Xa) / (4.0 * Xa.shape[0]) + l2
    step = min(lr, 1.0 / smoothness) if smoothness > 0 else lr
    w_full = np.zeros(Xa.shape[1])
    for _ in range(epochs):
        _, grad = logreg_loss_grad(w_full, Xa, y, l2)
        w_full -= step * grad
    if fit_intercept:
        w, bias = w_full[:-1], float(w_full[-1])
    else:
        w, bias = w_full, 0.0
    hyper = {"lr": float(lr), "epochs": int(epochs), "l2": float(l2), "seed": int(seed)}
    return LinearModel(kind="logreg", w=w, bias=bias, hyper=hyper)


def train_gnb(F, y, var_floor: float = 1e-9) -> GnbModel:
    """Per-class diagonal Gaussians with a variance floor; priors from counts."""
    if var_floor <= 0:
        raise ValueError(f"variance floor must be positive, got {var_floor}")
    X, y = _training_pair(F, y)
    _require_two_classes(y)
    means = []
    variances = []
    priors = []
    for sign in (+1.0, -1.0):
        rows = X[y == sign]
        means.append(rows.mean(axis=0))
        variances.append(np.maximum(rows.var(axis=0), var_floor))
        priors.append(rows.shape[0] / X.shape[0])
    return GnbModel(
        means=np.array(means),
        variances=np.array(variances),
        priors=np.array(priors),
        var_floor=float(var_floor),
    )


def _gnb_scores(model: GnbModel, X: np.ndarray) -> np.ndarray:
    log_posts = []
    for cls in range(2):
        mu = model.means[cls]
        var = model.variances[cls]
        ll = -0.5 * np.sum(np.log(2.0 * np.pi * var) + (X - mu) ** 2 / var, axis=1)
        log_posts.append(np.log(model.priors[cls]) + ll)
    return log_posts[0] - log_posts[1]


def predict(model, F) -> list[tuple[str, float]]:
    """Per-row (label, raw score); score >= 0 reads as OFF.

    A LinearModel with an embedded random-feature map expects raw inputs of
    the map's input dimension and lifts them before scoring.
    """
    X = _as_matrix(F)
    if isinstance(model, LinearModel):
        if model.rks is not None:
            if X.shape[1] != model.rks.d_in:
                raise DataError(
                    f"feature dim {X.shape[1]} does not match map input {model.rks.d_in}"
                )
            X = transform(model.rks, X)
        if X.shape[1] != model.w.shape[0]:
            raise DataError(f"feature dim {X.shape[1]} does not match model dim {model.w.shape[0]}")
        scores = X @ model.w + model.bias
    elif isinstance(model, GnbModel):
        if X.shape[1] != model.means.shape[1]:
            raise DataError(
                f"feature dim {X.shape[1]} does not match model dim {model.means.shape[1]}"
            )
        scores = _gnb_scores(model, X)
    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    return [(SIGN_TO_LABEL[+1] if s >= 0 else SIGN_TO_LABEL[-1], float(s)) for s in scores]
