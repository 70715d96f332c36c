"""Self-contained kernel SVM classification and epsilon-insensitive SVR.

Both estimators are trained with one sequential-minimal-optimization solver
for box-constrained quadratic programs of the form

    minimize    (1/2) x' Q x + p' x
    subject to  y' x = 0,   0 <= x <= C,       Q[s, t] = y[s] y[t] K[s, t].

Binary classification is the case p = -1. The regression dual is mapped onto
the same form by stacking the two coefficient halves (alpha, alpha*) with
artificial signs y = (+1, ..., +1, -1, ..., -1) and p = (eps - t, eps + t);
the fitted coefficients are beta = alpha - alpha*.

The solver repeatedly picks the maximal-KKT-violating pair (i from the "up"
set, j from the "low" set), minimizes the objective exactly along the feasible
segment joining them, and stops once the violation m(x) - M(x) drops below the
tolerance. The bias is the midpoint (m + M) / 2, which bounds the duality gap
by N * C * tol / 2.

Multiclass problems train one binary machine per unordered label pair and
predict by majority vote, with ties broken by summed decision values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import ConfigError, DataError, NumericalError

_KERNELS = ("linear", "rbf")


def _kernel(kind: str, gamma: float | None, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if kind == "linear":
        return a @ b.T
    return np.exp(-gamma * cdist(a, b, "sqeuclidean"))


def median_heuristic_gamma(x: np.ndarray) -> float:
    """Bandwidth 1 / (2 m^2) where m is the median pairwise distance.

    Falls back to 1.0 when all points coincide. Because the bandwidth adapts
    to the data scale, rbf predictions are unchanged under translating or
    uniformly rescaling all inputs.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] < 2:
        return 1.0
    d = pdist(x)
    d = d[d > 0]
    if d.size == 0:
        return 1.0
    med = float(np.median(d))
    return 1.0 / (2.0 * med * med)


class _SMOResult:
    __slots__ = ("x", "bias", "iterations", "objective_trace")

    def __init__(self, x, bias, iterations, objective_trace):
        self.x = x
        self.bias = bias
        self.iterations = iterations
        self.objective_trace = objective_trace


def _smo_solve(K, y, p, C, tol, max_iter, track_objective=False):
    """Solve min (1/2) x'Qx + p'x over {y'x = 0, 0 <= x <= C}.

    ``K`` is the PSD kernel block; Q is formed implicitly as (y y') * K.
    Returns the solution, the constraint multiplier (prediction bias), the
    iteration count, and optionally the per-iteration dual objective
    p'x-maximization trace (non-decreasing).
    """
    n = len(y)
    x = np.zeros(n)
    grad = p.astype(np.float64).copy()  # Q x + p with x = 0
    trace = [] if track_objective else None
    bias = 0.0
    for iteration in range(max_iter):
        v = -y * grad
        at_upper = x >= C
        at_lower = x <= 0.0
        up = np.where(y > 0, ~at_upper, ~at_lower)
        low = np.where(y > 0, ~at_lower, ~at_upper)
        if not up.any() or not low.any():
            if up.any():
                bias = float(np.max(np.where(up, v, -np.inf)))
            elif low.any():
                bias = float(np.min(np.where(low, v, np.inf)))
            break
        i = int(np.argmax(np.where(up, v, -np.inf)))
        j = int(np.argmin(np.where(low, v, np.inf)))
        m, M = v[i], v[j]
        bias = 0.5 * (m + M)
        if m - M <= tol:
            break
        # exact minimization along the feasible direction that raises
        # y[i] x[i] and lowers y[j] x[j] by the same amount
        step_cap_i = C - x[i] if y[i] > 0 else x[i]
        step_cap_j = x[j] if y[j] > 0 else C - x[j]
        step_max = min(step_cap_i, step_cap_j)
        # second derivative along the direction: the squared feature-space
        # distance between the two points, independent of the label signs
        curv = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if curv > 1e-12:
            step = min((m - M) / curv, step_max)
        else:
            step = step_max
        dx_i = y[i] * step
        dx_j = -y[j] * step
        x[i] += dx_i
        x[j] += dx_j
        if step == step_cap_i:
            x[i] = C if y[i] > 0 else 0.0
        if step == step_cap_j:
            x[j] = 0.0 if y[j] > 0 else C
        grad += (dx_i * y[i]) * (y * K[:, i]) + (dx_j * y[j]) * (y * K[:, j])
        if track_objective:
            quad = 0.5 * float(x @ (grad - p))
            trace.append(-(quad + float(p @ x)))
    else:
        raise NumericalError(
            f"SMO did not reach tolerance {tol} within {max_iter} iterations"
        )
    np.clip(x, 0.0, C, out=x)
    return _SMOResult(x, bias, iteration, trace)


@dataclass(frozen=True)
class _BinarySVM:
    """One trained one-vs-one problem: decision > 0 votes for ``pos``."""

    pos: object
    neg: object
    vectors: np.ndarray  # (n_sv, dim) support vectors, feature space of fit
    coef: np.ndarray  # (n_sv,) alpha * y, |coef| <= C
    bias: float

    def decision(self, kind: str, gamma: float | None, x: np.ndarray) -> np.ndarray:
        if self.coef.size == 0:
            return np.full(x.shape[0], self.bias)
        return _kernel(kind, gamma, x, self.vectors) @ self.coef + self.bias


@dataclass(frozen=True)
class SVMModel:
    """One-vs-one multiclass SVM.

    ``classes`` is sorted; ``pairs`` holds one binary machine per unordered
    class pair in lexicographic order. ``feature_mean``/``feature_scale``
    record the optional standardization applied before the kernel.
    """

    kernel: str
    gamma: float | None
    C: float
    classes: np.ndarray
    pairs: tuple[_BinarySVM, ...]
    feature_mean: np.ndarray | None = None
    feature_scale: np.ndarray | None = None


@dataclass(frozen=True)
class SVRModel:
    """Epsilon-insensitive support vector regression in coefficient form.

    Predictions are k(x, vectors) @ coef + bias, rescaled back from the
    standardized target space recorded in ``target_mean``/``target_scale``.
    """

    kernel: str
    gamma: float | None
    C: float
    epsilon: float
    vectors: np.ndarray
    coef: np.ndarray  # beta = alpha - alpha*, |beta| <= C
    bias: float
    target_mean: float = 0.0
    target_scale: float = 1.0
    feature_mean: np.ndarray | None = None
    feature_scale: np.ndarray | None = None

    def predict(self, x: np.ndarray) -> np.ndarray:
        x = _as_features(x)
        if self.feature_mean is not None:
            x = (x - self.feature_mean) / self.feature_scale
        if self.coef.size == 0:
            raw = np.full(x.shape[0], self.bias)
        else:
            raw = _kernel(self.kernel, self.gamma, x, self.vectors) @ self.coef + self.bias
        return raw * self.target_scale + self.target_mean


@dataclass(frozen=True)
class CVReport:
    """Repeated stratified k-fold cross-validation summary.

    ``confusion`` comes from the first repeat alone (rows = truth, columns =
    predicted, ordered like ``classes``); ``accuracy_mean`` averages the
    whole-corpus accuracy over repeats.
    """

    accuracy_mean: float
    per_repeat: np.ndarray
    confusion: np.ndarray
    classes: np.ndarray

    def __post_init__(self):
        k = len(self.classes)
        if self.confusion.shape != (k, k):
            raise DataError("confusion matrix shape must match the class count")


def _as_features(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise DataError(f"expected a non-empty (n, dim) feature matrix, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise DataError("feature matrix contains non-finite values")
    return x


def _check_kernel_params(kernel, C, tol):
    if kernel not in _KERNELS:
        raise ConfigError(f"kernel must be one of {_KERNELS}, got {kernel!r}")
    if C <= 0:
        raise ConfigError(f"cost C must be positive, got {C}")
    if tol <= 0:
        raise ConfigError(f"tolerance must be positive, got {tol}")


def _standardize_fit(x):
    mean = x.mean(axis=0)
    scale = x.std(axis=0)
    scale = np.where(scale == 0, 1.0, scale)
    return mean, scale


def svm_train(
    x,
    y,
    kernel: str = "rbf",
    C: float = 10.0,
    gamma: float | None = None,
    tol: float = 1e-3,
    standardize: bool = False,
    max_iter: int = 200_000,
) -> SVMModel:
    """Train a one-vs-one multiclass SVM by SMO.

    With ``kernel="rbf"`` and ``gamma=None`` the bandwidth comes from the
    median pairwise-distance heuristic on the (optionally standardized)
    training features. Features are used raw unless ``standardize`` is set.
    """
    x = _as_features(x)
    y = np.asarray(y)
    if y.shape != (x.shape[0],):
        raise DataError(f"labels must be one per row, got {y.shape} for {x.shape[0]} rows")
    _check_kernel_params(kernel, C, tol)
    classes = np.unique(y)
    if len(classes) < 2:
        raise DataError("training requires at least two distinct classes")
    mean = scale = None
    if standardize:
        mean, scale = _standardize_fit(x)
        x = (x - mean) / scale
    if kernel == "rbf" and gamma is None:
        gamma = median_heuristic_gamma(x)
    if kernel == "rbf" and gamma <= 0:
        raise ConfigError(f"rbf gamma must be positive, got {gamma}")
    if kernel == "linear":
        gamma = None
    full_K = _kernel(kernel, gamma, x, x)
    pairs = []
    for a_pos in range(len(classes)):
        for b_neg in range(a_pos + 1, len(classes)):
            idx = np.flatnonzero((y == classes[a_pos]) | (y == classes[b_neg]))
            signs = np.where(y[idx] == classes[a_pos], 1.0, -1.0)
            K = full_K[np.ix_(idx, idx)]
            res = _smo_solve(K, signs, -np.ones(len(idx)), C, tol, max_iter)
            keep = res.x > 1e-10 * C
            pairs.append(
                _BinarySVM(
                    pos=classes[a_pos],
                    neg=classes[b_neg],
                    vectors=x[idx[keep]],
                    coef=res.x[keep] * signs[keep],
                    bias=res.bias,
                )
            )
    return SVMModel(
        kernel=kernel,
        gamma=gamma,
        C=float(C),
        classes=classes,
        pairs=tuple(pairs),
        feature_mean=mean,
        feature_scale=scale,
    )


def svm_predict(model: SVMModel, x) -> np.ndarray:
    """Predict labels by majority vote over the one-vs-one machines.

    Vote ties are broken by the summed signed decision values, then by class
    order, so prediction is deterministic.
    """
    x = _as_features(x)
    if model.feature_mean is not None:
        x = (x - model.feature_mean) / model.feature_scale
    classes = model.classes
    index = {c: i for i, c in enumerate(classes)}
    votes = np.zeros((x.shape[0], len(classes)), dtype=np.int64)
    scores = np.zeros((x.shape[0], len(classes)))
    for pair in model.pairs:
        d = pair.decision(model.kernel, model.gamma, x)
        pos, neg = index[pair.pos], index[pair.neg]
        won = d > 0
        votes[won, pos] += 1
        votes[~won, neg] += 1
        scores[:, pos] += d
        scores[:, neg] -= d
    out = np.empty(x.shape[0], dtype=classes.dtype)
    for row in range(x.shape[0]):
        best = np.flatnonzero(votes[row] == votes[row].max())
        if len(best) > 1:
            best = best[scores[row, best] == scores[row, best].max()]
        out[row] = classes[best[0]]
    return out


def _stratified_folds(y, classes, folds, rng):
    fold_of = np.empty(len(y), dtype=np.int64)
    for c in classes:
        members = np.flatnonzero(y == c)
        members = members[rng.permutation(len(members))]
        fold_of[members] = np.arange(len(members)) % folds
    return fold_of


def svm_cross_validate(
    x,
    y,
    folds: int = 10,
    repeats: int = 20,
    seed: int | None = None,
    kernel: str = "rbf",
    C: float = 10.0,
    gamma: float | None = None,
    tol: float = 1e-3,
    standardize: bool = False,
) -> CVReport:
    """Repeated stratified k-fold cross-validation of the one-vs-one SVM.

    Each repeat reshuffles the folds with a stream derived from (seed,
    repeat), so identical (seed, data) gives an identical report. All
    data-dependent settings (standardization, the rbf bandwidth) are fit
    inside each training split.
    """
    x = _as_features(x)
    y = np.asarray(y)
    if y.shape != (x.shape[0],):
        raise DataError(f"labels must be one per row, got {y.shape} for {x.shape[0]} rows")
    n = x.shape[0]
    if seed is None:
        raise ConfigError("cross-validation shuffles folds; a seed is required")
    if not 2 <= folds <= n:
        raise ConfigError(f"folds must lie in [2, {n}], got {folds}")
    if repeats < 1:
        raise ConfigError(f"repeats must be positive, got {repeats}")
    classes = np.unique(y)
    if len(classes) < 2:
        raise DataError("cross-validation requires at least two classes")
    index = {c: i for i, c in enumerate(classes)}
    truth_idx = np.array([index[c] for c in y])
    accuracies = np.empty(repeats)
    confusion = None
    for repeat in range(repeats):
        rng = np.random.default_rng(np.random.SeedSequence((int(seed), repeat)))
        fold_of = _stratified_folds(y, classes, folds, rng)
        predicted = np.empty(n, dtype=classes.dtype)
        for fold in range(folds):
            held_out = fold_of == fold
            if not held_out.any():
                continue
            model = svm_train(
                x[~held_out],
                y[~held_out],
                kernel=kernel,
                C=C,
                gamma=gamma,
                tol=tol,
                standardize=standardize,
            )
            predicted[held_out] = svm_predict(model, x[held_out])
        accuracies[repeat] = float(np.mean(predicted == y))
        if repeat == 0:
            pred_idx = np.array([index[c] for c in predicted])
            confusion = np.zeros((len(classes), len(classes)), dtype=np.int64)
            np.add.at(confusion, (truth_idx, pred_idx), 1)
    return CVReport(
        accuracy_mean=float(accuracies.mean()),
        per_repeat=accuracies,
        confusion=confusion,
        classes=classes,
    )


def _svr_train_standardized(x, t, kernel, C, gamma, epsilon, tol, max_iter):
    """Fit SVR on already-standardized features/targets; returns (coef, bias)."""
    n = len(t)
    K = _kernel(kernel, gamma, x, x)
    stacked_K = np.tile(K, (2, 2))
    signs = np.concatenate([np.ones(n), -np.ones(n)])
    p = np.concatenate([epsilon - t, epsilon + t])
    res = _smo_solve(stacked_K, signs, p, C, tol, max_iter)
    beta = res.x[:n] - res.x[n:]
    return beta, res.bias


def svr_fit_predict(
    x,
    targets,
    folds: int = 10,
    repeats: int = 10,
    seed: int | None = None,
    kernel: str = "rbf",
    C: float = 10.0,
    gamma: float | None = None,
    epsilon: float = 0.1,
    tol: float = 1e-3,
    standardize: bool = False,
    max_iter: int = 200_000,
) -> np.ndarray:
    """Held-out SVR estimate for every sample, averaged over repeats.

    Each repeat partitions the samples into ``folds`` random parts; a sample's
    estimate comes from the model trained on the other parts, like
    leave-one-fold-out, and the repeats are averaged. Targets are standardized
    internally (``epsilon`` applies on that scale) and estimates are returned
    in the original units, unconstrained in sign. Constant targets short-
    circuit to the constant.
    """
    x = _as_features(x)
    targets = np.asarray(targets, dtype=np.float64)
    if targets.shape != (x.shape[0],):
        raise DataError(
            f"targets must be one per row, got {targets.shape} for {x.shape[0]} rows"
        )
    if not np.isfinite(targets).all():
        raise DataError("targets contain non-finite values")
    n = x.shape[0]
    if seed is None:
        raise ConfigError("fold assignment is random; a seed is required")
    if not 2 <= folds <= n:
        raise ConfigError(f"folds must lie in [2, {n}], got {folds}")
    if repeats < 1:
        raise ConfigError(f"repeats must be positive, got {repeats}")
    if epsilon < 0:
        raise ConfigError(f"epsilon must be non-negative, got {epsilon}")
    _check_kernel_params(kernel, C, tol)
    t_mean = float(targets.mean())
    t_scale = float(targets.std())
    if t_scale == 0.0:
        return np.full(n, t_mean)
    t_std = (targets - t_mean) / t_scale
    estimates = np.zeros(n)
    for repeat in range(repeats):
        rng = np.random.default_rng(np.random.SeedSequence((int(seed), repeat)))
        order = rng.permutation(n)
        for part in np.array_split(order, folds):
            train = np.setdiff1d(np.arange(n), part)
            x_train = x[train]
            mean = scale = None
            if standardize:
                mean, scale = _standardize_fit(x_train)
                x_train = (x_train - mean) / scale
            g = gamma
            if kernel == "rbf" and g is None:
                g = median_heuristic_gamma(x_train)
            coef, bias = _svr_train_standardized(
                x_train, t_std[train], kernel, C, g, epsilon, tol, max_iter
            )
            x_test = x[part]
            if mean is not None:
                x_test = (x_test - mean) / scale
            estimates[part] += _kernel(kernel, g, x_test, x_train) @ coef + bias
    estimates /= repeats
    return estimates * t_scale + t_mean
