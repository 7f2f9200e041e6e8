"""Base classifiers: linear/RBF soft-margin SVM and logistic regression.

SVM training runs sequential minimal optimization on a precomputed Gram
matrix (compiled kernel when available, see _core). Logistic regression
uses Newton / iteratively reweighted least squares with step halving.
Hyperparameters come from seeded stratified 7-fold cross-validation.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from ._core import solve_smo
from .errors import (DegenerateData, DimMismatch, NoConvergence,
                     SeparableWarning, TooFewPositives)

SVM_TOL = 1e-3
SVM_MAX_PASSES = 100000
SV_THRESHOLD = 1e-8   # alpha above this -> support vector
LR_TOL = 1e-6         # penalized-gradient norm at convergence
LR_MAX_ITER = 200
LR_DEFAULT_L2 = 1e-3


@dataclass
class LabeledSet:
    """Utterance vectors with +-1 labels."""

    vectors: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=float)
        self.labels = np.asarray(self.labels, dtype=float)
        if self.vectors.ndim != 2:
            raise DimMismatch("vectors must be a 2-D array")
        if self.vectors.shape[0] != self.labels.shape[0]:
            raise DimMismatch(
                f"{self.vectors.shape[0]} vectors vs {self.labels.shape[0]} labels")
        if not np.all(np.isin(self.labels, (-1.0, 1.0))):
            raise ValueError("labels must be +1 or -1")

    def __len__(self):
        return self.vectors.shape[0]


def _require_two_classes(data):
    if len(data) < 2 or len(np.unique(data.labels)) < 2:
        raise DegenerateData("training needs both classes present")


@dataclass(frozen=True)
class Kernel:
    """Linear dot product or Gaussian RBF of width sigma."""

    kind: str
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in ("linear", "rbf"):
            raise ValueError(f"kernel kind must be linear|rbf, got {self.kind!r}")
        if self.kind == "rbf" and not self.sigma > 0:
            raise ValueError(f"rbf sigma must be > 0, got {self.sigma}")

    @classmethod
    def linear(cls) -> "Kernel":
        return cls(kind="linear")

    @classmethod
    def rbf(cls, sigma: float) -> "Kernel":
        return cls(kind="rbf", sigma=sigma)


def kernel_eval(k: Kernel, x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DimMismatch(f"{x.shape} vs {y.shape}")
    if k.kind == "linear":
        return float(np.dot(x, y))
    d = x - y
    return float(np.exp(-np.dot(d, d) / (2.0 * k.sigma ** 2)))


def kernel_matrix(k: Kernel, X, Y=None) -> np.ndarray:
    """Gram matrix K[i, j] = k(X[i], Y[j]); Y defaults to X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = X if Y is None else np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape[1] != Y.shape[1]:
        raise DimMismatch(f"dim {X.shape[1]} vs {Y.shape[1]}")
    if k.kind == "linear":
        return X @ Y.T
    sq = (np.sum(X * X, axis=1)[:, None] + np.sum(Y * Y, axis=1)[None, :]
          - 2.0 * (X @ Y.T))
    return np.exp(-np.maximum(sq, 0.0) / (2.0 * k.sigma ** 2))


# --- SVM ----------------------------------------------------------------

@dataclass
class SvmModel:
    support_vectors: np.ndarray
    duals: np.ndarray          # alpha_i * y_i per support vector
    bias: float
    kernel: Kernel
    C: float


def svm_train(data: LabeledSet, kernel: Kernel, C: float,
              tol: float = SVM_TOL, max_passes: int = SVM_MAX_PASSES,
              class_weight=None) -> SvmModel:
    """Solve the soft-margin dual by SMO and package the support vectors.

    class_weight="balanced" scales each sample's slack bound inversely to
    its class frequency; default is the plain unweighted problem.
    """
    _require_two_classes(data)
    if not C > 0:
        raise ValueError(f"C must be > 0, got {C}")
    y = data.labels
    n = len(data)
    c = np.full(n, float(C))
    if class_weight == "balanced":
        for cls in (-1.0, 1.0):
            mask = y == cls
            c[mask] *= n / (2.0 * np.count_nonzero(mask))
    elif class_weight is not None:
        raise ValueError(f"unknown class_weight {class_weight!r}")

    K = kernel_matrix(kernel, data.vectors)
    alpha, b, _passes, violation = solve_smo(K, y, c, tol, max_passes)
    if violation > tol:
        raise NoConvergence(
            f"SMO stopped with KKT violation {violation:.3g} > {tol}")

    sv = alpha > SV_THRESHOLD
    interior = sv & (alpha < c - SV_THRESHOLD)
    if np.any(interior):
        # bias from margin support vectors: y_i - sum_j alpha_j y_j K_ij
        g = K[interior] @ (alpha * y)
        b = float(np.mean(y[interior] - g))
    return SvmModel(support_vectors=data.vectors[sv].copy(),
                    duals=(alpha * y)[sv], bias=b, kernel=kernel, C=float(C))


def svm_decide(model: SvmModel, x) -> float:
    """Signed score sum_sv dual_i k(sv_i, x) + b; sign is the decision."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    scores = (kernel_matrix(model.kernel, np.atleast_2d(x),
                            model.support_vectors) @ model.duals
              + model.bias)
    return float(scores[0]) if single else scores


# --- logistic regression ------------------------------------------------

@dataclass
class LrModel:
    beta: np.ndarray           # intercept first
    l2: float
    history: list = field(default_factory=list, repr=False)


def _sigmoid(z):
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def lr_penalized_ll(beta, X1, y01, l2):
    """Bernoulli log-likelihood minus the ridge penalty (intercept free)."""
    z = X1 @ beta
    return float(np.sum(y01 * z - np.logaddexp(0.0, z))
                 - 0.5 * l2 * np.sum(beta[1:] ** 2))


def lr_gradient(beta, X1, y01, l2):
    pen = l2 * beta
    pen[0] = 0.0
    return X1.T @ (y01 - _sigmoid(X1 @ beta)) - pen


def lr_train(data: LabeledSet, l2: float = LR_DEFAULT_L2,
             tol: float = LR_TOL, max_iter: int = LR_MAX_ITER) -> LrModel:
    """Penalized maximum likelihood by Newton steps with halving.

    Step halving keeps the penalized log-likelihood non-decreasing.
    With l2=0 and separable data the coefficients diverge; that case
    emits SeparableWarning and returns the current iterate.
    """
    _require_two_classes(data)
    if l2 < 0:
        raise ValueError(f"l2 must be >= 0, got {l2}")
    X1 = np.column_stack([np.ones(len(data)), data.vectors])
    y01 = (data.labels > 0).astype(float)
    p = X1.shape[1]
    beta = np.zeros(p)
    ll = lr_penalized_ll(beta, X1, y01, l2)
    history = [ll]

    for _ in range(max_iter):
        grad = lr_gradient(beta, X1, y01, l2)
        if np.linalg.norm(grad) <= tol:
            return LrModel(beta=beta, l2=float(l2), history=history)
        mu = _sigmoid(X1 @ beta)
        w = np.maximum(mu * (1.0 - mu), 1e-12)
        hess = (X1 * w[:, None]).T @ X1 + l2 * np.eye(p)
        hess[0, 0] -= l2  # intercept unpenalized
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hess, grad, rcond=None)[0]
        scale = 1.0
        improved = False
        for _half in range(40):
            cand = beta + scale * step
            cand_ll = lr_penalized_ll(cand, X1, y01, l2)
            if cand_ll >= ll:
                improved = True
                break
            scale *= 0.5
        if not improved:
            break  # no ascent left at float precision
        beta = cand
        ll = cand_ll
        history.append(ll)
        if l2 == 0.0 and np.max(np.abs(beta)) > 1e3:
            warnings.warn("coefficients diverging on separable data with "
                          "l2=0; returning current iterate",
                          SeparableWarning)
            return LrModel(beta=beta, l2=0.0, history=history)

    grad = lr_gradient(beta, X1, y01, l2)
    if np.linalg.norm(grad) <= tol:
        return LrModel(beta=beta, l2=float(l2), history=history)
    raise NoConvergence(
        f"logistic regression: gradient norm {np.linalg.norm(grad):.3g} "
        f"> {tol} after {max_iter} iterations")


def lr_predict(model: LrModel, x) -> float:
    """P(class +1 | x); hard decision at 0.5."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.shape[1] != model.beta.shape[0] - 1:
        raise DimMismatch(f"dim {X.shape[1]} vs model {model.beta.shape[0] - 1}")
    probs = _sigmoid(model.beta[0] + X @ model.beta[1:])
    return float(probs[0]) if single else probs


# --- cross-validation ---------------------------------------------------

@dataclass(frozen=True)
class CvGrid:
    c_values: tuple = (1 / 32, 1 / 16, 1 / 8, 1 / 4, 1 / 2, 1, 2, 4, 8)
    sigma_values: tuple = (1 / 8, 1 / 4, 1 / 2, 1, 2, 4, 8, 16, 32)
    folds: int = 7


@dataclass
class CvResult:
    member: str                # svm-linear | svm-rbf | lr
    best_c: float
    best_sigma: float          # 0.0 when not applicable
    mean_auc: float
    fold_scores: dict          # grid point -> per-fold validation AUCs
    oof_scores: np.ndarray     # winner's out-of-fold scores, data order
    oof_mean: float
    oof_std: float
    model: object              # retrained on the full training set
    seed: int


def stratified_folds(labels, folds, seed):
    """Seeded per-class round-robin fold assignment."""
    labels = np.asarray(labels)
    pos = np.flatnonzero(labels > 0)
    neg = np.flatnonzero(labels < 0)
    if len(pos) < folds or len(neg) < folds:
        raise TooFewPositives(
            f"need >= {folds} samples of each class to stratify, "
            f"have {len(pos)} positive / {len(neg)} negative")
    rng = np.random.default_rng(seed)
    assign = np.empty(len(labels), dtype=int)
    for idx in (pos, neg):
        order = rng.permutation(idx)
        assign[order] = np.arange(len(order)) % folds
    return assign


def _fit_member(member, train, c_value, sigma):
    if member == "svm-linear":
        return svm_train(train, Kernel.linear(), c_value)
    if member == "svm-rbf":
        return svm_train(train, Kernel.rbf(sigma), c_value)
    if member == "lr":
        return lr_train(train)
    raise ValueError(f"unknown member kind {member!r}")


def score_member(model, vectors):
    """Raw member score: signed margin for SVMs, probability for LR."""
    if isinstance(model, SvmModel):
        return svm_decide(model, vectors)
    return lr_predict(model, vectors)


def cv_select(data: LabeledSet, member: str, grid: CvGrid = CvGrid(),
              metric: str = "auc", seed: int = 0) -> CvResult:
    """Pick hyperparameters by stratified k-fold validation AUC.

    member: "svm-linear" sweeps C, "svm-rbf" sweeps C x sigma, "lr" has a
    single grid point (it still runs the folds so its out-of-fold scores
    are available for score normalization). Ties go to the smaller C,
    then the smaller sigma. The winner is retrained on all of the data.
    """
    if metric != "auc":
        raise ValueError(f"unsupported metric {metric!r}")
    from .evaluate import roc_auc  # late import: evaluate builds on classify

    assign = stratified_folds(data.labels, grid.folds, seed)
    if member == "svm-linear":
        points = [(c, 0.0) for c in grid.c_values]
    elif member == "svm-rbf":
        points = [(c, s) for c in grid.c_values for s in grid.sigma_values]
    elif member == "lr":
        points = [(0.0, 0.0)]
    else:
        raise ValueError(f"unknown member kind {member!r}")

    folds = []
    for f in range(grid.folds):
        val = assign == f
        folds.append((LabeledSet(data.vectors[~val], data.labels[~val]), val))

    best = None
    fold_scores = {}
    for c_value, sigma in points:
        aucs = []
        oof = np.zeros(len(data))
        for train, val in folds:
            fold_model = _fit_member(member, train, c_value, sigma)
            scores = score_member(fold_model, data.vectors[val])
            oof[val] = scores
            aucs.append(roc_auc(scores, data.labels[val]).auc)
        fold_scores[(c_value, sigma)] = aucs
        mean_auc = float(np.mean(aucs))
        if best is None or mean_auc > best[0]:
            best = (mean_auc, c_value, sigma, oof)

    mean_auc, c_value, sigma, oof = best
    model = _fit_member(member, data, c_value, sigma)
    return CvResult(member=member, best_c=float(c_value),
                    best_sigma=float(sigma), mean_auc=mean_auc,
                    fold_scores=fold_scores, oof_scores=oof,
                    oof_mean=float(np.mean(oof)),
                    oof_std=float(max(np.std(oof), 1e-12)),
                    model=model, seed=seed)


# --- serialization ------------------------------------------------------

def model_to_dict(model) -> dict:
    if isinstance(model, SvmModel):
        return {"type": "svm", "version": 1,
                "kernel": {"kind": model.kernel.kind,
                           "sigma": model.kernel.sigma},
                "C": model.C, "bias": model.bias,
                "support_vectors": model.support_vectors.tolist(),
                "duals": model.duals.tolist()}
    if isinstance(model, LrModel):
        return {"type": "lr", "version": 1, "l2": model.l2,
                "beta": model.beta.tolist()}
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_dict(doc: dict):
    if doc.get("version") != 1:
        raise ValueError(f"unsupported model version {doc.get('version')!r}")
    if doc["type"] == "svm":
        k = doc["kernel"]
        return SvmModel(support_vectors=np.asarray(doc["support_vectors"]),
                        duals=np.asarray(doc["duals"]), bias=doc["bias"],
                        kernel=Kernel(kind=k["kind"], sigma=k["sigma"]),
                        C=doc["C"])
    if doc["type"] == "lr":
        return LrModel(beta=np.asarray(doc["beta"]), l2=doc["l2"])
    raise ValueError(f"unknown model type {doc['type']!r}")
