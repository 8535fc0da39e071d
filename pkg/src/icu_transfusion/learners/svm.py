"""Soft-margin SVM trained by sequential minimal optimization, with Platt
probability calibration on the training decision values.

The solver runs in rounds. Each round recomputes all errors, collects the
KKT violators (non-bound first), and walks them with pairwise take-step
updates; it stops when a fresh scan finds no violation beyond `tol` or the
round budget `max_passes` runs out, in which case the best iterate by dual
objective is returned with `converged=False`.

Three execution modes share the same updates:
  * small problems keep the full kernel matrix and an incremental error
    cache (classic second-choice heuristic),
  * large linear problems maintain the primal weight vector so errors
    cost O(d),
  * large non-linear problems compute kernel rows against the current
    support vectors on demand.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import FitError, ValidationError
from .base import check_fit_inputs, check_predict_input

log = logging.getLogger(__name__)

KERNELS = ("linear", "poly", "sigmoid", "rbf")
CACHE_LIMIT = 2048
_STEP_EPS = 1e-9


def kernel_matrix(A: np.ndarray, B: np.ndarray, kind: str, gamma: float,
                  degree: int = 3, coef0: float = 0.0) -> np.ndarray:
    if kind == "linear":
        return A @ B.T
    if kind == "poly":
        return (gamma * (A @ B.T) + coef0) ** degree
    if kind == "sigmoid":
        return np.tanh(gamma * (A @ B.T) + coef0)
    if kind == "rbf":
        sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * (A @ B.T)
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-gamma * sq)
    raise ValidationError(f"unknown kernel {kind!r}")


@dataclass
class SVMModel:
    support_vectors: np.ndarray
    dual_coef: np.ndarray  # alpha_i * y_i for the support vectors
    intercept: float
    kernel: str
    gamma: float
    degree: int
    coef0: float
    C: float
    platt_a: float
    platt_b: float
    converged: bool
    n_features_in: int
    seed: int
    # full training-time dual variables, kept for KKT audits; not serialized
    train_alphas: np.ndarray | None = field(default=None, repr=False)
    family: str = "SVM"

    def _primal_w(self) -> np.ndarray:
        # linear kernel collapses the support expansion into one weight vector
        w = getattr(self, "_w_cache", None)
        if w is None:
            w = self.support_vectors.T @ self.dual_coef
            object.__setattr__(self, "_w_cache", w)
        return w

    def decision_function(self, X) -> np.ndarray:
        X = check_predict_input(self, X)
        if self.kernel == "linear":
            return X @ self._primal_w() + self.intercept
        k = kernel_matrix(X, self.support_vectors, self.kernel, self.gamma,
                          self.degree, self.coef0)
        return k @ self.dual_coef + self.intercept

    def predict_proba(self, X) -> np.ndarray:
        f = self.decision_function(X)
        z = self.platt_a * f + self.platt_b
        out = np.empty_like(z)
        pos = z >= 0
        out[pos] = np.exp(-z[pos]) / (1.0 + np.exp(-z[pos]))
        out[~pos] = 1.0 / (1.0 + np.exp(z[~pos]))
        return out

    def to_dict(self) -> dict:
        return {
            "family": "SVM",
            "support_vectors": self.support_vectors.tolist(),
            "dual_coef": self.dual_coef.tolist(),
            "intercept": self.intercept,
            "kernel": self.kernel,
            "gamma": self.gamma,
            "degree": self.degree,
            "coef0": self.coef0,
            "C": self.C,
            "platt_a": self.platt_a,
            "platt_b": self.platt_b,
            "converged": self.converged,
            "n_features_in": self.n_features_in,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SVMModel":
        return cls(
            support_vectors=np.asarray(d["support_vectors"], dtype=np.float64),
            dual_coef=np.asarray(d["dual_coef"], dtype=np.float64),
            intercept=float(d["intercept"]),
            kernel=str(d["kernel"]),
            gamma=float(d["gamma"]),
            degree=int(d["degree"]),
            coef0=float(d["coef0"]),
            C=float(d["C"]),
            platt_a=float(d["platt_a"]),
            platt_b=float(d["platt_b"]),
            converged=bool(d["converged"]),
            n_features_in=int(d["n_features_in"]),
            seed=int(d["seed"]),
        )


class _SMOState:
    def __init__(self, X, y_signed, C, kernel, gamma, degree, coef0, rng):
        self.X = X
        self.y = y_signed
        self.C = C
        self.kernel = kernel
        self.gamma = gamma
        self.degree = degree
        self.coef0 = coef0
        self.rng = rng
        self.n = X.shape[0]
        self.alpha = np.zeros(self.n)
        self.b = 0.0
        self.mode = "cached" if self.n <= CACHE_LIMIT else (
            "linear" if kernel == "linear" else "ondemand")
        if self.mode == "cached":
            self.K = kernel_matrix(X, X, kernel, gamma, degree, coef0)
            self.E = -self.y.astype(np.float64)  # f=0 at alpha=0, b=0
        elif self.mode == "linear":
            self.w = np.zeros(X.shape[1])

    # -- error / kernel access -------------------------------------------
    def k_entry(self, i: int, j: int) -> float:
        if self.mode == "cached":
            return float(self.K[i, j])
        if self.kernel == "linear":
            return float(self.X[i] @ self.X[j])
        return float(kernel_matrix(self.X[i:i + 1], self.X[j:j + 1], self.kernel,
                                   self.gamma, self.degree, self.coef0)[0, 0])

    def error(self, i: int) -> float:
        if self.mode == "cached":
            return float(self.E[i])
        return self.f_single(i) - self.y[i]

    def f_single(self, i: int) -> float:
        if self.mode == "linear":
            return float(self.X[i] @ self.w) + self.b
        sv = np.nonzero(self.alpha > 0)[0]
        if sv.size == 0:
            return self.b
        k = kernel_matrix(self.X[i:i + 1], self.X[sv], self.kernel, self.gamma,
                          self.degree, self.coef0)[0]
        return float(k @ (self.alpha[sv] * self.y[sv])) + self.b

    def f_all(self) -> np.ndarray:
        if self.mode == "cached":
            return self.E + self.y
        if self.mode == "linear":
            return self.X @ self.w + self.b
        sv = np.nonzero(self.alpha > 0)[0]
        if sv.size == 0:
            return np.full(self.n, self.b)
        coef = self.alpha[sv] * self.y[sv]
        out = np.empty(self.n)
        chunk = max(1, int(2_000_000 / max(sv.size, 1)))
        for start in range(0, self.n, chunk):
            stop = min(start + chunk, self.n)
            k = kernel_matrix(self.X[start:stop], self.X[sv], self.kernel,
                              self.gamma, self.degree, self.coef0)
            out[start:stop] = k @ coef
        return out + self.b

    def dual_objective(self, f_vals: np.ndarray) -> float:
        # W(alpha) = sum(alpha) - 0.5 * (alpha*y) . (f - b)
        return float(self.alpha.sum() - 0.5 * np.dot(self.alpha * self.y, f_vals - self.b))

    # -- pairwise update --------------------------------------------------
    def take_step(self, i1: int, i2: int, e2: float) -> bool:
        if i1 == i2:
            return False
        a1, a2 = self.alpha[i1], self.alpha[i2]
        y1, y2 = self.y[i1], self.y[i2]
        e1 = self.error(i1)
        s = y1 * y2
        if s < 0:
            L, H = max(0.0, a2 - a1), min(self.C, self.C + a2 - a1)
        else:
            L, H = max(0.0, a1 + a2 - self.C), min(self.C, a1 + a2)
        if L >= H:
            return False
        k11 = self.k_entry(i1, i1)
        k22 = self.k_entry(i2, i2)
        k12 = self.k_entry(i1, i2)
        eta = k11 + k22 - 2.0 * k12
        if eta > 0:
            a2_new = a2 + y2 * (e1 - e2) / eta
            a2_new = min(max(a2_new, L), H)
        else:
            # flat or concave direction: dual is maximized at a box end
            gain_l = self._line_gain(i1, i2, e1, e2, L - a2, k11, k22, k12)
            gain_h = self._line_gain(i1, i2, e1, e2, H - a2, k11, k22, k12)
            if gain_l > gain_h + _STEP_EPS:
                a2_new = L
            elif gain_h > gain_l + _STEP_EPS:
                a2_new = H
            else:
                return False
        if abs(a2_new - a2) < _STEP_EPS * (a2_new + a2 + _STEP_EPS):
            return False
        a1_new = a1 + s * (a2 - a2_new)
        # numeric guard: keep inside the box
        a1_new = min(max(a1_new, 0.0), self.C)

        b_old = self.b
        b1 = b_old - e1 - y1 * (a1_new - a1) * k11 - y2 * (a2_new - a2) * k12
        b2 = b_old - e2 - y1 * (a1_new - a1) * k12 - y2 * (a2_new - a2) * k22
        if 0.0 < a1_new < self.C:
            b_new = b1
        elif 0.0 < a2_new < self.C:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)

        d1 = y1 * (a1_new - a1)
        d2 = y2 * (a2_new - a2)
        self.alpha[i1] = a1_new
        self.alpha[i2] = a2_new
        if self.mode == "cached":
            self.E += d1 * self.K[i1] + d2 * self.K[i2] + (b_new - b_old)
        elif self.mode == "linear":
            self.w += d1 * self.X[i1] + d2 * self.X[i2]
        self.b = b_new
        return True

    def _line_gain(self, i1, i2, e1, e2, d2_step, k11, k22, k12) -> float:
        """Dual objective change when alpha2 moves by d2_step along the constraint."""
        y1, y2 = self.y[i1], self.y[i2]
        s = y1 * y2
        d1_step = -s * d2_step
        f1 = e1 + y1
        f2 = e2 + y2
        return (
            d1_step + d2_step
            - d1_step * y1 * (f1 - self.b)
            - d2_step * y2 * (f2 - self.b)
            - 0.5 * d1_step * d1_step * k11
            - 0.5 * d2_step * d2_step * k22
            - s * d1_step * d2_step * k12
        )

    # -- second-index selection -------------------------------------------
    def examine(self, i2: int, tol: float) -> bool:
        e2 = self.error(i2)
        r2 = e2 * self.y[i2]
        if not ((r2 < -tol and self.alpha[i2] < self.C) or (r2 > tol and self.alpha[i2] > 0)):
            return False
        non_bound = np.nonzero((self.alpha > 0) & (self.alpha < self.C))[0]
        if self.mode == "cached" and non_bound.size > 1:
            diffs = np.abs(self.E[non_bound] - e2)
            i1 = int(non_bound[int(np.argmax(diffs))])
            if self.take_step(i1, i2, e2):
                return True
        if non_bound.size:
            start = int(self.rng.integers(non_bound.size))
            for k in range(non_bound.size):
                i1 = int(non_bound[(start + k) % non_bound.size])
                if self.take_step(i1, i2, e2):
                    return True
        start = int(self.rng.integers(self.n))
        limit = self.n if self.mode == "cached" else min(self.n, 64)
        for k in range(limit):
            i1 = (start + k) % self.n
            if self.take_step(i1, i2, e2):
                return True
        return False

    def violators(self, f_vals: np.ndarray, tol: float) -> np.ndarray:
        e = f_vals - self.y
        r = e * self.y
        mask = ((r < -tol) & (self.alpha < self.C)) | ((r > tol) & (self.alpha > 0))
        idx = np.nonzero(mask)[0]
        if idx.size == 0:
            return idx
        non_bound = (self.alpha[idx] > 0) & (self.alpha[idx] < self.C)
        return np.r_[idx[non_bound], idx[~non_bound]]


def _fit_platt(decision: np.ndarray, y01: np.ndarray, max_iter: int = 100) -> tuple[float, float]:
    """Newton fit of P(y=1|f) = 1/(1+exp(a*f+b)) with prior-smoothed targets."""
    n1 = int(np.sum(y01 == 1))
    n0 = y01.size - n1
    hi = (n1 + 1.0) / (n1 + 2.0)
    lo = 1.0 / (n0 + 2.0)
    t = np.where(y01 == 1, hi, lo)
    a = 0.0
    b = float(np.log((n0 + 1.0) / (n1 + 1.0)))
    f = decision

    def objective(a_, b_):
        z = a_ * f + b_
        # sum over rows of t*z + log(1+exp(-z)) stabilized
        return float(np.sum(np.where(z >= 0, t * z + np.log1p(np.exp(-z)),
                                     (t - 1.0) * z + np.log1p(np.exp(z)))))

    obj = objective(a, b)
    for _ in range(max_iter):
        z = a * f + b
        p = np.empty_like(z)
        pos = z >= 0
        p[pos] = np.exp(-z[pos]) / (1.0 + np.exp(-z[pos]))
        p[~pos] = 1.0 / (1.0 + np.exp(z[~pos]))
        d1 = t - p  # dF/dz
        g_a = float(np.sum(d1 * f))
        g_b = float(np.sum(d1))
        if max(abs(g_a), abs(g_b)) < 1e-10:
            break
        w = p * (1.0 - p)
        h_aa = float(np.sum(w * f * f)) + 1e-12
        h_ab = float(np.sum(w * f))
        h_bb = float(np.sum(w)) + 1e-12
        det = h_aa * h_bb - h_ab * h_ab
        if det <= 0:
            break
        da = -(h_bb * g_a - h_ab * g_b) / det
        db = -(-h_ab * g_a + h_aa * g_b) / det
        step = 1.0
        while step > 1e-10:
            new_obj = objective(a + step * da, b + step * db)
            if new_obj < obj + 1e-12:
                a += step * da
                b += step * db
                obj = new_obj
                break
            step *= 0.5
        else:
            break
    return a, b


def fit_svm(X, y, hp: dict | None = None) -> SVMModel:
    hp = dict(hp or {})
    kernel = str(hp.get("kernel", "rbf"))
    if kernel not in KERNELS:
        raise ValidationError(f"kernel must be one of {KERNELS}, got {kernel!r}")
    C = float(hp.get("C", 1.0))
    if C <= 0:
        raise ValidationError("C must be positive")
    tol = float(hp.get("tol", 1e-3))
    max_passes = int(hp.get("max_passes", 200))
    seed = int(hp.get("seed", 0))
    X, y01 = check_fit_inputs(X, y)
    if y01.min() == y01.max():
        raise FitError("SVM needs both classes in y")
    n, d = X.shape
    gamma = float(hp.get("gamma", 1.0 / d))
    degree = int(hp.get("degree", 3))
    coef0 = float(hp.get("coef0", 0.0))
    y_signed = np.where(y01 == 1, 1.0, -1.0)
    rng = np.random.default_rng(seed)

    state = _SMOState(X, y_signed, C, kernel, gamma, degree, coef0, rng)
    converged = False
    best = None
    best_obj = -np.inf
    for _ in range(max_passes):
        f_vals = state.f_all()
        todo = state.violators(f_vals, tol)
        if todo.size == 0:
            converged = True
            break
        obj = state.dual_objective(f_vals)
        if obj > best_obj:
            best_obj = obj
            best = (state.alpha.copy(), state.b)
        n_changed = 0
        for i in todo:
            n_changed += state.examine(int(i), tol)
        if n_changed == 0:
            log.warning("SMO stalled with %d residual KKT violations", todo.size)
            break
    if not converged:
        f_vals = state.f_all()
        if state.violators(f_vals, tol).size == 0:
            converged = True
        else:
            obj = state.dual_objective(f_vals)
            if obj > best_obj:
                best_obj = obj
            else:
                state.alpha, state.b = best[0], best[1]
                if state.mode == "linear":
                    state.w = state.X.T @ (state.alpha * state.y)
            log.warning("SVM did not reach KKT tolerance within %d rounds", max_passes)

    decision = state.f_all()
    platt_a, platt_b = _fit_platt(decision, y01)
    sv = np.nonzero(state.alpha > 0)[0]
    if sv.size == 0:
        # degenerate but possible under tiny max_passes; keep a usable model
        sv = np.array([0])
    return SVMModel(
        support_vectors=X[sv].copy(),
        dual_coef=(state.alpha * y_signed)[sv],
        intercept=state.b,
        kernel=kernel,
        gamma=gamma,
        degree=degree,
        coef0=coef0,
        C=C,
        platt_a=platt_a,
        platt_b=platt_b,
        converged=converged,
        n_features_in=d,
        seed=seed,
        train_alphas=state.alpha,
    )
