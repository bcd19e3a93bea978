"""Soft-margin kernel SVM trained by sequential minimal optimization.

Binary models are solved two Lagrange multipliers at a time with
first/second-choice working-pair heuristics; multiclass problems train one
binary model per unordered class pair and combine them by voting. Models
serialize to a line-oriented text format that round-trips decision values
exactly (17 significant digits).

Conventions used throughout: labels are +1/-1 on the binary level, a
decision value of exactly 0 counts as +1, and within a class pair (a, b)
the +1 side is a. Ties in the multiclass vote fall back to the largest
summed |decision value| among the tied classes, then to canonical class
order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from itertools import combinations
from pathlib import Path

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ConvergenceError, ParseError, ValidationError
from .features import FeatureRegistry, Scaler
from .imu import canonical_class_order

KERNEL_KINDS = ("linear", "polynomial", "radial", "sigmoid")

# solver tolerances: KKT slack, and the floor below which a multiplier
# change does not count as progress
KKT_TOL = 1e-3
ALPHA_FLOOR = 1e-8


@dataclass(frozen=True)
class KernelConfig:
    """Kernel family and its shape parameters.

    ``gamma=None`` is the exploratory default and resolves to
    1/n_features when training starts.
    """
    kind: str = "radial"
    gamma: float | None = None
    coef0: float = 0.0
    degree: int = 3

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValidationError(f"unknown kernel kind {self.kind!r}")
        if (self.kind != "linear" and self.gamma is not None
                and not self.gamma > 0):
            raise ValidationError("gamma must be positive")
        if self.degree < 1 or int(self.degree) != self.degree:
            raise ValidationError("degree must be a positive integer")
        object.__setattr__(self, "degree", int(self.degree))

    def resolved(self, n_features: int) -> "KernelConfig":
        if self.gamma is not None or self.kind == "linear":
            return self
        return replace(self, gamma=1.0 / n_features)


# tuned hyperparameter presets: (kernel, cost)
PRESETS = {
    "identification": (KernelConfig(kind="polynomial", gamma=0.95,
                                    coef0=2.0, degree=3), 3.0),
    "recognition": (KernelConfig(kind="radial", gamma=0.005), 1.0),
}


def gram(cfg: KernelConfig, A, B) -> np.ndarray:
    """Kernel matrix between the rows of A and the rows of B."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    if A.shape[1] != B.shape[1]:
        raise ValidationError("dimension mismatch between kernel arguments")
    if cfg.kind == "linear":
        return A @ B.T
    if cfg.gamma is None:
        raise ValidationError("gamma is unresolved; call cfg.resolved(d) first")
    if cfg.kind == "polynomial":
        return (cfg.gamma * (A @ B.T) + cfg.coef0) ** cfg.degree
    if cfg.kind == "sigmoid":
        return np.tanh(cfg.gamma * (A @ B.T) + cfg.coef0)
    if A.shape[0] == 0 or B.shape[0] == 0:
        return np.zeros((A.shape[0], B.shape[0]))
    return np.exp(-cfg.gamma * cdist(A, B, "sqeuclidean"))


def kernel_eval(cfg: KernelConfig, u, v) -> float:
    """Kernel value for a single vector pair."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.ndim != 1 or v.ndim != 1 or len(u) != len(v):
        raise ValidationError("kernel_eval expects two equal-length vectors")
    return float(gram(cfg, u[None, :], v[None, :])[0, 0])


def dual_objective(K: np.ndarray, y: np.ndarray, alpha: np.ndarray) -> float:
    """Dual objective W(alpha) = sum(alpha) - 1/2 (alpha y)' K (alpha y)."""
    v = alpha * y
    return float(alpha.sum() - 0.5 * (v @ K @ v))


def kkt_max_violation(K, y, alpha, bias, cost) -> float:
    """Largest KKT violation, with the same semantics the solver uses.

    A point can be pushed up while alpha < C and its margin residual
    r = y f - 1 is negative, or pushed down while alpha > 0 and r is
    positive; the violation is the residual magnitude on whichever side
    applies. A converged model keeps the maximum at or below KKT_TOL.
    """
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    r = y * (K @ (alpha * y) + bias) - 1.0
    viol = np.zeros(len(y))
    below_cap = alpha < cost
    above_zero = alpha > 0.0
    viol[below_cap] = np.maximum(viol[below_cap], -r[below_cap])
    viol[above_zero] = np.maximum(viol[above_zero], r[above_zero])
    return float(viol.max(initial=0.0))


def smo_solve(K, y, cost, rng, tol=KKT_TOL, floor=ALPHA_FLOOR,
              max_sweeps=None):
    """Solve the dual QP on a precomputed Gram matrix.

    Returns ``(alpha, bias)``. The error cache holds f(x_i) - y_i for
    every training point and is updated in O(n) per accepted step. The rng
    only breaks ties in the fallback scans for a second working variable,
    so results are deterministic for a fixed seed. ``max_sweeps`` (default
    10n) budgets full passes over the data; if no full pass comes back
    clean within it, a ConvergenceError is raised instead of returning a
    half-optimized model.
    """
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    if K.shape != (n, n):
        raise ValidationError("Gram matrix shape does not match labels")
    if cost <= 0:
        raise ValidationError("cost must be positive")
    if max_sweeps is None:
        max_sweeps = 10 * n

    alpha = np.zeros(n)
    bias = 0.0
    err = -y.copy()

    def take_step(i1, i2):
        nonlocal bias, err
        if i1 == i2:
            return False
        a1o, a2o = alpha[i1], alpha[i2]
        y1, y2 = y[i1], y[i2]
        e1, e2 = err[i1], err[i2]
        s = y1 * y2
        if s < 0:
            lo = max(0.0, a2o - a1o)
            hi = min(cost, cost + a2o - a1o)
        else:
            lo = max(0.0, a1o + a2o - cost)
            hi = min(cost, a1o + a2o)
        if lo >= hi:
            return False
        k11, k12, k22 = K[i1, i1], K[i1, i2], K[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0.0:
            a2n = a2o + y2 * (e1 - e2) / eta
            a2n = min(max(a2n, lo), hi)
        else:
            # degenerate curvature: evaluate the restricted objective at
            # both box ends and move to the lower one (minimization form)
            f1 = y1 * (e1 + bias) - a1o * k11 - s * a2o * k12
            f2 = y2 * (e2 + bias) - s * a1o * k12 - a2o * k22
            l1 = a1o + s * (a2o - lo)
            h1 = a1o + s * (a2o - hi)
            lobj = (l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11
                    + 0.5 * lo * lo * k22 + s * lo * l1 * k12)
            hobj = (h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11
                    + 0.5 * hi * hi * k22 + s * hi * h1 * k12)
            if lobj < hobj - floor:
                a2n = lo
            elif lobj > hobj + floor:
                a2n = hi
            else:
                return False
        if abs(a2n - a2o) < floor * (a2n + a2o + floor):
            return False
        a1n = a1o + s * (a2o - a2n)
        # snap to the box so bound multipliers are exact
        if a1n < floor:
            a1n = 0.0
        elif a1n > cost - floor:
            a1n = cost
        if a2n < floor:
            a2n = 0.0
        elif a2n > cost - floor:
            a2n = cost
        d1 = (a1n - a1o) * y1
        d2 = (a2n - a2o) * y2
        b1 = bias - e1 - d1 * k11 - d2 * k12
        b2 = bias - e2 - d1 * k12 - d2 * k22
        if 0.0 < a1n < cost:
            bn = b1
        elif 0.0 < a2n < cost:
            bn = b2
        else:
            bn = 0.5 * (b1 + b2)
        err += d1 * K[i1] + d2 * K[i2] + (bn - bias)
        alpha[i1] = a1n
        alpha[i2] = a2n
        bias = bn
        return True

    def examine(i2):
        a2 = alpha[i2]
        r2 = err[i2] * y[i2]
        if not ((r2 < -tol and a2 < cost) or (r2 > tol and a2 > 0.0)):
            return False
        unbound = np.flatnonzero((alpha > 0.0) & (alpha < cost))
        if len(unbound) > 1:
            # second-choice heuristic: largest |E1 - E2|, lowest index on ties
            i1 = int(unbound[np.argmax(np.abs(err[unbound] - err[i2]))])
            if take_step(i1, i2):
                return True
        if len(unbound):
            start = int(rng.integers(len(unbound)))
            for k in range(len(unbound)):
                if take_step(int(unbound[(start + k) % len(unbound)]), i2):
                    return True
        start = int(rng.integers(n))
        for k in range(n):
            if take_step((start + k) % n, i2):
                return True
        return False

    # the budget counts full passes; the cheap unbound-only refinement
    # passes between them are bounded separately so the loop still
    # terminates on cycling inputs
    sweeps = 0
    refines = 0
    changed = 0
    examine_all = True
    while changed > 0 or examine_all:
        changed = 0
        if examine_all:
            sweeps += 1
            if sweeps > max_sweeps:
                raise ConvergenceError(
                    f"SMO did not converge within {max_sweeps} sweeps "
                    f"(n={n}, cost={cost})")
            refines = 0
            for i2 in range(n):
                changed += examine(i2)
        else:
            refines += 1
            for i2 in np.flatnonzero((alpha > 0.0) & (alpha < cost)):
                changed += examine(int(i2))
        if examine_all:
            examine_all = False
        elif changed == 0 or refines >= n:
            examine_all = True
    # settle the bias from the final multipliers: unbound points pin it
    # exactly, otherwise the feasible interval's midpoint is taken. This
    # drops the drift the incremental updates accumulate.
    target = y - K @ (alpha * y)
    unbound = (alpha > 0.0) & (alpha < cost)
    if unbound.any():
        bias = float(target[unbound].mean())
    else:
        ends = []
        lo_mask = ((alpha == 0.0) & (y > 0.0)) | ((alpha == cost) & (y < 0.0))
        hi_mask = ((alpha == 0.0) & (y < 0.0)) | ((alpha == cost) & (y > 0.0))
        if lo_mask.any():
            ends.append(float(target[lo_mask].max()))
        if hi_mask.any():
            ends.append(float(target[hi_mask].min()))
        if ends:
            bias = sum(ends) / len(ends)
    return alpha, bias


@dataclass(frozen=True)
class BinarySvmModel:
    """Trained two-class model: support vectors, dual weights, bias."""
    cfg: KernelConfig
    cost: float
    sv: np.ndarray
    alpha_y: np.ndarray
    bias: float

    def __post_init__(self):
        sv = np.atleast_2d(np.asarray(self.sv, dtype=np.float64))
        ay = np.asarray(self.alpha_y, dtype=np.float64).ravel()
        if sv.shape[0] != len(ay):
            raise ValidationError("one dual weight per support vector required")
        object.__setattr__(self, "sv", sv)
        object.__setattr__(self, "alpha_y", ay)
        sv.setflags(write=False)
        ay.setflags(write=False)


def decision_value(model: BinarySvmModel, x):
    """f(x) = sum_i alpha_i y_i K(s_i, x) + b; sign is the prediction.

    Accepts a single vector (returns a float) or a matrix of rows
    (returns a vector). A value of exactly 0 predicts +1.
    """
    X = np.asarray(x, dtype=np.float64)
    single = X.ndim == 1
    X2 = np.atleast_2d(X)
    if X2.shape[1] != model.sv.shape[1]:
        raise ValidationError("dimension mismatch with support vectors")
    if model.sv.shape[0] == 0:
        f = np.full(X2.shape[0], model.bias)
    else:
        f = gram(model.cfg, X2, model.sv) @ model.alpha_y + model.bias
    return float(f[0]) if single else f


def smo_train(X, y, cfg: KernelConfig, cost: float, seed=0,
              tol=KKT_TOL, floor=ALPHA_FLOOR,
              max_sweeps=None) -> BinarySvmModel:
    """Train one binary model on feature rows with +1/-1 labels."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).ravel()
    if len(y) != X.shape[0]:
        raise ValidationError("one label per row required")
    if not np.all(np.isfinite(X)):
        raise ValidationError("non-finite features")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValidationError("labels must be +1 or -1")
    if len(np.unique(y)) < 2:
        raise ValidationError("single-class input: need both +1 and -1 labels")
    cfg = cfg.resolved(X.shape[1])
    K = gram(cfg, X, X)
    rng = np.random.default_rng(seed)
    alpha, bias = smo_solve(K, y, cost, rng, tol=tol, floor=floor,
                            max_sweeps=max_sweeps)
    mask = alpha > 0.0
    return BinarySvmModel(cfg=cfg, cost=cost, sv=X[mask].copy(),
                          alpha_y=(alpha * y)[mask], bias=bias)


@dataclass(frozen=True)
class OvoSvmModel:
    """One-against-one ensemble with its scaler and feature registry.

    ``models`` is keyed by (a, b) class pairs in canonical order; the
    member for (a, b) treats a as the +1 side.
    """
    classes: tuple[str, ...]
    models: dict[tuple[str, str], BinarySvmModel]
    scaler: Scaler
    registry: FeatureRegistry

    def __post_init__(self):
        k = len(self.classes)
        if len(self.models) != k * (k - 1) // 2:
            raise ValidationError("pair-model count must be K(K-1)/2")
        d = len(self.registry)
        for (a, b), m in self.models.items():
            if a not in self.classes or b not in self.classes:
                raise ValidationError(f"pair ({a}, {b}) names an unknown class")
            if m.sv.shape[1] != d:
                raise ValidationError("pair model dimension differs from registry")
        if len(self.scaler.mean) != d:
            raise ValidationError("scaler dimension differs from registry")

    @property
    def pairs(self) -> list[tuple[str, str]]:
        return list(self.models)

    def decision_matrix(self, X, prescaled=False) -> np.ndarray:
        """(n, n_pairs) decision values in pair order."""
        Xs = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if not prescaled:
            Xs = self.scaler.transform(Xs)
        return np.column_stack([decision_value(m, Xs)
                                for m in self.models.values()])

    def predict(self, X, prescaled=False) -> list[str]:
        D = self.decision_matrix(X, prescaled=prescaled)
        votes, margins = vote_tally(self.classes, self.pairs, D)
        out = []
        for i in range(D.shape[0]):
            cand = np.flatnonzero(votes[i] == votes[i].max())
            if len(cand) > 1:
                m = margins[i, cand]
                cand = cand[m == m.max()]
            out.append(self.classes[cand[0]])
        return out


def vote_tally(classes, pairs, D):
    """Vote counts and per-class |decision| sums for a decision matrix.

    For pair column (a, b), a non-negative value is a vote for a. The
    margin sum for a class accumulates only over pairs that class won.
    """
    index = {c: i for i, c in enumerate(classes)}
    n = D.shape[0]
    votes = np.zeros((n, len(classes)), dtype=np.int64)
    margins = np.zeros((n, len(classes)))
    for p, (a, b) in enumerate(pairs):
        d = D[:, p]
        won_a = d >= 0.0
        ia, ib = index[a], index[b]
        votes[won_a, ia] += 1
        votes[~won_a, ib] += 1
        margins[won_a, ia] += np.abs(d[won_a])
        margins[~won_a, ib] += np.abs(d[~won_a])
    return votes, margins


def ovo_train(dataset, cfg: KernelConfig, cost: float, seed=0,
              scaler: Scaler | None = None,
              prescaled: bool = False) -> OvoSvmModel:
    """Train the full pairwise ensemble on a labeled dataset.

    By default a scaler is fit on the given rows (training rows only by
    construction) and applied before solving. Passing ``prescaled=True``
    with an explicit scaler trains on ``dataset.X`` as-is while embedding
    that scaler for prediction time; this is how noise-augmented
    (already standardized) matrices are trained.
    """
    classes = dataset.classes
    if len(classes) < 2:
        raise ValidationError("need at least 2 classes")
    if prescaled and scaler is None:
        raise ValidationError("prescaled training requires an explicit scaler")
    X = dataset.X
    if scaler is None:
        scaler = Scaler.fit(X)
    Xs = X if prescaled else scaler.transform(X)
    cfg = cfg.resolved(Xs.shape[1])
    labels = np.asarray(dataset.labels)
    pairs = list(combinations(classes, 2))
    children = np.random.SeedSequence(seed).spawn(len(pairs))
    models = {}
    for (a, b), child in zip(pairs, children):
        mask = (labels == a) | (labels == b)
        if not np.any(labels == a) or not np.any(labels == b):
            raise ValidationError(f"class pair ({a}, {b}) has an empty side")
        yy = np.where(labels[mask] == a, 1.0, -1.0)
        models[(a, b)] = smo_train(Xs[mask], yy, cfg, cost, seed=child)
    return OvoSvmModel(classes=tuple(classes), models=models, scaler=scaler,
                       registry=FeatureRegistry(tuple(dataset.feature_names)))


def ovo_predict(model: OvoSvmModel, x):
    """Predicted class and the vote histogram for one feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValidationError("ovo_predict expects a single feature vector")
    D = model.decision_matrix(x[None, :])
    votes, margins = vote_tally(model.classes, model.pairs, D)
    cand = np.flatnonzero(votes[0] == votes[0].max())
    if len(cand) > 1:
        m = margins[0, cand]
        cand = cand[m == m.max()]
    histogram = {c: int(votes[0, i]) for i, c in enumerate(model.classes)}
    return model.classes[cand[0]], histogram


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _check_token(kind: str, token: str) -> str:
    if not token or any(ch.isspace() for ch in token):
        raise ValidationError(f"{kind} {token!r} must be non-empty and "
                              "contain no whitespace")
    return token


def save_model(model: OvoSvmModel, path) -> None:
    """Write the ensemble to the versioned text format."""
    costs = {m.cost for m in model.models.values()}
    if len(costs) != 1:
        raise ValidationError("pair models disagree on cost")
    cfg = next(iter(model.models.values())).cfg
    lines = ["GKMODEL v1",
             "[kernel]",
             f"kind {cfg.kind}",
             f"gamma {_fmt(cfg.gamma if cfg.gamma is not None else 0.0)}",
             f"coef0 {_fmt(cfg.coef0)}",
             f"degree {cfg.degree}",
             f"cost {_fmt(costs.pop())}",
             "[scaler]",
             "mean " + " ".join(_fmt(v) for v in model.scaler.mean),
             "std " + " ".join(_fmt(v) for v in model.scaler.std),
             "[registry]"]
    lines.extend(_check_token("feature name", nm) for nm in model.registry.names)
    for (a, b), m in model.models.items():
        _check_token("class name", a)
        _check_token("class name", b)
        lines.append(f"[pair {a} {b}]")
        lines.append("alpha_y " + " ".join(_fmt(v) for v in m.alpha_y))
        for row in m.sv:
            lines.append("sv " + " ".join(_fmt(v) for v in row))
        lines.append("bias " + _fmt(m.bias))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8",
                          newline="\n")


def _floats(path, section, line, prefix, expect=None):
    if line is None or not line.startswith(prefix + " ") and line != prefix:
        raise ParseError(f"{path}: truncated {section} section")
    vals = line[len(prefix):].split()
    try:
        out = np.array([float(v) for v in vals])
    except ValueError:
        raise ParseError(f"{path}: bad number in {section} section") from None
    if expect is not None and len(out) != expect:
        raise ParseError(f"{path}: wrong value count in {section} section")
    return out


def load_model(path) -> OvoSvmModel:
    """Parse a GKMODEL v1 file back into an ensemble."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError(f"{path}: empty model file")
    head = re.fullmatch(r"GKMODEL v(\d+)", lines[0].strip())
    if head is None:
        raise ParseError(f"{path}: not a GKMODEL file")
    if head.group(1) != "1":
        raise ParseError(f"{path}: unsupported model version v{head.group(1)}")

    pos = 1

    def take(section):
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(f"{path}: truncated {section} section")
        line = lines[pos]
        pos += 1
        return line

    if take("[kernel]") != "[kernel]":
        raise ParseError(f"{path}: expected [kernel] section")
    fields = {}
    for _ in range(5):
        parts = take("[kernel]").split(None, 1)
        if len(parts) != 2:
            raise ParseError(f"{path}: truncated [kernel] section")
        fields[parts[0]] = parts[1]
    try:
        cfg = KernelConfig(kind=fields["kind"], gamma=float(fields["gamma"]),
                           coef0=float(fields["coef0"]),
                           degree=int(fields["degree"]))
        cost = float(fields["cost"])
    except (KeyError, ValueError, ValidationError) as e:
        raise ParseError(f"{path}: bad [kernel] section: {e}") from None

    if take("[scaler]") != "[scaler]":
        raise ParseError(f"{path}: expected [scaler] section")
    mean = _floats(path, "[scaler]", take("[scaler]"), "mean")
    std = _floats(path, "[scaler]", take("[scaler]"), "std", expect=len(mean))
    scaler = Scaler(mean=mean, std=std)

    if take("[registry]") != "[registry]":
        raise ParseError(f"{path}: expected [registry] section")
    names = []
    while pos < len(lines) and not lines[pos].startswith("["):
        names.append(lines[pos].strip())
        pos += 1
    if len(names) != len(mean):
        raise ParseError(f"{path}: registry size differs from scaler width")

    models = {}
    while pos < len(lines):
        m = re.fullmatch(r"\[pair (\S+) (\S+)\]", lines[pos])
        if m is None:
            raise ParseError(f"{path}: expected a [pair] section at line "
                             f"{pos + 1}")
        pos += 1
        a, b = m.group(1), m.group(2)
        section = f"[pair {a} {b}]"
        alpha_y = _floats(path, section, take(section), "alpha_y")
        sv = np.zeros((len(alpha_y), len(names)))
        for i in range(len(alpha_y)):
            sv[i] = _floats(path, section, take(section), "sv",
                            expect=len(names))
        bias = _floats(path, section, take(section), "bias", expect=1)[0]
        if (a, b) in models:
            raise ParseError(f"{path}: duplicate {section}")
        models[(a, b)] = BinarySvmModel(cfg=cfg, cost=cost, sv=sv,
                                        alpha_y=alpha_y, bias=float(bias))
    if not models:
        raise ParseError(f"{path}: model file has no [pair] sections")
    classes = canonical_class_order({c for pair in models for c in pair})
    ordered = {pair: models[pair] for pair in combinations(classes, 2)
               if pair in models}
    try:
        return OvoSvmModel(classes=tuple(classes), models=ordered,
                           scaler=scaler,
                           registry=FeatureRegistry(tuple(names)))
    except ValidationError as e:
        raise ParseError(f"{path}: inconsistent model: {e}") from None
