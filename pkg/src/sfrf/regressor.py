"""Bagged CART regression trees for normalised RUL.

Trees split greedily on squared-error reduction. Ties go to the lowest
feature index, then the lowest threshold, so duplicated feature columns never
change a tree. Each tree in an ensemble draws from its own RNG stream spawned
from the ensemble seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .pipeline import IndicatorTrajectory, buffered_matrix, compute_trajectory


class RegressorError(ValueError):
    pass


@dataclass(frozen=True)
class RegressorConfig:
    n_learners: int = 30
    bootstrap_fraction: float = 1.0
    min_leaf_size: int = 5
    max_depth: Optional[int] = None
    replace: bool = True
    # keep every `stride`-th snapshot when training on a trajectory
    stride: int = 2

    def __post_init__(self):
        if self.n_learners < 1:
            raise RegressorError("n_learners must be >= 1")
        if not 0 < self.bootstrap_fraction <= (1e9 if self.replace else 1.0):
            raise RegressorError(f"bad bootstrap_fraction {self.bootstrap_fraction}")
        if self.min_leaf_size < 1:
            raise RegressorError("min_leaf_size must be >= 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise RegressorError("max_depth must be >= 0")
        if self.stride < 1:
            raise RegressorError("stride must be >= 1")


@dataclass
class RegressionTree:
    """Flat node arrays; ``feature == -1`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_features: int
    max_depth: Optional[int] = None
    min_leaf_size: int = 1

    @property
    def n_nodes(self) -> int:
        return int(self.feature.size)

    def predict(self, rows) -> np.ndarray:
        X = _as_matrix(rows, self.n_features)
        node = np.zeros(X.shape[0], dtype=np.intp)
        active = self.feature[node] >= 0
        while active.any():
            i = np.nonzero(active)[0]
            n = node[i]
            go_left = X[i, self.feature[n]] <= self.threshold[n]
            node[i] = np.where(go_left, self.left[n], self.right[n])
            active = self.feature[node] >= 0
        return self.value[node]

    def to_dict(self) -> dict:
        return {
            "n_features": self.n_features,
            "max_depth": self.max_depth,
            "min_leaf_size": self.min_leaf_size,
            "nodes": [
                {"feature": int(f), "threshold": float(t), "left": int(l), "right": int(r), "value": float(v)}
                for f, t, l, r, v in zip(self.feature, self.threshold, self.left, self.right, self.value)
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RegressionTree":
        nodes = d["nodes"]
        return cls(
            np.array([n["feature"] for n in nodes], dtype=np.intp),
            np.array([n["threshold"] for n in nodes], dtype=float),
            np.array([n["left"] for n in nodes], dtype=np.intp),
            np.array([n["right"] for n in nodes], dtype=np.intp),
            np.array([n["value"] for n in nodes], dtype=float),
            int(d["n_features"]),
            d.get("max_depth"),
            int(d.get("min_leaf_size", 1)),
        )


def _as_matrix(rows, n_features=None) -> np.ndarray:
    X = np.asarray(rows, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise RegressorError("rows must be a 2-D feature matrix")
    if n_features is not None and X.shape[1] != n_features:
        raise RegressorError(f"row dimension {X.shape[1]} does not match training dimension {n_features}")
    return X


def _best_split(X: np.ndarray, y: np.ndarray, min_leaf: int):
    """Return (feature, threshold, gain) of the best split, or None."""
    n, p = X.shape
    if n < 2 * min_leaf:
        return None
    order = np.argsort(X, axis=0, kind="stable")
    xs = np.take_along_axis(X, order, axis=0)
    ys = y[order]
    csum = np.cumsum(ys, axis=0)
    csum2 = np.cumsum(ys * ys, axis=0)
    total, total2 = csum[-1], csum2[-1]
    parent_sse = float(np.sum((y - y.mean()) ** 2))
    # candidate split after position i-1 (left size i)
    sizes = np.arange(min_leaf, n - min_leaf + 1)
    left_sum = csum[sizes - 1]
    left_sum2 = csum2[sizes - 1]
    nl = sizes[:, None].astype(float)
    nr = n - nl
    sse = (left_sum2 - left_sum * left_sum / nl) + ((total2 - left_sum2) - (total - left_sum) ** 2 / nr)
    sse = np.maximum(sse, 0.0)
    valid = xs[sizes - 1] < xs[sizes]
    if not valid.any():
        return None
    # sse is compared across features, all using the same prefix sums of y
    gain = np.where(valid, (total2 - total * total / n) - sse, -np.inf)
    best = gain.max()
    tol = 1e-12 * max(abs(parent_sse), 1e-300)
    if not best > tol:
        return None
    # lowest feature, then lowest threshold among (numerically) equal gains
    cand = np.argwhere(gain >= best - tol)
    feats = cand[:, 1]
    f = int(feats.min())
    i = int(cand[feats == f, 0].min())
    s = sizes[i]
    thr = 0.5 * (xs[s - 1, f] + xs[s, f])
    if not thr < xs[s, f]:  # midpoint rounded onto the upper value
        thr = xs[s - 1, f]
    return f, float(thr), float(best)


def fit_tree(rows, targets, max_depth: Optional[int] = None, min_leaf_size: int = 1, rng=None) -> RegressionTree:
    """Grow a regression tree. ``rng`` is accepted for API symmetry; splits are deterministic."""
    X = _as_matrix(rows)
    y = np.asarray(targets, dtype=float)
    if X.shape[0] == 0:
        raise RegressorError("cannot fit a tree on zero rows")
    if y.shape != (X.shape[0],):
        raise RegressorError("targets must have one value per row")
    if not np.all(np.isfinite(y)):
        raise RegressorError("targets must be finite")

    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(v):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(v)
        return len(feature) - 1

    root = new_node(float(y.mean()))
    stack = [(root, np.arange(X.shape[0]), 0)]
    while stack:
        node, idx, depth = stack.pop()
        yi = y[idx]
        if max_depth is not None and depth >= max_depth:
            continue
        if yi.min() == yi.max():
            continue
        split = _best_split(X[idx], yi, min_leaf_size)
        if split is None:
            continue
        f, thr, _ = split
        mask = X[idx, f] <= thr
        li, ri = idx[mask], idx[~mask]
        feature[node], threshold[node] = f, thr
        left[node] = new_node(float(y[li].mean()))
        right[node] = new_node(float(y[ri].mean()))
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))

    return RegressionTree(
        np.array(feature, dtype=np.intp),
        np.array(threshold, dtype=float),
        np.array(left, dtype=np.intp),
        np.array(right, dtype=np.intp),
        np.array(value, dtype=float),
        X.shape[1],
        max_depth,
        min_leaf_size,
    )


@dataclass
class BaggingEnsemble:
    trees: list
    config: RegressorConfig
    rng_seed: Optional[int] = None
    n_features: int = 0

    @property
    def n_learners(self) -> int:
        return len(self.trees)

    @property
    def bootstrap_fraction(self) -> float:
        return self.config.bootstrap_fraction

    def predict(self, rows) -> np.ndarray:
        X = _as_matrix(rows, self.n_features)
        return np.mean([t.predict(X) for t in self.trees], axis=0)

    def to_json(self) -> str:
        cfg = self.config
        return json.dumps(
            {
                "model": "bagging_regression_trees",
                "rng_seed": self.rng_seed,
                "n_features": self.n_features,
                "config": {
                    "n_learners": cfg.n_learners,
                    "bootstrap_fraction": cfg.bootstrap_fraction,
                    "min_leaf_size": cfg.min_leaf_size,
                    "max_depth": cfg.max_depth,
                    "replace": cfg.replace,
                    "stride": cfg.stride,
                },
                "trees": [t.to_dict() for t in self.trees],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "BaggingEnsemble":
        d = json.loads(text)
        return cls(
            [RegressionTree.from_dict(t) for t in d["trees"]],
            RegressorConfig(**d["config"]),
            d.get("rng_seed"),
            int(d["n_features"]),
        )


def fit_bagging(rows, targets, config: RegressorConfig = RegressorConfig(), seed: int = 0) -> BaggingEnsemble:
    X = _as_matrix(rows)
    y = np.asarray(targets, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise RegressorError(f"bagging needs at least 2 rows, got {n}")
    size = max(1, int(round(config.bootstrap_fraction * n)))
    trees = []
    for child in np.random.SeedSequence(seed).spawn(config.n_learners):
        rng = np.random.default_rng(child)
        if config.replace:
            idx = rng.integers(0, n, size=size)
        else:
            idx = np.sort(rng.choice(n, size=size, replace=False))
        trees.append(fit_tree(X[idx], y[idx], config.max_depth, config.min_leaf_size, rng))
    return BaggingEnsemble(trees, config, seed, X.shape[1])


def predict(ensemble: BaggingEnsemble, row):
    """Predicted normalised RUL; a scalar for one row, an array for a matrix."""
    out = ensemble.predict(row)
    return float(out[0]) if np.asarray(row).ndim == 1 else out


def resubstitution_loss(ensemble: BaggingEnsemble, rows, targets) -> float:
    y = np.asarray(targets, dtype=float)
    pred = ensemble.predict(rows)
    if pred.shape != y.shape:
        raise RegressorError("targets must have one value per row")
    return float(np.mean((pred - y) ** 2))


def training_rows(trajectory: IndicatorTrajectory, order: int = 0, stride: int = 1, columns=None):
    """Buffered feature rows and RUL targets, sub-sampled by ``stride``."""
    m = trajectory.matrix if columns is None else trajectory.matrix[:, list(columns)]
    X = buffered_matrix(m, order)
    return X[::stride], trajectory.rul_labels[::stride]


@dataclass
class OrderSweep:
    orders: list
    seeds: list
    losses: dict = field(default_factory=dict)  # order -> array over repeats

    def summary(self) -> dict:
        """Box-plot numbers (min, q1, median, q3, max) per order."""
        return {o: tuple(float(v) for v in np.quantile(self.losses[o], [0, 0.25, 0.5, 0.75, 1])) for o in self.orders}

    def median(self, order) -> float:
        return float(np.median(self.losses[order]))

    def rows(self):
        for o in self.orders:
            for s, loss in zip(self.seeds, self.losses[o]):
                yield o, s, float(loss)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("order,seed,loss\n")
            fh.writelines(f"{o},{s},{loss!r}\n" for o, s, loss in self.rows())


def order_sweep_trajectory(
    trajectory: IndicatorTrajectory,
    orders: Sequence[int],
    repeats: int,
    seed: int,
    config: RegressorConfig = RegressorConfig(),
) -> OrderSweep:
    """Resubstitution loss for each buffer order over ``repeats`` seeds (seed, seed+1, ...)."""
    orders = [int(o) for o in orders]
    k = len(trajectory)
    if not orders:
        raise RegressorError("no orders given")
    if max(orders) >= k or min(orders) < 0:
        raise RegressorError(f"orders must lie in [0, {k - 1}] for a {k}-snapshot trajectory")
    if repeats < 1:
        raise RegressorError("repeats must be >= 1")
    seeds = [int(seed) + r for r in range(repeats)]
    sweep = OrderSweep(orders, seeds)
    for o in orders:
        X, y = training_rows(trajectory, o, config.stride)
        sweep.losses[o] = np.array([resubstitution_loss(fit_bagging(X, y, config, s), X, y) for s in seeds])
    return sweep


def order_sweep(record, params, orders, repeats, seed, config: RegressorConfig = RegressorConfig(), **trajectory_kw):
    return order_sweep_trajectory(compute_trajectory(record, params, **trajectory_kw), orders, repeats, seed, config)
