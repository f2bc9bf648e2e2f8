"""Worst-case collusion attack.

The attack channel is the stationary theta minimizing the mutual
information between the pirated symbol Y and a single colluder's symbol X,
averaged over the arcsine bias density.  Conditioned on bias p, X is
Bernoulli(p) and the other c-1 colluders contribute a Binomial(c-1, p)
tally, so P(Y=1 | X=x, p) = sum_k B(k; c-1, p) * theta_{k+x}.

The bias average uses Gauss-Chebyshev quadrature of the first kind: after
p = (1+u)/2 the arcsine density is exactly the Chebyshev weight, giving
cos^2-spaced nodes with uniform weights.
"""

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import rel_entr
from scipy.stats import binom

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Quadrature:
    """Nodes in (0,1) with positive weights summing to 1."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("Quadrature: nodes and weights must be matching 1-D arrays")
        if np.min(nodes) <= 0.0 or np.max(nodes) >= 1.0:
            raise ValueError("Quadrature: nodes must be strictly interior")
        if np.min(weights) <= 0.0 or abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("Quadrature: weights must be positive and sum to 1")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def gauss_chebyshev(cls, n=128):
        """First-kind Gauss-Chebyshev rule mapped to the arcsine density on (0,1)."""
        if n < 1:
            raise ValueError("Quadrature: need at least one node")
        i = np.arange(1, n + 1, dtype=np.float64)
        nodes = np.cos((2.0 * i - 1.0) * np.pi / (4.0 * n)) ** 2
        weights = np.full(n, 1.0 / n)
        return cls(nodes, weights)


def conditional_y_given_x(theta, p, x):
    """P(Y=1 | X=x, p, theta) for one colluder holding symbol x under bias p."""
    theta = np.asarray(theta, dtype=np.float64)
    c = theta.size - 1
    if not 0.0 < p < 1.0:
        raise ValueError("conditional_y_given_x: p must be strictly inside (0, 1)")
    if x not in (0, 1):
        raise ValueError("conditional_y_given_x: x must be a bit")
    w = binom.pmf(np.arange(c), c - 1, p)
    return float(w @ theta[x:x + c])


def _pmf_table(c, nodes):
    """Binomial(c-1, p) pmf rows, one column per quadrature node."""
    return binom.pmf(np.arange(c)[:, None], c - 1, nodes[None, :])


def _mi_from_table(theta, w, p, weights):
    """Bias-averaged I(X;Y) given a precomputed pmf table for the quadrature.

    Y-complement probabilities are accumulated from (1-theta) directly; the
    naive 1 - P(Y=1) cancels catastrophically at nodes close to the ends of
    (0,1), where the marginal rounds to 1.0 and the relative entropy blows
    up to inf.
    """
    c = theta.size - 1
    comp = 1.0 - theta
    a0, a1 = theta[0:c] @ w, theta[1:c + 1] @ w
    b0, b1 = comp[0:c] @ w, comp[1:c + 1] @ w
    joint = np.stack([(1 - p) * b0, (1 - p) * a0, p * b1, p * a1])
    py1 = p * a1 + (1 - p) * a0
    py0 = p * b1 + (1 - p) * b0
    indep = np.stack([(1 - p) * py0, (1 - p) * py1, p * py0, p * py1])
    mi_nodes = rel_entr(joint, indep).sum(axis=0)
    return float(weights @ mi_nodes)


def mutual_information(theta, quad):
    """Bias-averaged I(X; Y) in nats for the stationary channel theta.

    theta is any probability vector of length c+1; marking is not enforced
    here so degenerate fixtures can be evaluated.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if theta.size < 2:
        raise ValueError("mutual_information: theta must have length >= 2")
    if np.min(theta) < 0.0 or np.max(theta) > 1.0:
        raise ValueError("mutual_information: theta entries must lie in [0, 1]")
    w = _pmf_table(theta.size - 1, quad.nodes)
    return _mi_from_table(theta, w, quad.nodes, quad.weights)


def _golden_min(f, lo, hi, xtol):
    """Golden-section minimum of a unimodal f on [lo, hi]; deterministic."""
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > xtol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class WcaResult:
    theta: np.ndarray
    c: int
    mi: float
    converged: bool
    sweeps: int

    @property
    def channel(self):
        from .collusion import CollusionChannel

        return CollusionChannel(c=self.c, theta=self.theta)


def optimize_wca(c, quad=None, tol=1e-8, max_sweeps=200):
    """Minimize the bias-averaged mutual information over marking-compliant theta.

    Projected coordinate descent over the c-1 interior coordinates with
    golden-section line searches, started from theta_k = k/c.  The objective
    is invariant under (k -> c-k, theta -> 1-theta); the final iterate is
    reflected-averaged onto that symmetry axis whenever doing so does not
    increase the objective, which pins the k <-> c-k symmetry exactly.

    Returns a WcaResult; non-convergence within max_sweeps yields the best
    iterate with converged=False and a warning.
    """
    if c < 2:
        raise ValueError("optimize_wca: c must be >= 2 (c=1 has no free parameters)")
    if tol <= 0.0:
        raise ValueError("optimize_wca: tol must be positive")
    if quad is None:
        quad = Quadrature.gauss_chebyshev(128)

    theta = np.arange(c + 1, dtype=np.float64) / c
    xtol = min(1e-10, tol)
    w = _pmf_table(c, quad.nodes)

    def objective(th):
        return _mi_from_table(th, w, quad.nodes, quad.weights)

    best = objective(theta)
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        for k in range(1, c):
            def line(v, k=k):
                th = theta.copy()
                th[k] = v
                return objective(th)

            theta[k] = _golden_min(line, 0.0, 1.0, xtol)
        now = objective(theta)
        if best - now <= tol:
            converged = True
            best = now
            break
        best = now

    mirrored = 1.0 - theta[::-1]
    symmetric = 0.5 * (theta + mirrored)
    symmetric[0], symmetric[c] = 0.0, 1.0
    mi_symmetric = objective(symmetric)
    if mi_symmetric <= best + tol:
        theta, best = symmetric, mi_symmetric

    if not converged:
        warnings.warn(f"optimize_wca: no convergence after {max_sweeps} sweeps (c={c})")
    return WcaResult(theta=theta, c=int(c), mi=float(best), converged=converged, sweeps=sweeps)


def cache_key(c, nodes, tol):
    return f"wca_c{c}_q{nodes}_tol{tol:g}.json"


def save_result(path, result, nodes, tol):
    doc = {
        "c": result.c,
        "nodes": int(nodes),
        "tol": float(tol),
        "theta": result.theta.tolist(),
        "mi": result.mi,
        "converged": result.converged,
        "sweeps": result.sweeps,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_result(path):
    with open(path) as fh:
        doc = json.load(fh)
    return WcaResult(
        theta=np.asarray(doc["theta"], dtype=np.float64),
        c=doc["c"],
        mi=doc["mi"],
        converged=doc["converged"],
        sweeps=doc["sweeps"],
    )


def load_or_optimize(c, nodes=128, tol=1e-8, cache_dir=None):
    """Fetch theta* from the on-disk cache keyed by (c, nodes, tol), optimizing on a miss.

    Returns (result, cache_hit).
    """
    path = None
    if cache_dir is not None:
        path = Path(cache_dir) / cache_key(c, nodes, tol)
        if path.exists():
            return load_result(path), True
    result = optimize_wca(c, Quadrature.gauss_chebyshev(nodes), tol)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        save_result(path, result, nodes, tol)
    return result, False
