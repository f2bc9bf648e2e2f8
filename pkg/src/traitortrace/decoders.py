"""Accusation decoders.

Three per-user scores against a pirated sequence y:

* symmetric Tardos: channel-agnostic weighted agreement sum;
* informed: log-likelihood ratio with the true channel and coalition size,
  the optimal discriminative score when both are known;
* blind MAP: log-likelihood ratio marginalizing the unknown coalition size
  (uniform on {c_min..c_max}) and the unknown channel (uniform prior on the
  interior fusion parameters, which collapses every undecided position to
  probability 1/2).

All ratio scores run in the log domain; per-symbol probabilities of exactly
zero (deterministic channels, underflowed biases) are clamped to LOG_CLAMP
so scores stay finite for any input length in practical range.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

#: Stand-in for log(0) per symbol; just above the smallest double exponent,
#: so sums over 10^6 positions stay comfortably finite.
LOG_CLAMP = -745.0

TARDOS_CONVENTIONS = ("zero-mean", "y-weighted")


def _check_bit(name, v):
    if v not in (0, 1):
        raise ValueError(f"{name} must be 0 or 1")


def _check_prob_open(p):
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly inside (0, 1)")


def tardos_weight(y, x, p, convention="zero-mean"):
    """Per-position symmetric Tardos weight U(y, x, p).

    Agreeing symbols always contribute +sqrt((1-p)/p) (for 1s) or
    +sqrt(p/(1-p)) (for 0s).  The two conventions differ in how
    disagreements are negated:

    * "zero-mean" (default): U(1,0) = -U(0,0), U(0,1) = -U(1,1), giving an
      innocent user zero mean and unit variance per position;
    * "y-weighted": U(1,0) = -U(1,1), U(0,1) = -U(0,0), i.e. the magnitude
      depends only on y.  Kept as a comparison switch; it loses the
      zero-mean property.
    """
    _check_bit("y", y)
    _check_bit("x", x)
    _check_prob_open(p)
    if convention not in TARDOS_CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    w_one = math.sqrt((1.0 - p) / p)
    w_zero = math.sqrt(p / (1.0 - p))
    if y == x:
        return w_one if x == 1 else w_zero
    if convention == "zero-mean":
        return -w_zero if y == 1 else -w_one
    return -w_one if y == 1 else -w_zero


def tardos_score(y, x, p, convention="zero-mean"):
    """Sum of per-position Tardos weights for one user."""
    y, x, p = (np.asarray(a) for a in (y, x, p))
    a, b = _tardos_position_weights(y, p, convention)
    return float(np.where(x == 1, a, b).sum())


def _tardos_position_weights(y, p, convention):
    """Per-position contributions (a for x=1, b for x=0)."""
    if convention not in TARDOS_CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    if np.min(p) <= 0.0 or np.max(p) >= 1.0:
        raise ValueError("p must lie strictly inside (0, 1)")
    w_one = np.sqrt((1.0 - p) / p)
    w_zero = np.sqrt(p / (1.0 - p))
    if convention == "zero-mean":
        a = np.where(y == 1, w_one, -w_one)
        b = np.where(y == 1, -w_zero, w_zero)
    else:
        a = np.where(y == 1, w_one, -w_zero)
        b = np.where(y == 1, -w_one, w_zero)
    return a, b


def tardos_scores_all(y, code, p, convention="zero-mean"):
    """Tardos scores for every user at once; O(m*n) via one matrix product."""
    bits = getattr(code, "bits", code)
    y = np.asarray(y)
    p = np.asarray(getattr(p, "p", p), dtype=np.float64)
    a, b = _tardos_position_weights(y, p, convention)
    return bits.T.astype(np.float64) @ (a - b) + b.sum()


def guilty_symbol_lik(y, x, p, c):
    """P(y | user is guilty with symbol x, bias p, coalition size c).

    Closed form of the tally marginalization under the blind-channel
    relaxation (every undecided tally emits 1/2):
    1/2 * (1 + (-1)^y * ((1-x)(1-p)^(c-1) - x p^(c-1))).
    """
    _check_bit("y", y)
    _check_bit("x", x)
    _check_prob_open(p)
    if c < 1:
        raise ValueError("c must be >= 1")
    sign = -1.0 if y == 1 else 1.0
    return 0.5 * (1.0 + sign * ((1 - x) * (1.0 - p) ** (c - 1) - x * p ** (c - 1)))


def innocent_symbol_lik(y, p, c):
    """P(y | user is innocent, bias p, coalition size c); independent of x.

    Closed form: 1/2 * (1 + (-1)^y * ((1-p)^c - p^c)).
    """
    _check_bit("y", y)
    _check_prob_open(p)
    if c < 1:
        raise ValueError("c must be >= 1")
    sign = -1.0 if y == 1 else 1.0
    return 0.5 * (1.0 + sign * ((1.0 - p) ** c - p ** c))


def brute_force_lik(y, x, p, c, guilty):
    """Oracle for the closed forms: explicit sum over all tallies.

    P(y | s, x) = sum_t P(y | t) P(t | s, x, c) with P(y=1|t) equal to 0 at
    t=0, 1 at t=c and 1/2 in between, and binomial tally laws
    Binomial(c-1, p) shifted by x (guilty) or Binomial(c, p) (innocent).
    """
    total = 0.0
    for t in range(c + 1):
        if t == 0:
            p_y = 0.0 if y == 1 else 1.0
        elif t == c:
            p_y = 1.0 if y == 1 else 0.0
        else:
            p_y = 0.5
        if guilty:
            k = t - x
            if k < 0 or k > c - 1:
                continue
            p_t = math.comb(c - 1, k) * p ** k * (1.0 - p) ** (c - 1 - k)
        else:
            p_t = math.comb(c, t) * p ** t * (1.0 - p) ** (c - t)
        total += p_y * p_t
    return total


def generalized_max(a, b):
    """Overflow-free log(exp(a) + exp(b)) = max(a,b) + log(1 + exp(-|a-b|)).

    Accepts scalars or arrays; -inf acts as the identity element.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    # lo - hi is NaN when both are -inf; route those through exp(-inf) = 0.
    with np.errstate(invalid="ignore"):
        diff = np.where(lo == -np.inf, -np.inf, lo - hi)
    out = hi + np.log1p(np.exp(diff))
    return float(out) if out.ndim == 0 else out


def _safe_log(v):
    """Elementwise log with nonpositive inputs clamped to LOG_CLAMP.

    Inputs are probabilities; zeros come from genuinely impossible symbols
    and negatives only from rounding of values that are exactly zero in
    real arithmetic, so both get the same floor.
    """
    v = np.asarray(v, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(v)
    return np.where(v > 0.0, out, LOG_CLAMP)


@dataclass(frozen=True)
class MapConfig:
    """Coalition-size range marginalized by the blind MAP score.

    The likelihood-ratio sum runs over c in {c_min..c_max}; chasing very
    large coalitions is pointless at practical code lengths, and the c=1
    term makes the guilty likelihood degenerate, so the sum starts at 2 by
    default.
    """

    c_max: int
    c_min: int = 2

    def __post_init__(self):
        if not 1 <= self.c_min <= self.c_max:
            raise ValueError("MapConfig: need 1 <= c_min <= c_max")


def _map_symbol_logliks(y, p, c):
    """Per-position clamped log-likelihood triplet (x=0 guilty, x=1 guilty, innocent)."""
    sign = np.where(y == 1, -1.0, 1.0)
    u = p ** (c - 1)
    v = (1.0 - p) ** (c - 1)
    lik0 = 0.5 * (1.0 + sign * v)
    lik1 = 0.5 * (1.0 - sign * u)
    likinn = 0.5 * (1.0 + sign * ((1.0 - p) * v - p * u))
    return _safe_log(lik0), _safe_log(lik1), _safe_log(likinn)


def map_blind_score(y, x, p, n, cfg):
    """Blind MAP log-likelihood-ratio score for a single user.

    log sum_c exp(A1_c) - log sum_c exp(A2_c) with
    A1_c = log(c/n) + sum_i log P(y_i | guilty, x_ij, c) and
    A2_c = log((n-c)/n) + sum_i log P(y_i | innocent, c), reduced with
    generalized_max so no product ever leaves the log domain.
    """
    scores = map_blind_scores_all(y, np.asarray(x, dtype=np.uint8)[:, None], p, n, cfg)
    return float(scores[0])


def map_blind_scores_all(y, code, p, n, cfg):
    """Blind MAP scores for every user; O(m*n) per marginalized coalition size."""
    bits = getattr(code, "bits", code)
    y = np.asarray(y)
    p = np.asarray(getattr(p, "p", p), dtype=np.float64)
    if cfg.c_max >= n:
        raise ValueError("map decoder: c_max must be < n")
    if not (y.shape[0] == bits.shape[0] == p.shape[0]):
        raise ValueError("map decoder: y, code and p lengths must agree")
    bits_f = bits.T.astype(np.float64)
    acc1 = np.full(bits.shape[1], -np.inf)
    acc2 = -np.inf
    for c in range(cfg.c_min, cfg.c_max + 1):
        log0, log1, loginn = _map_symbol_logliks(y, p, c)
        a1 = math.log(c / n) + bits_f @ (log1 - log0) + log0.sum()
        a2 = math.log((n - c) / n) + loginn.sum()
        acc1 = generalized_max(acc1, a1)
        acc2 = generalized_max(acc2, a2)
    return acc1 - acc2


def _informed_symbol_probs(p, channel, c):
    """Per-position symbol laws under the true channel.

    Returns (a0, a1, ainn, b0, b1, binn): P(y=1 | guilty x=0/x=1, innocent)
    and the matching P(y=0 | ...).  The y=0 values are accumulated from the
    complementary channel entries rather than as 1 - P(y=1), so neither side
    can go negative by rounding when the binomial weights sum to 1 +/- ulp.
    """
    k1 = np.arange(c)[:, None]
    k0 = np.arange(c + 1)[:, None]
    w1 = binom.pmf(k1, c - 1, p[None, :])
    w0 = binom.pmf(k0, c, p[None, :])
    if channel.theta is not None:
        theta = channel.theta
        comp = 1.0 - theta
        a0 = theta[0:c] @ w1
        a1 = theta[1:c + 1] @ w1
        ainn = theta @ w0
        b0 = comp[0:c] @ w1
        b1 = comp[1:c + 1] @ w1
        binn = comp @ w0
    else:
        G = channel.G
        if G.shape[0] != p.shape[0]:
            raise ValueError("informed decoder: channel position count must match m")
        comp = 1.0 - G
        a0 = np.einsum("km,mk->m", w1, G[:, 0:c])
        a1 = np.einsum("km,mk->m", w1, G[:, 1:c + 1])
        ainn = np.einsum("km,mk->m", w0, G)
        b0 = np.einsum("km,mk->m", w1, comp[:, 0:c])
        b1 = np.einsum("km,mk->m", w1, comp[:, 1:c + 1])
        binn = np.einsum("km,mk->m", w0, comp)
    return a0, a1, ainn, b0, b1, binn


def informed_score(y, x, p, channel, c):
    """Informed (true channel, true c) log-likelihood-ratio score for one user."""
    return float(informed_scores_all(y, np.asarray(x, dtype=np.uint8)[:, None], p, channel, c)[0])


def informed_scores_all(y, code, p, channel, c):
    """Informed scores for every user at once."""
    bits = getattr(code, "bits", code)
    y = np.asarray(y)
    p = np.asarray(getattr(p, "p", p), dtype=np.float64)
    if channel.c != c:
        raise ValueError("informed decoder: channel built for a different coalition size")
    if not (y.shape[0] == bits.shape[0] == p.shape[0]):
        raise ValueError("informed decoder: y, code and p lengths must agree")
    a0, a1, ainn, b0, b1, binn = _informed_symbol_probs(p, channel, c)
    y1 = y == 1
    log0 = _safe_log(np.where(y1, a0, b0))
    log1 = _safe_log(np.where(y1, a1, b1))
    loginn = _safe_log(np.where(y1, ainn, binn))
    return bits.T.astype(np.float64) @ (log1 - log0) + log0.sum() - loginn.sum()
