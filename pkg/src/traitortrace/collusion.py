"""Coalition modelling and collusion channels.

A coalition of c users fuses its codewords position by position; only the
per-position tally (number of 1s among the colluders) matters.  The fusion
law is a vector of Bernoulli parameters indexed by tally, constrained by
the marking rule: a position where all colluders agree is copied verbatim.
"""

from dataclasses import dataclass

import numpy as np

STRATEGIES = ("minority", "majority", "uniform", "coinflip")


@dataclass(frozen=True)
class Coalition:
    """c distinct colluding users out of n, stored as a sorted index array."""

    members: np.ndarray
    n: int

    def __post_init__(self):
        members = np.sort(np.asarray(self.members, dtype=np.int64))
        if members.size < 1:
            raise ValueError("Coalition: at least one member required")
        if members[0] < 0 or members[-1] >= self.n:
            raise ValueError("Coalition: member indices must lie in [0, n)")
        if np.any(np.diff(members) == 0):
            raise ValueError("Coalition: member indices must be distinct")
        members.setflags(write=False)
        object.__setattr__(self, "members", members)

    @property
    def c(self):
        return self.members.size

    def indicator(self):
        """Length-n 0/1 vector with 1 at colluder positions."""
        s = np.zeros(self.n, dtype=np.uint8)
        s[self.members] = 1
        return s


@dataclass(frozen=True)
class CollusionChannel:
    """Tally-indexed Bernoulli fusion parameters.

    Stationary channels hold one theta vector of length c+1 applied at every
    position; general channels hold an m x (c+1) matrix G.  Both must be
    marking-compliant: parameter 0 at tally 0 and parameter 1 at tally c.
    """

    c: int
    theta: np.ndarray | None = None
    G: np.ndarray | None = None

    def __post_init__(self):
        if (self.theta is None) == (self.G is None):
            raise ValueError("CollusionChannel: exactly one of theta or G required")
        if self.theta is not None:
            theta = np.asarray(self.theta, dtype=np.float64)
            if theta.shape != (self.c + 1,):
                raise ValueError("CollusionChannel: theta must have length c+1")
            self._check_marking(theta[None, :])
            theta.setflags(write=False)
            object.__setattr__(self, "theta", theta)
        else:
            G = np.asarray(self.G, dtype=np.float64)
            if G.ndim != 2 or G.shape[1] != self.c + 1:
                raise ValueError("CollusionChannel: G must be m x (c+1)")
            self._check_marking(G)
            G.setflags(write=False)
            object.__setattr__(self, "G", G)

    @staticmethod
    def _check_marking(g):
        if np.min(g) < 0.0 or np.max(g) > 1.0:
            raise ValueError("CollusionChannel: parameters must lie in [0, 1]")
        if np.any(g[:, 0] != 0.0) or np.any(g[:, -1] != 1.0):
            raise ValueError("CollusionChannel: marking requires g=0 at tally 0 and g=1 at tally c")

    @property
    def kind(self):
        return "stationary" if self.theta is not None else "matrix"

    def bernoulli_params(self, tally):
        """Per-position P(y_i = 1) for the given tally vector."""
        t = np.asarray(tally)
        if t.size and (np.min(t) < 0 or np.max(t) > self.c):
            raise ValueError("tally values must lie in {0..c}")
        if self.theta is not None:
            return self.theta[t]
        if t.shape != (self.G.shape[0],):
            raise ValueError("tally length must match the channel's position count")
        return self.G[np.arange(t.size), t]


def sample_coalition(n, c, rng):
    """Uniformly random c-subset of {0..n-1} via a partial Fisher-Yates shuffle.

    O(c) time and memory on a virtual identity array; exact uniformity.
    """
    if c < 1 or c >= n:
        raise ValueError("sample_coalition: need 1 <= c < n")
    seen = {}
    out = np.empty(c, dtype=np.int64)
    for i in range(int(c)):
        j = int(rng.integers(i, n))
        out[i] = seen.get(j, j)
        seen[j] = seen.get(i, i)
    return Coalition(out, int(n))


def tally(code, coalition):
    """Per-position count of 1s among the colluders' codewords."""
    bits = getattr(code, "bits", code)
    if coalition.members[-1] >= bits.shape[1]:
        raise IndexError("coalition index out of range for this code")
    return bits[:, coalition.members].sum(axis=1, dtype=np.int64)


def strategy_theta(strategy, c):
    """Stationary channel for one of the named fusion strategies.

    uniform   theta_k = k/c       (a colluder's symbol picked uniformly)
    coinflip  theta_k = 1/2       (fair coin at every undecided position)
    majority  most frequent symbol wins, fair coin on an even-c tie
    minority  least frequent symbol wins, fair coin on an even-c tie

    Tally 0 and tally c are pinned to 0 and 1 regardless of strategy.
    """
    if c < 1:
        raise ValueError("strategy_theta: c must be >= 1")
    k = np.arange(c + 1, dtype=np.float64)
    if strategy == "uniform":
        theta = k / c
    elif strategy == "coinflip":
        theta = np.full(c + 1, 0.5)
    elif strategy == "majority":
        theta = np.where(k > c / 2, 1.0, np.where(k < c / 2, 0.0, 0.5))
    elif strategy == "minority":
        theta = np.where(k < c / 2, 1.0, np.where(k > c / 2, 0.0, 0.5))
    else:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    theta[0], theta[c] = 0.0, 1.0
    return CollusionChannel(c=int(c), theta=theta)


def forge(tally_vec, channel, rng):
    """Draw the pirated sequence: y_i ~ Bernoulli(g at (i, t_i)).

    The marking invariant (y_i = 0 at tally 0, y_i = 1 at tally c) holds by
    the channel invariant: rng.random() < 1.0 is always true, < 0.0 never.
    """
    g = channel.bernoulli_params(tally_vec)
    return (rng.random(g.size) < g).astype(np.uint8)


def channel_to_json(channel):
    """JSON-serializable dict {kind, c, theta | G}."""
    doc = {"kind": channel.kind, "c": channel.c}
    if channel.theta is not None:
        doc["theta"] = channel.theta.tolist()
    else:
        doc["G"] = channel.G.tolist()
    return doc


def channel_from_json(doc):
    if doc["kind"] == "stationary":
        return CollusionChannel(c=doc["c"], theta=np.asarray(doc["theta"]))
    return CollusionChannel(c=doc["c"], G=np.asarray(doc["G"]))
