"""Monte Carlo harness for decoder ROC estimation.

One realization samples everything fresh (bias vector, code, coalition,
forged sequence), scores all n users under each configured decoder, and
keeps only the per-decoder extremes: the largest innocent score and the
largest colluder score.  A false alarm at threshold tau means some
innocent reached tau; a false negative means every colluder stayed below,
so the two extremes per decoder are sufficient statistics for both error
rates.

Realizations are independent; each derives its RNG substreams from
(master seed, realization index) so tables are bit-identical across
process counts and execution orders.
"""

import csv
import math
import multiprocessing
import sys
from dataclasses import dataclass

import numpy as np

from . import decoders as _dec
from .codegen import generate_code, sample_bias_vector
from .collusion import STRATEGIES, forge, sample_coalition, strategy_theta, tally
from .streams import (
    STREAM_BIAS,
    STREAM_CODE,
    STREAM_COALITION,
    STREAM_FORGE,
    child_generators,
)
from .wca import load_or_optimize

DECODERS = ("tardos", "informed", "map")

#: Strategy tags accepted by ExperimentConfig ("wca" resolves via the optimizer).
STRATEGY_TAGS = STRATEGIES + ("wca",)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one Monte Carlo run depends on, hashable and picklable."""

    m: int
    n: int
    c_true: int
    c_max: int
    strategy: str
    decoders: tuple = DECODERS
    realizations: int = 2000
    seed: int = 0
    c_min: int = 2
    cutoff: float = 0.0
    tardos_convention: str = "zero-mean"
    wca_nodes: int = 128
    wca_tol: float = 1e-8
    threshold_grid: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "decoders", tuple(self.decoders))
        if self.threshold_grid is not None:
            object.__setattr__(self, "threshold_grid", tuple(self.threshold_grid))
        if self.m < 1:
            raise ValueError("config: m must be >= 1")
        if not 1 <= self.c_true <= self.c_max < self.n:
            raise ValueError("config: need 1 <= c_true <= c_max < n")
        # keep at least two innocents so both extremes exist
        if self.c_true > self.n - 2:
            raise ValueError("config: need c_true <= n - 2")
        if self.strategy not in STRATEGY_TAGS:
            raise ValueError(f"config: unknown strategy {self.strategy!r}")
        if not self.decoders:
            raise ValueError("config: decoder set must be nonempty")
        for d in self.decoders:
            if d not in DECODERS:
                raise ValueError(f"config: unknown decoder {d!r}")
        if self.realizations < 1:
            raise ValueError("config: realizations must be >= 1")
        if self.seed < 0:
            raise ValueError("config: seed must be non-negative")
        if not 1 <= self.c_min <= self.c_max:
            raise ValueError("config: need 1 <= c_min <= c_max")
        if not 0.0 <= self.cutoff < 0.5:
            raise ValueError("config: cutoff must lie in [0, 0.5)")
        if self.tardos_convention not in _dec.TARDOS_CONVENTIONS:
            raise ValueError(f"config: unknown convention {self.tardos_convention!r}")


def resolve_channel(cfg, cache_dir=None):
    """Collusion channel for cfg.strategy; runs/reuses the optimizer for "wca"."""
    if cfg.strategy == "wca":
        result, _ = load_or_optimize(
            cfg.c_true, nodes=cfg.wca_nodes, tol=cfg.wca_tol, cache_dir=cache_dir
        )
        return result.channel
    return strategy_theta(cfg.strategy, cfg.c_true)


def _scores_all(decoder, y, code, bias, cfg, channel):
    if decoder == "tardos":
        return _dec.tardos_scores_all(y, code, bias, cfg.tardos_convention)
    if decoder == "map":
        mc = _dec.MapConfig(c_max=cfg.c_max, c_min=cfg.c_min)
        return _dec.map_blind_scores_all(y, code, bias, cfg.n, mc)
    if decoder == "informed":
        return _dec.informed_scores_all(y, code, bias, channel, cfg.c_true)
    raise ValueError(f"unknown decoder {decoder!r}")


def run_realization(cfg, stream, channel=None):
    """One fresh draw; returns {decoder: (max_innocent, max_colluder)}.

    `stream` is a `numpy.random.SeedSequence`; substream derivation is
    pure, so the same stream always reproduces the same outputs.
    """
    if channel is None:
        channel = resolve_channel(cfg)
    gens = child_generators(stream, 4)
    bias = sample_bias_vector(cfg.m, gens[STREAM_BIAS], cutoff=cfg.cutoff)
    code = generate_code(bias, cfg.n, gens[STREAM_CODE])
    coalition = sample_coalition(cfg.n, cfg.c_true, gens[STREAM_COALITION])
    t = tally(code, coalition)
    y = forge(t, channel, gens[STREAM_FORGE])
    guilty = coalition.indicator().astype(bool)
    out = {}
    for d in cfg.decoders:
        scores = _scores_all(d, y, code, bias, cfg, channel)
        out[d] = (float(scores[~guilty].max()), float(scores[guilty].max()))
    return out


@dataclass(frozen=True)
class ScoreTable:
    """Per-realization score extremes, R x |decoders| each."""

    decoders: tuple
    max_innocent: np.ndarray
    max_colluder: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "decoders", tuple(self.decoders))
        mi = np.asarray(self.max_innocent, dtype=np.float64)
        mc = np.asarray(self.max_colluder, dtype=np.float64)
        if mi.shape != mc.shape or mi.ndim != 2 or mi.shape[1] != len(self.decoders):
            raise ValueError("score table: shapes must be R x |decoders|")
        if not (np.isfinite(mi).all() and np.isfinite(mc).all()):
            raise ValueError("score table: all entries must be finite")
        mi.setflags(write=False)
        mc.setflags(write=False)
        object.__setattr__(self, "max_innocent", mi)
        object.__setattr__(self, "max_colluder", mc)

    @property
    def realizations(self):
        return self.max_innocent.shape[0]

    def column(self, decoder):
        try:
            return self.decoders.index(decoder)
        except ValueError:
            raise ValueError(f"decoder {decoder!r} not present in table") from None

    def to_csv(self, path):
        """Long-format CSV; `repr` floats round-trip exactly."""
        with open(path, "w", newline="") as fh:
            fh.write("realization,decoder,max_innocent,max_colluder\n")
            for r in range(self.realizations):
                for j, d in enumerate(self.decoders):
                    fh.write(
                        f"{r},{d},"
                        f"{float(self.max_innocent[r, j])!r},"
                        f"{float(self.max_colluder[r, j])!r}\n"
                    )

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["realization", "decoder", "max_innocent", "max_colluder"]:
                raise ValueError(f"score table: unexpected header {header}")
            rows = [(int(r), d, float(a), float(b)) for r, d, a, b in reader]
        decoders = []
        for r, d, _, _ in rows:
            if r != 0:
                break
            decoders.append(d)
        n_dec = len(decoders)
        if n_dec == 0 or len(rows) % n_dec != 0:
            raise ValueError("score table: malformed rows")
        R = len(rows) // n_dec
        mi = np.empty((R, n_dec))
        mc = np.empty((R, n_dec))
        for idx, (r, d, a, b) in enumerate(rows):
            if r != idx // n_dec or d != decoders[idx % n_dec]:
                raise ValueError("score table: rows out of order")
            mi[r, idx % n_dec] = a
            mc[r, idx % n_dec] = b
        return cls(tuple(decoders), mi, mc)


_POOL_CFG = None
_POOL_CHANNEL = None


def _pool_init(cfg, channel):
    global _POOL_CFG, _POOL_CHANNEL
    _POOL_CFG = cfg
    _POOL_CHANNEL = channel


def _pool_run(r):
    stream = np.random.SeedSequence(_POOL_CFG.seed, spawn_key=(int(r),))
    return run_realization(_POOL_CFG, stream, _POOL_CHANNEL)


def run_monte_carlo(cfg, jobs=1, channel=None, cache_dir=None, progress=False):
    """R independent realizations; bit-identical for any `jobs` value."""
    if channel is None:
        channel = resolve_channel(cfg, cache_dir=cache_dir)
    R = cfg.realizations
    if jobs > 1:
        with multiprocessing.Pool(jobs, _pool_init, (cfg, channel)) as pool:
            chunk = max(1, R // (jobs * 8))
            results = pool.map(_pool_run, range(R), chunksize=chunk)
    else:
        results = []
        step = max(1, R // 20)
        for r in range(R):
            stream = np.random.SeedSequence(cfg.seed, spawn_key=(r,))
            results.append(run_realization(cfg, stream, channel))
            if progress and ((r + 1) % step == 0 or r + 1 == R):
                print(f"\r  realization {r + 1}/{R}", end="", file=sys.stderr, flush=True)
        if progress:
            print(file=sys.stderr)
    mi = np.array([[res[d][0] for d in cfg.decoders] for res in results])
    mc = np.array([[res[d][1] for d in cfg.decoders] for res in results])
    return ScoreTable(cfg.decoders, mi, mc)


@dataclass(frozen=True)
class RocCurve:
    """Empirical ROC: tau ascending, pfa nonincreasing, pfn nondecreasing."""

    tau: np.ndarray
    pfa: np.ndarray
    pfn: np.ndarray
    auc: float

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write("tau,pfa,pfn\n")
            for t, a, n in zip(self.tau, self.pfa, self.pfn):
                fh.write(f"{float(t)!r},{float(a)!r},{float(n)!r}\n")


def estimate_roc(table, decoder, thresholds=None):
    """Empirical (pfa, pfn) sweep for one decoder plus trapezoid AUC.

    Default threshold grid is the union of all observed scores with a +inf
    sentinel, which realizes every attainable operating point exactly.
    """
    j = table.column(decoder)
    inn = np.sort(table.max_innocent[:, j])
    col = np.sort(table.max_colluder[:, j])
    if thresholds is None:
        tau = np.unique(np.concatenate([inn, col, [np.inf]]))
    else:
        tau = np.unique(np.asarray(thresholds, dtype=np.float64))
    R = inn.shape[0]
    pfa = (R - np.searchsorted(inn, tau, side="left")) / R
    pfn = np.searchsorted(col, tau, side="left") / R
    # tau ascending makes pfa descending; integrate TPR over ascending pfa
    auc = float(np.trapezoid((1.0 - pfn)[::-1], pfa[::-1]))
    return RocCurve(tau=tau, pfa=pfa, pfn=pfn, auc=auc)


@dataclass(frozen=True)
class OperatingPoint:
    tau: float
    pfa: float
    pfn: float


def operating_point(table, decoder, pfa_target=0.05):
    """pfn at the largest attainable empirical pfa not exceeding the target.

    The threshold sits just above the (k+1)-th largest innocent extreme,
    k = floor(target * R), so exactly k innocents (fewer under ties) fire.
    """
    if not 0.0 <= pfa_target <= 1.0:
        raise ValueError("pfa_target must lie in [0, 1]")
    j = table.column(decoder)
    inn = np.sort(table.max_innocent[:, j])[::-1]
    col = table.max_colluder[:, j]
    R = inn.shape[0]
    k = math.floor(pfa_target * R)
    if k >= R:
        tau = -np.inf
    else:
        tau = float(np.nextafter(inn[k], np.inf))
    pfa = float(np.count_nonzero(inn >= tau) / R)
    pfn = float(np.count_nonzero(col < tau) / R)
    return OperatingPoint(tau=tau, pfa=pfa, pfn=pfn)


def binomial_standard_error(p, R):
    """Standard error of a proportion estimated from R Bernoulli draws."""
    return math.sqrt(max(p * (1.0 - p), 0.0) / R)
