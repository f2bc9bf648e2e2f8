"""Release gate: one end-to-end test per acceptance criterion.

Each test pins a headline behavior of the workbench at desk scale: the
decoder closed forms against an explicit tally-sum oracle, log-domain
scoring against extended-precision direct products, the qualitative ROC
ordering of the three decoders, the code-length trend of the miss rate
under the optimized attack, optimizer dominance over the named fusion
strategies, the zero-mean innocent score property, and bit-for-bit
reproducibility of the CLI pipeline.  Comparisons of Monte Carlo
estimates count as resolved only beyond twice the binomial standard
error; anything closer is recorded as a tie rather than asserted.
"""

import math
import time

import numpy as np
import pytest

from traitortrace.cli import main as cli_main
from traitortrace.codegen import generate_code, sample_bias_vector
from traitortrace.collusion import Coalition, STRATEGIES, forge, strategy_theta, tally
from traitortrace.decoders import (
    MapConfig,
    _tardos_position_weights,
    brute_force_lik,
    guilty_symbol_lik,
    innocent_symbol_lik,
    map_blind_score,
    tardos_weight,
)
from traitortrace.simulate import (
    DECODERS,
    ExperimentConfig,
    binomial_standard_error,
    estimate_roc,
    operating_point,
    run_monte_carlo,
)
from traitortrace.streams import child_generators
from traitortrace.wca import Quadrature, load_or_optimize, mutual_information, optimize_wca

REALIZATIONS = 2000


@pytest.fixture(scope="module")
def channel_tables():
    """Score tables at fixed length m=300 for a peaked and a flat channel."""
    tables = {}
    for strategy in ("minority", "coinflip"):
        cfg = ExperimentConfig(
            m=300, n=1000, c_true=6, c_max=10,
            strategy=strategy, realizations=REALIZATIONS, seed=1,
        )
        tables[strategy] = run_monte_carlo(cfg)
    return tables


@pytest.fixture(scope="module")
def length_tables(tmp_path_factory):
    """Score tables under the optimized attack at three code lengths."""
    cache = tmp_path_factory.mktemp("wca_cache")
    result, _ = load_or_optimize(6, nodes=128, tol=1e-8, cache_dir=cache)
    tables = {}
    for m in (150, 300, 600):
        cfg = ExperimentConfig(
            m=m, n=1000, c_true=6, c_max=10,
            strategy="wca", realizations=REALIZATIONS, seed=2,
        )
        tables[m] = run_monte_carlo(cfg, channel=result.channel)
    return tables


def test_criterion_1():
    """Closed-form symbol likelihoods equal the tally-sum oracle on a full grid."""
    t0 = time.perf_counter()
    worst = 0.0
    for c in range(1, 11):
        for p in np.arange(1, 20) * 0.05:
            p = float(p)
            for y in (0, 1):
                for x in (0, 1):
                    diff = guilty_symbol_lik(y, x, p, c) - brute_force_lik(y, x, p, c, guilty=True)
                    worst = max(worst, abs(diff))
                diff = innocent_symbol_lik(y, p, c) - brute_force_lik(y, 0, p, c, guilty=False)
                worst = max(worst, abs(diff))
    elapsed = time.perf_counter() - t0
    assert worst <= 1e-12, f"worst grid deviation {worst:.3e}"
    assert elapsed < 1.0, f"grid sweep took {elapsed:.2f}s"


def _direct_log_ratio(y, x, p, n, cfg):
    # same mixture as the blind score, but as plain 80-bit products
    pl = p.astype(np.longdouble)
    sgn = np.where(y == 1, np.longdouble(-1.0), np.longdouble(1.0))
    x1 = x == 1
    num = np.longdouble(0.0)
    den = np.longdouble(0.0)
    for c in range(cfg.c_min, cfg.c_max + 1):
        u = pl ** (c - 1)
        v = (1.0 - pl) ** (c - 1)
        guilty = np.where(x1, 0.5 * (1.0 - sgn * u), 0.5 * (1.0 + sgn * v))
        innocent = 0.5 * (1.0 + sgn * ((1.0 - pl) * v - pl * u))
        num += np.longdouble(c) / n * guilty.prod()
        den += np.longdouble(n - c) / n * innocent.prod()
    return np.log(num) - np.log(den)


def test_criterion_2():
    """Log-domain blind MAP scores match direct-domain ratios to 1e-9."""
    rng = np.random.default_rng(214)
    worst = 0.0
    for _ in range(1000):
        m = int(rng.integers(1, 65))
        c_max = int(rng.integers(2, 11))
        n = int(rng.integers(c_max + 1, 51))
        p = np.clip(np.sin(np.pi * rng.random(m) / 2.0) ** 2, 1e-6, 1.0 - 1e-6)
        x = rng.integers(0, 2, m).astype(np.uint8)
        y = rng.integers(0, 2, m).astype(np.uint8)
        cfg = MapConfig(c_max=c_max)
        score = map_blind_score(y, x, p, n, cfg)
        rel = abs(np.expm1(np.longdouble(score) - _direct_log_ratio(y, x, p, n, cfg)))
        worst = max(worst, float(rel))
    assert worst <= 1e-9, f"worst relative error {worst:.3e}"


def test_criterion_3(channel_tables):
    """AUC ordering informed >= map >= tardos under minority; map ~ informed under coinflip."""
    auc = {}
    se = {}
    for strategy, table in channel_tables.items():
        for d in DECODERS:
            a = estimate_roc(table, d).auc
            auc[strategy, d] = a
            se[strategy, d] = binomial_standard_error(a, table.realizations)
    informed = auc["minority", "informed"]
    blind = auc["minority", "map"]
    tardos = auc["minority", "tardos"]
    assert informed >= blind >= tardos
    gap_hi = informed - blind
    gap_lo = blind - tardos
    lim_hi = 2.0 * math.hypot(se["minority", "informed"], se["minority", "map"])
    lim_lo = 2.0 * math.hypot(se["minority", "map"], se["minority", "tardos"])
    assert gap_hi >= lim_hi, f"informed-map gap {gap_hi:.4f} inside noise {lim_hi:.4f}"
    assert gap_lo >= lim_lo, f"map-tardos gap {gap_lo:.4f} inside noise {lim_lo:.4f}"
    overlap = abs(auc["coinflip", "map"] - auc["coinflip", "informed"])
    assert overlap <= 0.02, f"coinflip map/informed AUCs differ by {overlap:.4f}"


def test_criterion_4(length_tables):
    """Miss rate at 5% false alarm falls with length; map beats tardos by a growing gap."""
    lengths = sorted(length_tables)
    pfn = {}
    se = {}
    for m, table in length_tables.items():
        for d in DECODERS:
            op = operating_point(table, d, pfa_target=0.05)
            pfn[m, d] = op.pfn
            se[m, d] = binomial_standard_error(op.pfn, table.realizations)
    ties = []
    for d in DECODERS:
        for m1, m2 in zip(lengths, lengths[1:]):
            drop = pfn[m1, d] - pfn[m2, d]
            noise = 2.0 * math.hypot(se[m1, d], se[m2, d])
            if abs(drop) <= noise:
                ties.append(f"{d} miss rate m={m1} vs m={m2}")
            else:
                assert drop > 0.0, f"{d} miss rate rose from m={m1} to m={m2} by {-drop:.4f}"
    gap = {}
    gap_se = {}
    for m in lengths:
        gap[m] = pfn[m, "tardos"] - pfn[m, "map"]
        gap_se[m] = math.hypot(se[m, "tardos"], se[m, "map"])
        if abs(gap[m]) <= 2.0 * gap_se[m]:
            ties.append(f"map vs tardos miss rate at m={m}")
        else:
            assert gap[m] > 0.0, f"map missed more than tardos at m={m}"
    for m1, m2 in zip(lengths, lengths[1:]):
        growth = gap[m2] - gap[m1]
        noise = 2.0 * math.hypot(gap_se[m1], gap_se[m2])
        if abs(growth) <= noise:
            ties.append(f"tardos-map gap m={m1} vs m={m2}")
        else:
            assert growth > 0.0, f"tardos-map gap shrank from m={m1} to m={m2}"
    for tie in ties:
        print(f"tie recorded: {tie}")


def test_criterion_5():
    """Optimized channel dominates every named strategy for c in 2..8, with mirror symmetry."""
    t0 = time.perf_counter()
    quad = Quadrature.gauss_chebyshev(128)
    tol = 1e-8
    for c in range(2, 9):
        result = optimize_wca(c, quad=quad, tol=tol)
        assert result.converged
        for name in STRATEGIES:
            named = mutual_information(strategy_theta(name, c).theta, quad)
            # at c=2 the optimum coincides with coinflip/uniform, so
            # dominance is asserted with tol slack rather than a strict margin
            assert result.mi <= named + tol, (c, name, result.mi, named)
        mirror = np.abs(result.theta + result.theta[::-1] - 1.0)
        assert mirror.max() <= 10.0 * tol
    assert time.perf_counter() - t0 < 10.0


def test_criterion_6():
    """Innocent per-position Tardos scores are zero-mean, empirically and exactly."""
    n_pos = 100_000
    g_bias, g_code, g_forge, g_x = child_generators(np.random.SeedSequence(60), 4)
    bias = sample_bias_vector(n_pos, g_bias)
    p = bias.p
    colluders = generate_code(bias, 6, g_code)
    t = tally(colluders, Coalition(np.arange(6), 6))
    y = forge(t, strategy_theta("minority", 6), g_forge)
    x = (g_x.random(n_pos) < p).astype(np.uint8)  # innocent draw, independent of y
    a, b = _tardos_position_weights(y, p, "zero-mean")
    scores = np.where(x == 1, a, b)
    mean = scores.mean()
    bound = 4.0 * scores.std(ddof=1) / math.sqrt(n_pos)
    assert abs(mean) <= bound, f"|{mean:.5f}| > {bound:.5f}"
    for y_bit in (0, 1):
        for p_val in np.linspace(0.01, 0.99, 99):
            p_val = float(p_val)
            resid = p_val * tardos_weight(y_bit, 1, p_val) + (1.0 - p_val) * tardos_weight(y_bit, 0, p_val)
            assert abs(resid) <= 1e-14


def test_criterion_7(tmp_path):
    """The roc command is byte-identical across reruns and worker counts."""
    flags = [
        "--m", "50", "--n", "30", "--c", "3", "--cmax", "6",
        "--strategy", "minority", "--R", "20", "--seed", "9",
    ]
    outs = []
    for tag, extra in (("first", []), ("again", []), ("parallel", ["--jobs", "2"])):
        out = tmp_path / tag
        assert cli_main(["roc", *flags, *extra, "--out", str(out)]) == 0
        outs.append(out)
    names = sorted(f.name for f in outs[0].glob("*.csv"))
    assert "scores.csv" in names and len(names) >= 4
    for name in names:
        reference = (outs[0] / name).read_bytes()
        for other in outs[1:]:
            assert (other / name).read_bytes() == reference, f"{name} differs in {other.name}"
