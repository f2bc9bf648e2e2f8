"""Binary fingerprinting workbench.

Probabilistic codes for traitor tracing: arcsine-biased code generation,
collusion-attack simulation under the marking assumption, three accusation
decoders (symmetric Tardos, channel-informed, blind MAP), a worst-case
channel optimizer, and a deterministic Monte Carlo ROC harness.
"""

__version__ = "0.1.0"

from .codegen import (
    BiasVector,
    CodeMatrix,
    arcsine_cdf,
    arcsine_ppf,
    generate_code,
    load_bias,
    load_code,
    sample_bias_vector,
    save_bias,
    save_code,
)
from .collusion import (
    Coalition,
    CollusionChannel,
    STRATEGIES,
    forge,
    sample_coalition,
    strategy_theta,
    tally,
)
from .decoders import (
    MapConfig,
    generalized_max,
    guilty_symbol_lik,
    informed_score,
    informed_scores_all,
    innocent_symbol_lik,
    map_blind_score,
    map_blind_scores_all,
    tardos_score,
    tardos_scores_all,
    tardos_weight,
)
from .simulate import (
    DECODERS,
    ExperimentConfig,
    OperatingPoint,
    RocCurve,
    ScoreTable,
    binomial_standard_error,
    estimate_roc,
    operating_point,
    run_monte_carlo,
    run_realization,
)
from .wca import (
    Quadrature,
    WcaResult,
    mutual_information,
    optimize_wca,
)

__all__ = [
    "__version__",
    "BiasVector",
    "CodeMatrix",
    "arcsine_cdf",
    "arcsine_ppf",
    "generate_code",
    "load_bias",
    "load_code",
    "sample_bias_vector",
    "save_bias",
    "save_code",
    "Coalition",
    "CollusionChannel",
    "STRATEGIES",
    "forge",
    "sample_coalition",
    "strategy_theta",
    "tally",
    "MapConfig",
    "generalized_max",
    "guilty_symbol_lik",
    "informed_score",
    "informed_scores_all",
    "innocent_symbol_lik",
    "map_blind_score",
    "map_blind_scores_all",
    "tardos_score",
    "tardos_scores_all",
    "tardos_weight",
    "DECODERS",
    "ExperimentConfig",
    "OperatingPoint",
    "RocCurve",
    "ScoreTable",
    "binomial_standard_error",
    "estimate_roc",
    "operating_point",
    "run_monte_carlo",
    "run_realization",
    "Quadrature",
    "WcaResult",
    "mutual_information",
    "optimize_wca",
]
