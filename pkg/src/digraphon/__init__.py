"""Step digraphons, the di-IRM prior and collapsed Gibbs inference."""
from ._kernels import BACKEND
from .core import (BUILTINS, InvalidDigraphon, LatentSample, StepDigraphon, builtin,
                   sample_digraph, validate)
from .dirm import BlockWeights, DirmHyperParams, sample_crp, sample_dirm_digraphon
from .estimators import degree_sort_estimate, histogram_densities
from .inference import (IrmHyperParams, adjusted_rand_index, collapsed_log_likelihood,
                        gibbs_sweep, run_chain, run_chain_irm)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BUILTINS", "BlockWeights", "DirmHyperParams", "InvalidDigraphon",
    "IrmHyperParams", "LatentSample", "StepDigraphon", "adjusted_rand_index", "builtin",
    "collapsed_log_likelihood", "degree_sort_estimate", "gibbs_sweep", "histogram_densities",
    "run_chain", "run_chain_irm", "sample_crp", "sample_digraph", "sample_dirm_digraphon",
    "validate",
]
