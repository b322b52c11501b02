"""Joint Bayesian clustering of per-object feature vectors and a binary network.

A Gaussian mixture over the feature rows and a stochastic block model over
the edges share one cluster labeling, inferred by a Gibbs sampler.  See
``model`` for the probability model, ``inference`` for the sampler,
``synthesis`` for benchmark data generation, ``evaluation`` for accuracy
measures and the experiment harness, and ``cli`` for the command-line
front-end.
"""

from .distributions import RngStream
from .evaluation import adjusted_rand_index, combine, exact_posterior, experiment, oracle_pick
from .inference import ChainConfig, PosteriorSummary, gibbs_sweep, run_chain, run_chains
from .model import (
    GmmParams,
    Labeling,
    MixingWeights,
    ModelState,
    Network,
    Priors,
    SbmParams,
    VectorDataset,
    default_priors,
    log_joint_posterior,
)
from .synthesis import CasePreset, GenerativeSpec, case_info, generate, preset, random_psi

__version__ = "0.1.0"
