"""Author name disambiguation with likelihood-ratio pair scoring.

Pipeline: LN-FI blocking, similarity profiles, a smoothed likelihood-ratio
model trained on auto-generated match/non-match pairs, per-block Bayes
posteriors, weighted least-squares transitivity repair, greedy agglomerative
clustering, and pairwise/purity/B-cubed evaluation.
"""

from .clustering import Clustering, agglomerate, linkage_odds
from .config import RunConfig
from .corpus import Block, CitationRecord, Corpus, NameParts, block_key, build_blocks, normalize_name
from .inference import PairProbabilityMatrix, estimate_prior, posterior, score_block
from .metrics import bcubed_scores, evaluate, pair_confusion, pairwise_scores, purity_scores
from .profile import DEFAULT_SCHEMA, SimilarityProfile, compute_profile, profile_index, profile_unindex
from .training import RatioModel, fit_ratio_model, load_model, r_value, save_model
from .transitivity import RepairConfig, detect_violations, repair_block, repair_triplet

__version__ = "0.1.0"

__all__ = [
    "Block",
    "CitationRecord",
    "Clustering",
    "Corpus",
    "DEFAULT_SCHEMA",
    "NameParts",
    "PairProbabilityMatrix",
    "RatioModel",
    "RepairConfig",
    "RunConfig",
    "SimilarityProfile",
    "agglomerate",
    "bcubed_scores",
    "block_key",
    "build_blocks",
    "compute_profile",
    "detect_violations",
    "estimate_prior",
    "evaluate",
    "fit_ratio_model",
    "linkage_odds",
    "load_model",
    "normalize_name",
    "pair_confusion",
    "pairwise_scores",
    "posterior",
    "profile_index",
    "profile_unindex",
    "purity_scores",
    "r_value",
    "repair_block",
    "repair_triplet",
    "save_model",
    "score_block",
]
