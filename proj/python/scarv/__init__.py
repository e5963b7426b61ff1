"""Stability-oriented aggregation for proxy-induced sample rankings."""

from ._scarv import (
    auroc,
    chargram_jaccard_pairs,
    cross_seed_aggregate,
    derive_seed,
    fractional_ranks,
    inject_label_noise,
    inject_near_duplicates,
    make_synthetic_corpus,
    minmax_normalize,
    paired_bootstrap_ci,
    pairwise_stability,
    perturb_text,
    precision_recall_at_k,
    run_method,
    spearman,
    subset_overlap,
    threshold_clusters,
    to_ranking,
    topk_jaccard,
    wilcoxon_signed_rank,
)

__all__ = [
    "auroc",
    "chargram_jaccard_pairs",
    "cross_seed_aggregate",
    "derive_seed",
    "fractional_ranks",
    "inject_label_noise",
    "inject_near_duplicates",
    "make_synthetic_corpus",
    "minmax_normalize",
    "paired_bootstrap_ci",
    "pairwise_stability",
    "perturb_text",
    "precision_recall_at_k",
    "run_method",
    "spearman",
    "subset_overlap",
    "threshold_clusters",
    "to_ranking",
    "topk_jaccard",
    "wilcoxon_signed_rank",
]
