"""Toolkit for building, measuring and navigating top-N recommendation networks."""

from .corpus import (
    ItemCatalog,
    RatingsMatrix,
    TextCorpus,
    generate_synthetic,
    load_catalog,
    load_corpus,
    load_ratings,
)
from .netbuild import (
    RecNetwork,
    build,
    diversify_exprel,
    diversify_random,
    diversify_ziegler,
)
from .navsim import (
    KnowledgeMatrix,
    WalkTrace,
    build_knowledge,
    cluster_items,
    greedy_walk,
    run_berrypicking,
    run_foraging,
    run_p2p,
)
from .similarity import (
    FeatureMatrix,
    SimilarityTable,
    build_similarity_table,
    cosine,
    rating_features,
    tfidf,
)
from .topology import (
    BowTie,
    ComponentReport,
    EccentricityReport,
    bowtie,
    clustering_coefficient,
    eccentricities,
    membership_change,
    strongly_connected_components,
)

__version__ = "0.1.0"

__all__ = [
    "ItemCatalog",
    "RatingsMatrix",
    "TextCorpus",
    "generate_synthetic",
    "load_catalog",
    "load_corpus",
    "load_ratings",
    "FeatureMatrix",
    "SimilarityTable",
    "build_similarity_table",
    "cosine",
    "rating_features",
    "tfidf",
    "RecNetwork",
    "build",
    "diversify_exprel",
    "diversify_random",
    "diversify_ziegler",
    "BowTie",
    "ComponentReport",
    "EccentricityReport",
    "bowtie",
    "clustering_coefficient",
    "eccentricities",
    "membership_change",
    "strongly_connected_components",
    "KnowledgeMatrix",
    "WalkTrace",
    "build_knowledge",
    "cluster_items",
    "greedy_walk",
    "run_berrypicking",
    "run_foraging",
    "run_p2p",
]
