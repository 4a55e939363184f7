"""Entity-replacement data augmentation for process-extraction corpora."""

from .augment import (
    AugmentationConfig,
    AugmentedSentence,
    CorpusIndex,
    Strategy,
    augment_corpus,
    rae_augment,
    re_augment,
    replace_entities,
    sample_fraction,
    select_sources,
)
from .corpus import (
    Corpus,
    EntitySpan,
    LabeledSentence,
    extract_entity_spans,
    label_multiset,
    parse_corpus,
    read_corpus,
    save_corpus,
    write_corpus,
)
from .embeddings import EmbeddingTable, OOVPolicy, cosine, load_embeddings, mean_vector, read_embeddings
from .similarity import SimilarityScore, label_overlap, psim, psim_a, sim_predicate, ssim
from .wmd import cost_matrix, nbow, solve_transport, wmd_distance

__version__ = "0.1.0"
