"""In-spectrum watermarking for unweighted graphs."""

from .graph import (
    EdgeListError,
    Graph,
    SubgraphSelection,
    adjacency,
    average_entry,
    density,
    edge_flip_attack,
    edit_distance_percent,
    induced_subgraph,
    load_edge_list,
    splice_subgraph,
    top_degree_selection,
    topk_degree_spearman,
    write_edge_list,
)
from .kernels import BACKEND
from .scheme import (
    DEFAULT_N0,
    EmbedReceipt,
    EmbeddingContext,
    EmptyWatermarkError,
    ExtractResult,
    Key,
    WatermarkRecord,
    derive_watermark,
    embed_full,
    embed_reduced,
    embed_with_retry,
    extract,
    keygen,
)
from .spectral import binarize, dft2, idft2, lowest_magnitude_indices, place_key, two_norm

__version__ = "0.1.0"
