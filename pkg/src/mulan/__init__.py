"""MuLaN: local alignment of multilayer networks.

Builds a weighted multilayer alignment graph from two input networks and a
multiset of seed node pairs, mines communities on it (Louvain, greedy
merging, or a two-level map-equation optimizer), and scores the resulting
alignment with F-NC and NCV-GS3 metrics.
"""

from .align import (
    AlignmentParams,
    EdgeKind,
    MagEdge,
    MagNode,
    MultilayerAlignmentGraph,
    SeedPairs,
    build_mag,
    build_mag_nodes,
    classify_inter,
    classify_intra,
    load_seeds,
    save_mag,
    save_seeds,
)
from .community import (
    Partition,
    WeightedFlatGraph,
    detect,
    greedy_cnm,
    infomap_two_level,
    load_communities,
    louvain,
    map_equation_codelength,
    modularity,
    save_communities,
)
from .errors import (
    DuplicateSeed,
    EmptyGraph,
    EmptyTruth,
    InvalidSpec,
    LayerMismatch,
    MulanError,
    ParseError,
    SingleLayer,
    UnknownNode,
    ValidationError,
)
from .evaluate import (
    EvalReport,
    Mapping,
    evaluate_alignment,
    extract_mapping,
    f_nc,
    multilayer_aggregate,
    ncv_gs3,
    ncv_gs3_inter,
)
from .netgraph import (
    LayerId,
    MultilayerNetwork,
    bounded_distance,
    load_network,
    save_network,
)
from .synth import (
    NoiseSpec,
    SynthSpec,
    derive_seed,
    generate_ba_layer,
    generate_multilayer,
    perturb,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentParams",
    "DuplicateSeed",
    "EdgeKind",
    "EmptyGraph",
    "EmptyTruth",
    "EvalReport",
    "InvalidSpec",
    "LayerId",
    "LayerMismatch",
    "MagEdge",
    "MagNode",
    "Mapping",
    "MulanError",
    "MultilayerAlignmentGraph",
    "MultilayerNetwork",
    "NoiseSpec",
    "ParseError",
    "Partition",
    "SeedPairs",
    "SingleLayer",
    "SynthSpec",
    "UnknownNode",
    "ValidationError",
    "WeightedFlatGraph",
    "bounded_distance",
    "build_mag",
    "build_mag_nodes",
    "classify_inter",
    "classify_intra",
    "derive_seed",
    "detect",
    "evaluate_alignment",
    "extract_mapping",
    "f_nc",
    "generate_ba_layer",
    "generate_multilayer",
    "greedy_cnm",
    "infomap_two_level",
    "load_communities",
    "load_network",
    "load_seeds",
    "louvain",
    "map_equation_codelength",
    "modularity",
    "multilayer_aggregate",
    "ncv_gs3",
    "ncv_gs3_inter",
    "perturb",
    "save_communities",
    "save_mag",
    "save_network",
    "save_seeds",
]
