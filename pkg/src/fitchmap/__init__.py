"""fitchmap: edge-labeled leaf-pair maps and the edge-labeled
phylogenetic trees that explain them."""

__version__ = "0.1.0"

from .core import (
    NO_EVENT,
    DuplicateLeaf,
    DuplicateLeafName,
    FitchError,
    FitchMap,
    InvalidToken,
    Label,
    LabelConflict,
    LabeledTree,
    LeafSetMismatch,
    LeafSetNotContained,
    MissingEntry,
    NoEvent,
    NonPhylogenetic,
    OuterEdge,
    QuasiPartition,
    ReflexiveEntry,
    ReservedToken,
    RootedTriple,
    SameLeaf,
    TooFewLeaves,
    TreeBuilder,
    TripleSet,
    UnknownEdge,
    UnknownLeaf,
    make_fitch_map,
)
from .evaluate import evaluate, explains, label_consistent
from .generalized import (
    AlphabetTooLarge,
    NotOtimesFree,
    RecognitionReport,
    T1Violation,
    T2Violation,
    T3Violation,
    T4Violation,
    assemble,
    check_conditions,
    compute_classes,
    is_least_resolved_general,
    recognize,
    recognize_no_otimes,
)
from .io import ParseError, ShapeError, read_map, read_tree, write_map, write_tree
from .simple_fitch import (
    Digraph,
    NotFitch,
    derive_forbidden_table,
    find_forbidden_triad,
    is_least_resolved_simple,
    is_simple_fitch,
    least_resolved_simple,
)
from .treeops import (
    TreePath,
    contract_edge,
    displays,
    lca,
    path_lca_to,
    restrict,
    triples_of,
)
from .triples import (
    Inconsistent,
    InconsistentInput,
    aho_build,
    closure_small,
    derive_informative_patterns,
    distinguishes,
    identifies,
    informative_triples,
)
from .oracle import (
    BudgetExceeded,
    TooManyLeaves,
    brute_force_tree_like,
    count_topologies,
    enumerate_consistent_labelings,
    enumerate_topologies,
    random_tree_like_instance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
