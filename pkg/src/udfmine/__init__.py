"""Process discovery from uncertain event logs.

Events may carry several possible activity labels, interval timestamps and
an indeterminacy flag. The package builds per-trace behavior graphs,
computes minimum/maximum activity and directly-follows frequencies,
assembles and filters the uncertainty-annotated directly-follows graph,
and mines process trees / Petri nets from the filtered graph.
"""

from .bgraph import (
    BehaviorGraph,
    GraphCycleError,
    build_behavior_graph,
    transitive_reduction,
    undirected_bridges,
)
from .discovery import (
    Operator,
    ProcessTree,
    discover_tree,
    leaf,
    loop,
    parallel,
    seq,
    tau,
    tree_accepts,
    xor,
)
from .export import (
    read_pnml,
    to_dot,
    to_pnml,
    tree_to_text,
)
from .logio import (
    LogFormatError,
    LogSchemaError,
    LogSyntaxError,
    LogValidationError,
    emit_json,
    load_log,
    parse_compact,
    parse_compact_log,
    parse_json,
)
from .model import (
    ActivityLabel,
    Timestamp,
    UncertainEvent,
    UncertainLog,
    UncertainTrace,
    Violation,
    activity_universe,
    make_event,
    validate,
)
from .oracle import (
    CapExceeded,
    activity_bounds,
    classic_df_count,
    df_bounds,
    enumerate_realizations,
    exhaustive_selection,
    label_sequence,
)
from .petri import PetriNet, Transition, can_replay, is_workflow_net, tree_to_petri
from .udfg import (
    DFGView,
    SliceParams,
    UDFG,
    act_freq_max,
    act_freq_min,
    build_udfg,
    cand_max,
    cand_min,
    df_freq_max,
    df_freq_min,
    max_disjoint_pairs,
    mining_view,
    slice_udfg,
)

__version__ = "0.1.0"

__all__ = [
    "ActivityLabel",
    "BehaviorGraph",
    "CapExceeded",
    "DFGView",
    "GraphCycleError",
    "LogFormatError",
    "LogSchemaError",
    "LogSyntaxError",
    "LogValidationError",
    "Operator",
    "PetriNet",
    "ProcessTree",
    "SliceParams",
    "Timestamp",
    "Transition",
    "UDFG",
    "UncertainEvent",
    "UncertainLog",
    "UncertainTrace",
    "Violation",
    "act_freq_max",
    "act_freq_min",
    "activity_bounds",
    "activity_universe",
    "build_behavior_graph",
    "build_udfg",
    "can_replay",
    "cand_max",
    "cand_min",
    "classic_df_count",
    "df_bounds",
    "df_freq_max",
    "df_freq_min",
    "discover_tree",
    "emit_json",
    "enumerate_realizations",
    "exhaustive_selection",
    "is_workflow_net",
    "label_sequence",
    "leaf",
    "load_log",
    "loop",
    "make_event",
    "max_disjoint_pairs",
    "mining_view",
    "parallel",
    "parse_compact",
    "parse_compact_log",
    "parse_json",
    "read_pnml",
    "seq",
    "slice_udfg",
    "tau",
    "to_dot",
    "to_pnml",
    "transitive_reduction",
    "tree_accepts",
    "tree_to_petri",
    "tree_to_text",
    "undirected_bridges",
    "validate",
    "xor",
]
