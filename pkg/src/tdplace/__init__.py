"""Timing-driven analytical global placement with pin-to-pin attraction."""

from .errors import (
    CycleError,
    EndpointError,
    GenerationError,
    GraphError,
    MismatchError,
    NonFiniteError,
    ParseError,
    TDPlaceError,
    ValidationError,
)
from .netlist import (
    Design,
    DesignConstraints,
    Netlist,
    TimingGraph,
    build_timing_graph,
    design_from_dict,
    load_design,
    save_design,
)
from .sta import TimingAnnotation, compute_slacks, net_delay, propagate_arrival, propagate_required, run_sta, tns_wns
from .paths import (
    CriticalPath,
    ExtractionReport,
    collect_pin_pairs,
    k_worst_paths_to,
    report_timing,
    report_timing_endpoint,
)
from .objectives import (
    BinGrid,
    PinPairWeights,
    apply_net_weights,
    density_penalty,
    pin_pair_loss,
    update_pair_weights,
    wa_wirelength,
)
from .placer import MetricTrace, OptimizerConfig, PlacementResult, PlacementState, objective_and_gradient, run_placement
from .generator import GeneratorSpec, generate_synthetic
from .compare import CompareReport, cmd_compare

__version__ = "0.1.0"
