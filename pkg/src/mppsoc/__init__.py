"""Parametric SIMD SoC toolkit.

Configuration model and rule checking, tokenizer-based VHDL template
rewriting, neighbourhood/global network models, and a lock-step array
simulator with the recursive-doubling reduction built in.
"""

from mppsoc.config import (
    WORD_BYTES,
    BadValue,
    ConfigError,
    MemoryGeometry,
    Methodology,
    MissingRequiredKey,
    MpNocKind,
    MppSoCConfig,
    Neighborhood,
    NoNetworkSelected,
    NotDivisible,
    Processor,
    UnknownKey,
    derive_geometry,
    parse_config,
    serialize_config,
)
from mppsoc.errors import MppSocError
from mppsoc.mpnoc import (
    ACU_PORT,
    DEVICE_PORT,
    MpNocMode,
    MpNocNetwork,
    RoutingResult,
    TransferResult,
    build_network,
    route_permutation,
    transfer,
)
from mppsoc.rewrite import (
    GenReport,
    RewriteAction,
    TemplateFile,
    apply_to_file,
    bundled_template_dir,
    generate,
    plan_actions,
    plan_actions_by_file,
    rewrite_line,
    tokenize_line,
)
from mppsoc.rules import RuleViolation, ValidationReport, validate
from mppsoc.simulator import (
    CostModel,
    ReductionReport,
    SimMachine,
    SimProgram,
    SimReport,
    load_program,
    reduce_sum,
    run,
)
from mppsoc.topology import (
    PeId,
    TopologyGraph,
    build_topology,
    route_distance,
)

__all__ = [
    "ACU_PORT",
    "BadValue",
    "ConfigError",
    "CostModel",
    "DEVICE_PORT",
    "GenReport",
    "MemoryGeometry",
    "Methodology",
    "MissingRequiredKey",
    "MpNocKind",
    "MpNocMode",
    "MpNocNetwork",
    "MppSoCConfig",
    "MppSocError",
    "Neighborhood",
    "NoNetworkSelected",
    "NotDivisible",
    "PeId",
    "Processor",
    "ReductionReport",
    "RewriteAction",
    "RoutingResult",
    "RuleViolation",
    "SimMachine",
    "SimProgram",
    "SimReport",
    "TemplateFile",
    "TopologyGraph",
    "TransferResult",
    "UnknownKey",
    "ValidationReport",
    "WORD_BYTES",
    "apply_to_file",
    "build_network",
    "build_topology",
    "bundled_template_dir",
    "derive_geometry",
    "generate",
    "load_program",
    "parse_config",
    "plan_actions",
    "plan_actions_by_file",
    "reduce_sum",
    "rewrite_line",
    "route_distance",
    "route_permutation",
    "run",
    "serialize_config",
    "tokenize_line",
    "transfer",
    "validate",
]
