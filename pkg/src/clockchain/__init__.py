"""Encode small quantum circuits into a translationally invariant qudit
chain and decide their output with a single simulated energy measurement.

The pipeline: parse a circuit, compile it onto the chain's program and data
bands, walk the execution marker to get the two effective clock lengths,
and read the answer off the spectral measure of the chain Hamiltonian at
the initial configuration, which splits into two line-graph measures whose
supports a coprime clock pair keeps a known gap apart.
"""

from .circuits import (
    Circuit,
    CircuitError,
    Gate,
    Layer,
    ParseError,
    acceptance_probability,
    parse_circuit,
    simulate,
)
from .compiler import (
    CompiledChain,
    CompilerError,
    band_dump,
    decode_program,
    encode,
    pad_for_coprimality,
)
from .engine import (
    EngineError,
    IllFormedError,
    OrbitResult,
    QcaState,
    initial_state,
    step_backward,
    step_forward,
    trace_orbits,
    validate_wellformed,
)
from .measure import (
    ComplianceReport,
    MeasurementError,
    MeasurementModel,
    compliance_report,
    decide,
    decision_statistics,
)
from .oracle import OracleError, build_restricted, induced_measure, verify_predicted_measure
from .spectral import (
    AtomicMeasure,
    DecisionRegions,
    SpectralError,
    decision_partition,
    exact_min_gap,
    line_graph_spectrum,
    predicted_measure,
    spectral_gap,
    tv_distance,
)

__all__ = [
    "AtomicMeasure",
    "Circuit",
    "CircuitError",
    "CompiledChain",
    "CompilerError",
    "ComplianceReport",
    "DecisionRegions",
    "EngineError",
    "Gate",
    "IllFormedError",
    "Layer",
    "MeasurementError",
    "MeasurementModel",
    "OracleError",
    "OrbitResult",
    "ParseError",
    "QcaState",
    "SpectralError",
    "acceptance_probability",
    "band_dump",
    "build_restricted",
    "compliance_report",
    "decide",
    "decision_partition",
    "decision_statistics",
    "decode_program",
    "encode",
    "exact_min_gap",
    "induced_measure",
    "initial_state",
    "line_graph_spectrum",
    "pad_for_coprimality",
    "parse_circuit",
    "predicted_measure",
    "simulate",
    "spectral_gap",
    "step_backward",
    "step_forward",
    "trace_orbits",
    "tv_distance",
    "validate_wellformed",
    "verify_predicted_measure",
]

__version__ = "0.1.0"
