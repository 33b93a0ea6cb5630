//! Combinatorial dynamics engine for gene regulatory network switching models.
//!
//! The pipeline, end to end:
//!
//! 1. [`network`] parses a regulatory network description (signed directed
//!    graph with product-of-sums interaction structure) and fixes the
//!    canonical out-edge ordering that threshold labels depend on.
//! 2. [`paramgraph`] enumerates, per node, every realizable combination of a
//!    logic parameter (monotone band assignment for the node's inputs) and an
//!    order parameter (ascending order of its output thresholds), builds the
//!    per-node factor graphs, and combines them into the mixed-radix
//!    parameter graph covering all of parameter space.
//! 3. [`dynamics`] computes, for one parameter-graph node, the domain
//!    decomposition of phase space, the state transition graph with flow
//!    directions and extremum edge events, and its condensation into an
//!    annotated Morse graph (FP / FC / PC, stability).
//! 4. [`timeseries`] ingests normalized expression time series, extracts
//!    noise-robust extremal intervals, and assembles the pattern diagram
//!    (partial order of extremum events).
//! 5. [`patternmatch`] decides whether a pattern diagram is realized by a
//!    cyclic or open walk inside a Morse set.
//! 6. [`phenotypes`] runs the cycling / fixed-point phenotype queries over
//!    shards of the parameter graph, persists match records, and computes
//!    remainder-parameter intersection summaries.
//! 7. [`hillsim`] samples real-valued parameters from a parameter-graph
//!    region and integrates the corresponding Hill ODE model to confirm the
//!    predicted extrema orderings.
//!
//! Everything is deterministic given inputs and seeds; the heavy sweep
//! operations are pure functions of `(network, parameter index)` and shard
//! cleanly across workers.

pub mod dot;
pub mod dynamics;
pub mod error;
pub mod hillsim;
pub mod network;
pub mod paramgraph;
pub mod patternmatch;
pub mod phenotypes;
pub mod timeseries;

pub use dynamics::{build_stg, morse_graph, stable_fixed_points, Annotation, MorseGraph, Stg};
pub use error::{Error, Result};
pub use hillsim::{
    extrema_order, sample_initial, sample_region, simulate, verify_witness, RealParameterization,
    Trajectory,
};
pub use network::{node_state_count, parse_network, RegulatoryNetwork, Sign};
pub use paramgraph::{
    check_realizable, clb2_restriction_sets, enumerate_factor_parameters, EnumerationGuards,
    FactorGraph, FactorParameter, LogicParameter, OrderParameter, ParameterGraph,
    RestrictionLabel,
};
pub use patternmatch::{label_events, match_cycle, match_path, EventLabeledSubgraph, MatchResult};
pub use phenotypes::{
    coexistence_query, merge_shards, mpg_intersect, run_sweep, MpgSummary, Permissibility,
    PhenotypeKind, PhenotypeSpec, SweepResult,
};
pub use timeseries::{
    build_pattern_diagram, extremal_intervals, linear_extensions, load_csv, ExtremalInterval,
    ExtremeKind, PatternDiagram, TimeSeries,
};
