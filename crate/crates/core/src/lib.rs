//! Waveform development toolkit built around nuclei: algorithmic kernels
//! with optimized, PE-bound implementations (flavors) supplied by a
//! board-support package.
//!
//! The pipeline is `frontend` (parse `.wdl`/`.bsp`) → `mapper` (bind
//! kernels, insert glue) → `scheduler` (static list schedule) →
//! `evaluator` (metrics, constraints, score). `kernels` holds functional
//! reference flavors of the FFT nucleus and its genre.

pub mod evaluator;
pub mod frontend;
pub mod kernels;
pub mod mapper;
pub mod model;
pub mod scheduler;

pub use evaluator::{EvalConfig, EvaluationReport, Evaluator, Metrics, Normalizers, Weights};
pub use mapper::{map_exhaustive, map_greedy, MapFailure, MapOutcome, SearchOptions};
pub use model::{
    cycles_of, validate_graph, Binding, Bsp, ConstraintSpec, CostModel, DataFormat, EdgeKey,
    EdgeSpec, Flavor, FormatKind, GlueTask, KernelKind, KernelSpec, Mapping, NucleusId, PeClass,
    Platform, ProcessingElement, Rounding, Scaling, Schedule, SizeSet, Target, TaskRef,
    WaveformGraph,
};
pub use scheduler::{list_schedule, steady_state_throughput};
