//! Plant simulation, excitation, diagnostics and the Monte Carlo harness.
//!
//! The simulation layer works in `f64`.

pub mod diagnostics;
pub mod excitation;
pub mod experiment;
pub mod plant;
pub mod trace;

pub use diagnostics::{loglog_slope, median, quantile, ExcitationDiagnostics, ExcitationSnapshot};
pub use excitation::ExcitationSource;
pub use experiment::{
    checkpoints, run_experiment, run_replication, Checkpoint, ControlSettings, Experiment,
    ExperimentReport, RangeAudit, ReferenceSignal, ReplicationSummary, RunSettings,
};
pub use plant::{Plant, PlantOutput, ThresholdSchedule};
pub use trace::{csv_header, CsvTraceWriter, MemorySink, NullSink, RecordSink, StepRecord};
