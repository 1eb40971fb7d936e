//! Cross-engine comparison, universality checks and the hybrid device loop.

mod dist;
mod suhd;
mod universal;

pub use dist::{
    accuracy, distributions_equal, from_classical_dist, from_classical_outcome, from_outcome_dist, tv_distance,
    Dist, Observed, SimAccuracyReport,
};
pub use suhd::{
    conjecture_report, suhd_run, suhd_run_with, ConjectureReport, ConjectureRow, ObservationPolicy,
    ObservationProbe, Observer, Scripted, Signal, SuhdIterationRecord, MAX_BRANCHES,
};
pub use universal::{
    apply_universal, apply_universal_with, binary_input, run_engine, universality_check, universality_check_with,
    Decoder, UniversalityReport, Witness,
};
