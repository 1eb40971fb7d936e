//! Exact evolution of quantum Turing machines.

mod evolution;
mod measure;
mod superposition;
mod wellformed;

pub use evolution::{step, step_inverse, Evolution};
pub use measure::{
    halting_probability, measure_halt, read_output_distribution, run, HaltMeasurement, MeasurementSchedule,
    OutcomeDist,
};
pub use superposition::{fidelity, Superposition};
pub use wellformed::{check_unitary_window, check_wellformed_local, Condition, Violation, WellFormedReport};

#[cfg(test)]
mod tests;
