use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::machine::{MachineDesc, Tape};
use crate::RealQ2;

use super::evolution::Evolution;
use super::superposition::Superposition;

/// Result of measuring the halt bit. Both parts are left unnormalized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaltMeasurement {
    /// Probability of reading `h = 1`.
    pub p1: RealQ2,
    pub halted: Superposition,
    pub running: Superposition,
}

pub fn measure_halt(psi: &Superposition) -> Result<HaltMeasurement> {
    if psi.is_empty() {
        return Err(Error::Structural("measuring an empty superposition".into()));
    }
    let (halted, running) = psi.split_halted();
    let p1 = halted.norm_sq().checked_div(psi.norm_sq()).expect("nonempty");
    Ok(HaltMeasurement { p1, halted, running })
}

/// Distribution of tape contents in a halted superposition.
///
/// Terms with the same tape but different state, head or age are
/// distinguishable, so their probabilities add (amplitudes do not).
pub fn read_output_distribution(halted: &Superposition) -> Result<BTreeMap<Tape, RealQ2>> {
    if halted.is_empty() {
        return Err(Error::Structural("reading the output of an empty superposition".into()));
    }
    if let Some(c) = halted.terms().keys().find(|c| !c.halted) {
        return Err(Error::Precondition(format!("term in running state {:?} at {}", c.state, c.head)));
    }
    let mut out: BTreeMap<Tape, RealQ2> = BTreeMap::new();
    for (c, a) in halted.terms() {
        let e = out.entry(c.tape.clone()).or_insert_with(RealQ2::zero);
        *e = &*e + &a.norm_sq();
    }
    let total = halted.norm_sq();
    for v in out.values_mut() {
        *v = v.checked_div(total).expect("nonempty");
    }
    Ok(out)
}

/// Strictly increasing step indices at which the halt bit is measured.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MeasurementSchedule {
    steps: Vec<u64>,
}

impl MeasurementSchedule {
    pub fn new(steps: Vec<u64>) -> Result<Self> {
        if steps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition(format!("measurement steps {steps:?} are not strictly increasing")));
        }
        Ok(MeasurementSchedule { steps })
    }

    /// Measure after every step `1..=horizon`.
    pub fn every(horizon: u64) -> Self {
        MeasurementSchedule { steps: (1..=horizon).collect() }
    }

    pub fn steps(&self) -> &[u64] {
        &self.steps
    }

    pub fn contains(&self, step: u64) -> bool {
        self.steps.binary_search(&step).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeDist {
    /// `(halt step, tape)` to probability.
    pub events: BTreeMap<(u64, Tape), RealQ2>,
    /// Mass never observed halted within the horizon.
    pub residual: RealQ2,
    pub horizon: u64,
    pub peak_support: usize,
}

impl OutcomeDist {
    /// Total probability of each output tape, ignoring when it was observed.
    pub fn outputs(&self) -> BTreeMap<Tape, RealQ2> {
        let mut out: BTreeMap<Tape, RealQ2> = BTreeMap::new();
        for ((_, t), p) in &self.events {
            let e = out.entry(t.clone()).or_insert_with(RealQ2::zero);
            *e = &*e + p;
        }
        out
    }

    pub fn halted_mass(&self) -> RealQ2 {
        self.events.values().sum()
    }
}

/// Evolves `|0, q0, 0, input⟩` for `horizon` steps, measuring the halt bit
/// at the scheduled steps.
///
/// A halted reading ends that branch and is recorded with its tape; the
/// running part carries on unnormalized. Because halted terms never move
/// again, the outcome tree only ever has one live branch.
pub fn run(
    m: &MachineDesc,
    input: &str,
    schedule: &MeasurementSchedule,
    horizon: u64,
    max_support: usize,
) -> Result<OutcomeDist> {
    if let Some(&last) = schedule.steps().last() {
        if last > horizon {
            return Err(Error::Precondition(format!("measurement at step {last} is past the horizon {horizon}")));
        }
    }
    let ev = Evolution::new(m)?;
    if !ev.report().is_well_formed() {
        return Err(Error::NotWellFormed(format!("`{}` violates {}", m.name(), ev.report().summary())));
    }
    let mut psi = ev.initial(input)?;
    let total = psi.norm_sq().clone();
    let mut events: BTreeMap<(u64, Tape), RealQ2> = BTreeMap::new();
    let mut peak = psi.len();
    for t in 0..=horizon {
        if t > 0 {
            psi = ev.step(&psi)?;
            peak = peak.max(psi.len());
            if psi.len() > max_support {
                return Err(Error::Resource { what: "superposition support", bound: max_support });
            }
        }
        if schedule.contains(t) {
            let meas = measure_halt(&psi)?;
            if !meas.halted.is_empty() {
                let weight = meas.halted.norm_sq().checked_div(&total).expect("positive");
                for (tape, p) in read_output_distribution(&meas.halted)? {
                    let e = events.entry((t, tape)).or_insert_with(RealQ2::zero);
                    *e = &*e + &(&p * &weight);
                }
            }
            psi = meas.running;
            if psi.is_empty() {
                break;
            }
        }
    }
    let observed: RealQ2 = events.values().sum();
    let residual = RealQ2::one() - observed;
    Ok(OutcomeDist { events, residual, horizon, peak_support: peak })
}

/// Halted mass observed within `horizon` steps when measuring after every
/// step. Non-decreasing in the horizon; no claim is made about the limit.
pub fn halting_probability(m: &MachineDesc, input: &str, horizon: u64, max_support: usize) -> Result<RealQ2> {
    Ok(run(m, input, &MeasurementSchedule::every(horizon), horizon, max_support)?.halted_mass())
}
