//! The hybrid device loop: run the quantum part for `S` steps, signal that
//! it may be observed, then try to reset it by running the inverse
//! evolution for `S` steps.
//!
//! The quantum part is exact, so the slowdown is 1 (`S = T`) and the
//! simulation error is zero; the per-iteration accuracy `ε/T` is still
//! recorded. Reset is never a reload of a saved state: the stored initial
//! state is only used to measure how well the inverse evolution restored it.
//!
//! After an observation the quantum part is a mixture over measurement
//! outcomes, kept as a list of unnormalized branches. The reset fidelity of
//! a mixture is `Σ_b |⟨ψ₀|φ_b⟩|² / (Σ_b ‖φ_b‖² · ‖ψ₀‖²)`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::machine::{decode_machine, MachineDesc, Tape};
use crate::quantum::{measure_halt, read_output_distribution, Evolution, Superposition};
use crate::{Rat, RealQ2};

/// Upper bound on the number of outcome branches kept in the mixture.
pub const MAX_BRANCHES: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObservationPolicy {
    Never,
    Always,
    AtIterations(Vec<u64>),
    Interactive,
}

impl ObservationPolicy {
    pub fn at(iterations: Vec<u64>) -> Result<Self> {
        if iterations.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition(format!("iterations {iterations:?} are not strictly increasing")));
        }
        Ok(ObservationPolicy::AtIterations(iterations))
    }
}

/// What the observer is told when the device signals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signal {
    pub outer_t: u64,
    pub steps: u64,
}

/// Decides, at each signal, whether to measure the halt bit.
pub trait Observer {
    fn observe(&mut self, signal: &Signal) -> bool;
}

/// An observer following a non-interactive policy.
pub struct Scripted(ObservationPolicy);

impl Scripted {
    pub fn new(policy: ObservationPolicy) -> Result<Self> {
        if policy == ObservationPolicy::Interactive {
            return Err(Error::Precondition("the interactive policy needs an observer session".into()));
        }
        Ok(Scripted(policy))
    }
}

impl Observer for Scripted {
    fn observe(&mut self, signal: &Signal) -> bool {
        match &self.0 {
            ObservationPolicy::Never | ObservationPolicy::Interactive => false,
            ObservationPolicy::Always => true,
            ObservationPolicy::AtIterations(ts) => ts.binary_search(&signal.outer_t).is_ok(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuhdIterationRecord {
    pub outer_t: u64,
    pub steps_executed: u64,
    /// `ε/T`, the accuracy the quantum part is asked for.
    pub accuracy: Rat,
    pub observed: bool,
    pub halt_prob_at_signal: RealQ2,
    /// Output read on the halted outcome, when one was observed.
    pub read: Option<BTreeMap<Tape, RealQ2>>,
    pub reset_fidelity: RealQ2,
    pub state_restored: bool,
}

fn total_mass(branches: &[Superposition]) -> RealQ2 {
    branches.iter().map(Superposition::norm_sq).sum()
}

fn mixture_fidelity(init: &Superposition, branches: &[Superposition]) -> RealQ2 {
    let overlap: RealQ2 = branches.iter().map(|b| init.inner(b).norm_sq()).sum();
    let denom = total_mass(branches) * init.norm_sq();
    overlap.checked_div(&denom).expect("mixture keeps positive mass")
}

pub fn suhd_run(
    mbar: &BigUint,
    input: &str,
    epsilon: &Rat,
    policy: ObservationPolicy,
    max_outer_t: u64,
) -> Result<Vec<SuhdIterationRecord>> {
    let m = decode_machine(mbar)?;
    suhd_run_with(&m, input, epsilon, &mut Scripted::new(policy)?, max_outer_t)
}

pub fn suhd_run_with(
    m: &MachineDesc,
    input: &str,
    epsilon: &Rat,
    observer: &mut dyn Observer,
    max_outer_t: u64,
) -> Result<Vec<SuhdIterationRecord>> {
    if !epsilon.is_positive() {
        return Err(Error::Precondition(format!("epsilon {epsilon} must be positive")));
    }
    let ev = Evolution::new(m)?;
    if !ev.report().is_well_formed() {
        return Err(Error::NotWellFormed(format!("`{}` violates {}", m.name(), ev.report().summary())));
    }
    let init = ev.initial(input)?;
    let mut branches = vec![init.clone()];
    let mut records = Vec::new();
    for t in 1..=max_outer_t {
        let accuracy = epsilon / Rat::from_integer(t.into());
        let s = t;
        let mut evolved = Vec::with_capacity(branches.len());
        for b in &branches {
            evolved.push(ev.step_n(b, s)?);
        }
        let total = total_mass(&evolved);
        let halted_mass: RealQ2 = evolved.iter().map(|b| b.split_halted().0.norm_sq().clone()).sum();
        let halt_prob = halted_mass.checked_div(&total).expect("positive mass");

        let observed = observer.observe(&Signal { outer_t: t, steps: s });
        let mut read = None;
        if observed {
            let mut next = Vec::with_capacity(evolved.len() * 2);
            let mut outputs: BTreeMap<Tape, RealQ2> = BTreeMap::new();
            for b in &evolved {
                let meas = measure_halt(b)?;
                if !meas.halted.is_empty() {
                    let w = meas.halted.norm_sq().clone();
                    for (tape, p) in read_output_distribution(&meas.halted)? {
                        let e = outputs.entry(tape).or_insert_with(RealQ2::zero);
                        *e = &*e + &(p * &w);
                    }
                    next.push(meas.halted);
                }
                if !meas.running.is_empty() {
                    next.push(meas.running);
                }
            }
            if next.len() > MAX_BRANCHES {
                return Err(Error::Resource { what: "outcome branches", bound: MAX_BRANCHES });
            }
            if !halted_mass.is_zero() {
                for v in outputs.values_mut() {
                    *v = v.checked_div(&halted_mass).expect("positive");
                }
                read = Some(outputs);
            }
            evolved = next;
        }

        branches = Vec::with_capacity(evolved.len());
        for b in &evolved {
            branches.push(ev.step_inverse_n(b, s)?);
        }
        let fid = mixture_fidelity(&init, &branches);
        let restored = fid.is_one();
        records.push(SuhdIterationRecord {
            outer_t: t,
            steps_executed: s,
            accuracy,
            observed,
            halt_prob_at_signal: halt_prob,
            read,
            reset_fidelity: fid,
            state_restored: restored,
        });
    }
    Ok(records)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservationProbe {
    pub outer_t: u64,
    pub halt_prob: RealQ2,
    pub fidelity: RealQ2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjectureRow {
    pub machine: String,
    /// Every NEVER-policy record restored the state exactly.
    pub reversible_unobserved: bool,
    /// One probe per iteration: observe only there, report the fidelity.
    pub probes: Vec<ObservationProbe>,
    /// Some observation left the reset fidelity below 1.
    pub irreversible_under_observation: bool,
    /// Fidelity dropped below 1 exactly at the probes with `0 < p1 < 1`.
    pub matches_expectation: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjectureReport {
    pub rows: Vec<ConjectureRow>,
}

impl ConjectureReport {
    pub const HEADER: &'static str = "Empirical evidence on finitely many machines and iterations; this is not a proof.";

    pub fn consistent(&self) -> bool {
        self.rows.iter().all(|r| r.reversible_unobserved && r.matches_expectation)
    }
}

/// Probes every machine with NEVER and with a single observation at each
/// iteration `1..=max_outer_t`.
pub fn conjecture_report(
    corpus: &[BigUint],
    input: &str,
    epsilon: &Rat,
    max_outer_t: u64,
) -> Result<ConjectureReport> {
    let mut rows = Vec::new();
    for code in corpus {
        let m = decode_machine(code)?;
        let never = suhd_run_with(&m, input, epsilon, &mut Scripted(ObservationPolicy::Never), max_outer_t)?;
        let reversible_unobserved = never.iter().all(|r| r.state_restored);
        let mut probes = Vec::new();
        let mut matches = true;
        for t in 1..=max_outer_t {
            let recs =
                suhd_run_with(&m, input, epsilon, &mut Scripted(ObservationPolicy::AtIterations(vec![t])), t)?;
            let last = recs.last().expect("t >= 1");
            let p = &last.halt_prob_at_signal;
            let strictly_between = !p.is_zero() && !p.is_one();
            matches &= strictly_between == !last.state_restored;
            probes.push(ObservationProbe {
                outer_t: t,
                halt_prob: p.clone(),
                fidelity: last.reset_fidelity.clone(),
            });
        }
        let irreversible = probes.iter().any(|p| !p.fidelity.is_one());
        rows.push(ConjectureRow {
            machine: m.name().to_string(),
            reversible_unobserved,
            probes,
            irreversible_under_observation: irreversible,
            matches_expectation: matches,
        });
    }
    Ok(ConjectureReport { rows })
}
