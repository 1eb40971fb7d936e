use std::collections::HashMap;

use crate::error::{expect_kind, Error, Result};
use crate::machine::{Config, MachineDesc, MachineKind, Move, RuleTable, StateId, Symbol};
use crate::CycQ8;

use super::superposition::Superposition;
use super::wellformed::{check_wellformed_local, WellFormedReport};

/// The global step operator of a QTM and its adjoint.
///
/// Running terms expand through their rule row. Halted terms keep
/// `(h, q, x, T)` and their amplitude; only the hidden `age` counter ticks,
/// which keeps the operator injective on halted terms so that the adjoint
/// undoes it exactly.
pub struct Evolution<'m> {
    machine: &'m MachineDesc,
    rules: &'m RuleTable<CycQ8>,
    /// `(next, write, move)` to the sources that produce it, with conjugated
    /// amplitudes.
    backward: HashMap<(StateId, Symbol, Move), Vec<(StateId, Symbol, CycQ8)>>,
    report: WellFormedReport,
}

impl<'m> Evolution<'m> {
    pub fn new(m: &'m MachineDesc) -> Result<Self> {
        expect_kind(m.kind(), MachineKind::Qtm)?;
        let rules = m.qtm_rules().expect("kind checked");
        let mut backward: HashMap<_, Vec<_>> = HashMap::new();
        for (&(q, s), bs) in rules {
            for b in bs {
                backward.entry((b.next, b.write, b.mv)).or_default().push((q, s, b.weight.conj()));
            }
        }
        let report = check_wellformed_local(m)?;
        Ok(Evolution { machine: m, rules, backward, report })
    }

    pub fn machine(&self) -> &'m MachineDesc {
        self.machine
    }

    pub fn report(&self) -> &WellFormedReport {
        &self.report
    }

    pub fn initial(&self, input: &str) -> Result<Superposition> {
        Ok(Superposition::point(Config::initial(self.machine.start(), crate::machine::Tape::from_input(input)?)))
    }

    pub fn step(&self, psi: &Superposition) -> Result<Superposition> {
        let halt = self.machine.halt();
        let mut out = Vec::with_capacity(psi.len() * 2);
        for (c, a) in psi.terms() {
            if c.halted {
                let mut d = c.clone();
                d.age += 1;
                out.push((d, a.clone()));
                continue;
            }
            let row = self.rules.get(&(c.state, c.read())).ok_or_else(|| {
                Error::Structural(format!(
                    "no rule row for ({}, {})",
                    self.machine.state_name(c.state),
                    c.read()
                ))
            })?;
            for b in row {
                let mut tape = c.tape.clone();
                tape.set(c.head, b.write);
                let d = Config { halted: b.next == halt, state: b.next, head: c.head + b.mv.offset(), tape, age: 0 };
                out.push((d, a * &b.weight));
            }
        }
        Ok(Superposition::from_terms(out))
    }

    /// Applies the adjoint of [`Evolution::step`]. Refused unless the machine
    /// is well-formed, since only then is the adjoint the inverse.
    pub fn step_inverse(&self, psi: &Superposition) -> Result<Superposition> {
        if !self.report.is_well_formed() {
            return Err(Error::NotWellFormed(format!(
                "step_inverse needs a well-formed machine; `{}` violates {}",
                self.machine.name(),
                self.report.summary()
            )));
        }
        let mut out = Vec::with_capacity(psi.len() * 2);
        for (c, a) in psi.terms() {
            if c.halted && c.age > 0 {
                let mut d = c.clone();
                d.age -= 1;
                out.push((d, a.clone()));
                continue;
            }
            for mv in Move::ALL {
                let x = c.head - mv.offset();
                let Some(sources) = self.backward.get(&(c.state, c.tape.get(x), mv)) else {
                    continue;
                };
                for (q, s, amp) in sources {
                    let mut tape = c.tape.clone();
                    tape.set(x, *s);
                    let d = Config { halted: false, state: *q, head: x, tape, age: 0 };
                    out.push((d, amp * a));
                }
            }
        }
        Ok(Superposition::from_terms(out))
    }

    pub fn step_n(&self, psi: &Superposition, n: u64) -> Result<Superposition> {
        let mut cur = psi.clone();
        for _ in 0..n {
            cur = self.step(&cur)?;
        }
        Ok(cur)
    }

    pub fn step_inverse_n(&self, psi: &Superposition, n: u64) -> Result<Superposition> {
        let mut cur = psi.clone();
        for _ in 0..n {
            cur = self.step_inverse(&cur)?;
        }
        Ok(cur)
    }
}

/// One application of the step operator.
pub fn step(m: &MachineDesc, psi: &Superposition) -> Result<Superposition> {
    Evolution::new(m)?.step(psi)
}

/// One application of the adjoint step operator; refused for machines that
/// are not well-formed.
pub fn step_inverse(m: &MachineDesc, psi: &Superposition) -> Result<Superposition> {
    Evolution::new(m)?.step_inverse(psi)
}
