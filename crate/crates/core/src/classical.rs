//! Deterministic and probabilistic machines.
//!
//! A missing rule means the machine enters the halting state immediately,
//! without counting a step. Halted configurations never move again.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{expect_kind, Error, Result};
use crate::machine::{Branch, Config, MachineDesc, MachineKind, Move, RuleTable, Rules, StateId, Symbol, Tape};
use crate::{CycQ8, Rat};

/// Default bound on the number of distinct configurations held at once.
pub const DEFAULT_MAX_SUPPORT: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Halted,
    Running,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Halted => "halted",
            Status::Running => "running",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalOutcome {
    pub status: Status,
    pub tape: Tape,
    pub steps: u64,
    pub state: StateId,
    pub head: i64,
}

/// Exact distribution over `(status, tape)` after `horizon` steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalDist {
    pub dist: BTreeMap<(Status, Tape), Rat>,
    pub horizon: u64,
    pub peak_support: usize,
}

impl ClassicalDist {
    pub fn halted_mass(&self) -> Rat {
        self.dist.iter().filter(|((s, _), _)| *s == Status::Halted).map(|(_, p)| p.clone()).sum()
    }
}

fn initial(m: &MachineDesc, input: &str) -> Result<Config> {
    Ok(Config::initial(m.start(), Tape::from_input(input)?))
}

/// Moves `c` into the halting state if it has no applicable rule.
fn settle<W>(m: &MachineDesc, rules: &RuleTable<W>, c: &mut Config) {
    if c.state != m.halt() && !rules.contains_key(&(c.state, c.read())) {
        c.state = m.halt();
    }
    c.halted = c.state == m.halt();
}

fn apply<W>(c: &Config, b: &Branch<W>) -> Config {
    let mut next = c.clone();
    next.tape.set(c.head, b.write);
    next.head += b.mv.offset();
    next.state = b.next;
    next
}

fn outcome(m: &MachineDesc, c: Config, steps: u64) -> ClassicalOutcome {
    let status = if c.state == m.halt() { Status::Halted } else { Status::Running };
    ClassicalOutcome { status, tape: c.tape, steps, state: c.state, head: c.head }
}

pub fn tm_run(m: &MachineDesc, input: &str, max_steps: u64) -> Result<ClassicalOutcome> {
    expect_kind(m.kind(), MachineKind::Tm)?;
    let rules = m.tm_rules().expect("kind checked");
    let mut c = initial(m, input)?;
    let mut steps = 0;
    settle(m, rules, &mut c);
    while !c.halted && steps < max_steps {
        let b = &rules[&(c.state, c.read())][0];
        c = apply(&c, b);
        steps += 1;
        settle(m, rules, &mut c);
    }
    Ok(outcome(m, c, steps))
}

pub fn ptm_evolve_exact(m: &MachineDesc, input: &str, horizon: u64, max_support: usize) -> Result<ClassicalDist> {
    expect_kind(m.kind(), MachineKind::Ptm)?;
    let rules = m.ptm_rules().expect("kind checked");
    let mut c0 = initial(m, input)?;
    settle(m, rules, &mut c0);
    let mut cur: BTreeMap<Config, Rat> = BTreeMap::from([(c0, Rat::one())]);
    let mut peak = 1;
    for _ in 0..horizon {
        if cur.keys().all(|c| c.halted) {
            break;
        }
        let mut next: BTreeMap<Config, Rat> = BTreeMap::new();
        for (c, p) in cur {
            if c.halted {
                *next.entry(c).or_insert_with(Rat::zero) += p;
                continue;
            }
            for b in &rules[&(c.state, c.read())] {
                let mut d = apply(&c, b);
                settle(m, rules, &mut d);
                *next.entry(d).or_insert_with(Rat::zero) += &p * &b.weight;
            }
            if next.len() > max_support {
                return Err(Error::Resource { what: "distribution support", bound: max_support });
            }
        }
        peak = peak.max(next.len());
        cur = next;
    }
    let mut dist: BTreeMap<(Status, Tape), Rat> = BTreeMap::new();
    for (c, p) in cur {
        let s = if c.halted { Status::Halted } else { Status::Running };
        *dist.entry((s, c.tape)).or_insert_with(Rat::zero) += p;
    }
    Ok(ClassicalDist { dist, horizon, peak_support: peak })
}

/// The output whose halted mass within the horizon strictly exceeds
/// `threshold`, if any.
pub fn ptm_decide(
    m: &MachineDesc,
    input: &str,
    horizon: u64,
    threshold: &Rat,
    max_support: usize,
) -> Result<Option<Tape>> {
    if *threshold <= Rat::new(1.into(), 2.into()) {
        return Err(Error::Precondition(format!("threshold {threshold} must exceed 1/2")));
    }
    let d = ptm_evolve_exact(m, input, horizon, max_support)?;
    Ok(d
        .dist
        .into_iter()
        .find(|((s, _), p)| *s == Status::Halted && p > threshold)
        .map(|((_, t), _)| t))
}

/// One trajectory drawn with ChaCha8 seeded by `seed`. Branches are chosen by
/// comparing a uniform `f64` in `[0, 1)` against the running sum of the branch
/// probabilities in canonical branch order.
pub fn ptm_sample(m: &MachineDesc, input: &str, max_steps: u64, seed: u64) -> Result<ClassicalOutcome> {
    expect_kind(m.kind(), MachineKind::Ptm)?;
    let rules = m.ptm_rules().expect("kind checked");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = initial(m, input)?;
    let mut steps = 0;
    settle(m, rules, &mut c);
    while !c.halted && steps < max_steps {
        let bs = &rules[&(c.state, c.read())];
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = bs.last().expect("nonempty rule");
        for b in bs {
            acc += crate::report::rat_to_f64(&b.weight);
            if u < acc {
                chosen = b;
                break;
            }
        }
        c = apply(&c, chosen);
        steps += 1;
        settle(m, rules, &mut c);
    }
    Ok(outcome(m, c, steps))
}

/// Embeds a TM as a PTM whose branches all have probability 1.
pub fn lift_tm_to_ptm(m: &MachineDesc) -> Result<MachineDesc> {
    expect_kind(m.kind(), MachineKind::Tm)?;
    let t = m.tm_rules().expect("kind checked");
    let lifted = t
        .iter()
        .map(|(k, bs)| (*k, bs.iter().map(|b| Branch::new(b.next, b.write, b.mv, Rat::one())).collect()))
        .collect();
    Ok(m.with_rules(Rules::Ptm(lifted))?.renamed(format!("{} (ptm)", m.name())))
}

/// Embeds a TM as a QTM with amplitude-1 branches.
///
/// Missing rules become a step into the halting state that rewrites the read
/// symbol, using the move the existing rules use to enter the halting state
/// (STAY when none does). The result must be well-formed, which holds exactly
/// when the TM is reversible in the local sense; otherwise the lift fails.
pub fn lift_tm_to_qtm(m: &MachineDesc) -> Result<MachineDesc> {
    expect_kind(m.kind(), MachineKind::Tm)?;
    let t = m.tm_rules().expect("kind checked");
    let halt_move = t.values().map(|bs| &bs[0]).find(|b| b.next == m.halt()).map_or(Move::Stay, |b| b.mv);
    let mut table: RuleTable<CycQ8> = RuleTable::new();
    for q in m.running_states() {
        for s in Symbol::ALL {
            let b = match t.get(&(q, s)) {
                Some(bs) => Branch::new(bs[0].next, bs[0].write, bs[0].mv, CycQ8::one()),
                None => Branch::new(m.halt(), s, halt_move, CycQ8::one()),
            };
            table.insert((q, s), vec![b]);
        }
    }
    let lifted = m.with_rules(Rules::Qtm(table))?.renamed(format!("{} (qtm)", m.name()));
    let report = crate::quantum::check_wellformed_local(&lifted)?;
    if !report.is_well_formed() {
        return Err(Error::NotWellFormed(format!(
            "`{}` is not reversible, its quantum lift violates {}",
            m.name(),
            report.summary()
        )));
    }
    Ok(lifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::parse_machine;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    const INCREMENT: &str = "kind tm\nname inc\nstates q0 qH\nhalt qH\n\
                             rule q0 1 -> (q0, 1, R)\nrule q0 _ -> (qH, 1, S)\nrule q0 0 -> (qH, 0, S)\n";
    const COIN: &str = "kind ptm\nname coin\nstates q0 qH\nhalt qH\nrule q0 _ -> (qH, 0, S, 1/2) + (qH, 1, S, 1/2)\n";

    #[test]
    fn increment_on_111() {
        let m = parse_machine(INCREMENT).unwrap();
        let o = tm_run(&m, "111", 100).unwrap();
        assert_eq!(o.status, Status::Halted);
        assert_eq!(o.tape.to_string(), "1111");
        assert_eq!(o.steps, 4);
    }

    #[test]
    fn empty_machine_halts_at_step_zero() {
        let m = parse_machine("kind tm\nname empty\nstates q0 qH\nhalt qH\n").unwrap();
        let o = tm_run(&m, "", 10).unwrap();
        assert_eq!((o.status, o.steps, o.tape.is_blank()), (Status::Halted, 0, true));
        assert_eq!(o.state, m.halt());
    }

    #[test]
    fn oscillator_keeps_running() {
        let m = parse_machine(
            "kind tm\nname osc\nstates q0 q1 qH\nhalt qH\n\
             rule q0 _ -> (q1, _, R)\nrule q1 _ -> (q0, _, L)\n",
        )
        .unwrap();
        let o = tm_run(&m, "", 100).unwrap();
        assert_eq!((o.status, o.steps), (Status::Running, 100));
    }

    #[test]
    fn coin_distribution() {
        let m = parse_machine(COIN).unwrap();
        let d = ptm_evolve_exact(&m, "", 4, DEFAULT_MAX_SUPPORT).unwrap();
        let tape = |s: &str| (Status::Halted, Tape::from_input(s).unwrap());
        assert_eq!(d.dist, BTreeMap::from([(tape("0"), rat(1, 2)), (tape("1"), rat(1, 2))]));
        assert_eq!(ptm_decide(&m, "", 4, &rat(3, 4), DEFAULT_MAX_SUPPORT).unwrap(), None);
        assert!(ptm_decide(&m, "", 4, &rat(1, 2), DEFAULT_MAX_SUPPORT).is_err());
    }

    #[test]
    fn support_bound() {
        let m = parse_machine(
            "kind ptm\nname spread\nstates q0 qH\nhalt qH\nrule q0 _ -> (q0, 0, R, 1/2) + (q0, 1, R, 1/2)\n",
        )
        .unwrap();
        let e = ptm_evolve_exact(&m, "", 20, 1000).unwrap_err();
        assert_eq!(e, Error::Resource { what: "distribution support", bound: 1000 });
        assert!(e.to_string().contains("1000"));
    }

    #[test]
    fn decide_biased() {
        let m = parse_machine(
            "kind ptm\nname b\nstates q0 qH\nhalt qH\nrule q0 _ -> (qH, 0, S, 1/8) + (qH, 1, S, 7/8)\n",
        )
        .unwrap();
        let y = ptm_decide(&m, "", 1, &rat(3, 4), DEFAULT_MAX_SUPPORT).unwrap();
        assert_eq!(y.unwrap().to_string(), "1");
    }

    #[test]
    fn sampling_is_reproducible_and_fair() {
        let m = parse_machine(COIN).unwrap();
        assert_eq!(ptm_sample(&m, "", 5, 9).unwrap(), ptm_sample(&m, "", 5, 9).unwrap());
        let ones = (0..10_000u64).filter(|&s| ptm_sample(&m, "", 5, s).unwrap().tape.to_string() == "1").count();
        assert!((4500..=5500).contains(&ones), "{ones}");
    }

    #[test]
    fn lifts_agree() {
        let m = parse_machine(INCREMENT).unwrap();
        let p = lift_tm_to_ptm(&m).unwrap();
        let d = ptm_evolve_exact(&p, "11", 10, DEFAULT_MAX_SUPPORT).unwrap();
        assert_eq!(d.dist.len(), 1);
        assert_eq!(ptm_sample(&p, "11", 10, 3).unwrap(), tm_run(&m, "11", 10).unwrap());
        assert!(lift_tm_to_qtm(&m).is_ok());
        let w = parse_machine("kind tm\nname w\nstates q0 qH\nhalt qH\nrule q0 _ -> (qH, 1, S)\n").unwrap();
        assert!(matches!(lift_tm_to_qtm(&w), Err(Error::NotWellFormed(_))));
    }
}
