use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::classical::{ClassicalDist, ClassicalOutcome, Status};
use crate::error::{Error, Result};
use crate::machine::Tape;
use crate::quantum::OutcomeDist;
use crate::{Rat, RealQ2};

/// A finite distribution with exact probabilities.
pub type Dist<K> = BTreeMap<K, RealQ2>;

/// What an observer can tell apart at the end of a bounded run.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Observed {
    Halted(Tape),
    NotHalted,
}

impl fmt::Display for Observed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observed::Halted(t) => write!(f, "halted:{t}"),
            Observed::NotHalted => f.write_str("not-halted"),
        }
    }
}

pub fn from_classical_outcome(o: &ClassicalOutcome) -> Dist<Observed> {
    let key = match o.status {
        Status::Halted => Observed::Halted(o.tape.clone()),
        Status::Running => Observed::NotHalted,
    };
    Dist::from([(key, RealQ2::one())])
}

pub fn from_classical_dist(d: &ClassicalDist) -> Dist<Observed> {
    let mut out = Dist::new();
    for ((s, t), p) in &d.dist {
        let key = match s {
            Status::Halted => Observed::Halted(t.clone()),
            Status::Running => Observed::NotHalted,
        };
        add(&mut out, key, &RealQ2::from(p.clone()));
    }
    out
}

pub fn from_outcome_dist(d: &OutcomeDist) -> Dist<Observed> {
    let mut out: Dist<Observed> = d.outputs().into_iter().map(|(t, p)| (Observed::Halted(t), p)).collect();
    if !d.residual.is_zero() {
        add(&mut out, Observed::NotHalted, &d.residual);
    }
    out
}

fn add<K: Ord>(d: &mut Dist<K>, k: K, p: &RealQ2) {
    let e = d.entry(k).or_insert_with(RealQ2::zero);
    *e = &*e + p;
}

fn check_normalized<K>(d: &Dist<K>, which: &str) -> Result<()> {
    let total: RealQ2 = d.values().sum();
    if !total.is_one() {
        return Err(Error::Precondition(format!("distribution {which} sums to {total}, not 1")));
    }
    if d.values().any(RealQ2::is_negative) {
        return Err(Error::Precondition(format!("distribution {which} has a negative entry")));
    }
    Ok(())
}

/// `½ Σ_x |P(x) − Q(x)|` over the union of the supports.
pub fn tv_distance<K: Ord>(p: &Dist<K>, q: &Dist<K>) -> Result<RealQ2> {
    check_normalized(p, "P")?;
    check_normalized(q, "Q")?;
    let zero = RealQ2::zero();
    let mut sum = RealQ2::zero();
    for (k, a) in p {
        sum = sum + (a - q.get(k).unwrap_or(&zero)).abs();
    }
    for (k, b) in q {
        if !p.contains_key(k) {
            sum = sum + b.abs();
        }
    }
    Ok(sum * RealQ2::from(Rat::new(1.into(), 2.into())))
}

/// Exact equality of two distributions; zero entries are ignored.
pub fn distributions_equal<K: Ord>(p: &Dist<K>, q: &Dist<K>) -> Result<bool> {
    check_normalized(p, "P")?;
    check_normalized(q, "Q")?;
    let nz = |d: &Dist<K>| d.iter().filter(|(_, v)| !v.is_zero()).count();
    Ok(nz(p) == nz(q) && p.iter().filter(|(_, v)| !v.is_zero()).all(|(k, v)| q.get(k) == Some(v)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimAccuracyReport {
    pub tv: RealQ2,
    pub epsilon: Rat,
    pub within_budget: bool,
}

pub fn accuracy<K: Ord>(p: &Dist<K>, q: &Dist<K>, epsilon: &Rat) -> Result<SimAccuracyReport> {
    let tv = tv_distance(p, q)?;
    let within_budget = tv <= RealQ2::from(epsilon.clone());
    Ok(SimAccuracyReport { tv, epsilon: epsilon.clone(), within_budget })
}
