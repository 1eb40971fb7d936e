use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::*;
use crate::classical::{tm_run, DEFAULT_MAX_SUPPORT};
use crate::machine::{parse_machine, Config, MachineDesc, StateId, Tape};
use crate::{parse_amplitude, CycQ8, Error, RealQ2};

fn load(src: &str) -> MachineDesc {
    parse_machine(src).unwrap()
}

fn h1() -> MachineDesc {
    load(include_str!("../../corpus/h1.qtm"))
}

fn halfhalt() -> MachineDesc {
    load(include_str!("../../corpus/halfhalt.qtm"))
}

fn amp(s: &str) -> CycQ8 {
    parse_amplitude(s).unwrap()
}

fn real(s: &str) -> RealQ2 {
    amp(s).as_real().unwrap()
}

fn tape(s: &str) -> Tape {
    Tape::parse(s).unwrap()
}

fn halted_at(m: &MachineDesc, head: i64, t: &str) -> Config {
    Config { halted: true, state: m.halt(), head, tape: tape(t), age: 0 }
}

#[test]
fn h1_single_step() {
    let m = h1();
    let ev = Evolution::new(&m).unwrap();
    let psi = ev.step(&ev.initial("").unwrap()).unwrap();
    let expected = Superposition::from_terms([
        (halted_at(&m, 0, "0"), amp("1/r2")),
        (halted_at(&m, 0, "1"), amp("1/r2")),
    ]);
    assert_eq!(psi, expected);
    assert!(psi.norm_sq().is_one());
}

#[test]
fn halted_terms_are_frozen() {
    let m = h1();
    let c = halted_at(&m, 4, "101");
    let psi = Superposition::from_terms([(c.clone(), amp("i"))]);
    let next = step(&m, &psi).unwrap();
    let (d, a) = next.terms().iter().next().unwrap();
    assert_eq!((d.halted, d.state, d.head, &d.tape), (c.halted, c.state, c.head, &c.tape));
    assert_eq!(a, &amp("i"));
    assert_eq!(next.len(), 1);
}

#[test]
fn embedded_increment_tracks_tm() {
    let q = load(include_str!("../../corpus/increment.qtm"));
    let t = load(include_str!("../../corpus/increment.tm"));
    let ev = Evolution::new(&q).unwrap();
    let mut psi = ev.initial("111").unwrap();
    for k in 0..6 {
        let o = tm_run(&t, "111", k).unwrap();
        assert_eq!(psi.len(), 1);
        let (c, a) = psi.terms().iter().next().unwrap();
        assert!(a.is_one());
        assert_eq!((&c.tape, c.head, c.state), (&o.tape, o.head, o.state), "step {k}");
        psi = ev.step(&psi).unwrap();
    }
}

#[test]
fn inverse_undoes_step() {
    let m = h1();
    let ev = Evolution::new(&m).unwrap();
    let init = ev.initial("").unwrap();
    assert_eq!(ev.step_inverse(&ev.step(&init).unwrap()).unwrap(), init);

    let hh = halfhalt();
    let ev = Evolution::new(&hh).unwrap();
    let init = ev.initial("0").unwrap();
    let fwd = ev.step_n(&init, 12).unwrap();
    assert_eq!(ev.step_inverse_n(&fwd, 12).unwrap(), init);
}

#[test]
fn inverse_refused_for_ill_formed() {
    let m = load(include_str!("../../corpus/bad-norm.qtm"));
    let psi = Superposition::point(Config::initial(StateId(0), Tape::blank()));
    assert!(step(&m, &psi).is_ok());
    assert!(matches!(step_inverse(&m, &psi), Err(Error::NotWellFormed(_))));
}

#[test]
fn measurement_examples() {
    let m = h1();
    let ev = Evolution::new(&m).unwrap();
    let init = ev.initial("").unwrap();
    let before = measure_halt(&init).unwrap();
    assert!(before.p1.is_zero());
    let after = measure_halt(&ev.step(&init).unwrap()).unwrap();
    assert!(after.p1.is_one());
    assert!(after.running.is_empty());

    let hh = halfhalt();
    let ev = Evolution::new(&hh).unwrap();
    let psi = ev.step(&ev.initial("").unwrap()).unwrap();
    let meas = measure_halt(&psi).unwrap();
    assert_eq!(meas.p1, real("1/2"));
    assert_eq!(&(meas.halted.norm_sq() + meas.running.norm_sq()), psi.norm_sq());
    assert!(matches!(measure_halt(&Superposition::new()), Err(Error::Structural(_))));
}

#[test]
fn output_distribution_adds_probabilities() {
    let m = h1();
    let psi = Superposition::from_terms([
        (halted_at(&m, 0, "1"), amp("1/r2")),
        (halted_at(&m, 1, "1"), amp("-1/r2")),
    ]);
    let d = read_output_distribution(&psi).unwrap();
    assert_eq!(d, BTreeMap::from([(tape("1"), RealQ2::one())]));

    let running = Superposition::point(Config::initial(StateId(0), Tape::blank()));
    assert!(matches!(read_output_distribution(&running), Err(Error::Precondition(_))));
}

#[test]
fn run_examples() {
    let m = h1();
    let s = MeasurementSchedule::new(vec![1]).unwrap();
    let d = run(&m, "", &s, 1, DEFAULT_MAX_SUPPORT).unwrap();
    let half = real("1/2");
    assert_eq!(d.events, BTreeMap::from([((1, tape("0")), half.clone()), ((1, tape("1")), half)]));
    assert!(d.residual.is_zero());

    let inc = load(include_str!("../../corpus/increment.qtm"));
    let d = run(&inc, "11", &MeasurementSchedule::new(vec![3]).unwrap(), 3, DEFAULT_MAX_SUPPORT).unwrap();
    assert_eq!(d.events, BTreeMap::from([((3, tape("111")), RealQ2::one())]));

    let spin = load(include_str!("../../corpus/spinner.qtm"));
    let d = run(&spin, "1", &MeasurementSchedule::every(20), 20, DEFAULT_MAX_SUPPORT).unwrap();
    assert!(d.events.is_empty());
    assert!(d.residual.is_one());

    assert!(MeasurementSchedule::new(vec![2, 2]).is_err());
    assert!(run(&m, "", &MeasurementSchedule::new(vec![3]).unwrap(), 2, DEFAULT_MAX_SUPPORT).is_err());
}

#[test]
fn halting_probability_examples() {
    assert!(halting_probability(&h1(), "", 1, DEFAULT_MAX_SUPPORT).unwrap().is_one());
    assert_eq!(halting_probability(&halfhalt(), "", 1, DEFAULT_MAX_SUPPORT).unwrap(), real("1/2"));
    let spin = load(include_str!("../../corpus/spinner.qtm"));
    assert!(halting_probability(&spin, "", 30, DEFAULT_MAX_SUPPORT).unwrap().is_zero());
    let walk = load(include_str!("../../corpus/walk-absorb.qtm"));
    let mut last = RealQ2::zero();
    for h in 0..12 {
        let p = halting_probability(&walk, "1", h, DEFAULT_MAX_SUPPORT).unwrap();
        assert!(p >= last);
        last = p;
    }
}

#[test]
fn fidelity_examples() {
    let m = h1();
    let ev = Evolution::new(&m).unwrap();
    let init = ev.initial("").unwrap();
    assert!(fidelity(&init, &init).unwrap().is_one());
    assert!(fidelity(&init, &ev.step(&init).unwrap()).unwrap().is_zero());
    let other = ev.initial("1").unwrap();
    assert!(fidelity(&init, &other).unwrap().is_zero());
    assert!(fidelity(&init, &init.scaled(&amp("3*i"))).unwrap().is_one());
    assert!(fidelity(&init, &Superposition::new()).is_err());
}

#[test]
fn support_bound_is_enforced() {
    let walk = load(include_str!("../../corpus/walk.qtm"));
    let e = run(&walk, "", &MeasurementSchedule::default(), 30, 10).unwrap_err();
    assert_eq!(e, Error::Resource { what: "superposition support", bound: 10 });
}
