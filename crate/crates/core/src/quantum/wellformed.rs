//! Well-formedness of QTM rule tables.
//!
//! Two configurations whose heads are at most two cells apart can step into
//! a common configuration, so orthonormality of the columns of the step
//! operator reduces to four finite families of identities over the rule
//! table:
//!
//! * C1: every row has squared norm 1;
//! * C2: rows of distinct sources are orthogonal (heads at the same cell);
//! * C3: offset-1 cross terms vanish: for sources `σ₁`, `σ₂` and writes
//!   `w₁`, `w₂`, `Σ_p conj a₁(w₁,S,p)·a₂(w₂,L,p) + conj a₁(w₁,R,p)·a₂(w₂,S,p) = 0`;
//! * C4: offset-2 cross terms vanish: `Σ_p conj a₁(w₁,R,p)·a₂(w₂,L,p) = 0`.
//!
//! [`check_unitary_window`] is an independent brute-force check on cyclic
//! tapes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{expect_kind, Error, Result};
use crate::machine::{MachineDesc, MachineKind, Move, Source, StateId, Symbol};
use crate::CycQ8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    C1,
    C2,
    C3,
    C4,
}

impl Condition {
    pub const ALL: [Condition; 4] = [Condition::C1, Condition::C2, Condition::C3, Condition::C4];

    pub fn id(self) -> &'static str {
        match self {
            Condition::C1 => "C1",
            Condition::C2 => "C2",
            Condition::C3 => "C3",
            Condition::C4 => "C4",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Condition::C1 => "row norm is not 1",
            Condition::C2 => "rows of distinct sources are not orthogonal",
            Condition::C3 => "offset-1 cross term does not vanish",
            Condition::C4 => "offset-2 cross term does not vanish",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    /// The witness rule pair; both entries are the same source for C1.
    pub sources: (Source, Source),
    /// Written symbols `(w₁, w₂)` for C3 and C4.
    pub writes: Option<(Symbol, Symbol)>,
    /// `1 − ‖row‖²` for C1, the offending inner product otherwise.
    pub residual: CycQ8,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WellFormedReport {
    pub violations: Vec<Violation>,
}

impl WellFormedReport {
    pub fn is_well_formed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn verdict(&self) -> &'static str {
        if self.is_well_formed() {
            "WELL_FORMED"
        } else {
            "VIOLATION"
        }
    }

    pub fn conditions(&self) -> BTreeSet<Condition> {
        self.violations.iter().map(|v| v.condition).collect()
    }

    /// e.g. `C1, C3` or `nothing`.
    pub fn summary(&self) -> String {
        let c: Vec<&str> = self.conditions().into_iter().map(Condition::id).collect();
        if c.is_empty() {
            "nothing".into()
        } else {
            c.join(", ")
        }
    }
}

type Row = HashMap<(Symbol, Move, StateId), CycQ8>;

fn cross(r1: &Row, r2: &Row, pairs: &[(Move, Move)], w1: Symbol, w2: Symbol, states: &[StateId]) -> CycQ8 {
    let mut acc = CycQ8::zero();
    for &(m1, m2) in pairs {
        for &p in states {
            if let (Some(a1), Some(a2)) = (r1.get(&(w1, m1, p)), r2.get(&(w2, m2, p))) {
                acc = acc + a1.inner(a2);
            }
        }
    }
    acc
}

pub fn check_wellformed_local(m: &MachineDesc) -> Result<WellFormedReport> {
    expect_kind(m.kind(), MachineKind::Qtm)?;
    let rules = m.qtm_rules().expect("kind checked");
    let states: Vec<StateId> = (0..m.states().len() as u32).map(StateId).collect();
    let rows: BTreeMap<Source, Row> = rules
        .iter()
        .map(|(k, bs)| (*k, bs.iter().map(|b| (b.target(), b.weight.clone())).collect()))
        .collect();
    let mut violations = Vec::new();

    for (src, row) in &rows {
        let n: crate::RealQ2 = row.values().map(CycQ8::norm_sq).sum();
        let residual = CycQ8::one() - n.to_cyc();
        if !residual.is_zero() {
            violations.push(Violation { condition: Condition::C1, sources: (*src, *src), writes: None, residual });
        }
    }

    let keys: Vec<Source> = rows.keys().copied().collect();
    for (i, s1) in keys.iter().enumerate() {
        for s2 in &keys[i + 1..] {
            let (r1, r2) = (&rows[s1], &rows[s2]);
            let mut acc = CycQ8::zero();
            for (t, a1) in r1 {
                if let Some(a2) = r2.get(t) {
                    acc = acc + a1.inner(a2);
                }
            }
            if !acc.is_zero() {
                violations.push(Violation { condition: Condition::C2, sources: (*s1, *s2), writes: None, residual: acc });
            }
        }
    }

    let offset1 = [(Move::Stay, Move::Left), (Move::Right, Move::Stay)];
    let offset2 = [(Move::Right, Move::Left)];
    for (cond, pairs) in [(Condition::C3, &offset1[..]), (Condition::C4, &offset2[..])] {
        for s1 in &keys {
            for s2 in &keys {
                for w1 in Symbol::ALL {
                    for w2 in Symbol::ALL {
                        let acc = cross(&rows[s1], &rows[s2], pairs, w1, w2, &states);
                        if !acc.is_zero() {
                            violations.push(Violation {
                                condition: cond,
                                sources: (*s1, *s2),
                                writes: Some((w1, w2)),
                                residual: acc,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(WellFormedReport { violations })
}

fn symbol_digit(s: Symbol) -> usize {
    match s {
        Symbol::Zero => 0,
        Symbol::One => 1,
        Symbol::Blank => 2,
    }
}

/// Builds the step matrix restricted to running configurations on a cyclic
/// tape of `tape_len` cells and checks exactly that its columns are
/// orthonormal (`V†V = I`).
///
/// The target space also contains halted configurations, which the step
/// only enters, so the restriction is an isometry rather than a square
/// unitary. Short tapes alias head offsets (on two cells, offsets 0 and 2
/// coincide), so some violations only show up from three cells on.
pub fn check_unitary_window(m: &MachineDesc, tape_len: usize, state_cap: usize) -> Result<bool> {
    expect_kind(m.kind(), MachineKind::Qtm)?;
    if !(2..=8).contains(&tape_len) {
        return Err(Error::Precondition(format!("window length {tape_len} is outside 2..8")));
    }
    let rules = m.qtm_rules().expect("kind checked");
    let l = tape_len;
    let tapes = 3usize.pow(l as u32);
    let n_states = m.states().len();
    let total = n_states * l * tapes;
    if total > state_cap {
        return Err(Error::Resource { what: "window configuration space", bound: state_cap });
    }
    let pow3: Vec<usize> = (0..l).map(|i| 3usize.pow(i as u32)).collect();
    let running: Vec<StateId> = m.running_states().collect();

    // row index -> column -> entry
    let mut matrix: HashMap<usize, BTreeMap<usize, CycQ8>> = HashMap::new();
    let mut col = 0usize;
    for &q in &running {
        for x in 0..l {
            for t in 0..tapes {
                let read = Symbol::ALL[(t / pow3[x]) % 3];
                let row = rules
                    .get(&(q, read))
                    .ok_or_else(|| Error::Structural(format!("no rule row for ({}, {read})", m.state_name(q))))?;
                for b in row {
                    let t2 = t - symbol_digit(read) * pow3[x] + symbol_digit(b.write) * pow3[x];
                    let x2 = (x as i64 + b.mv.offset()).rem_euclid(l as i64) as usize;
                    let r = (b.next.index() * l + x2) * tapes + t2;
                    let e = matrix.entry(r).or_default().entry(col).or_insert_with(CycQ8::zero);
                    *e = &*e + &b.weight;
                }
                col += 1;
            }
        }
    }
    let columns = col;

    let mut gram: HashMap<(usize, usize), CycQ8> = HashMap::new();
    for entries in matrix.values() {
        let es: Vec<(&usize, &CycQ8)> = entries.iter().filter(|(_, a)| !a.is_zero()).collect();
        for (i, (c1, a1)) in es.iter().enumerate() {
            for (c2, a2) in &es[i..] {
                let g = gram.entry((**c1, **c2)).or_insert_with(CycQ8::zero);
                *g = &*g + &a1.inner(a2);
            }
        }
    }
    let one = CycQ8::one();
    for c in 0..columns {
        if gram.get(&(c, c)) != Some(&one) {
            return Ok(false);
        }
    }
    Ok(gram.iter().all(|(&(a, b), g)| a == b || g.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::parse_machine;

    pub(crate) const H1: &str = "kind qtm\nname h1\nstates q0 qH\nhalt qH\n\
        rule q0 _ -> (qH, 0, S, 1/r2) + (qH, 1, S, 1/r2)\n\
        rule q0 0 -> (qH, 0, S, 1/r2) + (qH, 1, S, -1/r2)\n\
        rule q0 1 -> (qH, _, S, 1)\n";

    fn qtm(src: &str) -> MachineDesc {
        parse_machine(src).unwrap()
    }

    #[test]
    fn h1_is_well_formed() {
        let m = qtm(H1);
        assert!(check_wellformed_local(&m).unwrap().is_well_formed());
        for l in 2..=5 {
            assert!(check_unitary_window(&m, l, 100_000).unwrap());
        }
    }

    #[test]
    fn half_half_row_violates_c1() {
        let m = qtm("kind qtm\nname bad\nstates q0 qH\nhalt qH\n\
            rule q0 _ -> (qH, 0, S, 1/2) + (qH, 1, S, 1/2)\n\
            rule q0 0 -> (qH, 0, S, 1/2) + (qH, 1, S, -1/2)\n\
            rule q0 1 -> (qH, _, S, 1)\n");
        let r = check_wellformed_local(&m).unwrap();
        assert_eq!(r.verdict(), "VIOLATION");
        let c1: Vec<_> = r.violations.iter().filter(|v| v.condition == Condition::C1).collect();
        assert_eq!(c1.len(), 2);
        assert_eq!(c1[0].residual, crate::parse_amplitude("1/2").unwrap());
        assert!(!check_unitary_window(&m, 3, 100_000).unwrap());
    }

    #[test]
    fn permutation_is_well_formed() {
        let m = qtm("kind qtm\nname flip\nstates q0 qH\nhalt qH\n\
            rule q0 0 -> (q0, 1, R, 1)\nrule q0 1 -> (q0, 0, R, 1)\nrule q0 _ -> (qH, _, S, 1)\n");
        assert!(check_wellformed_local(&m).unwrap().is_well_formed());
        assert!(check_unitary_window(&m, 4, 100_000).unwrap());
    }

    #[test]
    fn do_nothing_is_well_formed() {
        let m = qtm("kind qtm\nname idle\nstates q0 qA qH\nhalt qH\n\
            rule q0 0 -> (qA, 0, S, 1)\nrule q0 1 -> (qA, 1, S, 1)\nrule q0 _ -> (qA, _, S, 1)\n\
            rule qA 0 -> (qH, 0, S, 1)\nrule qA 1 -> (qH, 1, S, 1)\nrule qA _ -> (qH, _, S, 1)\n");
        assert!(check_wellformed_local(&m).unwrap().is_well_formed());
        assert!(check_unitary_window(&m, 3, 100_000).unwrap());
    }

    #[test]
    fn mixed_moves_into_one_state_violate_c3() {
        let m = qtm("kind qtm\nname mix\nstates q0 qH\nhalt qH\n\
            rule q0 0 -> (q0, 0, R, 1)\nrule q0 1 -> (q0, 1, S, 1)\nrule q0 _ -> (qH, _, S, 1)\n");
        let r = check_wellformed_local(&m).unwrap();
        assert!(r.conditions().contains(&Condition::C3), "{r:?}");
        assert!(!check_unitary_window(&m, 3, 100_000).unwrap());
    }

    #[test]
    fn two_cell_window_hides_offset_two() {
        // `p` is entered moving right after writing 0 and moving left after
        // writing 1. The colliding pair needs the heads two cells apart,
        // which a two-cell ring cannot tell from the same cell.
        let m = qtm("kind qtm\nname alias\nstates a p qH\nhalt qH\n\
            rule a 0 -> (p, 0, R, 1)\nrule a 1 -> (p, 1, L, 1)\nrule a _ -> (qH, _, S, 1)\n\
            rule p 0 -> (qH, 0, S, 1)\nrule p 1 -> (qH, 1, S, 1)\nrule p _ -> (a, _, S, 1)\n");
        let r = check_wellformed_local(&m).unwrap();
        assert_eq!(r.summary(), "C4");
        assert!(check_unitary_window(&m, 2, 100_000).unwrap());
        assert!(!check_unitary_window(&m, 3, 100_000).unwrap());
    }

    #[test]
    fn window_bounds() {
        let m = qtm(H1);
        assert!(matches!(check_unitary_window(&m, 1, 100), Err(Error::Precondition(_))));
        assert!(matches!(check_unitary_window(&m, 5, 100), Err(Error::Resource { .. })));
    }
}
