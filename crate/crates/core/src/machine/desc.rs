use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::{CycQ8, Rat};

/// Tape alphabet. Cells outside the finite support are [`Symbol::Blank`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Zero,
    One,
    Blank,
}

impl Symbol {
    pub const ALL: [Symbol; 3] = [Symbol::Zero, Symbol::One, Symbol::Blank];

    pub fn as_char(self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Blank => '_',
        }
    }

    pub fn from_char(c: char) -> Option<Symbol> {
        match c {
            '0' => Some(Symbol::Zero),
            '1' => Some(Symbol::One),
            '_' => Some(Symbol::Blank),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Head movement, `|x' − x| ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Move {
    Left,
    Stay,
    Right,
}

impl Move {
    pub const ALL: [Move; 3] = [Move::Left, Move::Stay, Move::Right];

    pub fn offset(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Stay => 0,
            Move::Right => 1,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Move::Left => 'L',
            Move::Stay => 'S',
            Move::Right => 'R',
        }
    }

    pub fn from_char(c: char) -> Option<Move> {
        match c {
            'L' => Some(Move::Left),
            'S' => Some(Move::Stay),
            'R' => Some(Move::Right),
            _ => None,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Index into [`MachineDesc::states`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MachineKind {
    Tm,
    Ptm,
    Qtm,
}

impl MachineKind {
    pub fn keyword(self) -> &'static str {
        match self {
            MachineKind::Tm => "tm",
            MachineKind::Ptm => "ptm",
            MachineKind::Qtm => "qtm",
        }
    }

    pub fn from_keyword(s: &str) -> Option<MachineKind> {
        match s {
            "tm" => Some(MachineKind::Tm),
            "ptm" => Some(MachineKind::Ptm),
            "qtm" => Some(MachineKind::Qtm),
            _ => None,
        }
    }
}

impl fmt::Display for MachineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// One outcome of a rule: write, move, enter `next`, weighted by `weight`
/// (`()` for deterministic rules, a probability, or an amplitude).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Branch<W> {
    pub next: StateId,
    pub write: Symbol,
    pub mv: Move,
    pub weight: W,
}

impl<W> Branch<W> {
    pub fn new(next: StateId, write: Symbol, mv: Move, weight: W) -> Self {
        Branch { next, write, mv, weight }
    }

    /// Canonical sort key `(write, move, next)`.
    pub fn target(&self) -> (Symbol, Move, StateId) {
        (self.write, self.mv, self.next)
    }
}

pub type Source = (StateId, Symbol);

/// Rules keyed by source `(state, symbol)`; iteration order is canonical.
pub type RuleTable<W> = BTreeMap<Source, Vec<Branch<W>>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rules {
    Tm(RuleTable<()>),
    Ptm(RuleTable<Rat>),
    Qtm(RuleTable<CycQ8>),
}

impl Rules {
    pub fn kind(&self) -> MachineKind {
        match self {
            Rules::Tm(_) => MachineKind::Tm,
            Rules::Ptm(_) => MachineKind::Ptm,
            Rules::Qtm(_) => MachineKind::Qtm,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Rules::Tm(t) => t.len(),
            Rules::Ptm(t) => t.len(),
            Rules::Qtm(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn sources(&self) -> Vec<Source> {
        match self {
            Rules::Tm(t) => t.keys().copied().collect(),
            Rules::Ptm(t) => t.keys().copied().collect(),
            Rules::Qtm(t) => t.keys().copied().collect(),
        }
    }

    fn targets(&self) -> Vec<(Source, StateId)> {
        fn collect<W>(t: &RuleTable<W>) -> Vec<(Source, StateId)> {
            t.iter().flat_map(|(s, bs)| bs.iter().map(move |b| (*s, b.next))).collect()
        }
        match self {
            Rules::Tm(t) => collect(t),
            Rules::Ptm(t) => collect(t),
            Rules::Qtm(t) => collect(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error("machine declares no states")]
    NoStates,
    #[error("duplicate state name `{0}`")]
    DuplicateState(String),
    #[error("state index {0} is not declared")]
    UnknownState(u32),
    #[error("start and halt state must differ")]
    StartIsHalt,
    #[error("the halting state `{0}` cannot have a rule (source symbol {1})")]
    HaltHasRule(String, Symbol),
    #[error("rule ({0}, {1}) has no branches")]
    EmptyRule(String, Symbol),
    #[error("deterministic rule ({0}, {1}) must have exactly one branch")]
    NotDeterministic(String, Symbol),
    #[error("rule ({0}, {1}) repeats the branch target ({2}, {3}, {4})")]
    DuplicateBranch(String, Symbol, Symbol, Move, String),
    #[error("rule ({0}, {1}) has probability {2} outside (0, 1]")]
    ProbabilityRange(String, Symbol, Rat),
    #[error("rule ({0}, {1}) has branch probabilities summing to {2}, not 1 (sum != 1)")]
    ProbabilitySum(String, Symbol, Rat),
    #[error("rule ({0}, {1}) has a zero amplitude")]
    ZeroAmplitude(String, Symbol),
    #[error("quantum rule table is not total: no rule for ({0}, {1})")]
    NotTotal(String, Symbol),
}

impl ValidationError {
    /// Rule source the error refers to, when there is one.
    pub fn source_state(&self) -> Option<(&str, Symbol)> {
        use ValidationError::*;
        match self {
            HaltHasRule(s, y)
            | EmptyRule(s, y)
            | NotDeterministic(s, y)
            | DuplicateBranch(s, y, ..)
            | ProbabilityRange(s, y, _)
            | ProbabilitySum(s, y, _)
            | ZeroAmplitude(s, y)
            | NotTotal(s, y) => Some((s.as_str(), *y)),
            _ => None,
        }
    }
}

/// A validated TM, PTM or QTM description.
///
/// Construction through [`MachineDesc::new`] enforces every structural
/// invariant and sorts branches canonically, so two descriptions of the same
/// machine compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineDesc {
    name: String,
    states: Vec<String>,
    start: StateId,
    halt: StateId,
    rules: Rules,
}

impl MachineDesc {
    pub fn new(
        name: impl Into<String>,
        states: Vec<String>,
        start: StateId,
        halt: StateId,
        mut rules: Rules,
    ) -> Result<Self, ValidationError> {
        if states.is_empty() {
            return Err(ValidationError::NoStates);
        }
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(ValidationError::DuplicateState(s.clone()));
            }
        }
        let n = states.len() as u32;
        for id in [start, halt] {
            if id.0 >= n {
                return Err(ValidationError::UnknownState(id.0));
            }
        }
        if start == halt {
            return Err(ValidationError::StartIsHalt);
        }
        for ((q, _), next) in rules.targets() {
            for id in [q, next] {
                if id.0 >= n {
                    return Err(ValidationError::UnknownState(id.0));
                }
            }
        }
        let name_of = |id: StateId| states[id.index()].clone();
        for (q, s) in rules.sources() {
            if q == halt {
                return Err(ValidationError::HaltHasRule(name_of(q), s));
            }
        }

        fn sort_and_dedup<W>(
            t: &mut RuleTable<W>,
            name_of: &dyn Fn(StateId) -> String,
        ) -> Result<(), ValidationError> {
            for ((q, s), bs) in t.iter_mut() {
                if bs.is_empty() {
                    return Err(ValidationError::EmptyRule(name_of(*q), *s));
                }
                bs.sort_by_key(Branch::target);
                for w in bs.windows(2) {
                    if w[0].target() == w[1].target() {
                        let (ws, mv, nx) = w[0].target();
                        return Err(ValidationError::DuplicateBranch(name_of(*q), *s, ws, mv, name_of(nx)));
                    }
                }
            }
            Ok(())
        }

        match &mut rules {
            Rules::Tm(t) => {
                sort_and_dedup(t, &name_of)?;
                if let Some(((q, s), _)) = t.iter().find(|(_, bs)| bs.len() != 1) {
                    return Err(ValidationError::NotDeterministic(name_of(*q), *s));
                }
            }
            Rules::Ptm(t) => {
                sort_and_dedup(t, &name_of)?;
                for ((q, s), bs) in t.iter() {
                    let mut total = Rat::zero();
                    for b in bs {
                        if !b.weight.is_positive() || b.weight > Rat::one() {
                            return Err(ValidationError::ProbabilityRange(name_of(*q), *s, b.weight.clone()));
                        }
                        total += &b.weight;
                    }
                    if !total.is_one() {
                        return Err(ValidationError::ProbabilitySum(name_of(*q), *s, total));
                    }
                }
            }
            Rules::Qtm(t) => {
                sort_and_dedup(t, &name_of)?;
                for ((q, s), bs) in t.iter() {
                    if bs.iter().any(|b| b.weight.is_zero()) {
                        return Err(ValidationError::ZeroAmplitude(name_of(*q), *s));
                    }
                }
                for q in (0..n).map(StateId).filter(|&q| q != halt) {
                    for s in Symbol::ALL {
                        if !t.contains_key(&(q, s)) {
                            return Err(ValidationError::NotTotal(name_of(q), s));
                        }
                    }
                }
            }
        }

        Ok(MachineDesc { name: name.into(), states, start, halt, rules })
    }

    pub fn kind(&self) -> MachineKind {
        self.rules.kind()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id.index()]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(|i| StateId(i as u32))
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn halt(&self) -> StateId {
        self.halt
    }

    pub fn rules(&self) -> &Rules {
        &self.rules
    }

    pub fn tm_rules(&self) -> Option<&RuleTable<()>> {
        match &self.rules {
            Rules::Tm(t) => Some(t),
            _ => None,
        }
    }

    pub fn ptm_rules(&self) -> Option<&RuleTable<Rat>> {
        match &self.rules {
            Rules::Ptm(t) => Some(t),
            _ => None,
        }
    }

    pub fn qtm_rules(&self) -> Option<&RuleTable<CycQ8>> {
        match &self.rules {
            Rules::Qtm(t) => Some(t),
            _ => None,
        }
    }

    /// Every state other than the halting state.
    pub fn running_states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.states.len() as u32).map(StateId).filter(move |&q| q != self.halt)
    }

    /// Same machine under a different name.
    pub fn renamed(&self, name: impl Into<String>) -> MachineDesc {
        MachineDesc { name: name.into(), ..self.clone() }
    }

    /// Replaces the rule table, re-running validation.
    pub fn with_rules(&self, rules: Rules) -> Result<MachineDesc, ValidationError> {
        MachineDesc::new(self.name.clone(), self.states.clone(), self.start, self.halt, rules)
    }
}
