//! Line-oriented machine description format.
//!
//! ```text
//! # Hadamard branch, then halt
//! kind qtm
//! name h1
//! states q0 qH
//! start q0
//! halt qH
//! rule q0 _ -> (qH, 0, S, 1/r2) + (qH, 1, S, 1/r2)
//! ```
//!
//! Branch tuples are `(next, write, move[, weight])`. Deterministic machines
//! omit the weight; PTM weights are rational probabilities; QTM weights are
//! amplitude literals. `start` defaults to the first declared state.
//!
//! [`to_canonical_text`] is the bit-exact serialization: headers in fixed
//! order, states in index order, rules sorted by `(state, symbol)` and
//! branches by `(write, move, next)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::desc::{Branch, MachineDesc, MachineKind, Move, RuleTable, Rules, StateId, Symbol, ValidationError};
use crate::amplitude::{parse_amplitude, AmplitudeError};
use crate::{CycQ8, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("missing `{0}` header")]
    MissingHeader(&'static str),
    #[error("`{0}` header given twice")]
    RepeatedHeader(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate rule for ({0}, {1})")]
    DuplicateRule(String, Symbol),
    #[error("amplitude literal: {0}")]
    Amplitude(AmplitudeError),
    #[error("{0}")]
    Invalid(ValidationError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

struct RawBranch {
    next: String,
    next_col: usize,
    write: Symbol,
    mv: Move,
    weight: Option<(String, usize)>,
}

struct RawRule {
    line: usize,
    state: String,
    state_col: usize,
    symbol: Symbol,
    branches: Vec<RawBranch>,
}

/// Cursor over one line; columns are 1-based character positions.
struct Line<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    _src: &'a str,
}

impl<'a> Line<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Line { chars: src.chars().collect(), pos: 0, line, _src: src }
    }

    fn err(&self, col: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, column: col, kind }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.err(self.pos + 1, ParseErrorKind::Syntax(msg.into()))
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn word(&mut self) -> Option<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|&c| c.is_alphanumeric() || c == '_' || c == '\'' || c == '-' && self.peek_next_not('>'))
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| (self.chars[start..self.pos].iter().collect(), start + 1))
    }

    fn peek_next_not(&self, c: char) -> bool {
        self.chars.get(self.pos + 1) != Some(&c)
    }

    fn expect(&mut self, tok: &str) -> Result<(), ParseError> {
        self.skip_ws();
        let t: Vec<char> = tok.chars().collect();
        if self.chars[self.pos.min(self.chars.len())..].starts_with(&t) {
            self.pos += t.len();
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{tok}`")))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn symbol(&mut self) -> Result<Symbol, ParseError> {
        self.skip_ws();
        let col = self.pos + 1;
        let c = self.chars.get(self.pos).copied();
        let after = self.chars.get(self.pos + 1).copied();
        match c.and_then(Symbol::from_char) {
            Some(s) if !after.is_some_and(|a| a.is_alphanumeric()) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err(col, ParseErrorKind::Syntax("expected a tape symbol `0`, `1` or `_`".into()))),
        }
    }

    fn movement(&mut self) -> Result<Move, ParseError> {
        self.skip_ws();
        let col = self.pos + 1;
        match self.word() {
            Some((w, _)) if w.len() == 1 => Move::from_char(w.chars().next().unwrap())
                .ok_or_else(|| self.err(col, ParseErrorKind::Syntax("expected a move `L`, `S` or `R`".into()))),
            _ => Err(self.err(col, ParseErrorKind::Syntax("expected a move `L`, `S` or `R`".into()))),
        }
    }

    /// Text up to the `)` closing the current branch tuple.
    fn weight_text(&mut self) -> Result<(String, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut depth = 0usize;
        while let Some(&c) = self.chars.get(self.pos) {
            match c {
                '(' => depth += 1,
                ')' if depth == 0 => break,
                ')' => depth -= 1,
                _ => {}
            }
            self.pos += 1;
        }
        if self.pos >= self.chars.len() {
            return Err(self.syntax("unterminated branch, expected `)`"));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        Ok((text.trim_end().to_string(), start + 1))
    }

    fn branch(&mut self) -> Result<RawBranch, ParseError> {
        self.expect("(")?;
        let (next, next_col) = self.word().ok_or_else(|| self.syntax("expected a state name"))?;
        self.expect(",")?;
        let write = self.symbol()?;
        self.expect(",")?;
        let mv = self.movement()?;
        let weight = if self.eat(',') { Some(self.weight_text()?) } else { None };
        self.expect(")")?;
        Ok(RawBranch { next, next_col, write, mv, weight })
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses and validates a machine description.
pub fn parse_machine(source: &str) -> Result<MachineDesc, ParseError> {
    let mut kind: Option<(MachineKind, usize)> = None;
    let mut name: Option<String> = None;
    let mut states: Option<(Vec<(String, usize)>, usize)> = None;
    let mut start: Option<(String, usize, usize)> = None;
    let mut halt: Option<(String, usize, usize)> = None;
    let mut raw_rules: Vec<RawRule> = Vec::new();

    for (idx, full) in source.lines().enumerate() {
        let lineno = idx + 1;
        let text = strip_comment(full);
        let mut l = Line::new(text, lineno);
        if l.at_end() {
            continue;
        }
        let (head, head_col) = l.word().ok_or_else(|| l.syntax("expected a header keyword or `rule`"))?;
        let once = |present: bool| -> Result<(), ParseError> {
            if present {
                Err(ParseError { line: lineno, column: head_col, kind: ParseErrorKind::RepeatedHeader(head.clone()) })
            } else {
                Ok(())
            }
        };
        match head.as_str() {
            "kind" => {
                once(kind.is_some())?;
                let (w, col) = l.word().ok_or_else(|| l.syntax("expected `tm`, `ptm` or `qtm`"))?;
                let k = MachineKind::from_keyword(&w)
                    .ok_or_else(|| l.err(col, ParseErrorKind::Syntax(format!("unknown machine kind `{w}`"))))?;
                kind = Some((k, lineno));
            }
            "name" => {
                once(name.is_some())?;
                let rest: String = l.chars[l.pos..].iter().collect();
                let rest = rest.trim();
                if rest.is_empty() {
                    return Err(l.syntax("expected a machine name"));
                }
                name = Some(rest.to_string());
                l.pos = l.chars.len();
            }
            "states" => {
                once(states.is_some())?;
                let mut list = Vec::new();
                while !l.at_end() {
                    let w = l.word().ok_or_else(|| l.syntax("expected a state name"))?;
                    list.push(w);
                }
                if list.is_empty() {
                    return Err(l.syntax("expected at least one state"));
                }
                states = Some((list, lineno));
            }
            "start" | "halt" => {
                once(if head == "start" { start.is_some() } else { halt.is_some() })?;
                let (w, col) = l.word().ok_or_else(|| l.syntax("expected a state name"))?;
                let v = Some((w, lineno, col));
                if head == "start" {
                    start = v;
                } else {
                    halt = v;
                }
            }
            "rule" => {
                let (state, state_col) = l.word().ok_or_else(|| l.syntax("expected a state name"))?;
                let symbol = l.symbol()?;
                l.expect("->")?;
                let mut branches = vec![l.branch()?];
                while l.eat('+') {
                    branches.push(l.branch()?);
                }
                raw_rules.push(RawRule { line: lineno, state, state_col, symbol, branches });
            }
            other => {
                return Err(l.err(head_col, ParseErrorKind::Syntax(format!("unknown keyword `{other}`"))));
            }
        }
        if !l.at_end() {
            return Err(l.syntax("unexpected trailing text"));
        }
    }

    let at = |line: usize, column: usize, kind: ParseErrorKind| ParseError { line, column, kind };
    let (kind, _) = kind.ok_or(at(1, 1, ParseErrorKind::MissingHeader("kind")))?;
    let name = name.ok_or(at(1, 1, ParseErrorKind::MissingHeader("name")))?;
    let (state_list, _) = states.ok_or(at(1, 1, ParseErrorKind::MissingHeader("states")))?;
    let (halt_name, halt_line, halt_col) = halt.ok_or(at(1, 1, ParseErrorKind::MissingHeader("halt")))?;

    let mut index: BTreeMap<&str, StateId> = BTreeMap::new();
    for (i, (s, _)) in state_list.iter().enumerate() {
        index.insert(s.as_str(), StateId(i as u32));
    }
    let lookup = |n: &str, line: usize, col: usize| -> Result<StateId, ParseError> {
        index.get(n).copied().ok_or_else(|| at(line, col, ParseErrorKind::UnknownState(n.to_string())))
    };
    let halt_id = lookup(&halt_name, halt_line, halt_col)?;
    let start_id = match &start {
        Some((s, line, col)) => lookup(s, *line, *col)?,
        None => StateId(0),
    };

    let mut rule_lines: BTreeMap<(StateId, Symbol), usize> = BTreeMap::new();
    let mut tm: RuleTable<()> = RuleTable::new();
    let mut ptm: RuleTable<Rat> = RuleTable::new();
    let mut qtm: RuleTable<CycQ8> = RuleTable::new();

    for r in &raw_rules {
        let q = lookup(&r.state, r.line, r.state_col)?;
        if rule_lines.insert((q, r.symbol), r.line).is_some() {
            return Err(at(r.line, r.state_col, ParseErrorKind::DuplicateRule(r.state.clone(), r.symbol)));
        }
        let mut bt = Vec::new();
        let mut bp = Vec::new();
        let mut bq = Vec::new();
        for b in &r.branches {
            let next = lookup(&b.next, r.line, b.next_col)?;
            match (kind, &b.weight) {
                (MachineKind::Tm, None) => bt.push(Branch::new(next, b.write, b.mv, ())),
                (MachineKind::Tm, Some((_, col))) => {
                    return Err(at(r.line, *col, ParseErrorKind::Syntax("deterministic branches take no weight".into())))
                }
                (_, None) => {
                    return Err(at(r.line, b.next_col, ParseErrorKind::Syntax("branch needs a weight".into())));
                }
                (MachineKind::Ptm, Some((w, col))) => {
                    let v = parse_amplitude(w).map_err(|e| amp_err(r.line, *col, e))?;
                    let p = v.as_scalar().cloned().ok_or_else(|| {
                        at(r.line, *col, ParseErrorKind::Syntax(format!("probability `{w}` is not rational")))
                    })?;
                    bp.push(Branch::new(next, b.write, b.mv, p));
                }
                (MachineKind::Qtm, Some((w, col))) => {
                    let v = parse_amplitude(w).map_err(|e| amp_err(r.line, *col, e))?;
                    bq.push(Branch::new(next, b.write, b.mv, v));
                }
            }
        }
        match kind {
            MachineKind::Tm => {
                tm.insert((q, r.symbol), bt);
            }
            MachineKind::Ptm => {
                ptm.insert((q, r.symbol), bp);
            }
            MachineKind::Qtm => {
                qtm.insert((q, r.symbol), bq);
            }
        }
    }

    let rules = match kind {
        MachineKind::Tm => Rules::Tm(tm),
        MachineKind::Ptm => Rules::Ptm(ptm),
        MachineKind::Qtm => Rules::Qtm(qtm),
    };
    let names: Vec<String> = state_list.into_iter().map(|(s, _)| s).collect();
    MachineDesc::new(name, names.clone(), start_id, halt_id, rules).map_err(|e| {
        let line = e
            .source_state()
            .and_then(|(s, y)| names.iter().position(|n| n == s).map(|i| (StateId(i as u32), y)))
            .and_then(|k| rule_lines.get(&k).copied())
            .unwrap_or(1);
        at(line, 1, ParseErrorKind::Invalid(e))
    })
}

fn amp_err(line: usize, col: usize, e: AmplitudeError) -> ParseError {
    ParseError { line, column: col + e.column - 1, kind: ParseErrorKind::Amplitude(e) }
}

/// Canonical text form; `parse_machine(to_canonical_text(m)) == m`.
pub fn to_canonical_text(m: &MachineDesc) -> String {
    let mut out = String::new();
    writeln!(out, "kind {}", m.kind()).unwrap();
    writeln!(out, "name {}", m.name()).unwrap();
    writeln!(out, "states {}", m.states().join(" ")).unwrap();
    writeln!(out, "start {}", m.state_name(m.start())).unwrap();
    writeln!(out, "halt {}", m.state_name(m.halt())).unwrap();

    fn rows<W>(out: &mut String, m: &MachineDesc, t: &RuleTable<W>, w: impl Fn(&W) -> Option<String>) {
        for ((q, s), bs) in t {
            write!(out, "rule {} {} ->", m.state_name(*q), s).unwrap();
            for (i, b) in bs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" +");
                }
                write!(out, " ({}, {}, {}", m.state_name(b.next), b.write, b.mv).unwrap();
                if let Some(text) = w(&b.weight) {
                    write!(out, ", {text}").unwrap();
                }
                out.push(')');
            }
            out.push('\n');
        }
    }
    match m.rules() {
        Rules::Tm(t) => rows(&mut out, m, t, |_| None),
        Rules::Ptm(t) => rows(&mut out, m, t, |p| Some(p.to_string())),
        Rules::Qtm(t) => rows(&mut out, m, t, |a| Some(a.to_string())),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const WRITE_ONE: &str = "\
kind tm
name write-one
states q0 qH
halt qH
rule q0 _ -> (qH, 1, S)
";

    #[test]
    fn smallest_machine() {
        let m = parse_machine(WRITE_ONE).unwrap();
        assert_eq!(m.kind(), MachineKind::Tm);
        assert_eq!(m.rules().len(), 1);
        assert_eq!(m.start(), StateId(0));
        assert_eq!(m.halt(), StateId(1));
    }

    #[test]
    fn fair_coin_ptm_accepted() {
        let src = "kind ptm\nname coin\nstates q0 qH\nhalt qH\nrule q0 _ -> (qH, 0, S, 1/2) + (qH, 1, S, 1/2)\n";
        let m = parse_machine(src).unwrap();
        assert_eq!(m.ptm_rules().unwrap().values().next().unwrap().len(), 2);
    }

    #[test]
    fn probability_sum_rejected() {
        let src = "kind ptm\nname bad\nstates q0 qH\nhalt qH\n\nrule q0 _ -> (qH, 0, S, 1/2) + (qH, 1, S, 1/3)\n";
        let e = parse_machine(src).unwrap_err();
        assert_eq!(e.line, 6);
        assert!(matches!(e.kind, ParseErrorKind::Invalid(ValidationError::ProbabilitySum(..))));
        assert!(e.to_string().contains("sum != 1"));
    }

    #[test]
    fn error_cases() {
        let base = "kind tm\nname x\nstates q0 qH\nhalt qH\n";
        let cases: [(&str, fn(&ParseErrorKind) -> bool); 9] = [
            ("rule q0 _ -> (q9, 1, S)", |k| matches!(k, ParseErrorKind::UnknownState(_))),
            ("rule q0 _ -> (qH, 1, S)\nrule q0 _ -> (qH, 0, S)", |k| matches!(k, ParseErrorKind::DuplicateRule(..))),
            ("rule qH _ -> (q0, 1, S)", |k| matches!(k, ParseErrorKind::Invalid(ValidationError::HaltHasRule(..)))),
            ("rule q0 _ -> (qH, 2, S)", |k| matches!(k, ParseErrorKind::Syntax(_))),
            ("rule q0 _ -> (qH, 1, X)", |k| matches!(k, ParseErrorKind::Syntax(_))),
            ("rule q0 _ -> (qH, 1, S", |k| matches!(k, ParseErrorKind::Syntax(_))),
            ("rule q0 _ -> (qH, 1, S, 1)", |k| matches!(k, ParseErrorKind::Syntax(_))),
            ("rule q0 _ -> (qH, 1, S) + (qH, 0, S)", |k| {
                matches!(k, ParseErrorKind::Invalid(ValidationError::NotDeterministic(..)))
            }),
            ("frobnicate", |k| matches!(k, ParseErrorKind::Syntax(_))),
        ];
        for (extra, pred) in cases {
            let e = parse_machine(&format!("{base}{extra}\n")).unwrap_err();
            assert!(pred(&e.kind), "{extra}: {e}");
            assert!(e.line >= 5, "{extra}: {e}");
        }
    }

    #[test]
    fn syntax_error_has_column() {
        let e = parse_machine("kind tm\nname x\nstates q0 qH\nhalt qH\nrule q0 _ => (qH, 1, S)\n").unwrap_err();
        assert_eq!((e.line, e.column), (5, 11));
    }

    #[test]
    fn missing_headers() {
        let e = parse_machine("name x\nstates q0 qH\nhalt qH\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingHeader("kind"));
        let e = parse_machine("kind tm\nname x\nstates q0 qH\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingHeader("halt"));
        let e = parse_machine("kind tm\nkind tm\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::RepeatedHeader(_)));
    }

    #[test]
    fn qtm_must_be_total() {
        let src = "kind qtm\nname h\nstates q0 qH\nhalt qH\nrule q0 _ -> (qH, 0, S, 1/r2) + (qH, 1, S, 1/r2)\n";
        let e = parse_machine(src).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Invalid(ValidationError::NotTotal(..))));
    }

    #[test]
    fn qtm_amplitude_errors() {
        let base = "kind qtm\nname h\nstates q0 qH\nhalt qH\n";
        let e = parse_machine(&format!("{base}rule q0 _ -> (qH, 0, S, sqrt(3))\n")).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Amplitude(_)));
        assert_eq!(e.column, 25);
        let e = parse_machine(&format!("{base}rule q0 _ -> (qH, 0, S, 1-1)\n")).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Invalid(ValidationError::ZeroAmplitude(..))));
        let e = parse_machine(&format!("{base}rule q0 _ -> (qH, 0, S, 1) + (qH, 0, S, 1)\n")).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Invalid(ValidationError::DuplicateBranch(..))));
    }

    #[test]
    fn nested_parens_in_weight() {
        let src = "kind qtm\nname p\nstates q0 qH\nhalt qH\n\
                   rule q0 _ -> (qH, 0, S, (1+i)/2) + (qH, 1, S, ((1-i))/2)\n\
                   rule q0 0 -> (qH, 0, S, (1-i)/2) + (qH, 1, S, (1+i)/2)\n\
                   rule q0 1 -> (qH, _, S, 1)\n";
        let m = parse_machine(src).unwrap();
        assert_eq!(parse_machine(&to_canonical_text(&m)).unwrap(), m);
    }

    #[test]
    fn canonical_form_is_a_fixpoint() {
        let src = "# comment\nkind ptm   # trailing\nname  two coins \nhalt qH\nstates q0 q1 qH\n\
                   rule q1 _ -> (qH, 1, S, 1/2) + (qH, 0, S, 1/2)\n\
                   rule q0 _ -> (q1, 1, R, 1/2) + (q1, 0, R, 1/2)\n";
        let m = parse_machine(src).unwrap();
        let text = to_canonical_text(&m);
        assert_eq!(
            text,
            "kind ptm\nname two coins\nstates q0 q1 qH\nstart q0\nhalt qH\n\
             rule q0 _ -> (q1, 0, R, 1/2) + (q1, 1, R, 1/2)\n\
             rule q1 _ -> (qH, 0, S, 1/2) + (qH, 1, S, 1/2)\n"
        );
        assert_eq!(parse_machine(&text).unwrap(), m);
        assert_eq!(to_canonical_text(&parse_machine(&text).unwrap()), text);
    }
}
