use std::collections::BTreeMap;
use std::fmt;

use super::desc::{StateId, Symbol};

/// Finite tape content. Blank cells are never stored, so two tapes are equal
/// exactly when they agree on every cell.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tape {
    cells: BTreeMap<i64, Symbol>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("input character {ch:?} at position {pos} is not a tape symbol (use 0, 1 or _)")]
pub struct InputError {
    pub pos: usize,
    pub ch: char,
}

impl Tape {
    pub fn blank() -> Self {
        Tape::default()
    }

    /// Input convention: the string occupies cells `0..len`.
    pub fn from_input(input: &str) -> Result<Tape, InputError> {
        let mut t = Tape::blank();
        for (pos, ch) in input.chars().enumerate() {
            let s = Symbol::from_char(ch).ok_or(InputError { pos, ch })?;
            t.set(pos as i64, s);
        }
        Ok(t)
    }

    pub fn get(&self, x: i64) -> Symbol {
        self.cells.get(&x).copied().unwrap_or(Symbol::Blank)
    }

    pub fn set(&mut self, x: i64, s: Symbol) {
        if s == Symbol::Blank {
            self.cells.remove(&x);
        } else {
            self.cells.insert(x, s);
        }
    }

    pub fn is_blank(&self) -> bool {
        self.cells.is_empty()
    }

    /// Non-blank cells in position order.
    pub fn cells(&self) -> impl Iterator<Item = (i64, Symbol)> + '_ {
        self.cells.iter().map(|(&x, &s)| (x, s))
    }

    pub fn bounds(&self) -> Option<(i64, i64)> {
        Some((*self.cells.keys().next()?, *self.cells.keys().next_back()?))
    }

    /// Parses the [`Display`](fmt::Display) form back into a tape.
    pub fn parse(text: &str) -> Option<Tape> {
        let (body, origin) = match text.rsplit_once('@') {
            Some((b, o)) => (b, o.parse::<i64>().ok()?),
            None => (text, 0),
        };
        let mut t = Tape::blank();
        for (i, ch) in body.chars().enumerate() {
            t.set(origin + i as i64, Symbol::from_char(ch)?);
        }
        (t.to_string() == text).then_some(t)
    }
}

impl fmt::Display for Tape {
    /// Cells from the leftmost to the rightmost non-blank symbol, followed by
    /// `@x` when the leftmost cell is not at position 0. The blank tape is "".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some((lo, hi)) = self.bounds() else {
            return Ok(());
        };
        for x in lo..=hi {
            write!(f, "{}", self.get(x))?;
        }
        if lo != 0 {
            write!(f, "@{lo}")?;
        }
        Ok(())
    }
}

/// A basis configuration `(h, q, x, T)`.
///
/// `age` counts the steps taken since halting and is zero while running.
/// It never shows up in outputs; it keeps the frozen halted branches
/// distinguishable so the global step stays injective.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Config {
    pub halted: bool,
    pub state: StateId,
    pub head: i64,
    pub tape: Tape,
    pub age: u64,
}

impl Config {
    pub fn initial(start: StateId, tape: Tape) -> Self {
        Config { halted: false, state: start, head: 0, tape, age: 0 }
    }

    pub fn read(&self) -> Symbol {
        self.tape.get(self.head)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blanks_are_not_stored() {
        let mut t = Tape::from_input("01").unwrap();
        t.set(1, Symbol::Blank);
        assert_eq!(t, Tape::from_input("0").unwrap());
        t.set(0, Symbol::Blank);
        assert_eq!(t, Tape::blank());
        assert_eq!(Tape::from_input("_1_").unwrap(), {
            let mut u = Tape::blank();
            u.set(1, Symbol::One);
            u
        });
    }

    #[test]
    fn rendering() {
        assert_eq!(Tape::blank().to_string(), "");
        assert_eq!(Tape::from_input("1101").unwrap().to_string(), "1101");
        let mut t = Tape::blank();
        t.set(3, Symbol::Zero);
        assert_eq!(t.to_string(), "0@3");
        t.set(-2, Symbol::One);
        assert_eq!(t.to_string(), "1____0@-2");
        for s in ["", "1", "0@3", "1____0@-2", "10_1"] {
            assert_eq!(Tape::parse(s).unwrap().to_string(), s);
        }
        assert!(Tape::parse("_1").is_none());
        assert!(Tape::parse("1@0").is_none());
    }

    #[test]
    fn bad_input() {
        assert_eq!(Tape::from_input("01x").unwrap_err(), InputError { pos: 2, ch: 'x' });
    }
}
