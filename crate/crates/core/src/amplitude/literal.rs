//! Amplitude literals.
//!
//! ```text
//! amp      := term (("+" | "-") term)*
//! term     := factor (("*" | "/") factor)*
//! factor   := rational | "i" | "r2" | "(" amp ")" | "-" factor
//! rational := integer ["/" positive-integer]
//! ```
//!
//! `i` is `ζ²` and `r2` is `√2 = ζ − ζ³`. Evaluation is exact.

use std::fmt;

use num_bigint::BigInt;

use crate::scalar::Scalar;
use crate::{CycQ8, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("column {column}: {message}")]
pub struct AmplitudeError {
    /// 1-based character column within the literal.
    pub column: usize,
    pub message: String,
}

/// Parses and evaluates an amplitude literal such as `(1+i)/2` or `-1/r2`.
pub fn parse_amplitude(src: &str) -> Result<CycQ8, AmplitudeError> {
    let mut p = Parser { chars: src.chars().collect(), pos: 0 };
    p.skip_ws();
    if p.at_end() {
        return Err(p.err("empty amplitude"));
    }
    let v = p.amp()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.err(format!("unexpected `{}`", p.chars[p.pos])));
    }
    Ok(v)
}

/// Parses a literal that must be rational (no `i`, no `r2` left after evaluation).
pub fn parse_rational(src: &str) -> Result<Rat, AmplitudeError> {
    let v = parse_amplitude(src)?;
    v.as_scalar().cloned().ok_or_else(|| AmplitudeError {
        column: 1,
        message: format!("`{src}` is not a rational number"),
    })
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn err(&self, message: impl Into<String>) -> AmplitudeError {
        AmplitudeError { column: self.pos + 1, message: message.into() }
    }

    fn amp(&mut self) -> Result<CycQ8, AmplitudeError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<CycQ8, AmplitudeError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc * self.factor()?;
                }
                Some('/') => {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let d = self.factor()?;
                    acc = acc.checked_div(&d).ok_or(AmplitudeError {
                        column: at + 1,
                        message: "division by zero".into(),
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<CycQ8, AmplitudeError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.err("unexpected end of amplitude")),
            Some('-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some('(') => {
                self.pos += 1;
                let v = self.amp()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let digits: String = self.chars[start..self.pos].iter().collect();
                let n: BigInt = digits.parse().expect("ascii digits");
                Ok(CycQ8::from_scalar(Rat::from_integer(n)))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let word: String = self.chars[start..self.pos].iter().collect();
                match word.as_str() {
                    "i" => Ok(CycQ8::i()),
                    "r2" => Ok(CycQ8::sqrt2()),
                    _ => Err(AmplitudeError {
                        column: start + 1,
                        message: format!(
                            "`{word}` is outside Q(zeta8); amplitudes are built from integers, `i` and `r2` \
                             (extend `amplitude::literal` together with the field type to support more)"
                        ),
                    }),
                }
            }
            Some(c) => Err(self.err(format!("unexpected `{c}`"))),
        }
    }
}

/// Writes `Σ coeff·basis` in literal syntax; an empty basis name means `1`.
pub(crate) fn write_terms<T: Scalar + fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    terms: &[(T, &str)],
) -> fmt::Result {
    let mut first = true;
    for (c, basis) in terms {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if first {
            if c.is_negative() {
                f.write_str("-")?;
            }
        } else if c.is_negative() {
            f.write_str(" - ")?;
        } else {
            f.write_str(" + ")?;
        }
        first = false;
        if basis.is_empty() {
            write!(f, "{mag}")?;
        } else if mag.is_one() {
            f.write_str(basis)?;
        } else {
            write!(f, "{mag}*{basis}")?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}
