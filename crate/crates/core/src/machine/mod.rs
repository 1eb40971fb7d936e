//! Machine descriptions, configurations, the text format and numberings.

pub mod config;
pub mod desc;
pub mod dsl;
pub mod godel;
pub mod pairing;

pub use config::{Config, InputError, Tape};
pub use desc::{
    Branch, MachineDesc, MachineKind, Move, RuleTable, Rules, Source, StateId, Symbol, ValidationError,
};
pub use dsl::{parse_machine, to_canonical_text, ParseError, ParseErrorKind};
pub use godel::{decode_machine, encode_machine, NotAMachineCode};
pub use pairing::{pair_cantor, pair_exp, unpair_cantor, unpair_exp, NotInRange};
