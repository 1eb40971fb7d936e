//! Numbering of machine descriptions.
//!
//! A code is the big-endian integer of the bytes `0x51 0x01` followed by the
//! canonical text. The leading magic byte is nonzero, so no information is
//! lost to leading zeros.

use num_bigint::BigUint;

use super::desc::MachineDesc;
use super::dsl::{parse_machine, to_canonical_text};

pub const MAGIC: u8 = 0x51;
pub const VERSION: u8 = 0x01;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a machine code: {0}")]
pub struct NotAMachineCode(pub String);

pub fn encode_machine(m: &MachineDesc) -> BigUint {
    let mut bytes = vec![MAGIC, VERSION];
    bytes.extend_from_slice(to_canonical_text(m).as_bytes());
    BigUint::from_bytes_be(&bytes)
}

pub fn decode_machine(n: &BigUint) -> Result<MachineDesc, NotAMachineCode> {
    let bytes = n.to_bytes_be();
    match bytes.as_slice() {
        [MAGIC, VERSION, ..] => {}
        _ => return Err(NotAMachineCode("bad header".into())),
    }
    let text = std::str::from_utf8(&bytes[2..]).map_err(|_| NotAMachineCode("payload is not UTF-8".into()))?;
    let m = parse_machine(text).map_err(|e| NotAMachineCode(format!("payload does not parse ({e})")))?;
    // Only canonical texts are in the range; anything else would make the
    // numbering many-to-one.
    if to_canonical_text(&m) != text {
        return Err(NotAMachineCode("payload is not in canonical form".into()));
    }
    Ok(m)
}
