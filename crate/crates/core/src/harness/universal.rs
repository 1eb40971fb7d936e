//! The simulator as its own universal machine: a code `⟨n, m⟩` runs machine
//! `n` on the binary rendering of `m`.

use num_bigint::BigUint;

use crate::classical::{ptm_evolve_exact, tm_run, DEFAULT_MAX_SUPPORT};
use crate::error::{expect_kind, Error, Result};
use crate::machine::{decode_machine, pair_cantor, unpair_cantor, MachineDesc, MachineKind};
use crate::quantum::{run, MeasurementSchedule};

use super::dist::{
    distributions_equal, from_classical_dist, from_classical_outcome, from_outcome_dist, Dist, Observed,
};

/// Binary rendering of a natural number; zero is `"0"`.
pub fn binary_input(m: &BigUint) -> String {
    m.to_str_radix(2)
}

/// Runs `m` with the engine for its kind and returns what can be observed
/// within the horizon. Quantum runs measure the halt bit after every step.
pub fn run_engine(m: &MachineDesc, input: &str, horizon: u64) -> Result<Dist<Observed>> {
    Ok(match m.kind() {
        MachineKind::Tm => from_classical_outcome(&tm_run(m, input, horizon)?),
        MachineKind::Ptm => from_classical_dist(&ptm_evolve_exact(m, input, horizon, DEFAULT_MAX_SUPPORT)?),
        MachineKind::Qtm => from_outcome_dist(&run(
            m,
            input,
            &MeasurementSchedule::every(horizon),
            horizon,
            DEFAULT_MAX_SUPPORT,
        )?),
    })
}

pub type Decoder<'a> = &'a dyn Fn(&BigUint) -> Result<MachineDesc>;

fn standard_decoder(n: &BigUint) -> Result<MachineDesc> {
    Ok(decode_machine(n)?)
}

pub fn apply_universal(kind: MachineKind, code: &BigUint, horizon: u64) -> Result<Dist<Observed>> {
    apply_universal_with(kind, code, horizon, &standard_decoder)
}

pub fn apply_universal_with(kind: MachineKind, code: &BigUint, horizon: u64, decode: Decoder) -> Result<Dist<Observed>> {
    let (n, m) = unpair_cantor(code);
    let machine = decode(&n)?;
    expect_kind(machine.kind(), kind)?;
    run_engine(&machine, &binary_input(&m), horizon)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub machine: String,
    pub input: BigUint,
    pub universal: Result<Dist<Observed>, Error>,
    pub direct: Dist<Observed>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalityReport {
    pub kind: MachineKind,
    pub horizon: u64,
    pub checked: usize,
    pub discrepancies: Vec<Witness>,
}

impl UniversalityReport {
    pub fn passed(&self) -> bool {
        self.discrepancies.is_empty()
    }

    /// Agreement is only certified within the horizon; runs that have not
    /// halted by then are compared as "not halted", not as "undefined".
    pub const SCOPE: &'static str = "agreement within the stated horizon only";
}

pub fn universality_check(
    kind: MachineKind,
    family: &[BigUint],
    inputs: &[BigUint],
    horizon: u64,
) -> Result<UniversalityReport> {
    universality_check_with(kind, family, inputs, horizon, &standard_decoder)
}

/// Compares `apply_universal` (using `decode`) against running each family
/// member directly. Decoding failures of the universal path are recorded as
/// discrepancies, not raised.
pub fn universality_check_with(
    kind: MachineKind,
    family: &[BigUint],
    inputs: &[BigUint],
    horizon: u64,
    decode: Decoder,
) -> Result<UniversalityReport> {
    let mut discrepancies = Vec::new();
    let mut checked = 0;
    for n in family {
        let machine = decode_machine(n)?;
        expect_kind(machine.kind(), kind)?;
        for m in inputs {
            let direct = run_engine(&machine, &binary_input(m), horizon)?;
            let universal = apply_universal_with(kind, &pair_cantor(n, m), horizon, decode);
            let same = match &universal {
                Ok(u) => distributions_equal(u, &direct)?,
                Err(_) => false,
            };
            checked += 1;
            if !same {
                discrepancies.push(Witness { machine: machine.name().to_string(), input: m.clone(), universal, direct });
            }
        }
    }
    Ok(UniversalityReport { kind, horizon, checked, discrepancies })
}
