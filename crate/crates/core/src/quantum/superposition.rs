use std::cell::OnceCell;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::machine::Config;
use crate::{CycQ8, RealQ2};

/// A finite, possibly unnormalized superposition of configurations.
///
/// Zero amplitudes are never stored. The squared norm is computed on first
/// use and cached.
#[derive(Clone, Debug, Default)]
pub struct Superposition {
    terms: BTreeMap<Config, CycQ8>,
    norm_sq: OnceCell<RealQ2>,
}

impl PartialEq for Superposition {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for Superposition {}

fn sum_norms(terms: &BTreeMap<Config, CycQ8>) -> RealQ2 {
    terms.values().map(CycQ8::norm_sq).sum()
}

impl Superposition {
    pub fn new() -> Self {
        Superposition::default()
    }

    pub fn point(c: Config) -> Self {
        Superposition::from_terms([(c, CycQ8::one())])
    }

    /// Sums amplitudes of repeated configurations and drops exact zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (Config, CycQ8)>) -> Self {
        let mut map: BTreeMap<Config, CycQ8> = BTreeMap::new();
        for (c, a) in terms {
            match map.get_mut(&c) {
                Some(v) => *v += &a,
                None => {
                    map.insert(c, a);
                }
            }
        }
        map.retain(|_, a| !a.is_zero());
        Superposition { terms: map, norm_sq: OnceCell::new() }
    }

    pub fn terms(&self) -> &BTreeMap<Config, CycQ8> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Config, CycQ8> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn norm_sq(&self) -> &RealQ2 {
        self.norm_sq.get_or_init(|| sum_norms(&self.terms))
    }

    pub fn amplitude(&self, c: &Config) -> CycQ8 {
        self.terms.get(c).cloned().unwrap_or_default()
    }

    /// Recomputes the squared norm from scratch and compares it with the
    /// cached value, if any.
    pub fn invariant_holds(&self) -> bool {
        let fresh_ok = self.norm_sq.get().is_none_or(|n| *n == sum_norms(&self.terms));
        fresh_ok && self.terms.values().all(|a| !a.is_zero())
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Superposition) -> CycQ8 {
        let (small, large, flip) =
            if self.len() <= other.len() { (self, other, false) } else { (other, self, true) };
        let mut acc = CycQ8::zero();
        for (c, a) in &small.terms {
            if let Some(b) = large.terms.get(c) {
                acc = acc + if flip { b.inner(a) } else { a.inner(b) };
            }
        }
        acc
    }

    pub fn scaled(&self, k: &CycQ8) -> Superposition {
        Superposition::from_terms(self.terms.iter().map(|(c, a)| (c.clone(), a * k)))
    }

    /// Splits into (halted, running) parts.
    pub fn split_halted(&self) -> (Superposition, Superposition) {
        let (h, r): (Vec<_>, Vec<_>) = self.terms.iter().map(|(c, a)| (c.clone(), a.clone())).partition(|(c, _)| c.halted);
        (Superposition::from_terms(h), Superposition::from_terms(r))
    }
}

/// `|⟨ψ|φ⟩|² / (‖ψ‖²‖φ‖²)`, exactly.
pub fn fidelity(psi: &Superposition, phi: &Superposition) -> Result<RealQ2> {
    if psi.is_empty() || phi.is_empty() {
        return Err(Error::Structural("fidelity of an empty superposition".into()));
    }
    let overlap = psi.inner(phi).norm_sq();
    let denom = psi.norm_sq() * phi.norm_sq();
    Ok(overlap.checked_div(&denom).expect("nonempty states have positive norm"))
}
