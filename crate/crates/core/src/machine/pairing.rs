//! Pairing functions `ℕ × ℕ → ℕ`.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0} is not in range: it is not of the form 2^x * 3^y")]
pub struct NotInRange(pub BigUint);

/// `2^x · 3^y`. Injective, not surjective.
pub fn pair_exp(x: u32, y: u32) -> BigUint {
    BigUint::from(2u32).pow(x) * BigUint::from(3u32).pow(y)
}

pub fn unpair_exp(n: &BigUint) -> Result<(u32, u32), NotInRange> {
    let out_of_range = || NotInRange(n.clone());
    let x = n.trailing_zeros().ok_or_else(out_of_range)?;
    let rest = n >> x;
    // 3^y has about y·log₂3 bits, so only a couple of exponents can match.
    let guess = ((rest.bits() as f64 - 1.0) / 3f64.log2()).floor() as u32;
    for y in guess.saturating_sub(1)..=guess + 1 {
        if BigUint::from(3u32).pow(y) == rest {
            let x = u32::try_from(x).map_err(|_| out_of_range())?;
            return Ok((x, y));
        }
    }
    Err(out_of_range())
}

/// The diagonal bijection `(x+y)(x+y+1)/2 + y`.
pub fn pair_cantor(x: &BigUint, y: &BigUint) -> BigUint {
    let s = x + y;
    (&s * (&s + 1u32)) / 2u32 + y
}

pub fn unpair_cantor(n: &BigUint) -> (BigUint, BigUint) {
    // w = ⌊(√(8n+1) − 1)/2⌋ is the index of the diagonal holding n.
    let w = ((n * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    let t = (&w * (&w + 1u32)) / 2u32;
    let y = n - &t;
    let x = &w - &y;
    (x, y)
}

/// Convenience for small arguments.
pub fn unpair_cantor_u64(n: u64) -> (u64, u64) {
    let (x, y) = unpair_cantor(&BigUint::from(n));
    (x.to_u64().expect("fits"), y.to_u64().expect("fits"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn exp_pairing() {
        assert_eq!(pair_exp(2, 1), big(12));
        assert_eq!(pair_exp(0, 0), big(1));
        assert!(unpair_exp(&big(5)).is_err());
        assert!(unpair_exp(&big(0)).is_err());
        assert_eq!(unpair_exp(&big(12)).unwrap(), (2, 1));
        for x in 0..20 {
            for y in 0..20 {
                assert_eq!(unpair_exp(&pair_exp(x, y)).unwrap(), (x, y));
            }
        }
    }

    #[test]
    fn cantor_round_trip() {
        assert_eq!(pair_cantor(&big(0), &big(0)), big(0));
        for x in 0..1000u64 {
            for y in 0..1000u64 {
                let n = pair_cantor(&big(x), &big(y));
                assert_eq!(unpair_cantor(&n), (big(x), big(y)));
            }
        }
    }

    #[test]
    fn cantor_surjective_prefix() {
        // Count diagonal by diagonal, independently of the closed-form inverse.
        let (mut x, mut y) = (0u64, 0u64);
        for n in 0..1_000_000u64 {
            assert_eq!(pair_cantor(&big(x), &big(y)), big(n));
            if x == 0 {
                x = y + 1;
                y = 0;
            } else {
                x -= 1;
                y += 1;
            }
        }
    }

    #[test]
    fn large_values() {
        let x = BigUint::parse_bytes(b"123456789012345678901234567890", 10).unwrap();
        let y = big(77);
        assert_eq!(unpair_cantor(&pair_cantor(&x, &y)), (x, y));
    }
}
